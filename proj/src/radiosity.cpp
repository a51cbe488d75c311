#include "nlos/radiosity.hpp"

#include <fmt/format.h>

#include <ostream>

namespace nlos {

namespace {

std::vector<double> los_gather(const Transport& t, std::span<const double> in) {
  const int n = t.size();
  if (static_cast<int>(in.size()) != n) {
    throw std::invalid_argument("bounce vector length does not match patch count");
  }
  const auto& patches = t.scene().patches;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double gathered = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i != j) {
        gathered += in[i] * t.los(j, i);
      }
    }
    out[j] = patches[j].reflectance * gathered;
  }
  return out;
}

double camera_sum(const Transport& t, const std::vector<double>& v) {
  double s = 0.0;
  for (int i = 0; i < t.size(); ++i) {
    if (t.camera_visible(i)) {
      s += v[i];
    }
  }
  return s;
}

}  // namespace

Transport::Transport(Scene scene) : Transport(std::make_shared<const Scene>(std::move(scene))) {}

Transport::Transport(std::shared_ptr<const Scene> scene) : scene_(std::move(scene)) {
  build();
}

void Transport::build() {
  const auto& patches = scene_->patches;
  n_ = static_cast<int>(patches.size());
  factors_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  for (int a = 0; a < n_; ++a) {
    for (int b = a + 1; b < n_; ++b) {
      const double g = unoccluded_form_factor(patches[a], patches[b]);
      if (g == 0.0 || visibility(patches[a], patches[b], *scene_) == 0) {
        continue;
      }
      factors_[static_cast<std::size_t>(a) * n_ + b] = g;
      factors_[static_cast<std::size_t>(b) * n_ + a] = unoccluded_form_factor(patches[b], patches[a]);
    }
  }
  const Vec3& eye = scene_->camera.position;
  camera_visible_.assign(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    const Patch& p = patches[i];
    camera_visible_[i] =
        (hemisphere_visible(p.center, eye, p.normal) == 1 && !ray_occluded(p.center, eye, *scene_)) ? 1 : 0;
  }
}

ProxyCoupling Transport::couple(const NlosProxy& proxy) const {
  ProxyCoupling c;
  c.proxy = proxy;
  c.to_proxy.assign(static_cast<std::size_t>(n_), 0.0);
  c.from_proxy.assign(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const Patch& p = scene_->patches[i];
    const double g = unoccluded_form_factor(proxy, p);
    if (g == 0.0 || visibility(proxy, p, *scene_) == 0) {
      continue;
    }
    c.to_proxy[i] = g;
    c.from_proxy[i] = unoccluded_form_factor(p, proxy);
  }
  return c;
}

NlosProxy Transport::voxel_proxy(int voxel) const {
  return nlos::voxel_proxy(scene_->grid, voxel, scene_->wall_centroid());
}

std::vector<double> RadiosityReport::patch_totals() const {
  std::vector<double> out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    out[i] = first[i] + second[i] + third_los[i] + third_nlos[i];
  }
  return out;
}

std::vector<double> first_bounce(const Scene& scene, const IlluminationPlan& plan) {
  const int n = scene.patch_count();
  std::vector<double> source(static_cast<std::size_t>(n), 0.0);
  for (const PlanEntry& e : plan.entries) {
    if (e.patch < 0 || e.patch >= n) {
      throw std::out_of_range(fmt::format("plan patch {} outside [0, {})", e.patch, n));
    }
    source[e.patch] += e.exitance;
  }
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const Patch& p = scene.patches[i];
    out[i] = p.emission + p.reflectance * source[i];
  }
  return out;
}

std::vector<double> second_bounce(const Transport& transport, std::span<const double> first) {
  return los_gather(transport, first);
}

std::vector<double> second_bounce(const Scene& scene, std::span<const double> first) {
  return los_gather(Transport(scene), first);
}

std::vector<double> third_bounce_los(const Transport& transport, std::span<const double> second) {
  return los_gather(transport, second);
}

std::vector<double> third_bounce_los(const Scene& scene, std::span<const double> second) {
  return los_gather(Transport(scene), second);
}

NlosBounce nlos_bounce(const ProxyCoupling& c, const Scene& scene, std::span<const double> first) {
  const std::size_t n = scene.patches.size();
  if (first.size() != n || c.to_proxy.size() != n) {
    throw std::invalid_argument("bounce vector length does not match patch count");
  }
  NlosBounce out;
  double gathered = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gathered += first[i] * c.to_proxy[i];
  }
  out.proxy_radiosity = c.proxy.reflectance * gathered;
  out.wall.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    out.wall[k] = scene.patches[k].reflectance * (out.proxy_radiosity * c.from_proxy[k]);
  }
  return out;
}

NlosBounce nlos_bounce(const Scene& scene, std::span<const double> first, const NlosProxy& proxy) {
  const Transport t(scene);
  return nlos_bounce(t.couple(proxy), scene, first);
}

RadiosityReport evaluate(const Transport& t, const IlluminationPlan& plan, const ProxyCoupling* coupling) {
  RadiosityReport r;
  r.plan = plan;
  r.first = first_bounce(t.scene(), plan);
  r.second = second_bounce(t, r.first);
  r.third_los = third_bounce_los(t, r.second);
  if (coupling != nullptr) {
    NlosBounce nb = nlos_bounce(*coupling, t.scene(), r.first);
    r.proxy_radiosity = nb.proxy_radiosity;
    r.third_nlos = std::move(nb.wall);
  } else {
    r.third_nlos.assign(r.first.size(), 0.0);
  }
  double los = 0.0;
  for (int i = 0; i < t.size(); ++i) {
    if (t.camera_visible(i)) {
      los += r.first[i] + r.second[i] + r.third_los[i];
    }
  }
  r.los = los;
  r.nlos = camera_sum(t, r.third_nlos);
  r.total = r.los + r.nlos;
  return r;
}

RadiosityReport evaluate(const Transport& t, const IlluminationPlan& plan, int voxel) {
  const ProxyCoupling c = t.couple(t.voxel_proxy(voxel));
  RadiosityReport r = evaluate(t, plan, &c);
  r.voxel = voxel;
  return r;
}

RadiosityReport evaluate(const Transport& t, const IlluminationPlan& plan, const std::optional<NlosProxy>& object) {
  if (!object) {
    return evaluate(t, plan, static_cast<const ProxyCoupling*>(nullptr));
  }
  const ProxyCoupling c = t.couple(*object);
  return evaluate(t, plan, &c);
}

RadiosityReport evaluate(const Scene& scene, const IlluminationPlan& plan, int voxel) {
  return evaluate(Transport(scene), plan, voxel);
}

void write_report_csv(std::ostream& out, const RadiosityReport& r) {
  out << fmt::format("# voxel={} B_LOS={:.17g} B_NLOS={:.17g} B_total={:.17g} B_proxy={:.17g}\n",
                     r.voxel ? std::to_string(*r.voxel) : "none", r.los, r.nlos, r.total,
                     r.proxy_radiosity);
  out << "id,B_first,B_second,B_third_los,B_third_nlos\n";
  for (std::size_t i = 0; i < r.first.size(); ++i) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, r.first[i], r.second[i],
                       r.third_los[i], r.third_nlos[i]);
  }
}

}  // namespace nlos
