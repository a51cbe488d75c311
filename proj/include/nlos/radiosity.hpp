#pragma once

#include "nlos/plan.hpp"
#include "nlos/scene.hpp"
#include "nlos/visibility.hpp"

#include <cmath>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlos {

// Center-to-center form factor carrying the receiver's area:
//   F(a, b) = cos(theta_a) cos(theta_b) / (pi r^2) * V(a, b) * A_a
// Cosines clamp at zero. `a` receives, `b` emits.
template <Surface A, Surface B>
[[nodiscard]] double unoccluded_form_factor(const A& a, const B& b) {
  const Vec3 d = b.center - a.center;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) {
    throw std::invalid_argument("form factor between coincident centers");
  }
  const double r = std::sqrt(r2);
  const double cos_a = std::max(0.0, a.normal.dot(d) / r);
  const double cos_b = std::max(0.0, -b.normal.dot(d) / r);
  return cos_a * cos_b / (kPi * r2) * a.area;
}

template <Surface A, Surface B>
[[nodiscard]] double form_factor(const A& a, const B& b, const Scene& scene) {
  const double f = unoccluded_form_factor(a, b);
  if (f == 0.0) {
    return 0.0;
  }
  return visibility(a, b, scene) == 1 ? f : 0.0;
}

// Wall <-> hidden-proxy coupling for one proxy placement.
struct ProxyCoupling {
  NlosProxy proxy;
  std::vector<double> to_proxy;    // F(proxy, i): proxy receiving from patch i
  std::vector<double> from_proxy;  // F(k, proxy): patch k receiving from the proxy
};

// Form factors and camera visibility precomputed for one scene. Immutable
// after construction and safe to share between threads.
class Transport {
 public:
  explicit Transport(Scene scene);
  explicit Transport(std::shared_ptr<const Scene> scene);

  [[nodiscard]] const Scene& scene() const { return *scene_; }
  [[nodiscard]] const std::shared_ptr<const Scene>& shared_scene() const { return scene_; }
  [[nodiscard]] int size() const { return n_; }

  // form_factor(patch receiver, patch source); zero on the diagonal.
  [[nodiscard]] double los(int receiver, int source) const {
    return factors_[static_cast<std::size_t>(receiver) * n_ + source];
  }
  [[nodiscard]] bool camera_visible(int patch) const { return camera_visible_[patch] != 0; }
  [[nodiscard]] ProxyCoupling couple(const NlosProxy& proxy) const;
  // Default proxy for a voxel (centered, facing the wall centroid, rho 0.5).
  [[nodiscard]] NlosProxy voxel_proxy(int voxel) const;

 private:
  void build();

  std::shared_ptr<const Scene> scene_;
  int n_ = 0;
  std::vector<double> factors_;
  std::vector<char> camera_visible_;
};

// Radiosity decomposition for one plan and one hidden-object placement.
struct RadiosityReport {
  std::vector<double> first;
  std::vector<double> second;
  std::vector<double> third_los;
  std::vector<double> third_nlos;
  double proxy_radiosity = 0.0;  // B_n
  double los = 0.0;              // B_LOS over camera-visible patches
  double nlos = 0.0;             // B_NLOS over camera-visible patches
  double total = 0.0;            // B_LOS + B_NLOS
  std::optional<int> voxel;
  IlluminationPlan plan;

  // Per-patch sum of all four bounce vectors.
  [[nodiscard]] std::vector<double> patch_totals() const;
};

// p => S_i: plan exitance reflected once, plus any patch self-emission.
[[nodiscard]] std::vector<double> first_bounce(const Scene& scene, const IlluminationPlan& plan);

// S_i => S_j: B_j = rho_j * sum_{i != j} B_i F(j, i).
[[nodiscard]] std::vector<double> second_bounce(const Transport& transport, std::span<const double> first);
[[nodiscard]] std::vector<double> second_bounce(const Scene& scene, std::span<const double> first);

// S_j => S_k, same gather applied to the second-bounce field.
[[nodiscard]] std::vector<double> third_bounce_los(const Transport& transport, std::span<const double> second);
[[nodiscard]] std::vector<double> third_bounce_los(const Scene& scene, std::span<const double> second);

struct NlosBounce {
  double proxy_radiosity = 0.0;  // B_n = rho_n * sum_i B_i F(n, i)
  std::vector<double> wall;      // B_k = rho_k * B_n * F(k, n)
};

[[nodiscard]] NlosBounce nlos_bounce(const ProxyCoupling& coupling, const Scene& scene,
                                     std::span<const double> first);
[[nodiscard]] NlosBounce nlos_bounce(const Scene& scene, std::span<const double> first,
                                     const NlosProxy& proxy);

[[nodiscard]] RadiosityReport evaluate(const Transport& transport, const IlluminationPlan& plan,
                                       const ProxyCoupling* coupling);
[[nodiscard]] RadiosityReport evaluate(const Transport& transport, const IlluminationPlan& plan, int voxel);
[[nodiscard]] RadiosityReport evaluate(const Transport& transport, const IlluminationPlan& plan,
                                       const std::optional<NlosProxy>& object);
[[nodiscard]] RadiosityReport evaluate(const Scene& scene, const IlluminationPlan& plan, int voxel);

// Header line of scalars, then one row per patch.
void write_report_csv(std::ostream& out, const RadiosityReport& report);

}  // namespace nlos
