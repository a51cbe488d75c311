#include "nlos/renderer.hpp"

#include "nlos/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nlos {

Image::Image(int w, int h, double fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

double Image::mean() const {
  if (pixels.empty()) {
    return 0.0;
  }
  double s = 0.0;
  for (double p : pixels) {
    s += p;
  }
  return s / static_cast<double>(pixels.size());
}

double Image::max() const {
  double m = 0.0;
  for (double p : pixels) {
    m = std::max(m, p);
  }
  return m;
}

Vec3 primary_ray(const CameraModel& cam, int x, int y) {
  const Vec3 forward = (cam.look_at - cam.position).normalized();
  Vec3 up_hint = Vec3::UnitY();
  if (std::abs(forward.dot(up_hint)) > 0.999) {
    up_hint = Vec3::UnitZ();
  }
  const Vec3 right = forward.cross(up_hint).normalized();
  const Vec3 up = right.cross(forward);
  const double half_h = std::tan(0.5 * cam.fov);
  const double half_w = half_h * cam.width / cam.height;
  const double sx = (2.0 * (x + 0.5) / cam.width - 1.0) * half_w;
  const double sy = (1.0 - 2.0 * (y + 0.5) / cam.height) * half_h;
  return (forward + sx * right + sy * up).normalized();
}

Renderer::Renderer(Scene scene) : Renderer(std::make_shared<const Transport>(std::move(scene))) {}

Renderer::Renderer(std::shared_ptr<const Transport> transport) : transport_(std::move(transport)) {
  resolve_pixels();
}

void Renderer::resolve_pixels() {
  const Scene& scene = transport_->scene();
  const CameraModel& cam = scene.camera;
  width_ = cam.width;
  height_ = cam.height;
  pixel_patch_.assign(static_cast<std::size_t>(width_) * height_, -1);
  constexpr double kFar = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Vec3 dir = primary_ray(cam, x, y);
      double nearest = kFar;
      int hit = -1;
      for (const Patch& p : scene.patches) {
        const auto& c = p.corners;
        for (const Triangle& tri : {Triangle{c[0], c[1], c[2]}, Triangle{c[0], c[2], c[3]}}) {
          if (auto t = intersect(tri, cam.position, dir, 0.0, nearest)) {
            nearest = *t;
            hit = dir.dot(p.normal) < 0.0 ? p.id : -1;
          }
        }
      }
      for (const Triangle& tri : scene.occluders) {
        if (auto t = intersect(tri, cam.position, dir, 0.0, nearest)) {
          nearest = *t;
          hit = -1;
        }
      }
      pixel_patch_[static_cast<std::size_t>(y) * width_ + x] = hit;
      any = any || hit >= 0;
    }
  }
  if (!any) {
    throw ValidationError("camera resolves no LOS patch (inside geometry or facing away)");
  }
}

Image Renderer::render_field(const std::vector<double>& per_patch) const {
  Image img(width_, height_);
  for (std::size_t i = 0; i < pixel_patch_.size(); ++i) {
    const int p = pixel_patch_[i];
    img.pixels[i] = p >= 0 ? per_patch[p] : 0.0;
  }
  return img;
}

Image Renderer::render(const RadiosityReport& report) const {
  return render_field(report.patch_totals());
}

Image Renderer::render(const IlluminationPlan& plan, const std::optional<NlosProxy>& object) const {
  return render(evaluate(*transport_, plan, object));
}

Image render(const Scene& scene, const IlluminationPlan& plan, const std::optional<NlosProxy>& object) {
  return Renderer(scene).render(plan, object);
}

Image add_noise(const Image& image, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("noise sigma must be >= 0");
  }
  Image out = image;
  out.noise_seed = seed;
  out.noise_sigma = sigma;
  if (sigma == 0.0) {
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& p : out.pixels) {
    p = std::max(0.0, p + noise(rng));
  }
  return out;
}

Raster quantize(const Image& image, int depth, double exposure) {
  if (depth != 8 && depth != 16) {
    throw std::invalid_argument("bit depth must be 8 or 16");
  }
  if (!(exposure > 0.0)) {
    throw std::invalid_argument("exposure must be > 0");
  }
  const double full = depth == 16 ? 65535.0 : 255.0;
  Raster r{image.width, image.height, depth, {}};
  r.codes.resize(image.pixels.size());
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const double v = std::round(image.pixels[i] * exposure * full);
    r.codes[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, full));
  }
  return r;
}

double auto_exposure(const Image& reference, double target) {
  const double peak = reference.max();
  return peak > 0.0 ? target / peak : 1.0;
}

}  // namespace nlos
