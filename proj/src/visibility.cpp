#include "nlos/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlos {

Ray::Ray(Vec3 o, Vec3 d, double lo, double hi)
    : origin(std::move(o)), direction(std::move(d)), t_min(lo), t_max(hi) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("ray direction must be unit length");
  }
  if (!(t_min >= 0.0 && t_min < t_max)) {
    throw std::invalid_argument("ray interval must satisfy 0 <= t_min < t_max");
  }
}

bool occluded(const Ray& ray, std::span<const Triangle> occluders) {
  for (const Triangle& tri : occluders) {
    if (intersect(tri, ray.origin, ray.direction, ray.t_min, ray.t_max)) {
      return true;
    }
  }
  return false;
}

int hemisphere_visible(const Vec3& from, const Vec3& to, const Vec3& normal) {
  const Vec3 d = to - from;
  if (d.squaredNorm() == 0.0) {
    throw std::invalid_argument("hemisphere test on coincident points");
  }
  return d.dot(normal) > 0.0 ? 1 : 0;
}

bool ray_occluded(const Vec3& a, const Vec3& b, std::span<const Triangle> occluders) {
  if (occluders.empty()) {
    return false;
  }
  // Canonical endpoint order keeps the test exactly symmetric.
  const bool swap = std::lexicographical_compare(b.data(), b.data() + 3, a.data(), a.data() + 3);
  const Vec3& from = swap ? b : a;
  const Vec3& to = swap ? a : b;
  const Vec3 d = to - from;
  const double length = d.norm();
  if (length == 0.0) {
    throw std::invalid_argument("occlusion test on coincident points");
  }
  if (length <= 2.0 * kSegmentEpsilon) {
    return false;
  }
  return occluded(Ray(from, d / length, kSegmentEpsilon, length - kSegmentEpsilon), occluders);
}

bool ray_occluded(const Vec3& a, const Vec3& b, const Scene& scene) {
  return ray_occluded(a, b, std::span<const Triangle>(scene.occluders));
}

}  // namespace nlos
