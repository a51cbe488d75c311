#pragma once

#include "nlos/geometry.hpp"
#include "nlos/scene.hpp"

#include <span>

namespace nlos {

// Endpoint offset along a segment so surfaces at either end never occlude it.
inline constexpr double kSegmentEpsilon = 1e-6;

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
  double t_min = 0.0;
  double t_max = 0.0;

  Ray(Vec3 origin, Vec3 direction, double t_min, double t_max);
};

[[nodiscard]] bool occluded(const Ray& ray, std::span<const Triangle> occluders);

// 1 iff `to` lies strictly in the open front half-space of `normal` at `from`.
[[nodiscard]] int hemisphere_visible(const Vec3& from, const Vec3& to, const Vec3& normal);

// True iff an occluder triangle crosses the open segment (a, b). The result
// does not depend on the order of the endpoints.
[[nodiscard]] bool ray_occluded(const Vec3& a, const Vec3& b, std::span<const Triangle> occluders);
[[nodiscard]] bool ray_occluded(const Vec3& a, const Vec3& b, const Scene& scene);

// Binary mutual visibility of two diffuse elements.
template <Surface A, Surface B>
[[nodiscard]] int visibility(const A& a, const B& b, const Scene& scene) {
  if (hemisphere_visible(a.center, b.center, a.normal) == 0 ||
      hemisphere_visible(b.center, a.center, b.normal) == 0) {
    return 0;
  }
  return ray_occluded(a.center, b.center, scene) ? 0 : 1;
}

}  // namespace nlos
