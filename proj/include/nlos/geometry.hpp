#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <optional>

namespace nlos {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

struct Triangle {
  Vec3 a;
  Vec3 b;
  Vec3 c;

  [[nodiscard]] Vec3 normal() const;  // unit, right-handed (b - a) x (c - a)
  [[nodiscard]] double area() const;
};

// Moller-Trumbore. Returns the ray parameter of the hit when it lies strictly
// inside (t_min, t_max); `direction` need not be normalized.
[[nodiscard]] std::optional<double> intersect(
    const Triangle& tri, const Vec3& origin, const Vec3& direction, double t_min, double t_max);

// Planar quadrilateral (corners in order around the boundary).
[[nodiscard]] double quad_area(const std::array<Vec3, 4>& corners);
// Area-weighted centroid of the two triangles (c0,c1,c2) and (c0,c2,c3).
[[nodiscard]] Vec3 quad_centroid(const std::array<Vec3, 4>& corners);
// Newell normal, unit length. Zero vector for degenerate input.
[[nodiscard]] Vec3 quad_normal(const std::array<Vec3, 4>& corners);

}  // namespace nlos
