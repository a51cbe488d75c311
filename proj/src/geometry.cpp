#include "nlos/geometry.hpp"

#include <cmath>

namespace nlos {

Vec3 Triangle::normal() const {
  return (b - a).cross(c - a).normalized();
}

double Triangle::area() const {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::optional<double> intersect(
    const Triangle& tri, const Vec3& origin, const Vec3& direction, double t_min, double t_max) {
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 p = direction.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) {
    return std::nullopt;  // parallel
  }
  const double inv = 1.0 / det;
  const Vec3 s = origin - tri.a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) {
    return std::nullopt;
  }
  const Vec3 q = s.cross(e1);
  const double v = direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) {
    return std::nullopt;
  }
  const double t = e2.dot(q) * inv;
  if (t <= t_min || t >= t_max) {
    return std::nullopt;
  }
  return t;
}

double quad_area(const std::array<Vec3, 4>& c) {
  return Triangle{c[0], c[1], c[2]}.area() + Triangle{c[0], c[2], c[3]}.area();
}

Vec3 quad_centroid(const std::array<Vec3, 4>& c) {
  const double a1 = Triangle{c[0], c[1], c[2]}.area();
  const double a2 = Triangle{c[0], c[2], c[3]}.area();
  const Vec3 g1 = (c[0] + c[1] + c[2]) / 3.0;
  const Vec3 g2 = (c[0] + c[2] + c[3]) / 3.0;
  const double total = a1 + a2;
  if (total <= 0.0) {
    return (c[0] + c[1] + c[2] + c[3]) / 4.0;
  }
  return (a1 * g1 + a2 * g2) / total;
}

Vec3 quad_normal(const std::array<Vec3, 4>& c) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3& cur = c[i];
    const Vec3& nxt = c[(i + 1) % 4];
    n.x() += (cur.y() - nxt.y()) * (cur.z() + nxt.z());
    n.y() += (cur.z() - nxt.z()) * (cur.x() + nxt.x());
    n.z() += (cur.x() - nxt.x()) * (cur.y() + nxt.y());
  }
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3(Vec3::Zero());
}

}  // namespace nlos
