#include "nlos/scene.hpp"

#include "nlos/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace nlos {

namespace {

constexpr double kCoplanarTolerance = 1e-6;
constexpr double kUnitTolerance = 1e-9;

Vec3 bilinear(const std::array<Vec3, 4>& c, double u, double v) {
  return (1.0 - u) * (1.0 - v) * c[0] + u * (1.0 - v) * c[1] + u * v * c[2] + (1.0 - u) * v * c[3];
}

bool finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

VoxelGrid::VoxelGrid(Vec3 origin, Vec3 extent, std::array<int, 3> counts)
    : origin_(std::move(origin)), extent_(std::move(extent)), counts_(counts) {
  for (int k = 0; k < 3; ++k) {
    if (counts_[k] < 1) {
      throw ValidationError(fmt::format("nlos_grid.counts[{}] must be >= 1 (got {})", k, counts_[k]));
    }
    if (!(extent_[k] > 0.0)) {
      throw ValidationError(fmt::format("nlos_grid.extent[{}] must be > 0", k));
    }
  }
}

Vec3 VoxelGrid::pitch() const {
  return {extent_.x() / counts_[0], extent_.y() / counts_[1], extent_.z() / counts_[2]};
}

int VoxelGrid::flat_index(const GridCoord& c) const {
  if (c.ix < 0 || c.ix >= counts_[0] || c.iy < 0 || c.iy >= counts_[1] || c.iz < 0 ||
      c.iz >= counts_[2]) {
    throw std::out_of_range(fmt::format("voxel coordinate ({}, {}, {}) outside grid", c.ix, c.iy, c.iz));
  }
  return c.ix + counts_[0] * (c.iy + counts_[1] * c.iz);
}

GridCoord VoxelGrid::coord(int index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range(fmt::format("voxel index {} outside [0, {})", index, size()));
  }
  const int nx = counts_[0];
  const int ny = counts_[1];
  return {index % nx, (index / nx) % ny, index / (nx * ny)};
}

Vec3 VoxelGrid::center(int index) const {
  const GridCoord c = coord(index);
  const Vec3 p = pitch();
  return origin_ + Vec3((c.ix + 0.5) * p.x(), (c.iy + 0.5) * p.y(), (c.iz + 0.5) * p.z());
}

bool VoxelGrid::contains(const Vec3& p) const {
  for (int k = 0; k < 3; ++k) {
    if (p[k] < origin_[k] || p[k] > origin_[k] + extent_[k]) {
      return false;
    }
  }
  return true;
}

std::optional<int> VoxelGrid::locate(const Vec3& p) const {
  if (!contains(p)) {
    return std::nullopt;
  }
  std::array<int, 3> ijk{};
  for (int k = 0; k < 3; ++k) {
    const double t = (p[k] - origin_[k]) / extent_[k];
    ijk[k] = std::min(counts_[k] - 1, static_cast<int>(std::floor(t * counts_[k])));
  }
  return flat_index({ijk[0], ijk[1], ijk[2]});
}

double VoxelGrid::face_area() const {
  const Vec3 p = pitch();
  return p.x() * p.y();
}

double ObjectTemplate::footprint_area() const {
  const double box = width * height;
  return profile == Profile::Round ? 0.25 * kPi * box : box;
}

Vec3 Scene::wall_centroid() const {
  Vec3 acc = Vec3::Zero();
  double total = 0.0;
  for (const Patch& p : patches) {
    acc += p.area * p.center;
    total += p.area;
  }
  return total > 0.0 ? Vec3(acc / total) : acc;
}

const ObjectTemplate& Scene::object(std::string_view label) const {
  for (const ObjectTemplate& o : objects) {
    if (o.label == label) {
      return o;
    }
  }
  throw ValidationError(fmt::format("unknown object class '{}'", label));
}

std::vector<ObjectTemplate> default_objects() {
  return {
      {"sphere", 0.05, 0.05, Profile::Round, 0.5},
      {"man", 0.055, 0.175, Profile::Box, 0.5},
      {"cylinder", 0.06, 0.08, Profile::Box, 0.5},
      {"bunny", 0.074, 0.05, Profile::Round, 0.5},
  };
}

std::vector<Patch> subdivide_quad(
    const std::array<Vec3, 4>& corners, int nx, int ny, double reflectance, double emission,
    int first_id) {
  if (nx < 1 || ny < 1) {
    throw ValidationError(fmt::format("subdivision counts must be >= 1 (got {} x {})", nx, ny));
  }
  for (const Vec3& c : corners) {
    if (!finite(c)) {
      throw ValidationError("quad corner is not finite");
    }
  }
  const double area = quad_area(corners);
  const Vec3 normal = quad_normal(corners);
  if (!(area > 0.0) || normal.squaredNorm() == 0.0) {
    throw ValidationError("degenerate quad (zero area)");
  }
  const Vec3 centroid = quad_centroid(corners);
  for (const Vec3& c : corners) {
    const double off = std::abs((c - centroid).dot(normal));
    if (off > kCoplanarTolerance) {
      throw ValidationError(fmt::format("quad corners are not coplanar (offset {:.3g} m)", off));
    }
  }

  std::vector<Patch> out;
  out.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    const double v0 = static_cast<double>(j) / ny;
    const double v1 = static_cast<double>(j + 1) / ny;
    for (int i = 0; i < nx; ++i) {
      const double u0 = static_cast<double>(i) / nx;
      const double u1 = static_cast<double>(i + 1) / nx;
      Patch p;
      p.id = first_id + static_cast<int>(out.size());
      p.corners = {bilinear(corners, u0, v0), bilinear(corners, u1, v0), bilinear(corners, u1, v1),
                   bilinear(corners, u0, v1)};
      p.center = quad_centroid(p.corners);
      p.normal = normal;
      p.area = quad_area(p.corners);
      p.reflectance = reflectance;
      p.emission = emission;
      out.push_back(p);
    }
  }
  return out;
}

NlosProxy voxel_proxy(const VoxelGrid& grid, int index, const Vec3& wall_centroid, double reflectance) {
  if (index < 0 || index >= grid.size()) {
    throw std::out_of_range(fmt::format("voxel index {} outside [0, {})", index, grid.size()));
  }
  NlosProxy proxy;
  proxy.center = grid.center(index);
  const Vec3 toward = wall_centroid - proxy.center;
  if (toward.norm() == 0.0) {
    throw std::invalid_argument("voxel center coincides with the wall centroid");
  }
  proxy.normal = toward.normalized();
  proxy.area = grid.face_area();
  proxy.reflectance = reflectance;
  return proxy;
}

void validate(const Scene& scene) {
  if (scene.patches.empty()) {
    throw ValidationError("scene has no LOS patches");
  }
  for (std::size_t i = 0; i < scene.patches.size(); ++i) {
    const Patch& p = scene.patches[i];
    if (p.id != static_cast<int>(i)) {
      throw ValidationError(fmt::format("patch ids must be contiguous: patch {} has id {}", i, p.id));
    }
    if (std::abs(p.normal.norm() - 1.0) > kUnitTolerance) {
      throw ValidationError(fmt::format("patch {} normal is not unit length", i));
    }
    if (!(p.area > 0.0)) {
      throw ValidationError(fmt::format("patch {} area must be > 0", i));
    }
    if (!(p.reflectance >= 0.0 && p.reflectance <= 1.0)) {
      throw ValidationError(
          fmt::format("patch {} reflectance {} outside [0, 1]", i, p.reflectance));
    }
    if (!(p.emission >= 0.0)) {
      throw ValidationError(fmt::format("patch {} emission must be >= 0", i));
    }
  }
  for (std::size_t t = 0; t < scene.occluders.size(); ++t) {
    if (!(scene.occluders[t].area() > 0.0)) {
      throw ValidationError(fmt::format("occluder triangle {} has zero area", t));
    }
  }
  if (!(scene.light.power >= 0.0)) {
    throw ValidationError("light.power must be >= 0");
  }
  const CameraModel& cam = scene.camera;
  if (!(cam.fov > 0.0 && cam.fov < kPi)) {
    throw ValidationError("camera.fov_deg must lie in (0, 180)");
  }
  if (cam.width < 1 || cam.height < 1) {
    throw ValidationError("camera resolution components must be >= 1");
  }
  if ((cam.look_at - cam.position).norm() == 0.0) {
    throw ValidationError("camera.look_at coincides with camera.position");
  }
  for (const ObjectTemplate& o : scene.objects) {
    if (!(o.width > 0.0 && o.height > 0.0)) {
      throw ValidationError(fmt::format("object '{}' footprint must be positive", o.label));
    }
    if (!(o.reflectance >= 0.0 && o.reflectance <= 1.0)) {
      throw ValidationError(fmt::format("object '{}' reflectance outside [0, 1]", o.label));
    }
  }
}

}  // namespace nlos
