#pragma once

#include "nlos/geometry.hpp"

#include <array>
#include <concepts>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlos {

// Planar diffuse LOS surface element. Corners outline the element for
// rasterization: counter-clockwise seen from the front (normal side).
struct Patch {
  int id = 0;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double area = 0.0;
  double reflectance = 0.0;
  double emission = 0.0;
  std::array<Vec3, 4> corners{};
};

// Stand-in for a hidden object: a single diffuse patch.
struct NlosProxy {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double area = 0.0;
  double reflectance = 0.5;
};

// Anything the transport code can treat as a diffuse element.
template <typename T>
concept Surface = requires(const T& s) {
  { s.center } -> std::convertible_to<Vec3>;
  { s.normal } -> std::convertible_to<Vec3>;
  { s.area } -> std::convertible_to<double>;
  { s.reflectance } -> std::convertible_to<double>;
};

struct Illuminant {
  Vec3 position = Vec3::Zero();
  double power = 1.0;
  std::optional<Vec3> aim;
};

struct CameraModel {
  Vec3 position = Vec3(0.0, 0.0, 1.0);
  Vec3 look_at = Vec3::Zero();
  double fov = kPi / 3.0;  // vertical, radians
  int width = 64;
  int height = 64;
};

struct GridCoord {
  int ix = 0;
  int iy = 0;
  int iz = 0;
  bool operator==(const GridCoord&) const = default;
};

// Axis-aligned box [origin, origin + extent] split into nx*ny*nz voxels.
// Flat index is row-major with x fastest: ix + nx * (iy + ny * iz).
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(Vec3 origin, Vec3 extent, std::array<int, 3> counts);

  [[nodiscard]] const Vec3& origin() const { return origin_; }
  [[nodiscard]] const Vec3& extent() const { return extent_; }
  [[nodiscard]] const std::array<int, 3>& counts() const { return counts_; }
  [[nodiscard]] int size() const { return counts_[0] * counts_[1] * counts_[2]; }
  [[nodiscard]] Vec3 pitch() const;

  [[nodiscard]] int flat_index(const GridCoord& c) const;
  [[nodiscard]] GridCoord coord(int index) const;
  [[nodiscard]] Vec3 center(int index) const;
  [[nodiscard]] bool contains(const Vec3& p) const;
  // Voxel holding `p`; points on the far boundary belong to the last voxel.
  [[nodiscard]] std::optional<int> locate(const Vec3& p) const;
  // Area of the voxel face perpendicular to z (the face toward the wall).
  [[nodiscard]] double face_area() const;

 private:
  Vec3 origin_ = Vec3::Zero();
  Vec3 extent_ = Vec3::Ones();
  std::array<int, 3> counts_{1, 1, 1};
};

enum class Profile { Round, Box };

// Named hidden-object class; footprint is the silhouette facing the wall.
struct ObjectTemplate {
  std::string label;
  double width = 0.0;   // meters
  double height = 0.0;  // meters
  Profile profile = Profile::Round;
  double reflectance = 0.5;

  [[nodiscard]] double footprint_area() const;
};

// Quad wall as authored; the scene's patches are its subdivision.
struct WallSpec {
  std::array<Vec3, 4> corners{};
  int nx = 1;
  int ny = 1;
  double reflectance = 0.5;
  double emission = 0.0;
};

struct Scene {
  std::vector<WallSpec> walls;
  std::vector<Patch> patches;
  std::vector<Triangle> occluders;
  Illuminant light;
  CameraModel camera;
  VoxelGrid grid;
  std::vector<ObjectTemplate> objects;

  [[nodiscard]] int patch_count() const { return static_cast<int>(patches.size()); }
  // Area-weighted centroid of all LOS patches.
  [[nodiscard]] Vec3 wall_centroid() const;
  [[nodiscard]] const ObjectTemplate& object(std::string_view label) const;
};

// Default desk-scale hidden-object classes (sphere, man, cylinder, bunny).
[[nodiscard]] std::vector<ObjectTemplate> default_objects();

// Splits a planar quad into nx*ny sub-quads by bilinear subdivision.
// Patch ids start at `first_id`.
[[nodiscard]] std::vector<Patch> subdivide_quad(
    const std::array<Vec3, 4>& corners, int nx, int ny, double reflectance, double emission,
    int first_id = 0);

inline constexpr double kDefaultProxyReflectance = 0.5;

[[nodiscard]] NlosProxy voxel_proxy(
    const VoxelGrid& grid, int index, const Vec3& wall_centroid,
    double reflectance = kDefaultProxyReflectance);

// Throws ValidationError naming the first violated invariant.
void validate(const Scene& scene);

// Scene file I/O (JSON schema documented in docs/scene-format.md).
[[nodiscard]] Scene parse_scene(std::string_view text, std::string_view source = "<memory>");
[[nodiscard]] Scene load_scene(const std::filesystem::path& path);
[[nodiscard]] std::string serialize_scene(const Scene& scene);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace nlos
