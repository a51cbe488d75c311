#pragma once

#include "nlos/scene.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace fixtures {

inline std::filesystem::path scenes_dir() { return NLOS_SCENES_DIR; }

inline std::filesystem::path scene_path(const std::string& name) { return scenes_dir() / (name + ".json"); }

inline nlos::Scene load(const std::string& name) { return nlos::load_scene(scene_path(name)); }

// Bundled scenes small enough for exhaustive path enumeration.
inline const std::vector<std::string>& small_scenes() {
  static const std::vector<std::string> names{"minimal", "symmetric2", "planar4", "alcove6", "corner8"};
  return names;
}

// A random corner room: back wall (wx x wy patches) in z = 0 and a floor
// strip (fx x fz patches) in y = 0, a partition box hiding a random voxel
// grid at x < 0, and randomized sizes, albedos and camera.
inline nlos::Scene random_corner(std::uint64_t seed, int wx, int wy, int fx, int fz) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  const double w = in(0.7, 1.3);
  const double h = in(0.6, 1.2);
  const double d = in(0.2, 0.4);
  const double gx = in(-0.7, -0.4);
  const double gy = in(0.05, 0.3);
  const std::string text = fmt::format(
      R"({{
  "walls": [
    {{"corners": [[0, 0, 0], [{w}, 0, 0], [{w}, {h}, 0], [0, {h}, 0]], "nx": {wx}, "ny": {wy}, "reflectance": {r1}}},
    {{"corners": [[0, 0, 0], [0, 0, {d}], [{w}, 0, {d}], [{w}, 0, 0]], "nx": {fz}, "ny": {fx}, "reflectance": {r2}}}
  ],
  "occluders": [{{"box": {{"min": [0.1, 0.05, 0.45], "max": [0.2, {top}, 1.3]}}}}],
  "light": {{"position": [1, 1, 1.2], "power": {power}}},
  "camera": {{"position": [{cx}, {cy}, {cz}], "look_at": [{lx}, {ly}, 0], "fov_deg": 55, "width": 32, "height": 32}},
  "nlos_grid": {{"origin": [{gx}, {gy}, 0.1], "extent": [{ex}, {ey}, 0.3], "counts": [2, 2, 2]}}
}})",
      fmt::arg("w", w), fmt::arg("h", h), fmt::arg("d", d), fmt::arg("wx", wx), fmt::arg("wy", wy),
      fmt::arg("fx", fx), fmt::arg("fz", fz), fmt::arg("r1", in(0.3, 0.95)), fmt::arg("r2", in(0.3, 0.95)),
      fmt::arg("top", h + 0.2), fmt::arg("power", in(0.5, 2.0)), fmt::arg("cx", in(1.1, 1.5)),
      fmt::arg("cy", in(0.4, 0.8)), fmt::arg("cz", in(1.3, 1.7)), fmt::arg("lx", w / 2), fmt::arg("ly", h / 2),
      fmt::arg("gx", gx), fmt::arg("gy", gy), fmt::arg("ex", in(0.2, -0.1 - gx)), fmt::arg("ey", in(0.3, 0.6)));
  return nlos::parse_scene(text, fmt::format("random_corner({})", seed));
}

}  // namespace fixtures
