#include "nlos/error.hpp"
#include "nlos/scene.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace nlos {

namespace {

using nlohmann::json;

// Walks a JSON document keeping a "walls[2].corners" style path for errors.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const { return path_; }
  [[nodiscard]] const json& raw() const { return value_; }

  [[noreturn]] void fail(std::string_view what) const {
    throw ParseError(fmt::format("{}: {}", path_.empty() ? "<root>" : path_, what));
  }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) {
      fail("expected an object");
    }
    for (const auto& [key, _] : value_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        child_path_fail(key, "unknown field");
      }
    }
  }

  [[nodiscard]] bool has(std::string_view key) const {
    return value_.is_object() && value_.contains(key);
  }

  [[nodiscard]] Node at(std::string_view key) const {
    if (!has(key)) {
      child_path_fail(key, "missing required field");
    }
    return {value_.at(std::string(key)), join(key)};
  }

  [[nodiscard]] Node at(std::size_t i) const {
    return {value_.at(i), fmt::format("{}[{}]", path_, i)};
  }

  [[nodiscard]] std::size_t array_size() const {
    if (!value_.is_array()) {
      fail("expected an array");
    }
    return value_.size();
  }

  [[nodiscard]] double number() const {
    if (!value_.is_number()) {
      fail("expected a number");
    }
    return value_.get<double>();
  }

  [[nodiscard]] int integer() const {
    if (!value_.is_number_integer()) {
      fail("expected an integer");
    }
    return value_.get<int>();
  }

  [[nodiscard]] std::string string() const {
    if (!value_.is_string()) {
      fail("expected a string");
    }
    return value_.get<std::string>();
  }

  [[nodiscard]] Vec3 vec3() const {
    if (!value_.is_array() || value_.size() != 3) {
      fail("expected a 3-vector [x, y, z]");
    }
    return {at(0).number(), at(1).number(), at(2).number()};
  }

 private:
  [[nodiscard]] std::string join(std::string_view key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }
  [[noreturn]] void child_path_fail(std::string_view key, std::string_view what) const {
    throw ParseError(fmt::format("{}: {}", join(key), what));
  }

  const json& value_;
  std::string path_;
};

std::array<Vec3, 4> read_quad(const Node& n) {
  if (n.array_size() != 4) {
    n.fail("expected four corners");
  }
  return {n.at(0).vec3(), n.at(1).vec3(), n.at(2).vec3(), n.at(3).vec3()};
}

void append_box(const Vec3& lo, const Vec3& hi, std::vector<Triangle>& out) {
  const auto corner = [&](int bits) {
    return Vec3(bits & 1 ? hi.x() : lo.x(), bits & 2 ? hi.y() : lo.y(), bits & 4 ? hi.z() : lo.z());
  };
  // Six faces, outward winding.
  const int faces[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& f : faces) {
    out.push_back({corner(f[0]), corner(f[1]), corner(f[2])});
    out.push_back({corner(f[0]), corner(f[2]), corner(f[3])});
  }
}

json to_json(const Vec3& v) {
  return json::array({v.x(), v.y(), v.z()});
}

std::string with_line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return fmt::format("line {}, column {}", line, col);
}

}  // namespace

Scene parse_scene(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}: {}", source, with_line_context(text, e.byte), e.what()));
  }

  Scene scene;
  try {
    const Node root(doc, "");
    root.expect_object({"description", "walls", "occluders", "light", "camera", "nlos_grid", "objects"});

    const Node walls = root.at("walls");
    for (std::size_t w = 0; w < walls.array_size(); ++w) {
      const Node wall = walls.at(w);
      wall.expect_object({"corners", "nx", "ny", "reflectance", "emission"});
      WallSpec spec;
      spec.corners = read_quad(wall.at("corners"));
      spec.nx = wall.at("nx").integer();
      spec.ny = wall.at("ny").integer();
      spec.reflectance = wall.at("reflectance").number();
      spec.emission = wall.has("emission") ? wall.at("emission").number() : 0.0;
      if (!(spec.reflectance >= 0.0 && spec.reflectance <= 1.0)) {
        throw ValidationError(fmt::format(
            "{}: reflectance {} outside [0, 1]", wall.at("reflectance").path(), spec.reflectance));
      }
      if (!(spec.emission >= 0.0)) {
        throw ValidationError(fmt::format("{}: emission must be >= 0", wall.at("emission").path()));
      }
      if (spec.nx < 1 || spec.ny < 1) {
        throw ValidationError(fmt::format("{}: nx and ny must be >= 1", wall.path()));
      }
      try {
        auto patches = subdivide_quad(spec.corners, spec.nx, spec.ny, spec.reflectance,
                                      spec.emission, scene.patch_count());
        scene.patches.insert(scene.patches.end(), patches.begin(), patches.end());
      } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", wall.path(), e.what()));
      }
      scene.walls.push_back(spec);
    }

    if (root.has("occluders")) {
      const Node occ = root.at("occluders");
      for (std::size_t o = 0; o < occ.array_size(); ++o) {
        const Node item = occ.at(o);
        item.expect_object({"triangles", "quad", "box"});
        const std::size_t before = scene.occluders.size();
        if (item.has("triangles")) {
          const Node tris = item.at("triangles");
          for (std::size_t t = 0; t < tris.array_size(); ++t) {
            const Node tri = tris.at(t);
            if (tri.array_size() != 3) {
              tri.fail("expected three vertices");
            }
            scene.occluders.push_back({tri.at(0).vec3(), tri.at(1).vec3(), tri.at(2).vec3()});
          }
        }
        if (item.has("quad")) {
          const auto q = read_quad(item.at("quad"));
          scene.occluders.push_back({q[0], q[1], q[2]});
          scene.occluders.push_back({q[0], q[2], q[3]});
        }
        if (item.has("box")) {
          const Node box = item.at("box");
          box.expect_object({"min", "max"});
          const Vec3 lo = box.at("min").vec3();
          const Vec3 hi = box.at("max").vec3();
          if (!((hi - lo).minCoeff() > 0.0)) {
            box.fail("box max must exceed min on every axis");
          }
          append_box(lo, hi, scene.occluders);
        }
        for (std::size_t t = before; t < scene.occluders.size(); ++t) {
          if (!(scene.occluders[t].area() > 0.0)) {
            throw ValidationError(fmt::format("{}: triangle with zero area", item.path()));
          }
        }
      }
    }

    const Node light = root.at("light");
    light.expect_object({"position", "power", "aim"});
    scene.light.position = light.at("position").vec3();
    scene.light.power = light.at("power").number();
    if (light.has("aim")) {
      scene.light.aim = light.at("aim").vec3();
    }

    const Node cam = root.at("camera");
    cam.expect_object({"position", "look_at", "fov_deg", "width", "height"});
    scene.camera.position = cam.at("position").vec3();
    scene.camera.look_at = cam.at("look_at").vec3();
    scene.camera.fov = cam.at("fov_deg").number() * kPi / 180.0;
    scene.camera.width = cam.at("width").integer();
    scene.camera.height = cam.at("height").integer();

    const Node grid = root.at("nlos_grid");
    grid.expect_object({"origin", "extent", "counts"});
    const Node counts = grid.at("counts");
    if (counts.array_size() != 3) {
      counts.fail("expected [nx, ny, nz]");
    }
    try {
      scene.grid = VoxelGrid(grid.at("origin").vec3(), grid.at("extent").vec3(),
                             {counts.at(0).integer(), counts.at(1).integer(), counts.at(2).integer()});
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("nlos_grid: {}", e.what()));
    }

    if (root.has("objects")) {
      const Node objs = root.at("objects");
      for (std::size_t o = 0; o < objs.array_size(); ++o) {
        const Node item = objs.at(o);
        item.expect_object({"label", "width", "height", "profile", "reflectance"});
        ObjectTemplate t;
        t.label = item.at("label").string();
        t.width = item.at("width").number();
        t.height = item.at("height").number();
        const std::string profile = item.has("profile") ? item.at("profile").string() : "round";
        if (profile == "round") {
          t.profile = Profile::Round;
        } else if (profile == "box") {
          t.profile = Profile::Box;
        } else {
          item.at("profile").fail("expected \"round\" or \"box\"");
        }
        t.reflectance = item.has("reflectance") ? item.at("reflectance").number() : 0.5;
        if (t.label == "no_object") {
          item.at("label").fail("\"no_object\" is reserved");
        }
        scene.objects.push_back(t);
      }
    } else {
      scene.objects = default_objects();
    }
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", source, e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", source, e.what()));
  }

  try {
    validate(scene);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", source, e.what()));
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open scene file '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path.string());
}

std::string serialize_scene(const Scene& scene) {
  json doc = json::object();
  json walls = json::array();
  for (const WallSpec& w : scene.walls) {
    json corners = json::array();
    for (const Vec3& c : w.corners) {
      corners.push_back(to_json(c));
    }
    json item = {{"corners", corners}, {"nx", w.nx}, {"ny", w.ny}, {"reflectance", w.reflectance}};
    if (w.emission != 0.0) {
      item["emission"] = w.emission;
    }
    walls.push_back(item);
  }
  doc["walls"] = walls;

  if (!scene.occluders.empty()) {
    json tris = json::array();
    for (const Triangle& t : scene.occluders) {
      tris.push_back(json::array({to_json(t.a), to_json(t.b), to_json(t.c)}));
    }
    doc["occluders"] = json::array({json{{"triangles", tris}}});
  }

  json light = {{"position", to_json(scene.light.position)}, {"power", scene.light.power}};
  if (scene.light.aim) {
    light["aim"] = to_json(*scene.light.aim);
  }
  doc["light"] = light;

  const CameraModel& cam = scene.camera;
  doc["camera"] = {{"position", to_json(cam.position)},
                   {"look_at", to_json(cam.look_at)},
                   {"fov_deg", cam.fov * 180.0 / kPi},
                   {"width", cam.width},
                   {"height", cam.height}};

  const VoxelGrid& g = scene.grid;
  doc["nlos_grid"] = {{"origin", to_json(g.origin())},
                      {"extent", to_json(g.extent())},
                      {"counts", json::array({g.counts()[0], g.counts()[1], g.counts()[2]})}};

  json objects = json::array();
  for (const ObjectTemplate& o : scene.objects) {
    objects.push_back({{"label", o.label},
                       {"width", o.width},
                       {"height", o.height},
                       {"profile", o.profile == Profile::Round ? "round" : "box"},
                       {"reflectance", o.reflectance}});
  }
  doc["objects"] = objects;
  return doc.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write scene file '{}'", path.string()));
  }
  out << serialize_scene(scene);
}

}  // namespace nlos
