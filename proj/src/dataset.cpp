#include "nlos/dataset.hpp"

#include "nlos/error.hpp"
#include "nlos/hash.hpp"
#include "nlos/parallel.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace nlos {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSplitSalt = 0x73706c6974ULL;  // "split"
constexpr std::uint64_t kNoiseSalt = 0x6e6f697365ULL;  // "noise"
constexpr double kTiltPerLogAspect = 0.1;             // radians
constexpr double kInsetFraction = 0.02;

json vec_json(const Vec3& v) {
  return json::array({v.x(), v.y(), v.z()});
}

Vec3 json_vec(const json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(fmt::format("manifest: '{}' must be a 3-vector", what));
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json plan_json(const IlluminationPlan& p) {
  json entries = json::array();
  for (const PlanEntry& e : p.entries) {
    entries.push_back(json::array({e.patch, e.exitance}));
  }
  return {{"method", p.method},
          {"entries", entries},
          {"budget", p.budget},
          {"cap", std::isinf(p.cap) ? json(nullptr) : json(p.cap)},
          {"objective", p.objective},
          {"voxel", p.voxel ? json(*p.voxel) : json(nullptr)}};
}

IlluminationPlan json_plan(const json& j) {
  IlluminationPlan p;
  p.method = j.at("method").get<std::string>();
  for (const json& e : j.at("entries")) {
    p.entries.push_back({e.at(0).get<int>(), e.at(1).get<double>()});
  }
  p.budget = j.at("budget").get<double>();
  if (!j.at("cap").is_null()) {
    p.cap = j.at("cap").get<double>();
  }
  p.objective = j.at("objective").get<double>();
  if (!j.at("voxel").is_null()) {
    p.voxel = j.at("voxel").get<int>();
  }
  p.unreachable = !(p.objective > 0.0);
  return p;
}

json record_json(const SampleRecord& r) {
  json j = {{"id", r.id},
            {"image", r.image},
            {"label", r.label},
            {"centroid", r.centroid ? vec_json(*r.centroid) : json(nullptr)},
            {"voxel", r.voxel},
            {"lighting", plan_json(r.plan)},
            {"noise_sigma", r.noise_sigma},
            {"noise_level", r.noise_level},
            {"seed", r.seed},
            {"exposure", r.exposure},
            {"unreachable", r.unreachable},
            {"split", r.split}};
  if (r.proxy) {
    j["proxy"] = {{"center", vec_json(r.proxy->center)},
                  {"normal", vec_json(r.proxy->normal)},
                  {"area", r.proxy->area},
                  {"reflectance", r.proxy->reflectance}};
  } else {
    j["proxy"] = nullptr;
  }
  if (r.step) {
    j["step"] = *r.step;
  }
  return j;
}

SampleRecord json_record(const json& j) {
  SampleRecord r;
  r.id = j.at("id").get<std::string>();
  r.image = j.at("image").get<std::string>();
  r.label = j.at("label").get<std::string>();
  if (!j.at("centroid").is_null()) {
    r.centroid = json_vec(j.at("centroid"), "centroid");
  }
  r.voxel = j.at("voxel").get<int>();
  r.plan = json_plan(j.at("lighting"));
  if (!j.at("proxy").is_null()) {
    const json& p = j.at("proxy");
    r.proxy = NlosProxy{json_vec(p.at("center"), "proxy.center"), json_vec(p.at("normal"), "proxy.normal"),
                        p.at("area").get<double>(), p.at("reflectance").get<double>()};
  }
  r.noise_sigma = j.at("noise_sigma").get<double>();
  r.noise_level = j.at("noise_level").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.exposure = j.at("exposure").get<double>();
  r.unreachable = j.at("unreachable").get<bool>();
  r.split = j.at("split").get<std::string>();
  if (j.contains("step")) {
    r.step = j.at("step").get<int>();
  }
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write '{}'", path.string()));
  }
  out << text;
  if (!out) {
    throw IoError(fmt::format("short write to '{}'", path.string()));
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
  }
}

std::vector<std::string> class_labels(const Scene& scene, const GenerationConfig& config) {
  std::vector<std::string> labels = config.classes;
  if (labels.empty()) {
    for (const ObjectTemplate& o : scene.objects) {
      labels.push_back(o.label);
    }
  }
  for (const std::string& l : labels) {
    (void)scene.object(l);  // throws for unknown classes
  }
  if (labels.empty()) {
    throw ValidationError("dataset needs at least one object class");
  }
  return labels;
}

void check_config(const GenerationConfig& c) {
  if (c.samples < 1) {
    throw ValidationError("samples must be >= 1");
  }
  if (!(c.no_object_fraction >= 0.0 && c.no_object_fraction < 1.0)) {
    throw ValidationError("no_object_fraction must lie in [0, 1)");
  }
  if (!(c.noise_sigma >= 0.0)) {
    throw ValidationError("noise_sigma must be >= 0");
  }
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw ValidationError("split_ratio must lie in (0, 1)");
  }
  if (c.bit_depth != 8 && c.bit_depth != 16) {
    throw ValidationError("bit_depth must be 8 or 16");
  }
  if (c.resolution && *c.resolution < 1) {
    throw ValidationError("resolution must be >= 1");
  }
  if (c.m < 1) {
    throw ValidationError("m must be >= 1");
  }
  if (c.exposure && !(*c.exposure > 0.0)) {
    throw ValidationError("exposure must be > 0");
  }
}

// Which voxels need an optimized plan, computed up front and shared.
std::vector<IlluminationPlan> plans_per_voxel(const Transport& transport, const LightingSpec& lighting,
                                              double budget, double cap, int m, int threads) {
  const int voxels = transport.scene().grid.size();
  std::vector<IlluminationPlan> plans(static_cast<std::size_t>(voxels));
  parallel_for(voxels, threads, [&](int v) {
    plans[v] = adaptive_plan(rank_patches(transport, v), lighting, budget, cap, m);
  });
  return plans;
}

std::string sample_id(int index) {
  return fmt::format("s{:06d}", index);
}

}  // namespace

std::string LightingSpec::name() const {
  switch (mode) {
    case LightingMode::AdaptiveOptimal:
      return "adaptive-optimal";
    case LightingMode::Ranked:
      return fmt::format("ranked-{}", rank);
    case LightingMode::RandomSpot:
      return "random-spot";
    case LightingMode::Distributed:
      return "distributed";
  }
  return "unknown";
}

LightingSpec LightingSpec::parse(std::string_view text) {
  if (text == "adaptive-optimal") {
    return {LightingMode::AdaptiveOptimal, 1};
  }
  if (text == "random-spot") {
    return {LightingMode::RandomSpot, 1};
  }
  if (text == "distributed") {
    return {LightingMode::Distributed, 1};
  }
  constexpr std::string_view prefix = "ranked-";
  if (text.starts_with(prefix)) {
    const std::string digits(text.substr(prefix.size()));
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const int k = std::stoi(digits);
      if (k >= 1) {
        return {LightingMode::Ranked, k};
      }
    }
  }
  throw ValidationError(fmt::format(
      "unknown lighting mode '{}' (expected adaptive-optimal, ranked-<k>, random-spot, distributed)", text));
}

json GenerationConfig::to_json() const {
  json j = {{"name", name},
            {"samples", samples},
            {"mode", lighting.name()},
            {"classes", classes},
            {"no_object_fraction", no_object_fraction},
            {"noise_sigma", noise_sigma},
            {"split_ratio", split_ratio},
            {"budget", budget ? json(*budget) : json(nullptr)},
            {"cap", cap ? json(*cap) : json(nullptr)},
            {"m", m},
            {"resolution", resolution ? json(*resolution) : json(nullptr)},
            {"bit_depth", bit_depth},
            {"exposure", exposure ? json(*exposure) : json(nullptr)},
            {"unreachable", keep_unreachable ? "keep" : "skip"},
            {"inference_set", inference_set}};
  return j;
}

GenerationConfig GenerationConfig::from_json(const json& j) {
  if (!j.is_object()) {
    throw ParseError("dataset config must be a JSON object");
  }
  GenerationConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "name") {
        c.name = value.get<std::string>();
      } else if (key == "samples") {
        c.samples = value.get<int>();
      } else if (key == "mode") {
        c.lighting = LightingSpec::parse(value.get<std::string>());
      } else if (key == "classes") {
        c.classes = value.get<std::vector<std::string>>();
      } else if (key == "no_object_fraction") {
        c.no_object_fraction = value.get<double>();
      } else if (key == "noise_sigma") {
        c.noise_sigma = value.get<double>();
      } else if (key == "split_ratio") {
        c.split_ratio = value.get<double>();
      } else if (key == "budget") {
        c.budget = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      } else if (key == "cap") {
        c.cap = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      } else if (key == "m") {
        c.m = value.get<int>();
      } else if (key == "resolution") {
        c.resolution = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      } else if (key == "exposure") {
        c.exposure = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      } else if (key == "bit_depth") {
        c.bit_depth = value.get<int>();
      } else if (key == "unreachable") {
        const std::string v = value.get<std::string>();
        if (v != "keep" && v != "skip") {
          throw ValidationError("unreachable must be \"keep\" or \"skip\"");
        }
        c.keep_unreachable = v == "keep";
      } else if (key == "inference_set") {
        c.inference_set = value.get<bool>();
      } else if (key == "threads") {
        c.threads = value.get<int>();
      } else {
        throw ParseError(fmt::format("dataset config: unknown field '{}'", key));
      }
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("dataset config: field '{}': {}", key, e.what()));
    }
  }
  return c;
}

const SampleRecord* DatasetManifest::find(std::string_view id) const {
  for (const SampleRecord& r : records) {
    if (r.id == id) {
      return &r;
    }
  }
  return nullptr;
}

std::string serialize_manifest(const DatasetManifest& m) {
  std::string out = json{{"kind", "nlos-radiant-manifest"},
                         {"schema_version", m.schema_version},
                         {"scene_hash", m.scene_hash},
                         {"master_seed", m.master_seed},
                         {"config", m.config},
                         {"records", m.records.size()}}
                        .dump();
  out += '\n';
  for (const SampleRecord& r : m.records) {
    out += record_json(r).dump();
    out += '\n';
  }
  return out;
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) {
        continue;
      }
      const json j = json::parse(line);
      if (!header) {
        if (j.value("kind", "") != "nlos-radiant-manifest") {
          throw ParseError("manifest: missing header line");
        }
        m.schema_version = j.at("schema_version").get<int>();
        if (m.schema_version != kManifestSchemaVersion) {
          throw ParseError(fmt::format("manifest: unsupported schema version {}", m.schema_version));
        }
        m.scene_hash = j.at("scene_hash").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.config = j.at("config");
        header = true;
        continue;
      }
      m.records.push_back(json_record(j));
    }
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("manifest line {}: {}", lineno, e.what()));
  }
  if (!header) {
    throw ParseError("manifest: empty file");
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_text(path, serialize_manifest(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot read manifest '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string manifest_hash(const DatasetManifest& manifest) {
  return sha256_hex(serialize_manifest(manifest));
}

std::string scene_hash(const Scene& scene) {
  return sha256_hex(serialize_scene(scene));
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed ^ mix64(index));
}

SampleDraw draw_sample(std::mt19937_64& rng, std::span<const std::string> labels, double no_object_fraction,
                       int voxels, int patches) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_voxel(0, voxels - 1);
  std::uniform_int_distribution<int> pick_patch(0, patches - 1);
  std::uniform_real_distribution<double> inset(kInsetFraction, 1.0 - kInsetFraction);
  SampleDraw d;
  const double u = unit(rng);
  const int n_classes = static_cast<int>(labels.size());
  if (u < no_object_fraction) {
    d.label = std::string(kNoObject);
  } else {
    const double w = (u - no_object_fraction) / (1.0 - no_object_fraction);
    d.label = labels[std::min(n_classes - 1, static_cast<int>(w * n_classes))];
  }
  d.voxel = pick_voxel(rng);
  d.fraction = Vec3(inset(rng), inset(rng), inset(rng));
  d.spot = pick_patch(rng);
  return d;
}

NlosProxy make_object_proxy(const ObjectTemplate& object, const Vec3& centroid, const Vec3& wall_centroid,
                            std::mt19937_64& rng) {
  const Vec3 toward = wall_centroid - centroid;
  if (toward.norm() == 0.0) {
    throw std::invalid_argument("object centroid coincides with the wall centroid");
  }
  const Vec3 n = toward.normalized();
  const Vec3 t1 = n.unitOrthogonal();
  const Vec3 t2 = n.cross(t1);
  std::uniform_real_distribution<double> azimuth_dist(0.0, 2.0 * kPi);
  const double azimuth = azimuth_dist(rng);
  const double tilt = kTiltPerLogAspect * std::abs(std::log(object.height / object.width));
  NlosProxy proxy;
  proxy.center = centroid;
  proxy.normal =
      (std::cos(tilt) * n + std::sin(tilt) * (std::cos(azimuth) * t1 + std::sin(azimuth) * t2)).normalized();
  proxy.area = object.footprint_area();
  proxy.reflectance = object.reflectance;
  return proxy;
}

Raster render_record(const Renderer& renderer, const SampleRecord& record, int bit_depth) {
  const Image clean = renderer.render(record.plan, record.proxy);
  const Image noisy = add_noise(clean, record.noise_sigma, mix64(record.seed ^ kNoiseSalt));
  return quantize(noisy, bit_depth, record.exposure);
}

Scene with_resolution(Scene scene, std::optional<int> resolution) {
  if (resolution) {
    scene.camera.width = *resolution;
    scene.camera.height = *resolution;
  }
  return scene;
}

IlluminationPlan adaptive_plan(const PatchRanking& ranking, const LightingSpec& lighting, double budget,
                               double cap, int m) {
  IlluminationPlan plan;
  switch (lighting.mode) {
    case LightingMode::AdaptiveOptimal:
    case LightingMode::RandomSpot:
      plan = ranked_patch_plan(ranking, 1, budget);
      plan.method = "adaptive-optimal";
      break;
    case LightingMode::Ranked:
      plan = ranked_patch_plan(ranking, lighting.rank, budget);
      break;
    case LightingMode::Distributed:
      plan = distribute_power(ranking, m, budget, cap);
      plan.method = "distributed";
      break;
  }
  return plan;
}

DatasetManifest generate(const Scene& input_scene, const GenerationConfig& config, std::uint64_t master_seed,
                         const std::filesystem::path& out_dir) {
  check_config(config);
  const std::vector<std::string> labels = class_labels(input_scene, config);
  auto scene = std::make_shared<const Scene>(with_resolution(input_scene, config.resolution));
  validate(*scene);
  const double budget = config.budget.value_or(scene->light.power);
  const double cap = config.cap.value_or(budget);
  if (config.lighting.mode == LightingMode::Ranked && config.lighting.rank > scene->patch_count()) {
    throw ValidationError(fmt::format("rank {} exceeds the patch count {}", config.lighting.rank,
                                      scene->patch_count()));
  }

  auto transport = std::make_shared<const Transport>(scene);
  const Renderer renderer(transport);
  const int voxels = scene->grid.size();
  const int patches = scene->patch_count();
  const Vec3 wall_centroid = scene->wall_centroid();

  std::vector<IlluminationPlan> voxel_plans;
  if (config.lighting.adaptive() || config.inference_set) {
    voxel_plans = plans_per_voxel(*transport, config.lighting, budget, cap, config.m, config.threads);
  }

  ensure_dir(out_dir / "images");
  spdlog::info("generating {} samples ({}) into {}", config.samples, config.lighting.name(), out_dir.string());

  std::vector<SampleRecord> records(static_cast<std::size_t>(config.samples));
  parallel_for(config.samples, config.threads, [&](int i) {
    SampleRecord r;
    r.id = sample_id(i);
    r.image = fmt::format("images/{}.png", r.id);
    r.seed = sample_seed(master_seed, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(r.seed);
    const SampleDraw draw = draw_sample(rng, labels, config.no_object_fraction, voxels, patches);
    r.label = draw.label;
    r.voxel = draw.voxel;
    const Vec3& frac = draw.fraction;
    const int spot = draw.spot;

    if (r.label != kNoObject) {
      const GridCoord gc = scene->grid.coord(r.voxel);
      const Vec3 pitch = scene->grid.pitch();
      r.centroid = scene->grid.origin() + Vec3((gc.ix + frac.x()) * pitch.x(), (gc.iy + frac.y()) * pitch.y(),
                                               (gc.iz + frac.z()) * pitch.z());
      r.proxy = make_object_proxy(scene->object(r.label), *r.centroid, wall_centroid, rng);
    }

    if (config.lighting.adaptive()) {
      r.plan = voxel_plans[r.voxel];
    } else {
      r.plan = single_patch_plan(spot, budget);
      r.plan.method = "random-spot";
      r.plan.voxel = r.voxel;
    }
    r.unreachable = config.lighting.adaptive() && r.plan.unreachable;

    r.exposure = config.exposure ? *config.exposure : auto_exposure(renderer.render(r.plan, std::nullopt));
    r.noise_level = config.noise_sigma;
    if (config.noise_sigma > 0.0) {
      r.noise_sigma = config.noise_sigma * renderer.render(r.plan, r.proxy).mean();
    }
    if (r.unreachable && !config.keep_unreachable) {
      r.id.clear();  // dropped
    } else {
      write_png(out_dir / r.image, render_record(renderer, r, config.bit_depth));
    }
    records[i] = std::move(r);
  });

  DatasetManifest manifest;
  manifest.scene_hash = scene_hash(input_scene);
  manifest.master_seed = master_seed;
  manifest.config = config.to_json();
  std::size_t skipped = 0;
  for (SampleRecord& r : records) {
    if (!r.id.empty()) {
      manifest.records.push_back(std::move(r));
    } else {
      ++skipped;
    }
  }
  if (skipped > 0) {
    spdlog::warn("skipped {} samples placed in unreachable voxels", skipped);
  }
  manifest = split(std::move(manifest), config.split_ratio, mix64(master_seed ^ kSplitSalt));
  write_manifest(manifest, out_dir / "manifest.jsonl");

  if (config.inference_set) {
    std::vector<const SampleRecord*> tests;
    for (const SampleRecord& r : manifest.records) {
      if (r.split == "test") {
        tests.push_back(&r);
      }
    }
    std::vector<std::string> lines(tests.size());
    parallel_for(static_cast<int>(tests.size()), config.threads, [&](int t) {
      const SampleRecord& base = *tests[t];
      ensure_dir(out_dir / "inference" / base.id);
      std::string block;
      for (int v = 0; v < voxels; ++v) {
        SampleRecord view = base;
        view.plan = voxel_plans[v];
        view.image = fmt::format("inference/{}/v{:04d}.png", base.id, v);
        view.exposure =
            config.exposure ? *config.exposure : auto_exposure(renderer.render(view.plan, std::nullopt));
        view.noise_sigma = config.noise_sigma > 0.0 ? config.noise_sigma * renderer.render(view.plan, view.proxy).mean() : 0.0;
        view.seed = mix64(base.seed ^ mix64(static_cast<std::uint64_t>(v) + 1));
        write_png(out_dir / view.image, render_record(renderer, view, config.bit_depth));
        json line = {{"sample_id", base.id},
                     {"voxel", v},
                     {"image", view.image},
                     {"lighting", plan_json(view.plan)},
                     {"exposure", view.exposure},
                     {"noise_sigma", view.noise_sigma},
                     {"seed", view.seed}};
        block += line.dump();
        block += '\n';
      }
      lines[t] = std::move(block);
    });
    std::string all;
    for (const std::string& l : lines) {
      all += l;
    }
    write_text(out_dir / "inference.jsonl", all);
  }
  return manifest;
}

std::vector<Vec3> interpolate_polyline(std::span<const Vec3> waypoints, int steps) {
  if (steps < 2) {
    throw ValidationError("trajectory needs steps >= 2");
  }
  if (waypoints.size() < 2) {
    throw ValidationError("trajectory needs at least two waypoints");
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    cumulative.push_back(cumulative.back() + (waypoints[k] - waypoints[k - 1]).norm());
  }
  const double total = cumulative.back();
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(steps));
  std::size_t seg = 1;
  for (int s = 0; s < steps; ++s) {
    if (s == steps - 1) {
      out.push_back(waypoints.back());
      break;
    }
    const double target = total * s / (steps - 1);
    while (seg + 1 < cumulative.size() && cumulative[seg] < target) {
      ++seg;
    }
    const double len = cumulative[seg] - cumulative[seg - 1];
    const double t = len > 0.0 ? (target - cumulative[seg - 1]) / len : 0.0;
    out.push_back(waypoints[seg - 1] + t * (waypoints[seg] - waypoints[seg - 1]));
  }
  return out;
}

DatasetManifest generate_trajectory(const Scene& input_scene, std::span<const Vec3> waypoints, int steps,
                                    const TrajectoryOptions& options, const std::filesystem::path& out_dir) {
  auto scene = std::make_shared<const Scene>(with_resolution(input_scene, options.resolution));
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    if (!scene->grid.contains(waypoints[k])) {
      throw ValidationError(fmt::format("waypoint {} lies outside the NLOS grid", k));
    }
  }
  const std::vector<Vec3> centroids = interpolate_polyline(waypoints, steps);
  const ObjectTemplate& object = scene->object(options.object);
  const double budget = options.budget.value_or(scene->light.power);
  const double cap = options.cap.value_or(budget);

  auto transport = std::make_shared<const Transport>(scene);
  const Renderer renderer(transport);
  const Vec3 wall_centroid = scene->wall_centroid();
  ensure_dir(out_dir / "images");

  std::map<int, IlluminationPlan> plans;
  DatasetManifest manifest;
  manifest.scene_hash = scene_hash(input_scene);
  manifest.master_seed = options.seed;
  manifest.config = {{"trajectory", true},
                     {"steps", steps},
                     {"object", options.object},
                     {"mode", options.lighting.name()}};
  for (int s = 0; s < steps; ++s) {
    SampleRecord r;
    r.id = fmt::format("t{:06d}", s);
    r.image = fmt::format("images/{}.png", r.id);
    r.step = s;
    r.label = object.label;
    r.centroid = centroids[s];
    r.voxel = *scene->grid.locate(centroids[s]);
    r.seed = sample_seed(options.seed, static_cast<std::uint64_t>(s));
    std::mt19937_64 rng(r.seed);
    r.proxy = make_object_proxy(object, centroids[s], wall_centroid, rng);
    auto it = plans.find(r.voxel);
    if (it == plans.end()) {
      const LightingSpec lighting =
          options.lighting.adaptive() ? options.lighting : LightingSpec{LightingMode::AdaptiveOptimal, 1};
      it = plans.emplace(r.voxel, adaptive_plan(rank_patches(*transport, r.voxel), lighting, budget, cap, options.m))
               .first;
    }
    r.plan = it->second;
    r.unreachable = r.plan.unreachable;
    r.exposure = auto_exposure(renderer.render(r.plan, std::nullopt));
    write_png(out_dir / r.image, render_record(renderer, r, options.bit_depth));
    manifest.records.push_back(std::move(r));
  }
  write_manifest(manifest, out_dir / "manifest.jsonl");
  return manifest;
}

DatasetManifest split(DatasetManifest manifest, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    by_class[manifest.records[i].label].push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw ValidationError(fmt::format("class '{}' has fewer than 2 samples; cannot stratify", label));
    }
    std::shuffle(indices.begin(), indices.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(indices.size())));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      manifest.records[indices[k]].split = k < n_train ? "train" : "test";
    }
  }
  return manifest;
}

}  // namespace nlos
