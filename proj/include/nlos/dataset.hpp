#pragma once

#include "nlos/optimizer.hpp"
#include "nlos/renderer.hpp"
#include "nlos/scene.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlos {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr std::string_view kNoObject = "no_object";

enum class LightingMode { AdaptiveOptimal, Ranked, RandomSpot, Distributed };

// "adaptive-optimal", "ranked-<k>", "random-spot" or "distributed".
struct LightingSpec {
  LightingMode mode = LightingMode::AdaptiveOptimal;
  int rank = 1;

  [[nodiscard]] std::string name() const;
  [[nodiscard]] bool adaptive() const { return mode != LightingMode::RandomSpot; }
  [[nodiscard]] static LightingSpec parse(std::string_view text);
};

struct GenerationConfig {
  std::string name = "dataset";
  int samples = 100;
  LightingSpec lighting;
  std::vector<std::string> classes;  // empty: every object class in the scene
  double no_object_fraction = 0.0;
  double noise_sigma = 0.0;          // relative to each image's mean intensity
  double split_ratio = 0.7;
  std::optional<double> budget;      // defaults to the scene light power
  std::optional<double> cap;         // distributed mode; defaults to the budget
  int m = 1;                         // distributed mode patch limit
  std::optional<int> resolution;     // square override of the camera resolution
  int bit_depth = 16;
  std::optional<double> exposure;    // fixed scale; default maps the brightest LOS-only pixel to 0.8
  bool keep_unreachable = true;
  bool inference_set = false;
  int threads = 1;                   // never affects outputs

  [[nodiscard]] nlohmann::json to_json() const;
  // Rejects unknown keys.
  [[nodiscard]] static GenerationConfig from_json(const nlohmann::json& j);
};

struct SampleRecord {
  std::string id;
  std::string image;  // relative to the dataset directory
  std::string label;  // object class or "no_object"
  std::optional<Vec3> centroid;
  int voxel = 0;
  IlluminationPlan plan;
  std::optional<NlosProxy> proxy;
  double noise_sigma = 0.0;  // absolute, linear units
  double noise_level = 0.0;  // configured sigma relative to the image mean
  std::uint64_t seed = 0;
  double exposure = 1.0;
  bool unreachable = false;
  std::string split;  // "train", "test" or empty
  std::optional<int> step;  // trajectory time index
};

struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  std::string scene_hash;
  std::uint64_t master_seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<SampleRecord> records;

  [[nodiscard]] const SampleRecord* find(std::string_view id) const;
};

// JSON Lines: header object, then one record per line.
[[nodiscard]] std::string serialize_manifest(const DatasetManifest& manifest);
[[nodiscard]] DatasetManifest parse_manifest(std::string_view text);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
[[nodiscard]] DatasetManifest read_manifest(const std::filesystem::path& path);
[[nodiscard]] std::string manifest_hash(const DatasetManifest& manifest);

[[nodiscard]] std::string scene_hash(const Scene& scene);

// Per-sample seed from the master seed; independent of generation order.
[[nodiscard]] std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index);

// The seeded draws behind one generated sample, in stream order: class,
// voxel, centroid position inside the voxel, random spot patch.
struct SampleDraw {
  std::string label;
  int voxel = 0;
  Vec3 fraction = Vec3::Constant(0.5);  // centroid offset within the voxel, per axis
  int spot = 0;
};

[[nodiscard]] SampleDraw draw_sample(std::mt19937_64& rng, std::span<const std::string> labels,
                                     double no_object_fraction, int voxels, int patches);

// Proxy standing in for one object instance: the template's footprint area,
// facing the wall centroid, tilted by an aspect-dependent angle toward a
// random azimuth.
[[nodiscard]] NlosProxy make_object_proxy(const ObjectTemplate& object, const Vec3& centroid,
                                          const Vec3& wall_centroid, std::mt19937_64& rng);

// Renders a record's image exactly as the generator stored it.
[[nodiscard]] Raster render_record(const Renderer& renderer, const SampleRecord& record, int bit_depth);

// Scene copy with the camera resolution overridden (square).
[[nodiscard]] Scene with_resolution(Scene scene, std::optional<int> resolution);

// Lighting for one voxel under an adaptive mode.
[[nodiscard]] IlluminationPlan adaptive_plan(const PatchRanking& ranking, const LightingSpec& lighting,
                                             double budget, double cap, int m);

// Writes `<out_dir>/manifest.jsonl` and `<out_dir>/images/*.png` (plus
// `<out_dir>/inference/` when requested) and returns the manifest.
[[nodiscard]] DatasetManifest generate(const Scene& scene, const GenerationConfig& config,
                                       std::uint64_t master_seed, const std::filesystem::path& out_dir);

struct TrajectoryOptions {
  std::string object = "sphere";
  LightingSpec lighting;
  std::optional<double> budget;
  std::optional<double> cap;
  int m = 1;
  std::optional<int> resolution;
  int bit_depth = 16;
  std::uint64_t seed = 0;
};

// `steps` centroids spaced uniformly by arc length along the polyline,
// endpoints included.
[[nodiscard]] std::vector<Vec3> interpolate_polyline(std::span<const Vec3> waypoints, int steps);

[[nodiscard]] DatasetManifest generate_trajectory(const Scene& scene, std::span<const Vec3> waypoints,
                                                  int steps, const TrajectoryOptions& options,
                                                  const std::filesystem::path& out_dir);

// Stratified (per-class) seeded split; ratio is the training fraction.
[[nodiscard]] DatasetManifest split(DatasetManifest manifest, double ratio, std::uint64_t seed);

}  // namespace nlos
