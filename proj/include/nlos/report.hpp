#pragma once

#include "nlos/dataset.hpp"
#include "nlos/radiosity.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlos {

// Identification predictions below this softmax confidence mean "no object".
inline constexpr double kNoObjectConfidence = 0.5;

struct PredictionRecord {
  std::string sample_id;
  std::optional<Vec3> centroid;  // localization
  std::optional<std::string> label;  // identification
  double confidence = 1.0;
};

// Reads `sample_id,x,y,z,confidence` or `sample_id,class,confidence` CSV
// (header row required; the header picks the format).
[[nodiscard]] std::vector<PredictionRecord> read_predictions(std::istream& in);
void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions);

struct ClassMetrics {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy_pct = 0.0;
  std::size_t localized = 0;
  double mean_error_cm = 0.0;
};

struct Metrics {
  std::size_t localized = 0;
  // Mean Euclidean centroid distance, reported under the "MSE" name.
  double mean_error_cm = 0.0;
  // Mean squared distance, for readers who expect the literal definition.
  double mean_squared_error_cm2 = 0.0;
  std::size_t classified = 0;
  std::optional<double> accuracy_pct;
  std::map<std::string, ClassMetrics> per_class;
};

// Scores predictions against the manifest's test split (every record when
// the manifest carries no split). Every test record needs exactly one
// prediction; ids outside the manifest are rejected.
[[nodiscard]] Metrics score(const DatasetManifest& manifest, std::span<const PredictionRecord> predictions);

void write_metrics_csv(std::ostream& out, const Metrics& metrics);

struct EnergyRow {
  int support = 0;
  double adaptive = 0.0;    // B_NLOS, top-`support` patches, budget split evenly
  double floodlight = 0.0;  // B_NLOS, first `support` patches, budget split evenly
};

[[nodiscard]] std::vector<EnergyRow> energy_curve(const Transport& transport, int voxel,
                                                  std::span<const int> supports, double budget);
void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows);

struct CurveRow {
  double key = 0.0;
  std::size_t count = 0;
  double mean_error_cm = 0.0;
  double mean_squared_error_cm2 = 0.0;
};

// Localization error grouped by object footprint area (m^2) or by the noise
// sigma each record was rendered with.
[[nodiscard]] std::vector<CurveRow> error_by_object_size(const DatasetManifest& manifest,
                                                         std::span<const PredictionRecord> predictions);
[[nodiscard]] std::vector<CurveRow> error_by_noise(const DatasetManifest& manifest,
                                                   std::span<const PredictionRecord> predictions);
void write_curve_csv(std::ostream& out, std::string_view key_name, std::span<const CurveRow> rows);

}  // namespace nlos
