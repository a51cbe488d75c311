#include "nlos/report.hpp"

#include "nlos/error.hpp"
#include "nlos/optimizer.hpp"

#include <fmt/format.h>

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace nlos {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double to_number(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ParseError(fmt::format("predictions line {}: '{}' is not a number", line_no, text));
  }
  return v;
}

enum class PredictionFormat { Localization, Identification };

struct Outcome {
  const SampleRecord* record;
  const PredictionRecord* prediction;
};

// Test records joined to their predictions, after id checks.
std::vector<Outcome> join(const DatasetManifest& manifest, std::span<const PredictionRecord> predictions) {
  bool has_split = false;
  for (const SampleRecord& r : manifest.records) {
    has_split = has_split || !r.split.empty();
  }
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const PredictionRecord& p : predictions) {
    const SampleRecord* r = manifest.find(p.sample_id);
    if (r == nullptr) {
      throw ValidationError(fmt::format("prediction for unknown sample '{}'", p.sample_id));
    }
    if (!by_id.emplace(p.sample_id, &p).second) {
      throw ValidationError(fmt::format("duplicate prediction for sample '{}'", p.sample_id));
    }
  }
  std::vector<Outcome> out;
  for (const SampleRecord& r : manifest.records) {
    if (has_split && r.split != "test") {
      continue;
    }
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      throw ValidationError(fmt::format("no prediction for test sample '{}'", r.id));
    }
    out.push_back({&r, it->second});
  }
  return out;
}

std::optional<double> error_cm(const Outcome& o) {
  if (!o.record->centroid || !o.prediction->centroid) {
    return std::nullopt;
  }
  return (*o.record->centroid - *o.prediction->centroid).norm() * 100.0;
}

std::string predicted_class(const PredictionRecord& p) {
  return p.confidence < kNoObjectConfidence ? std::string(kNoObject) : *p.label;
}

template <typename KeyFn>
std::vector<CurveRow> error_curve(const DatasetManifest& manifest, std::span<const PredictionRecord> predictions,
                                  KeyFn key_of) {
  std::map<double, CurveRow> rows;
  for (const Outcome& o : join(manifest, predictions)) {
    const std::optional<double> key = key_of(*o.record);
    const std::optional<double> e = error_cm(o);
    if (!key || !e) {
      continue;
    }
    CurveRow& row = rows[*key];
    row.key = *key;
    ++row.count;
    row.mean_error_cm += *e;
    row.mean_squared_error_cm2 += *e * *e;
  }
  std::vector<CurveRow> out;
  for (auto& [key, row] : rows) {
    row.mean_error_cm /= static_cast<double>(row.count);
    row.mean_squared_error_cm2 /= static_cast<double>(row.count);
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PredictionFormat> format;
  std::vector<PredictionRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const std::vector<std::string> f = split_csv(t);
    if (!format) {
      if (f == std::vector<std::string>{"sample_id", "x", "y", "z", "confidence"}) {
        format = PredictionFormat::Localization;
      } else if (f == std::vector<std::string>{"sample_id", "class", "confidence"}) {
        format = PredictionFormat::Identification;
      } else {
        throw ParseError(fmt::format("predictions line {}: unrecognized header '{}'", line_no, t));
      }
      continue;
    }
    const std::size_t want = *format == PredictionFormat::Localization ? 5 : 3;
    if (f.size() != want) {
      throw ParseError(fmt::format("predictions line {}: expected {} fields, got {}", line_no, want, f.size()));
    }
    if (f[0].empty()) {
      throw ParseError(fmt::format("predictions line {}: empty sample_id", line_no));
    }
    PredictionRecord p;
    p.sample_id = f[0];
    if (*format == PredictionFormat::Localization) {
      p.centroid = Vec3(to_number(f[1], line_no), to_number(f[2], line_no), to_number(f[3], line_no));
      p.confidence = to_number(f[4], line_no);
    } else {
      if (f[1].empty()) {
        throw ParseError(fmt::format("predictions line {}: empty class", line_no));
      }
      p.label = f[1];
      p.confidence = to_number(f[2], line_no);
    }
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
      throw ParseError(fmt::format("predictions line {}: confidence outside [0, 1]", line_no));
    }
    out.push_back(std::move(p));
  }
  if (!format) {
    throw ParseError("predictions: missing header row");
  }
  return out;
}

void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions) {
  const bool localization = predictions.empty() || predictions.front().centroid.has_value();
  out << (localization ? "sample_id,x,y,z,confidence\n" : "sample_id,class,confidence\n");
  for (const PredictionRecord& p : predictions) {
    if (localization != p.centroid.has_value()) {
      throw ValidationError("predictions mix localization and identification rows");
    }
    if (localization) {
      out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", p.sample_id, p.centroid->x(), p.centroid->y(),
                         p.centroid->z(), p.confidence);
    } else {
      out << fmt::format("{},{},{:.17g}\n", p.sample_id, p.label.value_or(""), p.confidence);
    }
  }
}

Metrics score(const DatasetManifest& manifest, std::span<const PredictionRecord> predictions) {
  Metrics m;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t correct = 0;
  for (const Outcome& o : join(manifest, predictions)) {
    ClassMetrics& c = m.per_class[o.record->label];
    ++c.count;
    if (const std::optional<double> e = error_cm(o)) {
      ++m.localized;
      sum += *e;
      sum_sq += *e * *e;
      ++c.localized;
      c.mean_error_cm += *e;
    }
    if (o.prediction->label) {
      ++m.classified;
      if (predicted_class(*o.prediction) == o.record->label) {
        ++correct;
        ++c.correct;
      }
    }
  }
  if (m.localized > 0) {
    m.mean_error_cm = sum / static_cast<double>(m.localized);
    m.mean_squared_error_cm2 = sum_sq / static_cast<double>(m.localized);
  }
  if (m.classified > 0) {
    m.accuracy_pct = 100.0 * static_cast<double>(correct) / static_cast<double>(m.classified);
  }
  for (auto& [label, c] : m.per_class) {
    if (c.localized > 0) {
      c.mean_error_cm /= static_cast<double>(c.localized);
    }
    c.accuracy_pct = c.count > 0 ? 100.0 * static_cast<double>(c.correct) / static_cast<double>(c.count) : 0.0;
  }
  return m;
}

void write_metrics_csv(std::ostream& out, const Metrics& m) {
  out << "metric,class,value\n";
  out << fmt::format("localized,all,{}\n", m.localized);
  if (m.localized > 0) {
    out << fmt::format("mse_cm,all,{:.17g}\n", m.mean_error_cm);
    out << fmt::format("mean_squared_error_cm2,all,{:.17g}\n", m.mean_squared_error_cm2);
  }
  out << fmt::format("classified,all,{}\n", m.classified);
  if (m.accuracy_pct) {
    out << fmt::format("accuracy_pct,all,{:.17g}\n", *m.accuracy_pct);
  }
  for (const auto& [label, c] : m.per_class) {
    out << fmt::format("count,{},{}\n", label, c.count);
    if (c.localized > 0) {
      out << fmt::format("mse_cm,{},{:.17g}\n", label, c.mean_error_cm);
    }
    if (m.classified > 0) {
      out << fmt::format("accuracy_pct,{},{:.17g}\n", label, c.accuracy_pct);
    }
  }
}

std::vector<EnergyRow> energy_curve(const Transport& transport, int voxel, std::span<const int> supports,
                                    double budget) {
  const int n = transport.size();
  const PatchRanking ranking = rank_patches(transport, voxel);
  const ProxyCoupling coupling = transport.couple(transport.voxel_proxy(voxel));
  std::vector<EnergyRow> rows;
  rows.reserve(supports.size());
  for (const int s : supports) {
    if (s < 1 || s > n) {
      throw ValidationError(fmt::format("support {} outside [1, {}]", s, n));
    }
    EnergyRow row;
    row.support = s;
    row.adaptive = evaluate(transport, select_top_m(ranking, s, budget), &coupling).nlos;
    row.floodlight = evaluate(transport, floodlight_plan(n, budget, s), &coupling).nlos;
    rows.push_back(row);
  }
  return rows;
}

void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows) {
  out << "support,adaptive_b_nlos,floodlight_b_nlos\n";
  for (const EnergyRow& r : rows) {
    out << fmt::format("{},{:.17g},{:.17g}\n", r.support, r.adaptive, r.floodlight);
  }
}

std::vector<CurveRow> error_by_object_size(const DatasetManifest& manifest,
                                           std::span<const PredictionRecord> predictions) {
  return error_curve(manifest, predictions, [](const SampleRecord& r) -> std::optional<double> {
    if (!r.proxy) {
      return std::nullopt;
    }
    return r.proxy->area;
  });
}

std::vector<CurveRow> error_by_noise(const DatasetManifest& manifest, std::span<const PredictionRecord> predictions) {
  return error_curve(manifest, predictions,
                     [](const SampleRecord& r) -> std::optional<double> { return r.noise_level; });
}

void write_curve_csv(std::ostream& out, std::string_view key_name, std::span<const CurveRow> rows) {
  out << fmt::format("{},count,mse_cm,mean_squared_error_cm2\n", key_name);
  for (const CurveRow& r : rows) {
    out << fmt::format("{:.17g},{},{:.17g},{:.17g}\n", r.key, r.count, r.mean_error_cm, r.mean_squared_error_cm2);
  }
}

}  // namespace nlos
