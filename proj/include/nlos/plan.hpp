#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace nlos {

struct PlanEntry {
  int patch = 0;
  double exitance = 0.0;  // radiant exitance deposited on the patch, W/m^2

  bool operator==(const PlanEntry&) const = default;
};

// Which LOS patches the projector lights and how strongly.
struct IlluminationPlan {
  std::vector<PlanEntry> entries;
  double budget = 0.0;                                    // T
  double cap = std::numeric_limits<double>::infinity();  // I_o
  std::optional<int> voxel;
  std::string method;
  double objective = 0.0;  // B_NLOS achieved for `voxel`, when computed
  bool unreachable = false;

  [[nodiscard]] double total() const;
  [[nodiscard]] std::vector<int> patch_set() const;  // sorted indices
  [[nodiscard]] IlluminationPlan scaled(double factor) const;
  // Throws ValidationError when an invariant of the plan fails.
  void validate(int patch_count) const;
};

[[nodiscard]] IlluminationPlan single_patch_plan(int patch, double exitance);

// Plain-text plan format (docs/formats.md).
void write_plan(std::ostream& out, const IlluminationPlan& plan);
[[nodiscard]] IlluminationPlan read_plan(std::istream& in);

}  // namespace nlos
