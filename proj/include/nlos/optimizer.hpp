#pragma once

#include "nlos/plan.hpp"
#include "nlos/radiosity.hpp"

#include <cstdint>
#include <vector>

namespace nlos {

struct RankedPatch {
  int patch = 0;
  double contribution = 0.0;  // B_NLOS with this patch lit alone at unit power
};

// Patches ordered by NLOS contribution, descending; ties by ascending index.
struct PatchRanking {
  int voxel = 0;
  double unit_power = 1.0;
  std::vector<RankedPatch> order;

  // Contribution per unit exitance, c_i, indexed by patch id.
  [[nodiscard]] std::vector<double> per_unit() const;
};

[[nodiscard]] PatchRanking rank_patches(const Transport& transport, int voxel, double unit_power = 1.0);

// Top-m patches, budget split evenly.
[[nodiscard]] IlluminationPlan select_top_m(const PatchRanking& ranking, int m, double budget);
[[nodiscard]] IlluminationPlan select_top_m(const Transport& transport, int voxel, int m, double budget);

// Water-fill the budget over at most m patches, each capped at `cap`.
// Throws InfeasibleError when budget > min(m, N) * cap.
[[nodiscard]] IlluminationPlan distribute_power(const PatchRanking& ranking, int m, double budget, double cap);
[[nodiscard]] IlluminationPlan distribute_power(const Transport& transport, int voxel, int m,
                                                double budget, double cap);

// First `support` patches in index order, budget split evenly.
[[nodiscard]] IlluminationPlan floodlight_plan(int patch_count, double budget, int support);

// Lights the ranking's k-th patch (1-based) alone with the full budget.
[[nodiscard]] IlluminationPlan ranked_patch_plan(const PatchRanking& ranking, int rank, double budget);

struct BaselinePlans {
  IlluminationPlan method1;  // optimal selection, even split
  IlluminationPlan method2;  // seeded random selection, even split
};

[[nodiscard]] BaselinePlans baseline_plans(const PatchRanking& ranking, int m, double budget, double cap,
                                           std::uint64_t seed);
[[nodiscard]] BaselinePlans baseline_plans(const Transport& transport, int voxel, int m, double budget,
                                           double cap, std::uint64_t seed);

// B_NLOS of the plan for the voxel's default proxy.
[[nodiscard]] double nlos_objective(const Transport& transport, const IlluminationPlan& plan, int voxel);

}  // namespace nlos
