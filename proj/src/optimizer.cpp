#include "nlos/optimizer.hpp"

#include "nlos/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nlos {

namespace {

double linear_objective(const PatchRanking& ranking, const IlluminationPlan& plan) {
  const std::vector<double> c = ranking.per_unit();
  double sum = 0.0;
  for (const PlanEntry& e : plan.entries) {
    sum += c[e.patch] * e.exitance;
  }
  return sum;
}

void finish(IlluminationPlan& plan, const PatchRanking& ranking) {
  plan.voxel = ranking.voxel;
  plan.objective = linear_objective(ranking, plan);
  plan.unreachable = !(plan.objective > 0.0);
}

void check_budget(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw ValidationError(fmt::format("budget must be a positive finite number (got {})", budget));
  }
}

}  // namespace

std::vector<double> PatchRanking::per_unit() const {
  std::vector<double> c(order.size(), 0.0);
  for (const RankedPatch& r : order) {
    c[r.patch] = r.contribution / unit_power;
  }
  return c;
}

PatchRanking rank_patches(const Transport& transport, int voxel, double unit_power) {
  if (!(unit_power > 0.0)) {
    throw ValidationError("unit_power must be > 0");
  }
  const ProxyCoupling coupling = transport.couple(transport.voxel_proxy(voxel));
  PatchRanking ranking;
  ranking.voxel = voxel;
  ranking.unit_power = unit_power;
  ranking.order.reserve(static_cast<std::size_t>(transport.size()));
  for (int i = 0; i < transport.size(); ++i) {
    const RadiosityReport r = evaluate(transport, single_patch_plan(i, unit_power), &coupling);
    ranking.order.push_back({i, r.nlos});
  }
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [](const RankedPatch& a, const RankedPatch& b) { return a.contribution > b.contribution; });
  return ranking;
}

IlluminationPlan select_top_m(const PatchRanking& ranking, int m, double budget) {
  const int n = static_cast<int>(ranking.order.size());
  if (m < 1 || m > n) {
    throw ValidationError(fmt::format("m = {} outside [1, {}]", m, n));
  }
  check_budget(budget);
  IlluminationPlan plan;
  plan.budget = budget;
  plan.method = "top-m";
  const double each = budget / m;
  for (int k = 0; k < m; ++k) {
    plan.entries.push_back({ranking.order[k].patch, each});
  }
  finish(plan, ranking);
  return plan;
}

IlluminationPlan select_top_m(const Transport& transport, int voxel, int m, double budget) {
  IlluminationPlan plan = select_top_m(rank_patches(transport, voxel), m, budget);
  plan.objective = nlos_objective(transport, plan, voxel);
  return plan;
}

IlluminationPlan distribute_power(const PatchRanking& ranking, int m, double budget, double cap) {
  const int n = static_cast<int>(ranking.order.size());
  check_budget(budget);
  if (!(cap > 0.0)) {
    throw ValidationError("cap must be > 0");
  }
  if (m < 1) {
    throw ValidationError(fmt::format("m = {} must be >= 1", m));
  }
  const int usable = std::min(m, n);
  const double capacity = usable * cap;
  if (budget > capacity * (1.0 + 1e-12)) {
    throw InfeasibleError(fmt::format(
        "budget {} cannot be placed on {} patch(es) capped at {}", budget, usable, cap));
  }

  IlluminationPlan plan;
  plan.budget = budget;
  plan.cap = cap;
  plan.method = "distribute";
  // Full caps in descending contribution order, remainder on the next patch.
  const int full = std::min(usable, static_cast<int>(std::floor(budget / cap * (1.0 + 1e-12))));
  for (int k = 0; k < full; ++k) {
    plan.entries.push_back({ranking.order[k].patch, cap});
  }
  const double remainder = budget - full * cap;
  if (remainder > budget * 1e-12 && full < usable) {
    plan.entries.push_back({ranking.order[full].patch, remainder});
  } else if (!plan.entries.empty() && remainder != 0.0) {
    // Absorb rounding so the plan spends exactly the budget.
    plan.entries.back().exitance += remainder;
  }
  finish(plan, ranking);
  return plan;
}

IlluminationPlan distribute_power(const Transport& transport, int voxel, int m, double budget, double cap) {
  IlluminationPlan plan = distribute_power(rank_patches(transport, voxel), m, budget, cap);
  plan.objective = nlos_objective(transport, plan, voxel);
  return plan;
}

IlluminationPlan floodlight_plan(int patch_count, double budget, int support) {
  if (support < 1 || support > patch_count) {
    throw ValidationError(fmt::format("support = {} outside [1, {}]", support, patch_count));
  }
  check_budget(budget);
  IlluminationPlan plan;
  plan.budget = budget;
  plan.method = "floodlight";
  const double each = budget / support;
  for (int i = 0; i < support; ++i) {
    plan.entries.push_back({i, each});
  }
  return plan;
}

IlluminationPlan ranked_patch_plan(const PatchRanking& ranking, int rank, double budget) {
  const int n = static_cast<int>(ranking.order.size());
  if (rank < 1 || rank > n) {
    throw ValidationError(fmt::format("rank {} outside [1, {}]", rank, n));
  }
  check_budget(budget);
  IlluminationPlan plan;
  plan.budget = budget;
  plan.method = fmt::format("ranked-{}", rank);
  plan.entries.push_back({ranking.order[rank - 1].patch, budget});
  finish(plan, ranking);
  return plan;
}

BaselinePlans baseline_plans(const PatchRanking& ranking, int m, double budget, double cap,
                             std::uint64_t seed) {
  const int n = static_cast<int>(ranking.order.size());
  if (m < 1 || m > n) {
    throw ValidationError(fmt::format("m = {} outside [1, {}]", m, n));
  }
  check_budget(budget);
  const double each = budget / m;
  if (each > cap * (1.0 + 1e-12)) {
    throw InfeasibleError(fmt::format("even split {} per patch exceeds cap {}", each, cap));
  }
  BaselinePlans out;
  out.method1 = select_top_m(ranking, m, budget);
  out.method1.cap = cap;
  out.method1.method = "method1";

  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < m; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(ids[k], ids[pick(rng)]);
  }
  IlluminationPlan& m2 = out.method2;
  m2.budget = budget;
  m2.cap = cap;
  m2.method = "method2";
  for (int k = 0; k < m; ++k) {
    m2.entries.push_back({ids[k], each});
  }
  finish(m2, ranking);
  return out;
}

BaselinePlans baseline_plans(const Transport& transport, int voxel, int m, double budget, double cap,
                             std::uint64_t seed) {
  BaselinePlans out = baseline_plans(rank_patches(transport, voxel), m, budget, cap, seed);
  out.method1.objective = nlos_objective(transport, out.method1, voxel);
  out.method2.objective = nlos_objective(transport, out.method2, voxel);
  return out;
}

double nlos_objective(const Transport& transport, const IlluminationPlan& plan, int voxel) {
  return evaluate(transport, plan, voxel).nlos;
}

}  // namespace nlos
