#include "nlos/plan.hpp"

#include "nlos/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace nlos {

namespace {

constexpr double kPlanSlack = 1e-9;

std::string number(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return fmt::format("{:.17g}", v);
}

double parse_number(const std::string& token, int line) {
  if (token == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) {
      throw std::invalid_argument(token);
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("plan line {}: '{}' is not a number", line, token));
  }
}

}  // namespace

double IlluminationPlan::total() const {
  double sum = 0.0;
  for (const PlanEntry& e : entries) {
    sum += e.exitance;
  }
  return sum;
}

std::vector<int> IlluminationPlan::patch_set() const {
  std::vector<int> ids;
  ids.reserve(entries.size());
  for (const PlanEntry& e : entries) {
    ids.push_back(e.patch);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

IlluminationPlan IlluminationPlan::scaled(double factor) const {
  IlluminationPlan out = *this;
  for (PlanEntry& e : out.entries) {
    e.exitance *= factor;
  }
  out.budget *= factor;
  out.cap *= factor;
  out.objective *= factor;
  return out;
}

void IlluminationPlan::validate(int patch_count) const {
  std::vector<int> ids = patch_set();
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("plan lists a patch more than once");
  }
  for (const PlanEntry& e : entries) {
    if (e.patch < 0 || e.patch >= patch_count) {
      throw ValidationError(fmt::format("plan patch {} outside [0, {})", e.patch, patch_count));
    }
    if (!(e.exitance >= 0.0)) {
      throw ValidationError(fmt::format("plan exitance on patch {} is negative", e.patch));
    }
    if (e.exitance > cap + kPlanSlack * std::max(1.0, std::abs(cap))) {
      throw ValidationError(fmt::format("plan exitance on patch {} exceeds cap", e.patch));
    }
  }
  if (total() > budget + kPlanSlack * std::max(1.0, std::abs(budget))) {
    throw ValidationError("plan exceeds its power budget");
  }
}

IlluminationPlan single_patch_plan(int patch, double exitance) {
  IlluminationPlan plan;
  plan.entries.push_back({patch, exitance});
  plan.budget = exitance;
  plan.method = "single";
  return plan;
}

void write_plan(std::ostream& out, const IlluminationPlan& plan) {
  out << "# nlos-radiant plan v1\n";
  out << "method " << (plan.method.empty() ? "custom" : plan.method) << '\n';
  out << "voxel " << (plan.voxel ? std::to_string(*plan.voxel) : "none") << '\n';
  out << "budget " << number(plan.budget) << '\n';
  out << "cap " << number(plan.cap) << '\n';
  out << "objective " << number(plan.objective) << '\n';
  out << "unreachable " << (plan.unreachable ? 1 : 0) << '\n';
  for (const PlanEntry& e : plan.entries) {
    out << "entry " << e.patch << ' ' << number(e.exitance) << '\n';
  }
}

IlluminationPlan read_plan(std::istream& in) {
  IlluminationPlan plan;
  std::string line;
  int lineno = 0;
  bool saw_budget = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    std::vector<std::string> args;
    for (std::string tok; fields >> tok;) {
      args.push_back(tok);
    }
    const auto want = [&](std::size_t n) {
      if (args.size() != n) {
        throw ParseError(fmt::format("plan line {}: '{}' expects {} value(s)", lineno, key, n));
      }
    };
    if (key == "method") {
      want(1);
      plan.method = args[0];
    } else if (key == "voxel") {
      want(1);
      if (args[0] != "none") {
        plan.voxel = static_cast<int>(parse_number(args[0], lineno));
      }
    } else if (key == "budget") {
      want(1);
      plan.budget = parse_number(args[0], lineno);
      saw_budget = true;
    } else if (key == "cap") {
      want(1);
      plan.cap = parse_number(args[0], lineno);
    } else if (key == "objective") {
      want(1);
      plan.objective = parse_number(args[0], lineno);
    } else if (key == "unreachable") {
      want(1);
      plan.unreachable = args[0] == "1";
    } else if (key == "entry") {
      want(2);
      plan.entries.push_back(
          {static_cast<int>(parse_number(args[0], lineno)), parse_number(args[1], lineno)});
    } else {
      throw ParseError(fmt::format("plan line {}: unknown key '{}'", lineno, key));
    }
  }
  if (!saw_budget) {
    plan.budget = plan.total();
  }
  return plan;
}

}  // namespace nlos
