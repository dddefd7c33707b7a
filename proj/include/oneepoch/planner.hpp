#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oneepoch/error.hpp"
#include "oneepoch/model_budget.hpp"
#include "oneepoch/range.hpp"

namespace oneepoch {

inline constexpr double kDefaultTokensPerParam = 5.0;

/// A model size the planner may choose. `params` is usually
/// count_params(config).total() but may carry a reported figure instead.
struct Candidate {
  std::string id;
  double params = 0.0;
  double tokens_per_iter = 6912.0;

  static Candidate from_config(std::string id, const ModelConfig& cfg) {
    return {std::move(id), static_cast<double>(count_params(cfg).total()),
            static_cast<double>(cfg.tokens_per_iter)};
  }
};

enum class PlanMethod { constant_product, fixed_iterations, range_table };

constexpr std::string_view to_string(PlanMethod m) noexcept {
  switch (m) {
    case PlanMethod::constant_product: return "constant-product";
    case PlanMethod::fixed_iterations: return "fixed-iterations";
    case PlanMethod::range_table: return "range-table";
  }
  return "unknown";
}

struct Plan {
  Candidate chosen;
  double tokens = 0.0;                 // T
  std::int64_t iterations = 0;         // floor(T / c)
  double dropped_tokens = 0.0;         // T - c * iterations
  double ratio = 0.0;                  // T / P
  double objective = 0.0;              // |ln(target) - ln(T / P)|
  double target = kDefaultTokensPerParam;
  PlanMethod method = PlanMethod::constant_product;
  std::vector<double> objectives;      // per candidate, input order
};

/// |ln(target) - ln(ratio)|
inline double ratio_objective(double target, double ratio) { return std::abs(std::log(target) - std::log(ratio)); }

namespace detail {

inline void validate_candidates(const std::vector<Candidate>& candidates) {
  require(!candidates.empty(), "planner needs at least one candidate");
  for (const auto& c : candidates) {
    require(std::isfinite(c.params) && c.params > 0.0, "candidate '" + c.id + "' has non-positive params");
    require(std::isfinite(c.tokens_per_iter) && c.tokens_per_iter > 0.0,
            "candidate '" + c.id + "' has non-positive tokens_per_iter");
  }
}

template <typename TokensFor>
Plan choose(const std::vector<Candidate>& candidates, double target, PlanMethod method, TokensFor tokens_for) {
  validate_candidates(candidates);
  require(std::isfinite(target) && target > 0.0, "target ratio must be positive");
  Plan plan;
  plan.target = target;
  plan.method = method;
  std::size_t best = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double t = tokens_for(candidates[i]);
    const double obj = ratio_objective(target, t / candidates[i].params);
    plan.objectives.push_back(obj);
    // objectives within rounding noise count as a tie
    const double eps = 1e-12 * std::max(1.0, plan.objectives[best]);
    const bool better = obj < plan.objectives[best] - eps ||
                        (std::abs(obj - plan.objectives[best]) <= eps && candidates[i].params < candidates[best].params);
    if (i == 0 || better) best = i;
  }
  const auto& c = candidates[best];
  plan.chosen = c;
  plan.tokens = tokens_for(c);
  plan.ratio = plan.tokens / c.params;
  plan.objective = plan.objectives[best];
  plan.iterations = static_cast<std::int64_t>(std::floor(plan.tokens / c.tokens_per_iter));
  plan.dropped_tokens = plan.tokens - c.tokens_per_iter * static_cast<double>(plan.iterations);
  return plan;
}

}  // namespace detail

/// Keep P*T = P0*T0 and pick the candidate whose T/P is closest to `target`
/// in log distance. Ties go to the smaller model.
inline Plan plan_constant_product(double p0, double t0, const std::vector<Candidate>& candidates,
                                  double target = kDefaultTokensPerParam) {
  detail::require(std::isfinite(p0) && p0 > 0.0 && std::isfinite(t0) && t0 > 0.0, "P0 and T0 must be positive");
  const double budget = p0 * t0;
  return detail::choose(candidates, target, PlanMethod::constant_product,
                        [budget](const Candidate& c) { return budget / c.params; });
}

/// T = c * I is fixed; pick the candidate whose T/P is closest to `target`.
inline Plan plan_fixed_iterations(double iterations, double tokens_per_iter, const std::vector<Candidate>& candidates,
                                  double target = kDefaultTokensPerParam) {
  detail::require(std::isfinite(iterations) && iterations > 0.0, "iterations must be positive");
  detail::require(std::isfinite(tokens_per_iter) && tokens_per_iter > 0.0, "tokens_per_iter must be positive");
  const double tokens = iterations * tokens_per_iter;
  std::vector<Candidate> cs = candidates;
  for (auto& c : cs) c.tokens_per_iter = tokens_per_iter;
  return detail::choose(cs, target, PlanMethod::fixed_iterations, [tokens](const Candidate&) { return tokens; });
}

struct RangeEntry {
  Candidate candidate;
  IterRange native;
};

/// Pick the candidate whose optimal native range contains `iterations`
/// (smallest model if several do). Otherwise the candidate with a range
/// boundary nearest to `iterations` in log distance; empty ranges never win.
inline Plan plan_from_ranges(double iterations, const std::vector<RangeEntry>& ranges,
                             double target = kDefaultTokensPerParam) {
  detail::require(!ranges.empty(), "plan_from_ranges needs at least one range");
  detail::require(std::isfinite(iterations) && iterations > 0.0, "iterations must be positive");
  std::vector<Candidate> cs;
  for (const auto& r : ranges) cs.push_back(r.candidate);
  detail::validate_candidates(cs);

  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < ranges.size(); ++i)
    if (ranges[i].native.contains(iterations) && (!pick || cs[i].params < cs[*pick].params)) pick = i;

  if (!pick) {
    double best = kInf;
    const double lx = std::log(iterations);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const auto& r = ranges[i].native;
      if (r.is_empty()) continue;
      const double dist = iterations < r.lo ? std::log(r.lo) - lx : lx - std::log(r.hi);
      if (dist < best || (dist == best && cs[i].params < cs[*pick].params)) {
        best = dist;
        pick = i;
      }
    }
  }
  detail::require(pick.has_value(), "every range is empty", ErrorCode::domain_error);

  Plan plan;
  plan.method = PlanMethod::range_table;
  plan.target = target;
  plan.chosen = cs[*pick];
  plan.tokens = iterations * plan.chosen.tokens_per_iter;
  plan.iterations = static_cast<std::int64_t>(std::floor(iterations));
  plan.ratio = plan.tokens / plan.chosen.params;
  plan.objective = ratio_objective(target, plan.ratio);
  for (const auto& c : cs) plan.objectives.push_back(ratio_objective(target, plan.tokens / c.params));
  return plan;
}

}  // namespace oneepoch
