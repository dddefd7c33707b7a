// Size the model for a fixed token budget: parameter counts for three widths,
// then the constant-product and fixed-iteration planners.
#include <cstdio>

#include "oneepoch/model_budget.hpp"
#include "oneepoch/planner.hpp"

using namespace oneepoch;

int main() {
  std::vector<Candidate> candidates;
  for (std::int64_t d : {256, 512, 1024}) {
    const auto cfg = lm1b_config(d);
    const auto p = count_params(cfg);
    std::printf("d=%-5lld params %10lld  (blocks %lld, embeddings %lld)\n", static_cast<long long>(d),
                static_cast<long long>(p.total()), static_cast<long long>(p.attention + p.feed_forward),
                static_cast<long long>(p.total() - p.attention - p.feed_forward));
    candidates.push_back(Candidate::from_config("d" + std::to_string(d), cfg));
  }

  // 65000 iterations of 6912 tokens spent on the smallest model
  const double t0 = 65000.0 * 6912.0;
  const auto plan = plan_constant_product(candidates[0].params, t0, candidates);
  std::printf("\nconstant product from %s: pick %s, T=%.4g tokens, %lld iterations, T/P=%.3f\n",
              candidates[0].id.c_str(), plan.chosen.id.c_str(), plan.tokens, static_cast<long long>(plan.iterations),
              plan.ratio);

  const auto fixed = plan_fixed_iterations(65000, 6912, candidates);
  std::printf("fixed 65000 iterations: pick %s, T/P=%.3f\n", fixed.chosen.id.c_str(), fixed.ratio);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    std::printf("  %-6s objective %.4f\n", candidates[i].id.c_str(), fixed.objectives[i]);
}
