#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oneepoch/curve.hpp"
#include "oneepoch/error.hpp"

namespace oneepoch {

/// Dropout probability per epoch (index 0 is epoch 1). Zero for the first
/// epoch and non-decreasing afterwards; epochs past the end reuse the last
/// entry.
class DropoutSchedule {
 public:
  DropoutSchedule() : values_{0.0} {}

  explicit DropoutSchedule(std::vector<double> values) : values_(std::move(values)) {
    using detail::require;
    constexpr auto bad = ErrorCode::invalid_schedule;
    require(!values_.empty(), "dropout schedule is empty", bad);
    require(values_.front() == 0.0, "dropout must be zero in the first epoch", bad);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      require(values_[i] >= 0.0 && values_[i] < 1.0, "dropout probabilities must lie in [0, 1)", bad);
      if (i > 0) require(values_[i] >= values_[i - 1], "dropout schedule must be non-decreasing", bad);
    }
  }

  static DropoutSchedule from_function(const std::function<double(int)>& f, int epochs) {
    detail::require(epochs >= 1, "schedule needs at least one epoch");
    std::vector<double> v;
    for (int e = 1; e <= epochs; ++e) v.push_back(f(e));
    return DropoutSchedule(std::move(v));
  }

  [[nodiscard]] double at(int epoch) const {
    detail::require(epoch >= 1, "epochs are numbered from 1");
    return values_[std::min<std::size_t>(static_cast<std::size_t>(epoch - 1), values_.size() - 1)];
  }

  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

inline double adaptive_dropout(int epoch, const DropoutSchedule& schedule) { return schedule.at(epoch); }

/// Parameters of the closed-form one-epoch / multi-epoch curve model.
/// At iteration t with c*t tokens processed:
///   distinct = min(c*t, N), repeats = c*t - distinct, rho = repeats / (c*t)
///   g = min(1, p / p_ref),  E_eff = (distinct + beta * repeats) / (1 + mu * p)
///   test  = floor + A * E_eff^-k + gamma * rho * (1 - g)
///   train = test - (gamma + m) * rho * (1 - g) + noise
struct SimConfig {
  std::string id = "sim";
  double dataset_tokens = 0.0;    // N
  double tokens_per_iter = 6912;  // c
  std::int64_t total_iters = 65000;
  std::int64_t eval_interval = 100;  // iterations between recorded points

  double dropout = 0.0;                       // p, ignored when `schedule` is set
  std::optional<DropoutSchedule> schedule;    // per-epoch p

  double amplitude = 10.0;     // A
  double exponent = 0.067;     // k
  double floor = 0.0;          // loss floor
  double repeat_value = 0.3;   // beta: worth of a repeated token relative to a fresh one
  double overfit = 0.0;        // gamma
  double dropout_slowdown = 0.0;  // mu
  double dropout_ref = 0.1;       // p_ref: dropout that fully suppresses memorization
  double memorization = 0.0;      // m
  double noise = 0.0;             // sigma, train curve only
  std::uint64_t seed = 0;

  [[nodiscard]] double epochs() const { return tokens_per_iter * static_cast<double>(total_iters) / dataset_tokens; }

  void validate() const {
    using detail::require;
    require(dataset_tokens > 0.0, "dataset_tokens must be positive");
    require(tokens_per_iter > 0.0, "tokens_per_iter must be positive");
    require(total_iters > 0, "total_iters must be positive");
    require(eval_interval > 0 && eval_interval <= total_iters, "eval_interval must lie in [1, total_iters]");
    require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
    require(amplitude > 0.0, "amplitude must be positive");
    require(exponent > 0.0, "exponent must be positive");
    require(floor >= 0.0, "floor must be non-negative");
    require(repeat_value >= 0.0 && repeat_value < 1.0, "repeat_value must lie in [0, 1)");
    require(overfit >= 0.0, "overfit must be non-negative");
    require(dropout_slowdown >= 0.0, "dropout_slowdown must be non-negative");
    require(dropout_ref > 0.0, "dropout_ref must be positive");
    require(memorization >= 0.0, "memorization must be non-negative");
    require(noise >= 0.0, "noise must be non-negative");
  }
};

struct SimResult {
  LearningCurve train;
  LearningCurve test;
};

struct SimTerms {
  double test = 0.0;
  double gap = 0.0;  // test - train before noise
};

/// Noise-free model terms at iteration t.
inline SimTerms sim_terms(const SimConfig& cfg, double t) {
  const double processed = cfg.tokens_per_iter * t;
  const double distinct = std::min(processed, cfg.dataset_tokens);
  const double repeats = processed - distinct;
  const double rho = repeats / processed;

  double p = cfg.dropout;
  if (cfg.schedule) {
    const auto epoch = static_cast<int>(std::floor(cfg.tokens_per_iter * (t - 1.0) / cfg.dataset_tokens)) + 1;
    p = cfg.schedule->at(epoch);
  }
  const double unsuppressed = 1.0 - std::min(1.0, p / cfg.dropout_ref);
  const double effective = (distinct + cfg.repeat_value * repeats) / (1.0 + cfg.dropout_slowdown * p);

  SimTerms terms;
  terms.test = cfg.floor + cfg.amplitude * std::pow(effective, -cfg.exponent) + cfg.overfit * rho * unsuppressed;
  terms.gap = (cfg.overfit + cfg.memorization) * rho * unsuppressed;
  return terms;
}

inline SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<CurvePoint> train;
  std::vector<CurvePoint> test;
  for (std::int64_t t = cfg.eval_interval; t <= cfg.total_iters; t += cfg.eval_interval) {
    const auto x = static_cast<double>(t);
    const auto terms = sim_terms(cfg, x);
    double tr = terms.test - terms.gap;
    if (cfg.noise > 0.0) tr += cfg.noise * gauss(rng);
    detail::require(tr > 0.0, "observation noise drove the train loss non-positive; lower `noise`");
    test.push_back({x, terms.test});
    train.push_back({x, tr});
  }
  return {LearningCurve(cfg.id, LossKind::train, std::move(train)),
          LearningCurve(cfg.id, LossKind::test, std::move(test))};
}

/// Test-loss estimate from the mean of the last `window` train losses.
/// The result starts at the window-th point.
inline LearningCurve running_train_estimate(const LearningCurve& train, std::size_t window) {
  detail::require(window >= 1, "window must be at least 1");
  detail::require(train.size() >= window, "curve is shorter than the averaging window", ErrorCode::insufficient_data);
  std::vector<CurvePoint> pts;
  pts.reserve(train.size() - window + 1);
  for (std::size_t i = window - 1; i < train.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - window; j <= i; ++j) sum += train[j].loss;
    pts.push_back({train[i].iteration, sum / static_cast<double>(window)});
  }
  return {train.config_id(), LossKind::test, std::move(pts)};
}

}  // namespace oneepoch
