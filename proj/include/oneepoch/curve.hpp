#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oneepoch/error.hpp"

namespace oneepoch {

enum class LossKind { train, test };

constexpr std::string_view to_string(LossKind kind) noexcept {
  return kind == LossKind::train ? "train" : "test";
}

inline LossKind parse_loss_kind(std::string_view s) {
  if (s == "train") return LossKind::train;
  if (s == "test") return LossKind::test;
  throw Error(ErrorCode::invalid_argument, "unknown loss kind '" + std::string(s) + "'");
}

struct CurvePoint {
  double iteration = 0.0;
  double loss = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// How "first iteration at which a curve reaches a loss" is resolved between
/// samples.
enum class ReachMode {
  interpolate,  // log-log linear interpolation between bracketing samples
  grid_snap,    // first sampled iteration at or below the loss
};

/// Loss-versus-iteration series. Iterations are strictly increasing and
/// positive, losses are positive. Iterations are stored as reals so that
/// FLOPS-rescaled curves share the type.
class LearningCurve {
 public:
  LearningCurve() = default;

  LearningCurve(std::string config_id, LossKind kind, std::vector<CurvePoint> points)
      : config_id_(std::move(config_id)), kind_(kind), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      detail::require(std::isfinite(p.iteration) && p.iteration > 0.0,
                      "curve iterations must be positive and finite");
      detail::require(std::isfinite(p.loss) && p.loss > 0.0, "curve losses must be positive and finite");
      if (i > 0)
        detail::require(points_[i - 1].iteration < p.iteration, "curve iterations must be strictly increasing");
    }
  }

  [[nodiscard]] const std::string& config_id() const noexcept { return config_id_; }
  [[nodiscard]] LossKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::vector<CurvePoint>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] const CurvePoint& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] double first_iteration() const { return points_.front().iteration; }
  [[nodiscard]] double last_iteration() const { return points_.back().iteration; }

  /// Loss at `x`, linear in (ln x, ln loss) between samples.
  [[nodiscard]] double loss_at(double x) const {
    detail::require(!points_.empty(), "loss_at on an empty curve", ErrorCode::insufficient_data);
    detail::require(x >= first_iteration() && x <= last_iteration(),
                    "iteration " + std::to_string(x) + " outside curve span", ErrorCode::domain_error);
    const auto it = std::lower_bound(points_.begin(), points_.end(), x,
                                     [](const CurvePoint& p, double v) { return p.iteration < v; });
    const auto hi = static_cast<std::size_t>(it - points_.begin());
    if (points_[hi].iteration == x) return points_[hi].loss;
    const auto& a = points_[hi - 1];
    const auto& b = points_[hi];
    const double f = (std::log(x) - std::log(a.iteration)) / (std::log(b.iteration) - std::log(a.iteration));
    return std::exp(std::log(a.loss) + f * (std::log(b.loss) - std::log(a.loss)));
  }

  /// First iteration at which the loss is at or below `level`, or nullopt.
  [[nodiscard]] std::optional<double> first_reach(double level, ReachMode mode = ReachMode::interpolate) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].loss > level) continue;
      if (i == 0 || mode == ReachMode::grid_snap || points_[i].loss == level) return points_[i].iteration;
      const auto& a = points_[i - 1];
      const auto& b = points_[i];
      const double f = (std::log(level) - std::log(a.loss)) / (std::log(b.loss) - std::log(a.loss));
      const double lx = std::log(a.iteration) + f * (std::log(b.iteration) - std::log(a.iteration));
      return std::min(std::exp(lx), b.iteration);
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t argmin_loss() const {
    detail::require(!points_.empty(), "argmin on an empty curve", ErrorCode::insufficient_data);
    std::size_t best = 0;
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (points_[i].loss < points_[best].loss) best = i;
    return best;
  }

  /// Points with iteration <= `limit`.
  [[nodiscard]] LearningCurve truncated(double limit) const {
    std::vector<CurvePoint> kept;
    for (const auto& p : points_)
      if (p.iteration <= limit) kept.push_back(p);
    return {config_id_, kind_, std::move(kept)};
  }

  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;

 private:
  std::string config_id_;
  LossKind kind_ = LossKind::test;
  std::vector<CurvePoint> points_;
};

/// Three-region learning-curve shape:
///   loss(x) = floor + amplitude * x^-exponent + exp_amplitude * exp(-x / timescale)
/// The exponential term produces the early super-polynomial drop, the power
/// term the straight log-log segment and the floor the late flattening.
struct CurveParams {
  double floor = 0.0;
  double amplitude = 10.0;
  double exponent = 0.067;
  double exp_amplitude = 0.0;
  double timescale = 1.0;

  void validate() const {
    using detail::require;
    require(floor >= 0.0, "floor must be >= 0");
    require(amplitude >= 0.0, "amplitude must be >= 0");
    require(exponent >= 0.0, "exponent must be >= 0");
    require(exp_amplitude >= 0.0, "exp_amplitude must be >= 0");
    require(timescale > 0.0, "timescale must be > 0");
  }

  [[nodiscard]] double operator()(double x) const {
    return floor + amplitude * std::pow(x, -exponent) + exp_amplitude * std::exp(-x / timescale);
  }
};

inline LearningCurve synth_curve(const CurveParams& params, const std::vector<double>& grid,
                                 std::string config_id = "synthetic", LossKind kind = LossKind::test) {
  params.validate();
  std::vector<CurvePoint> pts;
  pts.reserve(grid.size());
  for (double x : grid) {
    detail::require(x > 0.0, "grid values must be positive");
    pts.push_back({x, params(x)});
  }
  return {std::move(config_id), kind, std::move(pts)};
}

/// `n` geometrically spaced values from `lo` to `hi` inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  detail::require(lo > 0.0 && hi > lo && n >= 2, "log_grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// step, 2*step, ..., up to and including `last` when it is a multiple.
inline std::vector<double> linear_grid(double step, double last) {
  detail::require(step > 0.0 && last >= step, "linear_grid needs 0 < step <= last");
  std::vector<double> g;
  for (std::size_t i = 1;; ++i) {
    const double x = step * static_cast<double>(i);
    if (x > last) break;
    g.push_back(x);
  }
  return g;
}

struct LogPoint {
  double log_x = 0.0;
  double log_loss = 0.0;
};

inline std::vector<LogPoint> loglog_view(const LearningCurve& curve) {
  std::vector<LogPoint> out;
  out.reserve(curve.size());
  for (const auto& p : curve.points()) out.push_back({std::log(p.iteration), std::log(p.loss)});
  return out;
}

}  // namespace oneepoch
