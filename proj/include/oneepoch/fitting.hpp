#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "oneepoch/curve.hpp"
#include "oneepoch/error.hpp"
#include "oneepoch/range.hpp"

namespace oneepoch {

/// Streaming simple linear regression (Welford co-moment updates).
class OlsAccumulator {
 public:
  void add(double x, double y) noexcept {
    ++n_;
    const double dx = x - mean_x_;
    mean_x_ += dx / static_cast<double>(n_);
    const double dy = y - mean_y_;
    mean_y_ += dy / static_cast<double>(n_);
    sxx_ += dx * (x - mean_x_);
    syy_ += dy * (y - mean_y_);
    sxy_ += dx * (y - mean_y_);
  }

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double slope() const noexcept { return sxx_ > 0.0 ? sxy_ / sxx_ : 0.0; }
  [[nodiscard]] double intercept() const noexcept { return mean_y_ - slope() * mean_x_; }

  /// Coefficient of determination; a response with zero variance is fit
  /// exactly by the flat line and reports 1.
  [[nodiscard]] double r2() const noexcept {
    if (syy_ <= 0.0) return 1.0;
    if (sxx_ <= 0.0) return 0.0;
    return std::clamp(sxy_ * sxy_ / (sxx_ * syy_), 0.0, 1.0);
  }

 private:
  std::size_t n_ = 0;
  double mean_x_ = 0.0;
  double mean_y_ = 0.0;
  double sxx_ = 0.0;
  double syy_ = 0.0;
  double sxy_ = 0.0;
};

/// loss = amplitude * x^-exponent, fitted as a line in log-log space.
struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  IterRange region;
  double r2 = 0.0;
  std::size_t n_points = 0;

  [[nodiscard]] double operator()(double x) const { return amplitude * std::pow(x, -exponent); }
};

/// OLS of ln(loss) on ln(x) over the points whose iteration lies in `region`.
inline PowerLawFit fit_power_law(const LearningCurve& curve, const IterRange& region) {
  OlsAccumulator acc;
  double first = 0.0;
  double last = 0.0;
  for (const auto& p : curve.points()) {
    if (p.iteration < region.lo || p.iteration > region.hi) continue;
    if (acc.count() == 0) first = p.iteration;
    last = p.iteration;
    acc.add(std::log(p.iteration), std::log(p.loss));
  }
  detail::require(acc.count() >= 3, "power-law fit needs at least 3 points in the region",
                  ErrorCode::insufficient_data);
  return {std::exp(acc.intercept()), -acc.slope(), IterRange(first, last), acc.r2(), acc.count()};
}

inline PowerLawFit fit_power_law(const LearningCurve& curve) { return fit_power_law(curve, IterRange{}); }

struct PowerRegion {
  IterRange range;
  std::size_t first = 0;  // index of first point in the window
  std::size_t last = 0;   // index of last point (inclusive)
  double r2 = 0.0;

  [[nodiscard]] std::size_t count() const noexcept { return last - first + 1; }
};

inline constexpr std::size_t kDefaultMinPoints = 8;
inline constexpr double kDefaultR2Threshold = 0.995;

/// Longest contiguous window whose log-log line fit has r2 >= threshold.
/// Ties go to the higher r2, then to the earlier window. Exhaustive over all
/// O(n^2) windows with incremental statistics per start index.
inline PowerRegion detect_power_region(const LearningCurve& curve, std::size_t min_points = kDefaultMinPoints,
                                       double r2_threshold = kDefaultR2Threshold) {
  detail::require(min_points >= 3, "min_points must be at least 3");
  detail::require(r2_threshold > 0.0 && r2_threshold < 1.0, "r2_threshold must lie in (0, 1)");
  detail::require(curve.size() >= min_points, "curve has fewer points than min_points",
                  ErrorCode::insufficient_data);

  const auto view = loglog_view(curve);
  const std::size_t n = view.size();
  bool found = false;
  PowerRegion best;
  for (std::size_t i = 0; i + min_points <= n; ++i) {
    // No window starting here can beat the best length found so far.
    if (found && n - i < best.count()) break;
    OlsAccumulator acc;
    for (std::size_t j = i; j < n; ++j) {
      acc.add(view[j].log_x, view[j].log_loss);
      if (acc.count() < min_points) continue;
      const double r2 = acc.r2();
      if (r2 < r2_threshold) continue;
      const std::size_t len = j - i + 1;
      if (!found || len > best.count() || (len == best.count() && r2 > best.r2)) {
        best = {IterRange(curve[i].iteration, curve[j].iteration), i, j, r2};
        found = true;
      }
    }
  }
  detail::require(found, "no window reaches the r2 threshold", ErrorCode::no_region);
  return best;
}

}  // namespace oneepoch
