#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "oneepoch/curve.hpp"
#include "oneepoch/error.hpp"
#include "oneepoch/remap.hpp"

namespace oneepoch {

struct SpeedupReport {
  double baseline_iters = 0.0;  // baseline regime reaches its best loss here
  double target_iters = 0.0;    // comparison regime first reaches that loss here
  double speedup = 0.0;         // baseline_iters / target_iters
  double loss = 0.0;            // the loss level being matched
  std::optional<int> epoch_limit;
  bool flops_adjusted = false;  // true when both axes are reference-model iterations
  ReachMode mode = ReachMode::interpolate;
};

namespace detail {

[[noreturn]] inline void throw_unreachable(const LearningCurve& curve, double level) {
  const double gap = curve[curve.argmin_loss()].loss - level;
  throw Error(ErrorCode::unreachable, "curve '" + curve.config_id() + "' never reaches loss " +
                                          std::to_string(level) + " (residual gap " + std::to_string(gap) + ")");
}

}  // namespace detail

/// One-epoch vs multi-epoch speedup: iterations the multi-epoch run needs to
/// reach its best loss over the iterations the one-epoch run needs to first
/// reach that loss. With `epochs`, the multi-epoch curve is cut after
/// epochs * iters_per_epoch iterations first.
inline SpeedupReport epoch_speedup(const LearningCurve& single, const LearningCurve& multi, double iters_per_epoch,
                                   std::optional<int> epochs = std::nullopt,
                                   ReachMode mode = ReachMode::interpolate) {
  detail::require(iters_per_epoch > 0.0, "iters_per_epoch must be positive");
  if (epochs) detail::require(*epochs >= 1, "epoch limit must be at least 1");
  detail::require(!single.empty(), "single-epoch curve is empty", ErrorCode::insufficient_data);

  const LearningCurve base = epochs ? multi.truncated(*epochs * iters_per_epoch) : multi;
  detail::require(!base.empty(), "multi-epoch curve has no points within the epoch limit",
                  ErrorCode::insufficient_data);
  const auto& best = base[base.argmin_loss()];

  const auto reach = single.first_reach(best.loss, mode);
  if (!reach) detail::throw_unreachable(single, best.loss);

  SpeedupReport r;
  r.baseline_iters = best.iteration;
  r.target_iters = *reach;
  r.speedup = r.baseline_iters / r.target_iters;
  r.loss = best.loss;
  r.epoch_limit = epochs;
  r.mode = mode;
  return r;
}

/// Size-adjustment speedup on a common reference axis: compute the old
/// configuration spends to reach its loss at `old_native_iters`, over the
/// compute the new configuration needs to first reach the same loss.
inline SpeedupReport adjustment_speedup(const RemappedCurve& old_curve, const RemappedCurve& new_curve,
                                        double old_native_iters, ReachMode mode = ReachMode::interpolate) {
  detail::require_common_reference(old_curve, new_curve);
  detail::require(old_native_iters > 0.0, "old iteration count must be positive");
  const double x_old = old_curve.to_reference(old_native_iters);
  const double level = old_curve.curve.loss_at(x_old);

  const auto reach = new_curve.curve.first_reach(level, mode);
  if (!reach) detail::throw_unreachable(new_curve.curve, level);

  SpeedupReport r;
  r.baseline_iters = x_old;
  r.target_iters = *reach;
  r.speedup = x_old / *reach;
  r.loss = level;
  r.flops_adjusted = true;
  r.mode = mode;
  return r;
}

inline double combined_speedup(double epoch, double adjustment) {
  detail::require(epoch > 0.0 && adjustment > 0.0, "speedups must be positive");
  return epoch * adjustment;
}

}  // namespace oneepoch
