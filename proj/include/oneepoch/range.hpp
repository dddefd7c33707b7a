#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "oneepoch/error.hpp"

namespace oneepoch {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi] on a non-negative axis; hi may be +inf.
/// Used both for iteration ranges and for tokens-per-parameter ranges.
struct IterRange {
  double lo = 0.0;
  double hi = kInf;

  IterRange() = default;
  IterRange(double lo_, double hi_) : lo(lo_), hi(hi_) {
    detail::require(!std::isnan(lo) && !std::isnan(hi), "range bounds must not be NaN");
    detail::require(lo >= 0.0, "range lower bound must be non-negative");
    detail::require(lo <= hi, "range lower bound exceeds upper bound");
  }

  static IterRange empty() { return {0.0, 0.0}; }

  [[nodiscard]] bool is_empty() const noexcept { return lo == 0.0 && hi == 0.0; }
  [[nodiscard]] bool unbounded() const noexcept { return std::isinf(hi); }
  [[nodiscard]] bool contains(double x) const noexcept { return !is_empty() && lo <= x && x <= hi; }

  friend bool operator==(const IterRange&, const IterRange&) = default;
};

inline std::string to_string(const IterRange& r) {
  auto fmt = [](double v) { return std::isinf(v) ? std::string("inf") : std::to_string(v); };
  return "[" + fmt(r.lo) + ", " + fmt(r.hi) + "]";
}

}  // namespace oneepoch
