#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oneepoch/curve.hpp"
#include "oneepoch/error.hpp"
#include "oneepoch/model_budget.hpp"
#include "oneepoch/range.hpp"

namespace oneepoch {

/// A curve whose iteration axis has been rescaled to reference-model
/// iterations of equal compute: x_ref = x_native * scale, with
/// scale = flops(source) / flops(reference). Losses are untouched.
struct RemappedCurve {
  std::string source_id;
  std::string reference_id;
  double scale = 1.0;
  LearningCurve curve;  // points on the reference axis

  [[nodiscard]] double to_native(double x_ref) const { return x_ref / scale; }
  [[nodiscard]] double to_reference(double x_native) const { return x_native * scale; }
};

namespace detail {

// x * num / den in extended precision, so a there-and-back remap between two
// configs only picks up the final rounding on each leg.
inline RemappedCurve remap_exact(const LearningCurve& curve, long double num, long double den,
                                 std::string reference_id) {
  const double scale = static_cast<double>(num / den);
  require(std::isfinite(scale) && scale > 0.0, "remap scale must be positive and finite");
  std::vector<CurvePoint> pts;
  pts.reserve(curve.size());
  for (const auto& p : curve.points())
    pts.push_back({static_cast<double>(static_cast<long double>(p.iteration) * num / den), p.loss});
  return {curve.config_id(), std::move(reference_id), scale,
          LearningCurve(curve.config_id(), curve.kind(), std::move(pts))};
}

}  // namespace detail

inline RemappedCurve remap_curve(const LearningCurve& curve, double scale, std::string reference_id) {
  detail::require(std::isfinite(scale) && scale > 0.0, "remap scale must be positive and finite");
  return detail::remap_exact(curve, scale, 1.0L, std::move(reference_id));
}

inline RemappedCurve remap_curve(const LearningCurve& curve, const ModelConfig& source, const ModelConfig& reference,
                                 std::string reference_id) {
  auto flops = [](const ModelConfig& c) {
    return static_cast<long double>(count_params(c).total()) * static_cast<long double>(c.tokens_per_iter);
  };
  return detail::remap_exact(curve, flops(source), flops(reference), std::move(reference_id));
}

namespace detail {

inline void require_common_reference(const RemappedCurve& a, const RemappedCurve& b) {
  require(a.reference_id == b.reference_id,
          "curves are remapped onto different references: '" + a.reference_id + "' vs '" + b.reference_id + "'");
}

// Abscissae of all curves inside [lo, hi], plus both endpoints, sorted.
inline std::vector<double> merged_abscissae(const std::vector<const LearningCurve*>& curves, double lo, double hi) {
  std::set<double> xs{lo, hi};
  for (const auto* c : curves)
    for (const auto& p : c->points())
      if (p.iteration > lo && p.iteration < hi) xs.insert(p.iteration);
  return {xs.begin(), xs.end()};
}

// Root of the line through (x0, d0), (x1, d1) in ln x, returned in linear units.
inline double log_root(double x0, double d0, double x1, double d1) {
  const double f = d0 / (d0 - d1);
  return std::exp(std::log(x0) + f * (std::log(x1) - std::log(x0)));
}

inline int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

}  // namespace detail

/// All sign changes of ln(loss_a) - ln(loss_b) over the shared span, both
/// curves read as piecewise linear in (ln x, ln loss). Reference axis units.
inline std::vector<double> find_intersections(const RemappedCurve& a, const RemappedCurve& b) {
  detail::require_common_reference(a, b);
  detail::require(a.curve.size() >= 2 && b.curve.size() >= 2, "intersection needs at least 2 points per curve",
                  ErrorCode::insufficient_data);
  const double lo = std::max(a.curve.first_iteration(), b.curve.first_iteration());
  const double hi = std::min(a.curve.last_iteration(), b.curve.last_iteration());
  detail::require(lo < hi, "curve spans do not overlap on the reference axis", ErrorCode::domain_error);

  const auto xs = detail::merged_abscissae({&a.curve, &b.curve}, lo, hi);
  std::vector<double> crossings;
  int prev_sign = 0;
  double prev_x = 0.0;
  double prev_d = 0.0;
  std::optional<double> zero_at;
  for (double x : xs) {
    const double d = std::log(a.curve.loss_at(x)) - std::log(b.curve.loss_at(x));
    const int s = detail::sign(d);
    if (s == 0) {
      if (prev_sign != 0 && !zero_at) zero_at = x;
      continue;
    }
    if (prev_sign != 0 && s != prev_sign)
      crossings.push_back(zero_at ? *zero_at : detail::log_root(prev_x, prev_d, x, d));
    zero_at.reset();
    prev_sign = s;
    prev_x = x;
    prev_d = d;
  }
  return crossings;
}

/// Earliest crossing; throws no_intersection when the curves never swap order.
inline double find_intersection(const RemappedCurve& a, const RemappedCurve& b) {
  const auto xs = find_intersections(a, b);
  detail::require(!xs.empty(), "curves '" + a.source_id + "' and '" + b.source_id + "' do not intersect",
                  ErrorCode::no_intersection);
  return xs.front();
}

struct OptimalRange {
  std::string config_id;
  double scale = 1.0;
  IterRange reference;  // on the reference axis
  IterRange native;     // in the config's own iterations
};

/// For each curve, the reference-axis interval on which it is strictly the
/// lowest of all curves, widened to 0 / +inf when it owns the start / end of
/// the shared span, then converted back to native iterations. A curve that is
/// never lowest gets the empty range [0, 0]. Output order follows the input.
inline std::vector<OptimalRange> optimal_ranges(const std::vector<RemappedCurve>& curves) {
  detail::require(!curves.empty(), "optimal_ranges needs at least one curve");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    detail::require_common_reference(curves.front(), curves[i]);
    detail::require(curves[i].curve.size() >= 2, "optimal_ranges needs at least 2 points per curve",
                    ErrorCode::insufficient_data);
    for (std::size_t j = 0; j < i; ++j)
      detail::require(curves[i].source_id != curves[j].source_id, "duplicate config id '" + curves[i].source_id + "'");
  }

  const std::size_t k = curves.size();
  std::vector<OptimalRange> out;
  out.reserve(k);
  for (const auto& c : curves) out.push_back({c.source_id, c.scale, IterRange::empty(), IterRange::empty()});
  if (k == 1) {
    out[0].reference = IterRange(0.0, kInf);
    out[0].native = IterRange(0.0, kInf);
    return out;
  }

  double lo = 0.0;
  double hi = kInf;
  std::vector<const LearningCurve*> ptrs;
  for (const auto& c : curves) {
    lo = std::max(lo, c.curve.first_iteration());
    hi = std::min(hi, c.curve.last_iteration());
    ptrs.push_back(&c.curve);
  }
  detail::require(lo < hi, "curve spans do not share a common interval on the reference axis",
                  ErrorCode::domain_error);

  // Between consecutive merged abscissae every curve is a line in log-log
  // space, so adding every pairwise crossing inside a segment leaves each
  // sub-segment with a single well-defined lowest curve.
  const auto xs = detail::merged_abscissae(ptrs, lo, hi);
  std::vector<double> events;
  std::vector<double> left(k), right(k);
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    events.push_back(xs[s]);
    for (std::size_t i = 0; i < k; ++i) {
      left[i] = std::log(curves[i].curve.loss_at(xs[s]));
      right[i] = std::log(curves[i].curve.loss_at(xs[s + 1]));
    }
    std::vector<double> inner;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const double d0 = left[i] - left[j];
        const double d1 = right[i] - right[j];
        if (detail::sign(d0) * detail::sign(d1) < 0) inner.push_back(detail::log_root(xs[s], d0, xs[s + 1], d1));
      }
    std::sort(inner.begin(), inner.end());
    for (double x : inner)
      if (x > events.back() && x < xs[s + 1]) events.push_back(x);
  }
  events.push_back(xs.back());

  // Owner of each sub-segment, judged at its log-midpoint.
  std::vector<std::optional<std::size_t>> owner(events.size() - 1);
  for (std::size_t s = 0; s + 1 < events.size(); ++s) {
    const double mid = std::sqrt(events[s] * events[s + 1]);
    std::optional<std::size_t> best;
    double best_loss = kInf;
    bool tie = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double v = curves[i].curve.loss_at(mid);
      if (v < best_loss) {
        best_loss = v;
        best = i;
        tie = false;
      } else if (v == best_loss) {
        tie = true;
      }
    }
    if (!tie) owner[s] = best;
  }

  for (std::size_t i = 0; i < k; ++i) {
    std::optional<std::size_t> first, last;
    for (std::size_t s = 0; s < owner.size(); ++s)
      if (owner[s] == i) {
        if (!first) first = s;
        last = s;
      }
    if (!first) continue;
    const double rlo = *first == 0 ? 0.0 : events[*first];
    const double rhi = *last + 1 == owner.size() ? kInf : events[*last + 1];
    out[i].reference = IterRange(rlo, rhi);
    out[i].native = IterRange(curves[i].to_native(rlo), curves[i].to_native(rhi));
  }
  return out;
}

/// Iteration range expressed as tokens processed per parameter.
inline IterRange tokens_per_param_range(const IterRange& range, double tokens_per_iter, double params) {
  detail::require(tokens_per_iter > 0.0 && params > 0.0, "tokens_per_iter and params must be positive");
  if (range.is_empty()) return IterRange::empty();
  const double f = tokens_per_iter / params;
  return {range.lo * f, range.unbounded() ? kInf : range.hi * f};
}

inline IterRange tokens_per_param_range(const IterRange& range, const ModelConfig& cfg) {
  return tokens_per_param_range(range, static_cast<double>(cfg.tokens_per_iter),
                                static_cast<double>(count_params(cfg).total()));
}

inline IterRange intersect_ranges(const std::vector<IterRange>& ranges) {
  detail::require(!ranges.empty(), "intersect_ranges needs at least one range");
  double lo = 0.0;
  double hi = kInf;
  for (const auto& r : ranges) {
    lo = std::max(lo, r.lo);
    hi = std::min(hi, r.hi);
  }
  detail::require(lo <= hi, "ranges have no common overlap", ErrorCode::no_overlap);
  return {lo, hi};
}

inline double geometric_midpoint(const IterRange& range) {
  detail::require(range.lo > 0.0 && !range.unbounded(),
                  "geometric midpoint needs a positive lower bound and a finite upper bound",
                  ErrorCode::domain_error);
  return std::sqrt(range.lo * range.hi);
}

}  // namespace oneepoch
