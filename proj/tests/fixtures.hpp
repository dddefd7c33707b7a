#pragma once

// Constructed curves with known crossing points and speedups.

#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oneepoch/curve.hpp"
#include "oneepoch/remap.hpp"

namespace fixtures {

using oneepoch::CurvePoint;
using oneepoch::LearningCurve;
using oneepoch::LossKind;

// Integer iterations, roughly `per_decade` per factor of ten.
inline std::vector<double> int_log_grid(double lo, double hi, int per_decade) {
  std::set<double> xs;
  const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
  for (int i = 0; i <= n; ++i) xs.insert(std::round(lo * std::pow(10.0, static_cast<double>(i) / per_decade)));
  xs.insert(hi);
  return {xs.begin(), xs.end()};
}

// Width-256/512/1024 curves on the reference (d512) axis:
//   d512  : 10 x^-0.067
//   d256  : flatter, meets d512 at x = 12000
//   d1024 : steeper, meets d512 at x = 84000
// Per-iteration FLOPS relative to d512 are 1/2.5 and 3.
struct WidthSweep {
  static constexpr double kScale256 = 0.4;
  static constexpr double kScale1024 = 3.0;
  static constexpr double kCross256 = 12000.0;
  static constexpr double kCross1024 = 84000.0;

  static double loss512(double x) { return 10.0 * std::pow(x, -0.067); }
  static double loss256(double x) { return loss512(kCross256) * std::pow(x / kCross256, -0.05); }
  static double loss1024(double x) { return loss512(kCross1024) * std::pow(x / kCross1024, -0.09); }

  template <typename F>
  static LearningCurve native(const std::string& id, double scale, double lo, double hi, F ref_loss) {
    std::vector<CurvePoint> pts;
    for (double x : int_log_grid(lo, hi, 40)) pts.push_back({x, ref_loss(x * scale)});
    return {id, LossKind::test, std::move(pts)};
  }

  static LearningCurve d256() { return native("d256", kScale256, 250, 250000, loss256); }
  static LearningCurve d512() { return native("d512", 1.0, 100, 200000, loss512); }
  static LearningCurve d1024() { return native("d1024", kScale1024, 40, 40000, loss1024); }

  static std::vector<oneepoch::RemappedCurve> remapped() {
    return {oneepoch::remap_curve(d256(), kScale256, "d512"), oneepoch::remap_curve(d512(), 1.0, "d512"),
            oneepoch::remap_curve(d1024(), kScale1024, "d512")};
  }
};

// One-epoch curve reaching the multi-epoch best loss at 20000 while the
// multi-epoch curve attains it at 65000.
struct EpochSpeedup {
  static double single_loss(double x) { return 10.0 * std::pow(x, -0.067); }

  static LearningCurve single() {
    std::vector<CurvePoint> pts;
    for (double x = 500; x <= 65000; x += 500) pts.push_back({x, single_loss(x)});
    return {"single", LossKind::test, std::move(pts)};
  }

  static LearningCurve multi() {
    const double best = single_loss(20000);
    std::vector<CurvePoint> pts;
    for (double x = 500; x <= 65000; x += 500) pts.push_back({x, best * std::pow(x / 65000.0, -0.03)});
    return {"multi", LossKind::test, std::move(pts)};
  }
};

// Exponential head, power-law middle, floor tail.
inline LearningCurve three_region() {
  return oneepoch::synth_curve({1.0, 10.0, 0.3, 20.0, 300.0}, int_log_grid(10, 1e6, 20));
}

inline std::pair<std::vector<double>, std::vector<double>> columns(const LearningCurve& c) {
  std::vector<double> x, y;
  for (const auto& p : c.points()) {
    x.push_back(p.iteration);
    y.push_back(p.loss);
  }
  return {x, y};
}

}  // namespace fixtures
