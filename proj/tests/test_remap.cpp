#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oneepoch/remap.hpp"
#include "oracles.hpp"

using namespace oneepoch;
using fixtures::WidthSweep;

namespace {

LearningCurve power_curve(const std::string& id, double a, double k, const std::vector<double>& grid) {
  CurveParams p;
  p.amplitude = a;
  p.exponent = k;
  return synth_curve(p, grid, id);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Remap, ScaleDirection) {
  const LearningCurve c256("d256", LossKind::test, {{30000, 4.0}});
  EXPECT_NEAR(remap_curve(c256, 1.0 / 2.5, "d512").curve[0].iteration, 12000.0, 1e-9);
  const LearningCurve c1024("d1024", LossKind::test, {{28000, 4.0}});
  EXPECT_NEAR(remap_curve(c1024, 3.0, "d512").curve[0].iteration, 84000.0, 1e-9);
}

TEST(Remap, IdentityOnReference) {
  const auto c = WidthSweep::d512();
  const auto r = remap_curve(c, lm1b_config(512), lm1b_config(512), "d512");
  EXPECT_EQ(r.scale, 1.0);
  EXPECT_EQ(r.curve.points(), c.points());
}

TEST(Remap, ScaleFromConfigs) {
  const auto r = remap_curve(WidthSweep::d256(), lm1b_config(256), lm1b_config(512), "d512");
  EXPECT_DOUBLE_EQ(r.scale, flops_ratio(lm1b_config(256), lm1b_config(512)));
  EXPECT_EQ(r.source_id, "d256");
  EXPECT_EQ(r.reference_id, "d512");
}

TEST(Remap, RoundTripWithinOneUlpAndLossesPreserved) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> width(1, 32);
  const auto grid = fixtures::int_log_grid(1, 1e6, 50);
  const auto c = power_curve("x", 9, 0.1, grid);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = lm1b_config(64 * width(rng));
    const auto b = lm1b_config(64 * width(rng));
    const auto there = remap_curve(c, a, b, "b");
    const auto back = remap_curve(there.curve, b, a, "a");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double x = c[i].iteration;
      const double y = back.curve[i].iteration;
      EXPECT_LE(std::abs(y - x), std::nextafter(x, kInf) - x) << x;
      EXPECT_EQ(there.curve[i].loss, c[i].loss);
      EXPECT_EQ(back.curve[i].loss, c[i].loss);
    }
  }
}

TEST(Intersection, ClosedFormPowerLaws) {
  const auto grid = log_grid(10, 1e5, 41);  // 10 points per decade
  const auto a = remap_curve(power_curve("a", 10, 0.05, grid), 1.0, "ref");
  const auto b = remap_curve(power_curve("b", 12, 0.08, grid), 1.0, "ref");
  const double x = find_intersection(a, b);
  EXPECT_NEAR(x, oracle::power_law_crossing(10, 0.05, 12, 0.08), 1e-6);
  EXPECT_NEAR(x, 435.888, 1e-3);
  EXPECT_NEAR(x, 435.4, 0.5);
  EXPECT_EQ(find_intersection(b, a), x);
}

TEST(Intersection, IdenticalCurvesDoNotIntersect) {
  const auto a = remap_curve(WidthSweep::d512(), 1.0, "ref");
  EXPECT_EQ(code_of([&] { find_intersection(a, a); }), ErrorCode::no_intersection);
}

TEST(Intersection, DisjointSpans) {
  const auto a = remap_curve(power_curve("a", 10, 0.05, {1, 2, 3}), 1.0, "ref");
  const auto b = remap_curve(power_curve("b", 10, 0.05, {10, 20, 30}), 1.0, "ref");
  EXPECT_EQ(code_of([&] { find_intersection(a, b); }), ErrorCode::domain_error);
}

TEST(Intersection, DifferentReferencesRejected) {
  const auto a = remap_curve(WidthSweep::d512(), 1.0, "r1");
  const auto b = remap_curve(WidthSweep::d256(), 1.0, "r2");
  EXPECT_EQ(code_of([&] { find_intersection(a, b); }), ErrorCode::invalid_argument);
}

TEST(Intersection, TableFixtureCrossings) {
  const auto rc = WidthSweep::remapped();
  EXPECT_NEAR(find_intersection(rc[0], rc[1]), 12000.0, 1e-6);
  EXPECT_NEAR(find_intersection(rc[1], rc[2]), 84000.0, 1e-6);
}

TEST(Intersection, MultipleCrossingsReportedEarliestFirst) {
  // b oscillates around a = 1.
  const LearningCurve a("a", LossKind::test, {{1, 1}, {100, 1}});
  const LearningCurve b("b", LossKind::test, {{1, 2}, {10, 0.5}, {50, 2}, {100, 2}});
  const auto ra = remap_curve(a, 1.0, "r");
  const auto rb = remap_curve(b, 1.0, "r");
  const auto xs = find_intersections(ra, rb);
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_LT(xs[0], 10.0);
  EXPECT_GT(xs[1], 10.0);
  EXPECT_EQ(find_intersection(ra, rb), xs[0]);
  EXPECT_EQ(find_intersections(rb, ra), xs);
}

TEST(Intersection, TouchingIsNotACrossing) {
  const LearningCurve a("a", LossKind::test, {{1, 1}, {10, 1}, {100, 1}});
  const LearningCurve b("b", LossKind::test, {{1, 2}, {10, 1}, {100, 2}});
  EXPECT_TRUE(find_intersections(remap_curve(a, 1, "r"), remap_curve(b, 1, "r")).empty());
}

TEST(OptimalRanges, TableFixture) {
  const auto ranges = optimal_ranges(WidthSweep::remapped());
  ASSERT_EQ(ranges.size(), 3u);
  EXPECT_EQ(ranges[0].config_id, "d256");
  EXPECT_EQ(ranges[0].native.lo, 0.0);
  EXPECT_NEAR(ranges[0].native.hi, 30000.0, 1e-6);
  EXPECT_NEAR(ranges[1].native.lo, 12000.0, 1e-6);
  EXPECT_NEAR(ranges[1].native.hi, 84000.0, 1e-6);
  EXPECT_NEAR(ranges[2].native.lo, 28000.0, 1e-6);
  EXPECT_TRUE(ranges[2].native.unbounded());
}

TEST(OptimalRanges, PartitionsReferenceAxis) {
  const auto ranges = optimal_ranges(WidthSweep::remapped());
  std::vector<IterRange> ref;
  for (const auto& r : ranges) ref.push_back(r.reference);
  std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  EXPECT_EQ(ref.front().lo, 0.0);
  EXPECT_TRUE(ref.back().unbounded());
  for (std::size_t i = 1; i < ref.size(); ++i) EXPECT_EQ(ref[i].lo, ref[i - 1].hi);
}

TEST(OptimalRanges, SingleCurve) {
  const auto ranges = optimal_ranges({remap_curve(WidthSweep::d256(), 0.4, "d512")});
  ASSERT_EQ(ranges.size(), 1u);
  EXPECT_EQ(ranges[0].native, IterRange(0, kInf));
}

TEST(OptimalRanges, StackedCurvesDominance) {
  const auto grid = log_grid(10, 1e5, 30);
  const auto ranges = optimal_ranges({remap_curve(power_curve("hi", 12, 0.1, grid), 1, "r"),
                                      remap_curve(power_curve("lo", 8, 0.1, grid), 1, "r"),
                                      remap_curve(power_curve("mid", 10, 0.1, grid), 1, "r")});
  EXPECT_TRUE(ranges[0].native.is_empty());
  EXPECT_EQ(ranges[1].native, IterRange(0, kInf));
  EXPECT_TRUE(ranges[2].native.is_empty());
}

TEST(OptimalRanges, DuplicateIdsRejected) {
  const auto c = remap_curve(WidthSweep::d512(), 1.0, "d512");
  EXPECT_THROW(optimal_ranges({c, c}), Error);
}

TEST(TokensPerParam, TableRows) {
  const auto r256 = tokens_per_param_range(IterRange(0, 30000), 6912, 18e6);
  EXPECT_EQ(r256.lo, 0.0);
  EXPECT_NEAR(r256.hi, 11.52, 1e-12);
  const auto r512 = tokens_per_param_range(IterRange(12000, 84000), 6912, 45e6);
  EXPECT_NEAR(r512.lo, 1.8432, 1e-12);
  EXPECT_NEAR(r512.hi, 12.9024, 1e-12);
  const auto r1024 = tokens_per_param_range(IterRange(28000, kInf), 6912, 128e6);
  EXPECT_NEAR(r1024.lo, 1.512, 1e-12);
  EXPECT_TRUE(r1024.unbounded());
  EXPECT_TRUE(tokens_per_param_range(IterRange::empty(), 6912, 45e6).is_empty());
}

TEST(TokensPerParam, FromConfig) {
  const auto cfg = lm1b_config(512);
  const auto r = tokens_per_param_range(IterRange(0, 43453936), cfg);
  EXPECT_NEAR(r.hi, 6912.0, 1e-9);
}

TEST(IntersectRanges, TableIntersectionAndMidpoint) {
  const auto common = intersect_ranges({{0, 11.52}, {1.8432, 12.9024}, {1.512, kInf}});
  EXPECT_NEAR(common.lo, 1.8432, 1e-12);
  EXPECT_NEAR(common.hi, 11.52, 1e-12);
  EXPECT_NEAR(geometric_midpoint(common), std::sqrt(1.8432 * 11.52), 1e-12);
  EXPECT_NEAR(geometric_midpoint(common), 4.608, 0.01);
  EXPECT_NEAR(geometric_midpoint(IterRange(1.8, 11.5)), 4.550, 0.01);
}

TEST(IntersectRanges, EdgeCases) {
  EXPECT_EQ(intersect_ranges({{2, 3}}), IterRange(2, 3));
  EXPECT_EQ(code_of([] { intersect_ranges({{0, 1}, {2, 3}}); }), ErrorCode::no_overlap);
  EXPECT_THROW(intersect_ranges({}), Error);
  EXPECT_EQ(code_of([] { geometric_midpoint(IterRange(0, 5)); }), ErrorCode::domain_error);
  EXPECT_EQ(code_of([] { geometric_midpoint(IterRange(1, kInf)); }), ErrorCode::domain_error);
}
