#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oneepoch/io.hpp"

using namespace oneepoch;

TEST(Format, NineSignificantDigitsDecimal) {
  EXPECT_EQ(io::format_number(65000), "65000");
  EXPECT_EQ(io::format_number(3.25), "3.25");
  EXPECT_EQ(io::format_number(5.395416534), "5.39541653");
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(io::format_number(300353605632.0), "300353606000");
  EXPECT_EQ(io::format_number(0.000012345678912), "0.0000123456789");
  EXPECT_EQ(io::format_number(kInf), "inf");
}

TEST(Format, JsonNumbers) {
  EXPECT_EQ(io::json_number(kInf), "inf");
  EXPECT_EQ(io::json_number(1.0 / 3.0).get<double>(), 0.333333333);
  EXPECT_EQ(io::number_from_json(io::json_number(kInf), "x"), kInf);
}

TEST(CurveCsv, ExactFormat) {
  const LearningCurve c("d512", LossKind::test, {{100, 7.5}, {200, 6.25}});
  EXPECT_EQ(io::curve_to_csv(c), "# config_id=d512 kind=test\niteration,loss\n100,7.5\n200,6.25\n");
}

TEST(CurveCsv, RoundTripProperty) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> step(1, 1000), loss(1e-3, 20);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CurvePoint> pts;
    double x = 0.0;
    for (int i = 0; i < 100; ++i) {
      x += std::round(step(rng));
      x = std::max(x, static_cast<double>(i + 1));
      pts.push_back({x, loss(rng)});
    }
    const LearningCurve original("c" + std::to_string(trial), trial % 2 ? LossKind::train : LossKind::test, pts);
    const auto text = io::curve_to_csv(original);
    std::istringstream in(text);
    const auto once = io::read_curve_csv(in);
    EXPECT_EQ(once.config_id(), original.config_id());
    EXPECT_EQ(once.kind(), original.kind());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(once[i].iteration, original[i].iteration);
      EXPECT_NEAR(once[i].loss, original[i].loss, 5e-9 * original[i].loss);
    }
    // Once written, a curve is a fixed point of write/read.
    const auto text2 = io::curve_to_csv(once);
    EXPECT_EQ(text2, text);
    std::istringstream in2(text2);
    EXPECT_EQ(io::read_curve_csv(in2), once);
  }
}

TEST(CurveCsv, Errors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_curve_csv(in);
  };
  EXPECT_THROW(parse("x,y\n1,2\n"), Error);
  EXPECT_THROW(parse("iteration,loss\n1,2,3\n"), Error);
  EXPECT_THROW(parse("iteration,loss\n1,abc\n"), Error);
  EXPECT_THROW(parse("iteration,loss\n2,1\n1,1\n"), Error);
  EXPECT_THROW(parse("# config_id=a kind=valid\niteration,loss\n"), Error);
  EXPECT_THROW(parse(""), Error);
  const auto c = parse("iteration,loss\r\n1,2\r\n");
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.config_id(), "curve");
}

TEST(Config, IniAndJsonAgree) {
  const auto ini = io::parse_config(
      "[small]\nd_model = 128\nn_layers = 2\nvocab_size = 1000\ncutoffs = 100,500\nparams = 2e6\n");
  const auto json = io::parse_config(
      R"({"small": {"d_model": 128, "n_layers": 2, "vocab_size": 1000, "cutoffs": [100, 500], "params": 2e6}})");
  const auto a = io::models_from_doc(ini);
  const auto b = io::models_from_doc(json);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].config, b[0].config);
  EXPECT_EQ(a[0].config.cutoffs, (std::vector<std::int64_t>{100, 500}));
  EXPECT_EQ(a[0].param_count(), 2e6);
  EXPECT_EQ(b[0].param_count(), 2e6);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(io::models_from_doc(io::parse_config("[m]\nd_modle = 128\n")), Error);
  EXPECT_THROW(io::models_from_doc(io::parse_config("[m]\nd_model = 100\n")), Error);
  EXPECT_THROW(io::models_from_doc(io::parse_config("[m]\nd_model = abc\n")), Error);
  EXPECT_THROW(io::parse_config("{not json"), Error);
}

TEST(Config, ResolveBuiltinWidths) {
  const auto m = io::resolve_model("d768", {});
  EXPECT_EQ(m.config.d_model, 768);
  EXPECT_EQ(m.config.cutoffs, (std::vector<std::int64_t>{4000, 20000, 100000}));
  EXPECT_THROW(io::resolve_model("big", {}), Error);
  EXPECT_THROW(io::resolve_model("d100", {}), Error);
}

TEST(Config, SimPresetScheduleAndErrors) {
  const auto cfg = io::sim_from_doc(io::parse_config(
      "[simulation]\ndataset_tokens = 1e6\ntotal_iters = 1000\neval_interval = 10\ndropout_schedule = 0, 0.05, 0.1\n"));
  ASSERT_TRUE(cfg.schedule.has_value());
  EXPECT_EQ(cfg.schedule->at(3), 0.1);
  try {
    io::sim_from_doc(io::parse_config("[simulation]\ndataset_tokens = 1e6\ndropout_schedule = 0.1, 0.05\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_schedule);
  }
  EXPECT_THROW(io::sim_from_doc(io::parse_config("[simulation]\ndataset_tokens = 1e6\nbogus = 1\n")), Error);
}
