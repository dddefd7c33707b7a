// Command-line front end: parameter/FLOPS accounting, curve simulation,
// power-law fitting, FLOPS remapping with optimal ranges, size planning and
// speedup measurement. Exit codes: 0 ok, 2 invalid input, 3 analysis failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oneepoch/curve.hpp"
#include "oneepoch/epoch_sim.hpp"
#include "oneepoch/error.hpp"
#include "oneepoch/fitting.hpp"
#include "oneepoch/io.hpp"
#include "oneepoch/model_budget.hpp"
#include "oneepoch/planner.hpp"
#include "oneepoch/remap.hpp"
#include "oneepoch/speedup.hpp"

namespace fs = std::filesystem;
using namespace oneepoch;
using io::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitAnalysis = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    io::write_text_file(out_path, text);
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items, const std::string& flag) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::invalid_argument, flag + " expects ID=VALUE, got '" + item + "'");
    out[item.substr(0, eq)] = io::parse_double(item.substr(eq + 1), flag);
  }
  return out;
}

std::vector<io::NamedModel> load_models(const std::string& path) {
  if (path.empty()) return {};
  return io::models_from_doc(io::load_config(path));
}

io::NamedModel resolve_with_overrides(const std::string& id, const std::vector<io::NamedModel>& models,
                                      const std::map<std::string, double>& params) {
  auto m = io::resolve_model(id, models);
  if (const auto it = params.find(id); it != params.end()) {
    detail::require(it->second > 0.0, "--params for '" + id + "' must be positive");
    m.params = it->second;
  }
  return m;
}

double model_flops(const io::NamedModel& m) { return m.param_count() * static_cast<double>(m.config.tokens_per_iter); }

// --- params ----------------------------------------------------------------

struct ParamsArgs {
  std::optional<std::int64_t> d;
  std::int64_t layers = 6;
  std::int64_t vocab = 793471;
  std::string cutoffs;
  std::int64_t divisor = 4;
  std::int64_t tokens_per_iter = 6912;
  std::optional<std::int64_t> ref_d;
  std::string config;
  std::string model;
  std::string reference;
  std::string out;
};

int run_params(const ParamsArgs& a, const CLI::App& sub) {
  if (!a.d && a.model.empty()) {
    std::cerr << "error: params needs --d or --config with --model\n" << sub.help();
    return kExitInvalid;
  }
  const auto models = load_models(a.config);
  auto from_flags = [&](std::int64_t width) {
    ModelConfig c;
    c.d_model = width;
    c.n_layers = a.layers;
    c.vocab_size = a.vocab;
    c.cutoffs.clear();
    for (const auto& s : io::split(a.cutoffs, ',')) c.cutoffs.push_back(io::parse_int(s, "cutoff"));
    c.adaptive_divisor = a.divisor;
    c.tokens_per_iter = a.tokens_per_iter;
    c.validate();
    return io::NamedModel{"d" + std::to_string(width), c, std::nullopt};
  };

  const auto model = a.model.empty() ? from_flags(*a.d) : io::resolve_model(a.model, models);
  json report;
  report["id"] = model.id;
  report["config"] = io::to_json(model.config);
  report["params"] = io::to_json(count_params(model.config));
  report["per_iter_flops"] = io::json_number(per_iter_flops(model.config));

  std::optional<io::NamedModel> ref;
  if (a.ref_d) ref = from_flags(*a.ref_d);
  if (!a.reference.empty()) ref = io::resolve_model(a.reference, models);
  if (ref) {
    report["reference"] = {{"id", ref->id},
                           {"params", count_params(ref->config).total()},
                           {"per_iter_flops", io::json_number(per_iter_flops(ref->config))},
                           {"flops_ratio", io::json_number(flops_ratio(model.config, ref->config))}};
  }
  emit(io::dump(report), a.out);
  return 0;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string train;
  std::string test;
  std::optional<std::uint64_t> seed;
  std::string estimate;
  std::size_t window = 16;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  auto cfg = io::sim_from_doc(io::load_config(a.preset));
  if (a.seed) cfg.seed = *a.seed;
  const auto sim = simulate(cfg);
  if (!a.train.empty()) io::write_text_file(a.train, io::curve_to_csv(sim.train));
  if (!a.test.empty()) io::write_text_file(a.test, io::curve_to_csv(sim.test));
  json report = {{"id", cfg.id},
                 {"epochs", io::json_number(cfg.epochs())},
                 {"points", sim.test.size()},
                 {"final_test_loss", io::json_number(sim.test.points().back().loss)},
                 {"final_train_loss", io::json_number(sim.train.points().back().loss)},
                 {"seed", cfg.seed}};
  if (!a.estimate.empty()) {
    const auto est = running_train_estimate(sim.train, a.window);
    io::write_text_file(a.estimate, io::curve_to_csv(est));
    report["estimate_window"] = a.window;
  }
  emit(io::dump(report), a.out);
  return 0;
}

// --- fit -----------------------------------------------------------------------

struct FitArgs {
  std::string curve;
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t min_points = kDefaultMinPoints;
  double r2 = kDefaultR2Threshold;
  std::string loglog;
  std::string out;
};

int run_fit(const FitArgs& a) {
  const auto curve = io::read_curve_file(a.curve);
  json report;
  report["config_id"] = curve.config_id();
  report["kind"] = std::string(to_string(curve.kind()));
  IterRange region;
  if (a.lo || a.hi) {
    region = IterRange(a.lo.value_or(0.0), a.hi.value_or(kInf));
    report["detected"] = false;
  } else {
    const auto found = detect_power_region(curve, a.min_points, a.r2);
    region = found.range;
    report["detected"] = true;
    report["detection"] = {{"min_points", a.min_points},
                           {"r2_threshold", io::json_number(a.r2)},
                           {"first_index", found.first},
                           {"last_index", found.last}};
  }
  report["fit"] = io::to_json(fit_power_law(curve, region));
  if (!a.loglog.empty()) {
    std::string csv = "# config_id=" + curve.config_id() + "\nlog_iteration,log_loss\n";
    for (const auto& p : loglog_view(curve))
      csv += io::format_number(p.log_x) + "," + io::format_number(p.log_loss) + "\n";
    io::write_text_file(a.loglog, csv);
  }
  emit(io::dump(report), a.out);
  return 0;
}

// --- remap -----------------------------------------------------------------------

struct RemapArgs {
  std::vector<std::string> curves;
  std::string reference;
  std::string config;
  std::vector<std::string> scales;
  std::vector<std::string> params;
  std::string remapped_dir;
  std::string ranges;
};

int run_remap(const RemapArgs& a) {
  const auto models = load_models(a.config);
  const auto scale_override = parse_assignments(a.scales, "--scale");
  const auto param_override = parse_assignments(a.params, "--params");

  std::vector<RemappedCurve> remapped;
  std::vector<std::optional<Candidate>> candidates;
  for (const auto& path : a.curves) {
    const auto curve = io::read_curve_file(path);
    const auto& id = curve.config_id();
    std::optional<io::NamedModel> model;
    try {
      model = resolve_with_overrides(id, models, param_override);
    } catch (const Error&) {
      if (param_override.count(id)) throw;
    }

    double scale = 1.0;
    if (id == a.reference) {
      scale = 1.0;
    } else if (const auto it = scale_override.find(id); it != scale_override.end()) {
      scale = it->second;
    } else {
      detail::require(model.has_value(), "no model config or --scale for curve '" + id + "'");
      scale = model_flops(*model) / model_flops(resolve_with_overrides(a.reference, models, param_override));
    }
    remapped.push_back(remap_curve(curve, scale, a.reference));
    candidates.push_back(model ? std::optional(model->candidate()) : std::nullopt);
  }

  if (!a.remapped_dir.empty()) {
    fs::create_directories(a.remapped_dir);
    for (const auto& r : remapped)
      io::write_text_file(fs::path(a.remapped_dir) / (r.source_id + ".csv"), io::curve_to_csv(r.curve));
  }

  const auto ranges = optimal_ranges(remapped);
  json report;
  report["reference"] = a.reference;
  report["curves"] = json::array();
  std::vector<IterRange> ratio_ranges;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto& r = ranges[i];
    json entry = {{"config_id", r.config_id},
                  {"scale", io::json_number(r.scale)},
                  {"reference_range", io::to_json(r.reference)},
                  {"native_range", io::to_json(r.native)}};
    if (candidates[i]) {
      const auto ratio = tokens_per_param_range(r.native, candidates[i]->tokens_per_iter, candidates[i]->params);
      entry["params"] = io::json_number(candidates[i]->params);
      entry["tokens_per_iter"] = io::json_number(candidates[i]->tokens_per_iter);
      entry["tokens_per_param"] = io::to_json(ratio);
      if (!ratio.is_empty()) ratio_ranges.push_back(ratio);
    }
    report["curves"].push_back(entry);
  }

  report["intersections"] = json::array();
  for (std::size_t i = 0; i < remapped.size(); ++i)
    for (std::size_t j = i + 1; j < remapped.size(); ++j) {
      json xs = json::array();
      try {
        for (double x : find_intersections(remapped[i], remapped[j])) xs.push_back(io::json_number(x));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::domain_error) throw;
      }
      report["intersections"].push_back({{"a", remapped[i].source_id}, {"b", remapped[j].source_id}, {"x", xs}});
    }

  if (!ratio_ranges.empty()) {
    const auto common = intersect_ranges(ratio_ranges);
    report["tokens_per_param_intersection"] = io::to_json(common);
    report["geometric_midpoint"] =
        common.lo > 0.0 && !common.unbounded() ? io::json_number(geometric_midpoint(common)) : json(nullptr);
  }
  emit(io::dump(report), a.ranges);
  return 0;
}

// --- plan ------------------------------------------------------------------------

struct PlanArgs {
  std::optional<double> p0;
  std::optional<double> t0;
  std::optional<double> iters;
  std::optional<double> tokens_per_iter;
  std::string candidates;
  std::string config;
  std::vector<std::string> params;
  std::string ranges;
  double target = kDefaultTokensPerParam;
  std::string out;
};

int run_plan(const PlanArgs& a, const CLI::App& sub) {
  std::vector<Candidate> cands;
  Plan plan;
  if (!a.ranges.empty()) {
    detail::require(a.iters.has_value(), "plan --ranges needs --iters");
    json doc;
    try {
      doc = json::parse(io::read_text_file(a.ranges));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, std::string("invalid ranges JSON: ") + e.what());
    }
    std::vector<RangeEntry> entries;
    for (const auto& c : doc.at("curves")) {
      detail::require(c.contains("params"), "ranges entry '" + c.at("config_id").get<std::string>() +
                                                "' has no params; rerun remap with model configs");
      Candidate cand{c.at("config_id").get<std::string>(), io::number_from_json(c.at("params"), "params"),
                     io::number_from_json(c.at("tokens_per_iter"), "tokens_per_iter")};
      cands.push_back(cand);
      entries.push_back({cand, io::range_from_json(c.at("native_range"))});
    }
    plan = plan_from_ranges(*a.iters, entries, a.target);
  } else {
    if (a.candidates.empty()) {
      std::cerr << "error: plan needs --candidates (or --ranges)\n" << sub.help();
      return kExitInvalid;
    }
    const auto models = load_models(a.config);
    const auto param_override = parse_assignments(a.params, "--params");
    for (const auto& id : io::split(a.candidates, ','))
      cands.push_back(resolve_with_overrides(id, models, param_override).candidate());
    if (a.p0 || a.t0) {
      detail::require(a.p0 && a.t0, "constant-product planning needs both --p0 and --t0");
      plan = plan_constant_product(*a.p0, *a.t0, cands, a.target);
    } else if (a.iters) {
      plan = plan_fixed_iterations(*a.iters, a.tokens_per_iter.value_or(cands.front().tokens_per_iter), cands,
                                   a.target);
    } else {
      std::cerr << "error: plan needs --p0/--t0, --iters, or --iters with --ranges\n" << sub.help();
      return kExitInvalid;
    }
  }
  emit(io::dump(io::to_json(plan, cands)), a.out);
  return 0;
}

// --- speedup -----------------------------------------------------------------------

struct SpeedupArgs {
  std::string single;
  std::string multi;
  std::optional<double> iters_per_epoch;
  std::optional<int> epochs;
  std::string old_curve;
  std::string new_curve;
  std::optional<double> old_iters;
  std::string reference;
  std::string config;
  std::vector<std::string> scales;
  std::vector<std::string> params;
  std::string combine;
  bool grid_snap = false;
  std::string out;
};

int run_speedup(const SpeedupArgs& a, const CLI::App& sub) {
  const auto mode = a.grid_snap ? ReachMode::grid_snap : ReachMode::interpolate;
  json report;
  if (!a.combine.empty()) {
    const auto parts = io::split(a.combine, ',');
    detail::require(parts.size() == 2, "--combine expects EPOCH,ADJUSTMENT");
    const double e = io::parse_double(parts[0], "epoch speedup");
    const double s = io::parse_double(parts[1], "adjustment speedup");
    report = {{"epoch_speedup", io::json_number(e)},
              {"adjustment_speedup", io::json_number(s)},
              {"combined_speedup", io::json_number(combined_speedup(e, s))}};
  } else if (!a.single.empty() || !a.multi.empty()) {
    detail::require(!a.single.empty() && !a.multi.empty() && a.iters_per_epoch.has_value(),
                    "epoch speedup needs --single, --multi and --iters-per-epoch");
    const auto single = io::read_curve_file(a.single);
    const auto multi = io::read_curve_file(a.multi);
    report = io::to_json(epoch_speedup(single, multi, *a.iters_per_epoch, a.epochs, mode));
  } else if (!a.old_curve.empty() || !a.new_curve.empty()) {
    detail::require(!a.old_curve.empty() && !a.new_curve.empty() && a.old_iters && !a.reference.empty(),
                    "adjustment speedup needs --old, --new, --old-iters and --reference");
    const auto models = load_models(a.config);
    const auto scale_override = parse_assignments(a.scales, "--scale");
    const auto param_override = parse_assignments(a.params, "--params");
    auto load = [&](const std::string& path) {
      const auto curve = io::read_curve_file(path);
      const auto& id = curve.config_id();
      double scale = 1.0;
      if (id == a.reference) {
        scale = 1.0;
      } else if (const auto it = scale_override.find(id); it != scale_override.end()) {
        scale = it->second;
      } else {
        scale = model_flops(resolve_with_overrides(id, models, param_override)) /
                model_flops(resolve_with_overrides(a.reference, models, param_override));
      }
      return remap_curve(curve, scale, a.reference);
    };
    const auto old_r = load(a.old_curve);
    const auto new_r = load(a.new_curve);
    report = io::to_json(adjustment_speedup(old_r, new_r, *a.old_iters, mode));
    report["old"] = {{"config_id", old_r.source_id}, {"scale", io::json_number(old_r.scale)}};
    report["new"] = {{"config_id", new_r.source_id}, {"scale", io::json_number(new_r.scale)}};
  } else {
    std::cerr << "error: speedup needs --single/--multi, --old/--new, or --combine\n" << sub.help();
    return kExitInvalid;
  }
  emit(io::dump(report), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-epoch training budget planner and learning-curve analyzer"};
  app.require_subcommand(1);

  ParamsArgs pa;
  auto* params = app.add_subcommand("params", "parameter count and per-iteration FLOPS of a model config");
  params->add_option("--d", pa.d, "model width (multiple of 64)");
  params->add_option("--layers", pa.layers, "transformer layers")->capture_default_str();
  params->add_option("--vocab", pa.vocab, "vocabulary size")->capture_default_str();
  params->add_option("--cutoffs", pa.cutoffs, "adaptive softmax cutoffs, comma separated");
  params->add_option("--divisor", pa.divisor, "adaptive projection divisor")->capture_default_str();
  params->add_option("--tokens-per-iter", pa.tokens_per_iter, "tokens per minibatch")->capture_default_str();
  params->add_option("--ref-d", pa.ref_d, "reference width for the FLOPS ratio (other flags shared)");
  params->add_option("--config", pa.config, "model config file (INI or JSON)");
  params->add_option("--model", pa.model, "model id in --config, or d<width>");
  params->add_option("--reference", pa.reference, "reference model id for the FLOPS ratio");
  params->add_option("--out", pa.out, "write the JSON report here instead of stdout");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "generate train/test curves from a simulation preset");
  sim->add_option("--preset", sa.preset, "simulation preset (INI or JSON)")->required();
  sim->add_option("--train", sa.train, "train curve CSV output");
  sim->add_option("--test", sa.test, "test curve CSV output");
  sim->add_option("--seed", sa.seed, "override the preset noise seed");
  sim->add_option("--estimate", sa.estimate, "running-mean test estimate CSV output");
  sim->add_option("--window", sa.window, "running-mean window in recorded points")->capture_default_str();
  sim->add_option("--out", sa.out, "write the JSON summary here instead of stdout");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit loss = a * x^-k in log-log space");
  fit->add_option("--curve", fa.curve, "curve CSV")->required();
  fit->add_option("--lo", fa.lo, "fit region lower iteration (disables detection)");
  fit->add_option("--hi", fa.hi, "fit region upper iteration (disables detection)");
  fit->add_option("--min-points", fa.min_points, "minimum window size for detection")->capture_default_str();
  fit->add_option("--r2", fa.r2, "r2 threshold for detection")->capture_default_str();
  fit->add_option("--loglog", fa.loglog, "write (ln x, ln loss) plot data CSV");
  fit->add_option("--out", fa.out, "write the JSON report here instead of stdout");

  RemapArgs ra;
  auto* remap = app.add_subcommand("remap", "FLOPS-normalize curves and derive optimal iteration ranges");
  remap->add_option("--curves", ra.curves, "curve CSVs (config_id from each file's comment line)")->required();
  remap->add_option("--reference", ra.reference, "reference config id")->required();
  remap->add_option("--config", ra.config, "model config file (INI or JSON)");
  remap->add_option("--scale", ra.scales, "ID=RATIO per-iteration FLOPS relative to the reference");
  remap->add_option("--params", ra.params, "ID=COUNT parameter count override");
  remap->add_option("--remapped-dir", ra.remapped_dir, "write remapped curve CSVs into this directory");
  remap->add_option("--ranges", ra.ranges, "write the JSON ranges report here instead of stdout");

  PlanArgs pl;
  auto* plan = app.add_subcommand("plan", "choose model size for a compute budget");
  plan->add_option("--p0", pl.p0, "initial parameter count (constant-product mode)");
  plan->add_option("--t0", pl.t0, "initial token budget (constant-product mode)");
  plan->add_option("--iters", pl.iters, "iteration budget (fixed-iterations or range-table mode)");
  plan->add_option("--tokens-per-iter", pl.tokens_per_iter, "tokens per iteration (fixed-iterations mode)");
  plan->add_option("--candidates", pl.candidates, "candidate ids, comma separated");
  plan->add_option("--config", pl.config, "model config file (INI or JSON)");
  plan->add_option("--params", pl.params, "ID=COUNT parameter count override");
  plan->add_option("--ranges", pl.ranges, "ranges JSON from `remap` (range-table mode)");
  plan->add_option("--target", pl.target, "target tokens per parameter")->capture_default_str();
  plan->add_option("--out", pl.out, "write the JSON plan here instead of stdout");

  SpeedupArgs su;
  auto* speed = app.add_subcommand("speedup", "one-epoch, size-adjustment or combined speedup");
  speed->add_option("--single", su.single, "one-epoch test curve CSV");
  speed->add_option("--multi", su.multi, "multi-epoch test curve CSV");
  speed->add_option("--iters-per-epoch", su.iters_per_epoch, "iterations per multi-epoch pass");
  speed->add_option("--epochs", su.epochs, "only use the first E epochs of the multi-epoch curve");
  speed->add_option("--old", su.old_curve, "curve of the original model size");
  speed->add_option("--new", su.new_curve, "curve of the adjusted model size");
  speed->add_option("--old-iters", su.old_iters, "native iterations of the original run");
  speed->add_option("--reference", su.reference, "reference config id for remapping");
  speed->add_option("--config", su.config, "model config file (INI or JSON)");
  speed->add_option("--scale", su.scales, "ID=RATIO per-iteration FLOPS relative to the reference");
  speed->add_option("--params", su.params, "ID=COUNT parameter count override");
  speed->add_option("--combine", su.combine, "EPOCH,ADJUSTMENT speedups to multiply");
  speed->add_flag("--grid-snap", su.grid_snap, "snap loss crossings to sampled iterations");
  speed->add_option("--out", su.out, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << failing->help();
    return kExitInvalid;
  }

  try {
    if (params->parsed()) return run_params(pa, *params);
    if (sim->parsed()) return run_simulate(sa);
    if (fit->parsed()) return run_fit(fa);
    if (remap->parsed()) return run_remap(ra);
    if (plan->parsed()) return run_plan(pl, *plan);
    if (speed->parsed()) return run_speedup(su, *speed);
  } catch (const Error& e) {
    std::cerr << io::error_json(e.code(), e.what()).dump() << "\n";
    const bool bad_input = e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::invalid_schedule;
    return bad_input ? kExitInvalid : kExitAnalysis;
  } catch (const std::exception& e) {
    std::cerr << io::error_json(ErrorCode::invalid_argument, e.what()).dump() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
