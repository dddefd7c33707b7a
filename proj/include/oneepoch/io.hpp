#pragma once

// File contracts shared by the command-line tool: curve CSV, model / simulation
// config files (INI-style key-value or JSON) and JSON reports.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "oneepoch/curve.hpp"
#include "oneepoch/epoch_sim.hpp"
#include "oneepoch/error.hpp"
#include "oneepoch/fitting.hpp"
#include "oneepoch/model_budget.hpp"
#include "oneepoch/planner.hpp"
#include "oneepoch/range.hpp"
#include "oneepoch/remap.hpp"
#include "oneepoch/speedup.hpp"

namespace oneepoch::io {

using nlohmann::json;

inline constexpr int kSignificantDigits = 9;

// ---------------------------------------------------------------------------
// Numbers

inline double round_significant(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, kSignificantDigits - 1);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

/// 9 significant digits in plain decimal notation ("65000", "5.39541653").
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, round_significant(v), std::chars_format::fixed);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s, std::string_view what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  detail::require(res.ec == std::errc{} && res.ptr == s.data() + s.size() && !s.empty(),
                  "cannot parse " + std::string(what) + " '" + std::string(s) + "' as a number");
  return v;
}

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
  const double v = parse_double(s, what);
  detail::require(std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15,
                  std::string(what) + " must be an integer");
  return static_cast<std::int64_t>(v);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string item(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    out.push_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Finite values as rounded numbers, infinities as the string "inf".
inline json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return round_significant(v);
}

inline double number_from_json(const json& j, std::string_view what) {
  if (j.is_string()) return parse_double(j.get<std::string>(), what);
  detail::require(j.is_number(), std::string(what) + " must be a number");
  return j.get<double>();
}

// ---------------------------------------------------------------------------
// Curve CSV
//
//   # config_id=<id> kind=<train|test>
//   iteration,loss
//   100,7.12345678
//   ...

inline void write_curve_csv(std::ostream& os, const LearningCurve& curve) {
  os << "# config_id=" << curve.config_id() << " kind=" << to_string(curve.kind()) << '\n';
  os << "iteration,loss\n";
  for (const auto& p : curve.points()) os << format_number(p.iteration) << ',' << format_number(p.loss) << '\n';
}

inline std::string curve_to_csv(const LearningCurve& curve) {
  std::ostringstream os;
  write_curve_csv(os, curve);
  return os.str();
}

inline LearningCurve read_curve_csv(std::istream& is, const std::string& default_id = "curve") {
  std::string id = default_id;
  LossKind kind = LossKind::test;
  bool header_seen = false;
  std::vector<CurvePoint> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string tok;
      while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "config_id") id = val;
        if (key == "kind") kind = parse_loss_kind(val);
      }
      continue;
    }
    if (!header_seen) {
      detail::require(line == "iteration,loss", where + ": expected header 'iteration,loss'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    detail::require(fields.size() == 2, where + ": expected 2 fields");
    pts.push_back({parse_double(fields[0], "iteration"), parse_double(fields[1], "loss")});
  }
  detail::require(header_seen, "curve CSV has no 'iteration,loss' header");
  return {id, kind, std::move(pts)};
}

inline LearningCurve read_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open curve file '" + path.string() + "'");
  return read_curve_csv(in, path.stem().string());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  detail::require(out.good(), "cannot write '" + path.string() + "'");
  out << text;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(in.good(), "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Config files: section -> key -> value, from INI or JSON.

using ConfigDoc = std::map<std::string, std::map<std::string, std::string>>;

inline ConfigDoc parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("invalid JSON config: ") + e.what());
  }
  detail::require(j.is_object(), "JSON config must be an object of sections");
  ConfigDoc doc;
  for (const auto& [section, body] : j.items()) {
    detail::require(body.is_object(), "JSON config section '" + section + "' must be an object");
    auto& out = doc[section];
    for (const auto& [key, val] : body.items()) {
      if (val.is_string()) {
        out[key] = val.get<std::string>();
      } else if (val.is_array()) {
        std::string joined;
        for (const auto& item : val) {
          if (!joined.empty()) joined += ',';
          joined += item.is_string() ? item.get<std::string>() : item.dump();
        }
        out[key] = joined;
      } else {
        out[key] = val.dump();
      }
    }
  }
  return doc;
}

inline ConfigDoc parse_config_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::invalid_argument, std::string("invalid config: ") + e.what());
  }
  ConfigDoc doc;
  for (const auto& [section, body] : tree) {
    detail::require(!body.empty(), "config key '" + section + "' must appear inside a [section]");
    auto& out = doc[section];
    for (const auto& [key, val] : body) out[key] = val.get_value<std::string>();
  }
  return doc;
}

/// JSON when the text starts with '{', INI-style key = value otherwise.
inline ConfigDoc parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_config_json(text);
  return parse_config_ini(text);
}

inline ConfigDoc load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

namespace config_detail {

class SectionReader {
 public:
  SectionReader(std::string name, const std::map<std::string, std::string>& values)
      : name_(std::move(name)), values_(values) {}

  [[nodiscard]] const std::string* find(const std::string& key) {
    used_.push_back(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  void num(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = parse_double(*v, name_ + "." + key);
  }
  void integer(const std::string& key, std::int64_t& out) {
    if (const auto* v = find(key)) out = parse_int(*v, name_ + "." + key);
  }
  void list(const std::string& key, std::vector<std::int64_t>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : split(*v, ',')) out.push_back(parse_int(item, name_ + "." + key));
    }
  }
  void list(const std::string& key, std::vector<double>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      for (const auto& item : split(*v, ',')) out.push_back(parse_double(item, name_ + "." + key));
    }
  }

  /// Rejects keys nobody asked for, which are almost always typos.
  void finish() const {
    for (const auto& [key, _] : values_)
      oneepoch::detail::require(std::find(used_.begin(), used_.end(), key) != used_.end(),
                                "unknown key '" + key + "' in section [" + name_ + "]");
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>& values_;
  std::vector<std::string> used_;
};

}  // namespace config_detail

struct NamedModel {
  std::string id;
  ModelConfig config;
  std::optional<double> params;  // reported count overriding count_params

  [[nodiscard]] double param_count() const {
    return params ? *params : static_cast<double>(count_params(config).total());
  }
  [[nodiscard]] Candidate candidate() const {
    return {id, param_count(), static_cast<double>(config.tokens_per_iter)};
  }
};

inline NamedModel model_from_section(const std::string& id, const std::map<std::string, std::string>& values) {
  NamedModel m{id, ModelConfig{}, std::nullopt};
  config_detail::SectionReader r(id, values);
  r.integer("d_model", m.config.d_model);
  r.integer("n_layers", m.config.n_layers);
  r.integer("vocab_size", m.config.vocab_size);
  r.list("cutoffs", m.config.cutoffs);
  r.integer("adaptive_divisor", m.config.adaptive_divisor);
  r.integer("tokens_per_iter", m.config.tokens_per_iter);
  if (const auto* v = r.find("params")) m.params = parse_double(*v, id + ".params");
  r.finish();
  m.config.validate();
  if (m.params) oneepoch::detail::require(*m.params > 0.0, id + ".params must be positive");
  return m;
}

inline std::vector<NamedModel> models_from_doc(const ConfigDoc& doc) {
  std::vector<NamedModel> out;
  for (const auto& [id, values] : doc) out.push_back(model_from_section(id, values));
  return out;
}

/// Looks `id` up among `models`; ids of the form "d<width>" fall back to the
/// LM1B family defaults at that width.
inline NamedModel resolve_model(const std::string& id, const std::vector<NamedModel>& models) {
  for (const auto& m : models)
    if (m.id == id) return m;
  if (id.size() > 1 && id[0] == 'd' && id.find_first_not_of("0123456789", 1) == std::string::npos)
    return {id, lm1b_config(parse_int(id.substr(1), "width")), std::nullopt};
  throw Error(ErrorCode::invalid_argument, "unknown model config '" + id + "'");
}

inline SimConfig sim_from_section(const std::string& name, const std::map<std::string, std::string>& values) {
  SimConfig c;
  c.id = name;
  config_detail::SectionReader r(name, values);
  if (const auto* v = r.find("id")) c.id = *v;
  r.num("dataset_tokens", c.dataset_tokens);
  r.num("tokens_per_iter", c.tokens_per_iter);
  r.integer("total_iters", c.total_iters);
  r.integer("eval_interval", c.eval_interval);
  r.num("dropout", c.dropout);
  if (const auto* v = r.find("dropout_schedule")) {
    std::vector<double> sched;
    for (const auto& item : split(*v, ',')) sched.push_back(parse_double(item, name + ".dropout_schedule"));
    c.schedule = DropoutSchedule(std::move(sched));
  }
  r.num("amplitude", c.amplitude);
  r.num("exponent", c.exponent);
  r.num("floor", c.floor);
  r.num("repeat_value", c.repeat_value);
  r.num("overfit", c.overfit);
  r.num("dropout_slowdown", c.dropout_slowdown);
  r.num("dropout_ref", c.dropout_ref);
  r.num("memorization", c.memorization);
  r.num("noise", c.noise);
  if (const auto* v = r.find("seed")) c.seed = static_cast<std::uint64_t>(parse_int(*v, name + ".seed"));
  r.finish();
  c.validate();
  return c;
}

/// A simulation preset holds exactly one section, or names it `simulation`.
inline SimConfig sim_from_doc(const ConfigDoc& doc) {
  if (const auto it = doc.find("simulation"); it != doc.end()) return sim_from_section(it->first, it->second);
  detail::require(doc.size() == 1, "simulation preset must contain a single section");
  return sim_from_section(doc.begin()->first, doc.begin()->second);
}

// ---------------------------------------------------------------------------
// JSON reports

inline json to_json(const IterRange& r) { return {{"lo", json_number(r.lo)}, {"hi", json_number(r.hi)}}; }

inline IterRange range_from_json(const json& j) {
  detail::require(j.is_object() && j.contains("lo") && j.contains("hi"), "range must be an object with lo and hi");
  return {number_from_json(j.at("lo"), "lo"), number_from_json(j.at("hi"), "hi")};
}

inline json to_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},       {"n_layers", c.n_layers},
          {"vocab_size", c.vocab_size}, {"cutoffs", c.cutoffs},
          {"adaptive_divisor", c.adaptive_divisor}, {"tokens_per_iter", c.tokens_per_iter},
          {"heads", c.heads()},         {"d_ff", c.d_ff()}};
}

inline json to_json(const ParamCount& p) {
  return {{"total", p.total()},
          {"breakdown",
           {{"attention", p.attention},
            {"feed_forward", p.feed_forward},
            {"input_embedding", p.input_embedding},
            {"input_projection", p.input_projection},
            {"softmax_embedding", p.softmax_embedding},
            {"softmax_projection", p.softmax_projection}}}};
}

inline json to_json(const PowerLawFit& f) {
  return {{"amplitude", json_number(f.amplitude)}, {"exponent", json_number(f.exponent)},
          {"slope", json_number(-f.exponent)},     {"r2", json_number(f.r2)},
          {"region", to_json(f.region)},           {"n_points", f.n_points}};
}

inline json to_json(const Candidate& c) {
  return {{"id", c.id}, {"params", json_number(c.params)}, {"tokens_per_iter", json_number(c.tokens_per_iter)}};
}

inline json to_json(const Plan& p, const std::vector<Candidate>& candidates) {
  json objectives = json::array();
  for (std::size_t i = 0; i < candidates.size() && i < p.objectives.size(); ++i)
    objectives.push_back({{"id", candidates[i].id}, {"objective", json_number(p.objectives[i])}});
  return {{"method", std::string(to_string(p.method))},
          {"chosen", to_json(p.chosen)},
          {"tokens", json_number(p.tokens)},
          {"iterations", p.iterations},
          {"dropped_tokens", json_number(p.dropped_tokens)},
          {"ratio", json_number(p.ratio)},
          {"target", json_number(p.target)},
          {"objective", json_number(p.objective)},
          {"candidates", objectives}};
}

inline json to_json(const SpeedupReport& r) {
  json j = {{"baseline_iters", json_number(r.baseline_iters)},
            {"target_iters", json_number(r.target_iters)},
            {"speedup", json_number(r.speedup)},
            {"loss", json_number(r.loss)},
            {"flops_adjusted", r.flops_adjusted},
            {"mode", r.mode == ReachMode::interpolate ? "interpolate" : "grid-snap"}};
  j["epoch_limit"] = r.epoch_limit ? json(*r.epoch_limit) : json(nullptr);
  return j;
}

inline json error_json(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}};
}

/// Pretty JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace oneepoch::io
