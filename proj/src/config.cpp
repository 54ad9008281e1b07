#include "gvarkit/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"

namespace gvarkit {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown config key '" + where + "." + item.key() + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

void read_det(const json& obj, const char* key, Deterministic& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_string()) {
    throw ConfigError("config key '" + std::string(key) + "' must be a string");
  }
  out = deterministic_from_string(obj.at(key).get<std::string>());
}

}  // namespace

const char* to_string(LagCriterion c) { return c == LagCriterion::aic ? "aic" : "bic"; }

LagCriterion lag_criterion_from_string(const std::string& s) {
  if (s == "aic") return LagCriterion::aic;
  if (s == "bic") return LagCriterion::bic;
  throw ConfigError("unknown lag criterion '" + s + "' (use aic or bic)");
}

const char* to_string(ConditioningMode m) {
  switch (m) {
    case ConditioningMode::none:
      return "none";
    case ConditioningMode::fixed:
      return "fixed";
    case ConditioningMode::band:
      return "band";
  }
  return "none";
}

ConditioningMode conditioning_mode_from_string(const std::string& s) {
  if (s == "none") return ConditioningMode::none;
  if (s == "fixed") return ConditioningMode::fixed;
  if (s == "band") return ConditioningMode::band;
  throw ConfigError("unknown conditioning mode '" + s + "' (use none, fixed, or band)");
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config",
             {"schema_version", "data", "flows", "output_dir", "countries", "variables",
              "interpolate_gaps", "transforms", "tests", "rolling", "var", "gvar", "prior",
              "sampler", "forecast", "girf"});

  RunConfig c;
  read_field(root, "schema_version", c.schema_version);
  if (c.schema_version != 1) {
    throw ConfigError("unsupported config schema_version " + std::to_string(c.schema_version));
  }
  read_field(root, "data", c.data);
  read_field(root, "flows", c.flows);
  read_field(root, "output_dir", c.output_dir);
  read_field(root, "countries", c.countries);
  read_field(root, "variables", c.variables);
  read_field(root, "interpolate_gaps", c.interpolate_gaps);

  if (root.contains("transforms")) {
    if (!root.at("transforms").is_array()) throw ConfigError("config.transforms must be an array");
    for (const auto& t : root.at("transforms")) {
      check_keys(t, "transforms[]", {"variable", "log", "diff"});
      TransformSpec spec;
      read_field(t, "variable", spec.variable);
      if (spec.variable.empty()) throw ConfigError("transform entry is missing its variable");
      read_field(t, "log", spec.log);
      read_field(t, "diff", spec.diff);
      c.transforms.push_back(spec);
    }
  }

  if (root.contains("tests")) {
    const json& s = root.at("tests");
    check_keys(s, "tests",
               {"adf_max_lag", "pp_lags", "det", "johansen_lags", "johansen_det",
                "granger_lags"});
    read_field(s, "adf_max_lag", c.tests.adf_max_lag);
    read_field(s, "pp_lags", c.tests.pp_lags);
    read_det(s, "det", c.tests.det);
    read_field(s, "johansen_lags", c.tests.johansen_lags);
    read_det(s, "johansen_det", c.tests.johansen_det);
    read_field(s, "granger_lags", c.tests.granger_lags);
  }

  if (root.contains("rolling")) {
    const json& s = root.at("rolling");
    check_keys(s, "rolling", {"window", "y", "x"});
    read_field(s, "window", c.rolling.window);
    read_field(s, "y", c.rolling.y);
    read_field(s, "x", c.rolling.x);
  }

  if (root.contains("var")) {
    const json& s = root.at("var");
    check_keys(s, "var", {"max_lag", "criterion", "det"});
    read_field(s, "max_lag", c.var.max_lag);
    if (s.contains("criterion")) {
      c.var.criterion = lag_criterion_from_string(s.at("criterion").get<std::string>());
    }
    read_det(s, "det", c.var.det);
  }

  if (root.contains("gvar")) {
    const json& s = root.at("gvar");
    check_keys(s, "gvar", {"det", "cond_limit"});
    read_det(s, "det", c.gvar.det);
    read_field(s, "cond_limit", c.gvar.cond_limit);
  }

  if (root.contains("prior")) {
    const json& s = root.at("prior");
    check_keys(s, "prior",
               {"ng", "prior_mean_own_lag", "d_lambda", "e_lambda", "tau_start", "sample_tau",
                "a_sigma", "b_sigma", "det_variance", "vague_variance"});
    read_field(s, "ng", c.prior.ng_enabled);
    read_field(s, "prior_mean_own_lag", c.prior.prior_mean_own_lag);
    read_field(s, "d_lambda", c.prior.d_lambda);
    read_field(s, "e_lambda", c.prior.e_lambda);
    read_field(s, "tau_start", c.prior.tau_start);
    read_field(s, "sample_tau", c.prior.sample_tau);
    read_field(s, "a_sigma", c.prior.a_sigma);
    read_field(s, "b_sigma", c.prior.b_sigma);
    read_field(s, "det_variance", c.prior.det_variance);
    read_field(s, "vague_variance", c.prior.vague_variance);
  }

  if (root.contains("sampler")) {
    const json& s = root.at("sampler");
    check_keys(s, "sampler", {"draws", "burn", "thin", "seed", "stable_only", "threads"});
    read_field(s, "draws", c.sampler.draws);
    read_field(s, "burn", c.sampler.burn);
    read_field(s, "thin", c.sampler.thin);
    read_field(s, "seed", c.sampler.seed);
    read_field(s, "stable_only", c.sampler.stable_only);
    read_field(s, "threads", c.sampler.threads);
  }

  if (root.contains("forecast")) {
    const json& s = root.at("forecast");
    check_keys(s, "forecast",
               {"n_ahead", "mode", "rel_half_width", "constraints", "chart_variable"});
    read_field(s, "n_ahead", c.forecast.n_ahead);
    read_field(s, "chart_variable", c.forecast.chart_variable);
    if (s.contains("mode")) {
      c.forecast.mode = conditioning_mode_from_string(s.at("mode").get<std::string>());
    }
    read_field(s, "rel_half_width", c.forecast.rel_half_width);
    if (s.contains("constraints")) {
      if (!s.at("constraints").is_array()) {
        throw ConfigError("config.forecast.constraints must be an array");
      }
      for (const auto& t : s.at("constraints")) {
        check_keys(t, "forecast.constraints[]",
                   {"country", "variable", "hold_last", "horizons", "values"});
        ConstraintConfig cc;
        read_field(t, "country", cc.country);
        read_field(t, "variable", cc.variable);
        read_field(t, "hold_last", cc.hold_last);
        read_field(t, "horizons", cc.horizons);
        read_field(t, "values", cc.values);
        if (cc.country.empty() || cc.variable.empty()) {
          throw ConfigError("forecast constraint needs both country and variable");
        }
        if (!cc.hold_last && cc.values.empty()) {
          throw ConfigError("forecast constraint needs values unless hold_last is set");
        }
        c.forecast.constraints.push_back(std::move(cc));
      }
    }
  }

  if (root.contains("girf")) {
    const json& s = root.at("girf");
    check_keys(s, "girf", {"country", "variable", "horizon"});
    read_field(s, "country", c.girf.country);
    read_field(s, "variable", c.girf.variable);
    read_field(s, "horizon", c.girf.horizon);
  }
  return c;
}

std::string RunConfig::to_json_text() const {
  json root;
  root["schema_version"] = schema_version;
  root["data"] = data;
  root["flows"] = flows;
  root["output_dir"] = output_dir;
  root["countries"] = countries;
  root["variables"] = variables;
  root["interpolate_gaps"] = interpolate_gaps;
  root["transforms"] = json::array();
  for (const auto& t : transforms) {
    root["transforms"].push_back({{"variable", t.variable}, {"log", t.log}, {"diff", t.diff}});
  }
  root["tests"] = {{"adf_max_lag", tests.adf_max_lag},
                   {"pp_lags", tests.pp_lags},
                   {"det", to_string(tests.det)},
                   {"johansen_lags", tests.johansen_lags},
                   {"johansen_det", to_string(tests.johansen_det)},
                   {"granger_lags", tests.granger_lags}};
  root["rolling"] = {{"window", rolling.window}, {"y", rolling.y}, {"x", rolling.x}};
  root["var"] = {{"max_lag", var.max_lag},
                 {"criterion", to_string(var.criterion)},
                 {"det", to_string(var.det)}};
  root["gvar"] = {{"det", to_string(gvar.det)}, {"cond_limit", gvar.cond_limit}};
  root["prior"] = {{"ng", prior.ng_enabled},
                   {"prior_mean_own_lag", prior.prior_mean_own_lag},
                   {"d_lambda", prior.d_lambda},
                   {"e_lambda", prior.e_lambda},
                   {"tau_start", prior.tau_start},
                   {"sample_tau", prior.sample_tau},
                   {"a_sigma", prior.a_sigma},
                   {"b_sigma", prior.b_sigma},
                   {"det_variance", prior.det_variance},
                   {"vague_variance", prior.vague_variance}};
  // threads is accepted on input but never canonicalized: it is an execution
  // detail, and results are thread-count invariant, so it must not perturb
  // the config hash or the emitted bundle.
  root["sampler"] = {{"draws", sampler.draws},
                     {"burn", sampler.burn},
                     {"thin", sampler.thin},
                     {"seed", sampler.seed},
                     {"stable_only", sampler.stable_only}};
  root["forecast"] = {{"n_ahead", forecast.n_ahead},
                      {"mode", to_string(forecast.mode)},
                      {"rel_half_width", forecast.rel_half_width},
                      {"chart_variable", forecast.chart_variable},
                      {"constraints", json::array()}};
  for (const auto& cc : forecast.constraints) {
    root["forecast"]["constraints"].push_back({{"country", cc.country},
                                               {"variable", cc.variable},
                                               {"hold_last", cc.hold_last},
                                               {"horizons", cc.horizons},
                                               {"values", cc.values}});
  }
  root["girf"] = {{"country", girf.country},
                  {"variable", girf.variable},
                  {"horizon", girf.horizon}};
  return root.dump(2) + "\n";
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << to_json_text();
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::uint64_t RunConfig::hash() const { return fnv1a(to_json_text()); }

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace gvarkit
