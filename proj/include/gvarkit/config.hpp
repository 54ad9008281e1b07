#ifndef GVARKIT_CONFIG_HPP_
#define GVARKIT_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "gvarkit/bgvar.hpp"
#include "gvarkit/forecast.hpp"
#include "gvarkit/panel.hpp"
#include "gvarkit/regress.hpp"
#include "gvarkit/var.hpp"

namespace gvarkit {

struct TestOptions {
  int adf_max_lag = 4;
  int pp_lags = -1;  // -1 selects the sample-size rule
  Deterministic det = Deterministic::constant;
  int johansen_lags = 1;  // lagged differences
  Deterministic johansen_det = Deterministic::constant;
  int granger_lags = 2;
};

struct RollingOptions {
  int window = 20;
  // Optional focused pair ("country.variable"): adds a per-window R^2 trace
  // for y on x next to the all-pairs grid.
  std::string y;
  std::string x;
};

struct VarOptions {
  int max_lag = 4;
  LagCriterion criterion = LagCriterion::bic;
  Deterministic det = Deterministic::constant;
};

struct GvarOptions {
  Deterministic det = Deterministic::constant_trend;
  double cond_limit = 1e10;
};

struct SamplerSchedule {
  int draws = 1000;
  int burn = 1000;
  int thin = 1;
  std::uint64_t seed = 42;
  bool stable_only = true;
  int threads = 1;
};

struct ConstraintConfig {
  std::string country;
  std::string variable;
  bool hold_last = false;  // replicate the last observation over all horizons
  std::vector<int> horizons;
  std::vector<double> values;
};

struct ForecastSpec {
  int n_ahead = 5;
  ConditioningMode mode = ConditioningMode::none;
  double rel_half_width = 0.001;
  std::vector<ConstraintConfig> constraints;
  // Variable charted across countries (one panel per country); empty picks
  // the first panel variable. The CSV always covers every coordinate.
  std::string chart_variable;
};

struct GirfSpec {
  std::string country;  // empty disables the stage
  std::string variable;
  int horizon = 8;
};

// Full pipeline configuration. Serialization is canonical (alphabetical keys,
// every default materialized), so hash() identifies a run exactly.
struct RunConfig {
  int schema_version = 1;
  std::string data;
  std::string flows;
  std::string output_dir = "out";
  std::vector<std::string> countries;  // empty selects every flow country
  std::vector<std::string> variables;  // empty selects every panel variable
  bool interpolate_gaps = false;
  std::vector<TransformSpec> transforms;
  TestOptions tests;
  RollingOptions rolling;
  VarOptions var;
  GvarOptions gvar;
  PriorConfig prior;
  SamplerSchedule sampler;
  ForecastSpec forecast;
  GirfSpec girf;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string to_json_text() const;
  void save(const std::string& path) const;

  // FNV-1a hash of the canonical serialization, hex-printed in artifacts.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

const char* to_string(LagCriterion c);
LagCriterion lag_criterion_from_string(const std::string& s);
const char* to_string(ConditioningMode m);
ConditioningMode conditioning_mode_from_string(const std::string& s);

}  // namespace gvarkit

#endif  // GVARKIT_CONFIG_HPP_
