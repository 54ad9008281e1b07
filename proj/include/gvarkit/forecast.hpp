#ifndef GVARKIT_FORECAST_HPP_
#define GVARKIT_FORECAST_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gvarkit/bgvar.hpp"
#include "gvarkit/panel.hpp"

namespace gvarkit {

// Forecast starting point: the last observed global vector, its trend value,
// and the "country.variable" label of every coordinate.
struct ForecastOrigin {
  Eigen::VectorXd x_last;
  int trend_last = 0;
  std::vector<std::string> labels;
};

ForecastOrigin make_origin(const Panel& panel, const std::vector<std::string>& countries);

enum class ConditioningMode { none, fixed, band };

// A constrained future path for one global coordinate: values at 1-based
// forecast horizons.
struct ForecastConstraint {
  std::string country;
  std::string variable;
  std::vector<int> horizons;
  std::vector<double> values;
};

struct ConditioningSpec {
  ConditioningMode mode = ConditioningMode::none;
  std::vector<ForecastConstraint> constraints;
  // Band mode: the constraint is perturbed uniformly within
  // +/- rel_half_width * |value| before exact conditioning.
  double rel_half_width = 0.0;
};

inline constexpr std::array<double, 5> kFanQuantiles = {0.05, 0.16, 0.50, 0.84, 0.95};

struct ForecastFan {
  int n_ahead = 0;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> paths;      // per draw, n_ahead x k
  std::vector<Eigen::MatrixXd> quantiles;  // kFanQuantiles order, n_ahead x k
  ConditioningSpec conditioning;
};

// Simulate each solved draw forward with shocks from its own covariance;
// quantiles are empirical across draws. zero_shocks reproduces the
// deterministic iteration exactly.
ForecastFan forecast_unconditional(const std::vector<SolvedDraw>& draws,
                                   const ForecastOrigin& origin, int n_ahead,
                                   std::uint64_t seed, bool zero_shocks = false);

// Exact linear-Gaussian conditioning of the stacked shock vector on the
// constraints; band mode perturbs each constrained value inside its band
// first. Constrained coordinates are imposed exactly path by path.
ForecastFan forecast_conditional(const std::vector<SolvedDraw>& draws,
                                 const ForecastOrigin& origin, int n_ahead,
                                 const ConditioningSpec& spec, std::uint64_t seed);

struct GirfResult {
  std::string shock_country;
  std::string shock_variable;
  int horizon = 0;  // responses run 0..horizon
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXd> responses;  // per draw, (horizon+1) x k
  std::vector<Eigen::MatrixXd> quantiles;  // kFanQuantiles order
};

// Generalized impulse responses to a one-standard-deviation shock:
// GIRF_h = F^h Sigma_e s_j / sqrt(sigma_jj), ordering-invariant.
GirfResult girf(const std::vector<SolvedDraw>& draws, const std::vector<std::string>& labels,
                const std::string& shock_country, const std::string& shock_variable,
                int horizon);

// Type-7 (linear interpolation) empirical quantile of a sample.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace gvarkit

#endif  // GVARKIT_FORECAST_HPP_
