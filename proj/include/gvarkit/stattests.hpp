#ifndef GVARKIT_STATTESTS_HPP_
#define GVARKIT_STATTESTS_HPP_

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gvarkit/regress.hpp"

namespace gvarkit {

struct UnitRootResult {
  std::string null_hypothesis = "unit root";
  double statistic = 0.0;
  double pvalue = 1.0;
  double cv1 = 0.0, cv5 = 0.0, cv10 = 0.0;
  int lags = 0;
  int n_obs = 0;  // observations entering the test regression
  Deterministic det = Deterministic::constant;

  // level in {0.01, 0.05, 0.10}; true = unit root rejected (series treated as
  // stationary at that level).
  bool reject_at(double level) const;
};

// Augmented Dickey-Fuller regression of dy_t on y_{t-1}, `lags` lagged
// differences and the requested deterministic terms. The p-value comes from
// the MacKinnon (1994/2010) response surfaces.
UnitRootResult adf_test(const Eigen::VectorXd& y, int lags, Deterministic det);

// Same test with the lag order chosen by AIC over 0..max_lag on a common
// sample, then refit on the full usable sample.
UnitRootResult adf_test_auto(const Eigen::VectorXd& y, int max_lag, Deterministic det);

// Phillips-Perron Z-tau with a Bartlett-kernel long-run variance using
// `truncation_lags` autocovariances (pass -1 for the 4*(T/100)^0.25 default).
UnitRootResult pp_test(const Eigen::VectorXd& y, int truncation_lags, Deterministic det);

// Tau -> p-value / critical-value response surfaces, exposed for testing.
double mackinnon_pvalue(double tau, Deterministic det);
std::array<double, 3> mackinnon_critical_values(Deterministic det, int n_obs);  // 1/5/10%

struct JohansenResult {
  std::string null_hypothesis = "cointegration rank <= r";
  int n_obs = 0;  // effective sample entering the eigenproblem
  int lags = 0;   // lagged differences in the VECM regressions
  Deterministic det = Deterministic::constant;
  std::vector<double> eigenvalues;              // descending
  std::vector<double> trace_stat;               // H0: rank <= r, r = 0..k-1
  std::vector<std::array<double, 3>> trace_cv;  // 90/95/99% (NaN when k-r > 8)

  // Smallest r whose trace statistic is below the critical value at `level`
  // (0.90/0.95/0.99); k if every H0 is rejected.
  int selected_rank(double level) const;
};

JohansenResult johansen_trace(const Eigen::MatrixXd& data, int lag_diffs, Deterministic det);

struct GrangerResult {
  std::string null_hypothesis = "no Granger causality";
  double f_stat = 0.0;
  double pvalue = 1.0;
  int lags = 0;
  int n_obs = 0;
};

// F-test of "x Granger-causes y": y_t on its own p lags with vs without p
// lags of x (constant always included).
GrangerResult granger_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int lags);

struct JarqueBeraResult {
  std::string null_hypothesis = "normal residuals";
  double statistic = 0.0;
  double pvalue = 1.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, not excess
  int n_obs = 0;
};

JarqueBeraResult jarque_bera(const Eigen::VectorXd& residuals);

}  // namespace gvarkit

#endif  // GVARKIT_STATTESTS_HPP_
