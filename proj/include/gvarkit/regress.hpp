#ifndef GVARKIT_REGRESS_HPP_
#define GVARKIT_REGRESS_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gvarkit {

// Deterministic regressors shared by the unit-root tests, VAR and GVAR
// estimators: nothing, a constant, or constant plus linear trend.
enum class Deterministic { none, constant, constant_trend };

Deterministic deterministic_from_string(const std::string& s);
std::string to_string(Deterministic det);

// Columns [1, trend] (or fewer) with trend values trend_start, trend_start+1, ...
Eigen::MatrixXd deterministic_terms(int rows, Deterministic det, double trend_start = 1.0);
int deterministic_count(Deterministic det);

struct OlsFit {
  bool intercept = true;
  Eigen::VectorXd coef;  // intercept first when present
  Eigen::VectorXd std_err;
  Eigen::VectorXd t_stat;
  Eigen::VectorXd residuals;
  Eigen::VectorXd fitted;
  double sigma2 = 0.0;  // RSS / (n - k); NaN for an exact fit (n == k)
  double rss = 0.0;
  double r2 = 0.0;      // uncentred when intercept == false
  double adj_r2 = 0.0;
  double f_stat = 0.0;    // overall regression F
  double f_pvalue = 1.0;  // upper tail of F(slopes, n - k)
  int n_obs = 0;
  int n_coef = 0;
};

// Least squares of y on X. With intercept=true a ones column is prepended and
// coef[0] is the intercept; with intercept=false X is used as-is and R2 is
// uncentred. Throws NumericError on rank deficiency; n == k (exact fit) is
// allowed and leaves the inference fields NaN.
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool intercept = true);

struct RollingResult {
  int window = 0;
  std::vector<int> window_end;  // index of each window's last observation
  std::vector<OlsFit> fits;     // one per window, ordered by start index
  double mean_adj_r2 = 0.0;
  double pooled_f_pvalue = 1.0;  // overall F p-value of the full-sample fit
};

// Slides a window of the given length one step at a time, fitting y on
// [1, x] in each window. window must be >= 4 and <= the sample length.
RollingResult rolling_ols(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int window);

// Stack p lags of the columns of data: row t of the result is
// [x_{t-1}', ..., x_{t-p}'] aligned with trim_head(data, p) = rows p..T-1.
Eigen::MatrixXd make_lag_matrix(const Eigen::MatrixXd& data, int p);
Eigen::MatrixXd trim_head(const Eigen::MatrixXd& data, int p);

Eigen::VectorXd diff_series(const Eigen::VectorXd& y);

}  // namespace gvarkit

#endif  // GVARKIT_REGRESS_HPP_
