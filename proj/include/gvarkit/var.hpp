#ifndef GVARKIT_VAR_HPP_
#define GVARKIT_VAR_HPP_

#include <Eigen/Dense>
#include <vector>

#include "gvarkit/regress.hpp"

namespace gvarkit {

struct VarEstimate {
  int lags = 1;
  Deterministic det = Deterministic::constant;
  Eigen::VectorXd alpha;               // intercept (zero vector when det == none)
  Eigen::VectorXd trend_coef;          // zero vector unless det == constant_trend
  std::vector<Eigen::MatrixXd> phi;    // k x k lag coefficient matrices, lag 1..p
  Eigen::MatrixXd residuals;           // (T - p) x k
  Eigen::MatrixXd fitted;              // (T - p) x k
  Eigen::MatrixXd sigma_w;             // residual covariance, dof-corrected
  int n_obs = 0;                       // T - p

  int n_vars() const { return static_cast<int>(sigma_w.rows()); }
};

enum class LagCriterion { aic, bic };

// Equation-by-equation least squares of a VAR(p) with the requested
// deterministic terms; the trend regressor is 1-based within the trimmed
// estimation sample. Collinear designs raise NumericError naming columns.
VarEstimate estimate_var(const Eigen::MatrixXd& block, int p, Deterministic det);

// Lag order in 1..p_max minimizing the criterion on a common sample.
int select_lag(const Eigen::MatrixXd& block, int p_max, LagCriterion criterion,
               Deterministic det = Deterministic::constant);

struct RmsReport {
  Eigen::VectorXd per_equation;
  double pooled = 0.0;
};

// Root-mean-square residual over the T - p fitted points.
RmsReport residual_rms(const VarEstimate& estimate);

// Companion matrix of the lag polynomial (kp x kp; the matrix itself for p=1).
Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& phi);

// Moduli of the companion eigenvalues, descending; stable iff front() < 1.
std::vector<double> companion_moduli(const Eigen::MatrixXd& companion);
std::vector<double> var_stability(const VarEstimate& estimate);

}  // namespace gvarkit

#endif  // GVARKIT_VAR_HPP_
