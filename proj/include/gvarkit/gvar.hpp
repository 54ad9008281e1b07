#ifndef GVARKIT_GVAR_HPP_
#define GVARKIT_GVAR_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gvarkit/panel.hpp"
#include "gvarkit/regress.hpp"

namespace gvarkit {

// A country VARX*(1,1):
//   x_t = a0 + a1*t + Psi1 x_{t-1} + Lambda0 x*_t + Lambda1 x*_{t-1} + eps_t
// with the trend 1-based over the trimmed estimation sample.
struct CountryModel {
  std::string country;
  int k = 0;       // endogenous variables
  int k_star = 0;  // starred foreign variables
  Deterministic det = Deterministic::constant;
  Eigen::VectorXd a0, a1;     // k; zero vectors when the term is absent
  Eigen::MatrixXd psi1;       // k x k
  Eigen::MatrixXd lambda0;    // k x k_star, contemporaneous star
  Eigen::MatrixXd lambda1;    // k x k_star, lagged star
  Eigen::MatrixXd sigma;      // k x k residual covariance (dof-corrected)
  Eigen::MatrixXd residuals;  // (T-1) x k

  Eigen::MatrixXd a_mat() const;  // [I, -Lambda0], k x (k + k_star)
  Eigen::MatrixXd b_mat() const;  // [Psi1, Lambda1]
};

// W_i maps the global vector x_t to z_{i,t} = (x_{i,t}, x*_{i,t}): the top
// k_i rows select the country's own variables, the bottom k_i* rows hold the
// foreign weights.
struct LinkMatrix {
  std::string country;
  Eigen::MatrixXd w;  // (k_i + k_i*) x k
};

struct GlobalModel {
  std::vector<std::string> countries;
  std::vector<std::string> variables;  // shared per-country variable list
  std::vector<std::string> labels;     // "country.variable", global ordering
  Deterministic det = Deterministic::constant;
  Eigen::MatrixXd g, h;       // stacked contemporaneous / lag matrices, k x k
  Eigen::VectorXd a0, a1;     // stacked deterministic coefficients
  Eigen::MatrixXd sigma_eps;  // block-diagonal country residual covariance
  // Solved representation x_t = b0 + b1*t + F x_{t-1} + e_t.
  Eigen::VectorXd b0, b1;
  Eigen::MatrixXd f;        // G^{-1} H
  Eigen::MatrixXd sigma_e;  // G^{-1} sigma_eps G^{-T}
  double g_condition = 0.0;
  int trend_last = 0;  // trend value of the last estimation-sample row

  int k() const { return static_cast<int>(labels.size()); }
  int label_index(const std::string& country, const std::string& variable) const;
};

// Weighted cross-country averages x*_{i,v,t} = sum_j w_ij x_{j,v,t} for every
// panel variable; weights must be row-stochastic.
Eigen::MatrixXd build_star(const Panel& panel, const WeightMatrix& weights,
                           const std::string& country);

// Shared regression layout for a VARX*(1,1): rows t = 2..T of the block,
// columns [own lag | star contemporaneous | star lag | const | trend] with the
// trend counting 1..T-1. Both the least-squares and the Bayesian estimators
// consume this exact design so their coefficient layouts are interchangeable.
struct VarxDesign {
  Eigen::MatrixXd y;  // (T-1) x k
  Eigen::MatrixXd x;  // (T-1) x (k + 2 k_star + ndet)
  std::vector<std::string> labels;
};
VarxDesign build_varx_design(const Eigen::MatrixXd& block, const Eigen::MatrixXd& star,
                             Deterministic det);

// Least-squares VARX*(1,1) of the country block on its starred counterparts.
CountryModel estimate_varx(const Eigen::MatrixXd& block, const Eigen::MatrixXd& star,
                           Deterministic det, const std::string& country = "");

LinkMatrix build_link(const std::vector<std::string>& countries, int n_vars,
                      const WeightMatrix& weights, const std::string& country);

// Assemble G = stack(A_i W_i), H = stack(B_i W_i) and solve the global system.
// G must be invertible with condition number below cond_limit.
GlobalModel stack_global(const std::vector<CountryModel>& models,
                         const std::vector<LinkMatrix>& links,
                         const std::vector<std::string>& variables,
                         double cond_limit = 1e10);

// Full pipeline: star construction, country estimation (countries ordered as
// in the weight matrix), link building, stacking.
GlobalModel estimate_gvar(const Panel& panel, const WeightMatrix& weights, Deterministic det,
                          double cond_limit = 1e10);

// One step of the solved system with zero shock.
Eigen::VectorXd iterate_global(const GlobalModel& model, const Eigen::VectorXd& x_prev,
                               double trend_value);

// Flat text serialization (dimension header + row-major blocks).
std::string global_model_to_text(const GlobalModel& model);
GlobalModel global_model_from_text(const std::string& text);
void save_global_model(const GlobalModel& model, const std::string& path);
GlobalModel load_global_model(const std::string& path);

}  // namespace gvarkit

#endif  // GVARKIT_GVAR_HPP_
