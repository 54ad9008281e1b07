#ifndef GVARKIT_BGVAR_HPP_
#define GVARKIT_BGVAR_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gvarkit/gvar.hpp"
#include "gvarkit/panel.hpp"
#include "gvarkit/regress.hpp"
#include "gvarkit/rng.hpp"

namespace gvarkit {

// Normal-Gamma shrinkage prior configuration. With shrinkage disabled the
// coefficient prior is a fixed vague normal (variance vague_variance), the
// limit in which posterior means approach least squares.
struct PriorConfig {
  bool ng_enabled = true;
  double prior_mean_own_lag = 1.0;  // prior mean on the first own lag diagonal
  double d_lambda = 0.01;           // global-scale Gamma hyperprior shape
  double e_lambda = 0.01;           // global-scale Gamma hyperprior rate
  double tau_start = 0.6;           // initial Normal-Gamma tail parameter
  bool sample_tau = true;           // Metropolis step on tau per group
  double a_sigma = 0.01;            // residual variance InvGamma shape
  double b_sigma = 0.01;            // residual variance InvGamma rate
  double det_variance = 10.0;       // fixed prior variance on const/trend
  double vague_variance = 1e4;      // coefficient prior variance when ng off

  void validate() const;  // throws ConfigError on nonsensical values
};

// One shrinkage group: a contiguous band of design rows whose coefficients
// share a global scale. Groups in the same family multiply their global
// scales cumulatively in family order (lag-decaying shrinkage).
struct ShrinkGroup {
  int row_start = 0;
  int row_count = 0;
  int family = 0;
  int order_in_family = 0;
};

// Raw Gibbs output for one multivariate regression Y = X A + U.
struct NgDraws {
  std::vector<Eigen::MatrixXd> coef;   // each K x M
  std::vector<Eigen::MatrixXd> sigma;  // each M x M
};

// Equation-by-equation Normal-Gamma Gibbs sampler for Y = X A + U with
// U ~ N(0, Sigma), Sigma parametrized through a unit-lower-triangular
// decorrelation W (W u_t has independent components with variances d_m).
NgDraws run_ng_gibbs(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
                     const Eigen::MatrixXd& a_prior, const std::vector<ShrinkGroup>& groups,
                     const PriorConfig& prior, int n_draws, int n_burn, int thin, Rng& rng);

// One retained draw of one country model: the stacked coefficient matrix in
// build_varx_design layout plus the residual covariance.
struct CountryDraw {
  Eigen::MatrixXd coef;   // (k + 2 k_star + ndet) x k
  Eigen::MatrixXd sigma;  // k x k
};

struct PosteriorDraws {
  std::vector<std::string> countries;
  std::vector<std::string> variables;
  Deterministic det = Deterministic::constant;
  int n_draws = 0;  // retained draws
  int n_burn = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int trend_last = 0;  // trend value of the last estimation row
  std::vector<std::vector<CountryDraw>> draws;  // [draw][country]
  std::vector<unsigned char> stable_flags;      // 1 iff spectral radius < 1

  int n_stable() const;
  double stable_fraction() const;
};

// Slice one country draw back into structural VARX* blocks.
CountryModel country_model_from_draw(const CountryDraw& draw, int n_vars, Deterministic det,
                                     const std::string& country);

// Per-country Normal-Gamma Gibbs chains over the panel; every retained draw
// is stacked through the link matrices and stability-flagged. Chains use
// independent named substreams of `seed`, so results are identical for any
// thread count.
PosteriorDraws sample_posterior(const Panel& panel, const WeightMatrix& weights,
                                const PriorConfig& prior, Deterministic det, int n_draws,
                                int n_burn, int thin, std::uint64_t seed, int n_threads = 1);

// Recompute the stability flag of every draw: stack the draw through the
// link matrices and test the solved F for spectral radius strictly below 1
// (a draw whose G cannot be solved counts as unstable).
std::vector<unsigned char> stability_flags(const PosteriorDraws& draws,
                                           const WeightMatrix& weights);

// Stable subset (strict spectral radius < 1). Zero stable draws is an
// analysis failure.
struct StableSubset {
  PosteriorDraws draws;
  int n_total = 0;
  int n_stable = 0;
  double fraction = 0.0;
};
StableSubset filter_stable(const PosteriorDraws& draws);

// Solved global system per draw, ready for simulation.
struct SolvedDraw {
  Eigen::VectorXd b0, b1;
  Eigen::MatrixXd f, sigma_e;
};
std::vector<SolvedDraw> solve_draws(const PosteriorDraws& draws, const WeightMatrix& weights,
                                    bool stable_only = true, double cond_limit = 1e10);

// Geweke convergence diagnostic: z = (mean of first 10% - mean of last 50%)
// over the spectral standard error; |z| > 1.96 counts as an exceedance.
struct GewekeResult {
  std::vector<double> z;  // NaN for skipped (zero-variance) chains
  int n_tested = 0;
  int n_exceed = 0;
  int n_skipped = 0;
  double fraction() const { return n_tested > 0 ? double(n_exceed) / n_tested : 0.0; }
};
GewekeResult geweke_diag(const Eigen::MatrixXd& chains);  // rows: iterations
GewekeResult geweke_diag(const PosteriorDraws& draws);    // coefficient chains

// First-order residual autocorrelation F-tests, bucketed by p-value as
// {p > 0.10, 0.05 < p <= 0.10, 0.01 < p <= 0.05, p <= 0.01}.
struct AutocorrBuckets {
  std::vector<double> pvalues;  // one per equation, country-major
  std::array<int, 4> counts = {0, 0, 0, 0};
  int total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};
AutocorrBuckets residual_autocorr_ftest(const std::vector<Eigen::MatrixXd>& residuals_by_country);

// Average pairwise cross-country residual correlation per (country, variable),
// bucketed per variable as {<0.1, 0.1-0.2, 0.2-0.5, >=0.5}.
struct CrossCorrTable {
  std::vector<std::string> variables;
  Eigen::MatrixXd avg_corr;                   // countries x variables
  std::vector<std::array<int, 4>> counts;     // per variable
};
CrossCorrTable cross_unit_corr(const std::vector<Eigen::MatrixXd>& residuals_by_country,
                               const std::vector<std::string>& countries,
                               const std::vector<std::string>& variables);

struct DiagnosticsReport {
  int n_draws = 0;
  int n_burn = 0;
  int thin = 1;
  int n_stable = 0;
  GewekeResult geweke;
  AutocorrBuckets autocorr;
  CrossCorrTable cross_corr;
};

// Convergence and residual diagnostics of a posterior: Geweke z-scores over
// all coefficient chains, plus autocorrelation and cross-country correlation
// of the posterior-mean residuals.
DiagnosticsReport make_diagnostics(const PosteriorDraws& draws, const Panel& panel,
                                   const WeightMatrix& weights);

// Posterior-mean residuals per country (data minus posterior-mean fit).
std::vector<Eigen::MatrixXd> posterior_mean_residuals(const PosteriorDraws& draws,
                                                      const Panel& panel,
                                                      const WeightMatrix& weights);

// Append-friendly text persistence: a dimension/seed header followed by one
// block per retained draw.
std::string draws_to_text(const PosteriorDraws& draws);
PosteriorDraws draws_from_text(const std::string& text);
void save_draws(const PosteriorDraws& draws, const std::string& path);
PosteriorDraws load_draws(const std::string& path);

}  // namespace gvarkit

#endif  // GVARKIT_BGVAR_HPP_
