#include "gvarkit/var.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gvarkit/errors.hpp"

namespace gvarkit {

namespace {

struct VarDesign {
  Eigen::MatrixXd x;  // [lag blocks..., const, trend]
  Eigen::MatrixXd y;
  std::vector<std::string> labels;
};

VarDesign build_var_design(const Eigen::MatrixXd& block, int p, Deterministic det, int trim) {
  const int t_total = static_cast<int>(block.rows());
  const int k = static_cast<int>(block.cols());
  const int rows = t_total - trim;
  const int ndet = deterministic_count(det);
  VarDesign d;
  d.x.resize(rows, k * p + ndet);
  // Lags are taken relative to the trimmed sample start so select_lag can fit
  // different orders on one common sample.
  for (int lag = 1; lag <= p; ++lag) {
    d.x.middleCols((lag - 1) * k, k) = block.middleRows(trim - lag, rows);
  }
  d.x.rightCols(ndet) = deterministic_terms(rows, det);
  d.y = block.bottomRows(rows);
  for (int lag = 1; lag <= p; ++lag) {
    for (int v = 0; v < k; ++v) {
      d.labels.push_back("lag" + std::to_string(lag) + ":var" + std::to_string(v + 1));
    }
  }
  if (ndet >= 1) d.labels.push_back("const");
  if (ndet >= 2) d.labels.push_back("trend");
  return d;
}

// Multivariate least squares with a collinearity check that names columns.
Eigen::MatrixXd solve_multivariate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   const std::vector<std::string>& labels) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const int k = static_cast<int>(x.cols());
  if (qr.rank() < k) {
    const auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (int i = qr.rank(); i < k; ++i) {
      if (!cols.empty()) cols += ", ";
      cols += labels[perm[i]];
    }
    throw NumericError("collinear regressors: " + cols);
  }
  return qr.solve(y);
}

}  // namespace

VarEstimate estimate_var(const Eigen::MatrixXd& block, int p, Deterministic det) {
  if (p < 1) throw ConfigError("VAR lag order must be at least 1");
  const int t_total = static_cast<int>(block.rows());
  const int k = static_cast<int>(block.cols());
  if (k < 1) throw DataError("VAR needs at least one variable");
  const int ndet = deterministic_count(det);
  if (t_total <= k * p + ndet + 10) {
    throw DataError("VAR(" + std::to_string(p) + ") with " + std::to_string(k) +
                    " variables needs more than " + std::to_string(k * p + ndet + 10) +
                    " observations, got " + std::to_string(t_total));
  }

  const VarDesign d = build_var_design(block, p, det, p);
  const Eigen::MatrixXd coef = solve_multivariate(d.x, d.y, d.labels);
  const int rows = static_cast<int>(d.y.rows());
  const int ncoef = static_cast<int>(d.x.cols());

  VarEstimate est;
  est.lags = p;
  est.det = det;
  est.n_obs = rows;
  est.fitted = d.x * coef;
  est.residuals = d.y - est.fitted;
  est.sigma_w = est.residuals.transpose() * est.residuals / double(rows - ncoef);

  est.phi.resize(p);
  for (int lag = 1; lag <= p; ++lag) {
    est.phi[lag - 1] = coef.middleRows((lag - 1) * k, k).transpose();
  }
  est.alpha = ndet >= 1 ? coef.row(k * p).transpose() : Eigen::VectorXd::Zero(k).eval();
  est.trend_coef =
      ndet >= 2 ? coef.row(k * p + 1).transpose() : Eigen::VectorXd::Zero(k).eval();
  return est;
}

int select_lag(const Eigen::MatrixXd& block, int p_max, LagCriterion criterion,
               Deterministic det) {
  if (p_max < 1) throw ConfigError("maximum lag must be at least 1");
  const int t_total = static_cast<int>(block.rows());
  const int k = static_cast<int>(block.cols());
  const int ndet = deterministic_count(det);
  if (t_total <= k * p_max + ndet + 10) {
    throw DataError("sample too short to scan lags up to " + std::to_string(p_max));
  }
  const int rows = t_total - p_max;  // common estimation sample
  int best_p = 1;
  double best_crit = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    const VarDesign d = build_var_design(block, p, det, p_max);
    const Eigen::MatrixXd coef = solve_multivariate(d.x, d.y, d.labels);
    const Eigen::MatrixXd resid = d.y - d.x * coef;
    const Eigen::MatrixXd sigma_ml = resid.transpose() * resid / double(rows);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma_ml);
    double logdet = 0.0;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      for (int i = 0; i < k; ++i) {
        const double di = ldlt.vectorD()[i];
        if (di <= 0.0) {
          ok = false;
          break;
        }
        logdet += std::log(di);
      }
    }
    if (!ok) continue;  // degenerate fit cannot win
    const double n_params = double(k) * (k * p + ndet);
    const double penalty =
        criterion == LagCriterion::aic ? 2.0 / rows : std::log(double(rows)) / rows;
    const double crit = logdet + penalty * n_params;
    if (crit < best_crit) {
      best_crit = crit;
      best_p = p;
    }
  }
  return best_p;
}

RmsReport residual_rms(const VarEstimate& estimate) {
  if (estimate.residuals.rows() == 0) throw DataError("estimate has no residuals");
  RmsReport out;
  const int k = static_cast<int>(estimate.residuals.cols());
  out.per_equation.resize(k);
  for (int j = 0; j < k; ++j) {
    out.per_equation[j] = std::sqrt(estimate.residuals.col(j).squaredNorm() /
                                    double(estimate.residuals.rows()));
  }
  out.pooled = std::sqrt(estimate.residuals.squaredNorm() /
                         double(estimate.residuals.size()));
  return out;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& phi) {
  if (phi.empty()) throw ConfigError("companion matrix needs at least one lag matrix");
  const int k = static_cast<int>(phi[0].rows());
  const int p = static_cast<int>(phi.size());
  if (p == 1) return phi[0];
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k * p, k * p);
  for (int lag = 0; lag < p; ++lag) c.block(0, lag * k, k, k) = phi[lag];
  c.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();
  return c;
}

std::vector<double> companion_moduli(const Eigen::MatrixXd& companion) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("companion eigenvalue solver failed");
  std::vector<double> moduli(companion.rows());
  for (int i = 0; i < companion.rows(); ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
  std::sort(moduli.begin(), moduli.end(), std::greater<double>());
  return moduli;
}

std::vector<double> var_stability(const VarEstimate& estimate) {
  return companion_moduli(companion_matrix(estimate.phi));
}

}  // namespace gvarkit
