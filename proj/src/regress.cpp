#include "gvarkit/regress.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "gvarkit/errors.hpp"

namespace gvarkit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Deterministic deterministic_from_string(const std::string& s) {
  if (s == "none") return Deterministic::none;
  if (s == "constant") return Deterministic::constant;
  if (s == "constant_trend") return Deterministic::constant_trend;
  throw ConfigError("unknown deterministic specification '" + s +
                    "' (expected none, constant or constant_trend)");
}

std::string to_string(Deterministic det) {
  switch (det) {
    case Deterministic::none: return "none";
    case Deterministic::constant: return "constant";
    default: return "constant_trend";
  }
}

int deterministic_count(Deterministic det) {
  return det == Deterministic::none ? 0 : (det == Deterministic::constant ? 1 : 2);
}

Eigen::MatrixXd deterministic_terms(int rows, Deterministic det, double trend_start) {
  Eigen::MatrixXd d(rows, deterministic_count(det));
  if (d.cols() >= 1) d.col(0).setOnes();
  if (d.cols() >= 2) {
    for (int t = 0; t < rows; ++t) d(t, 1) = trend_start + t;
  }
  return d;
}

OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool intercept) {
  const int n = static_cast<int>(X.rows());
  if (y.size() != n) throw NumericError("regression design and response lengths differ");
  Eigen::MatrixXd design;
  if (intercept) {
    design.resize(n, X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = X;
  } else {
    design = X;
  }
  const int k = static_cast<int>(design.cols());
  if (n < k) {
    throw NumericError("regression needs at least as many observations (" + std::to_string(n) +
                       ") as coefficients (" + std::to_string(k) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < k) throw NumericError("regression design matrix is rank deficient");

  OlsFit fit;
  fit.intercept = intercept;
  fit.n_obs = n;
  fit.n_coef = k;
  fit.coef = qr.solve(y);
  fit.fitted = design * fit.coef;
  fit.residuals = y - fit.fitted;
  fit.rss = fit.residuals.squaredNorm();

  double tss;
  int df_model;
  if (intercept) {
    tss = (y.array() - y.mean()).square().sum();
    df_model = k - 1;
  } else {
    tss = y.squaredNorm();
    df_model = k;
  }
  fit.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : 0.0;

  if (n == k) {
    fit.sigma2 = kNaN;
    fit.adj_r2 = kNaN;
    fit.std_err = Eigen::VectorXd::Constant(k, kNaN);
    fit.t_stat = Eigen::VectorXd::Constant(k, kNaN);
    fit.f_stat = kNaN;
    fit.f_pvalue = kNaN;
    return fit;
  }

  fit.sigma2 = fit.rss / (n - k);
  fit.adj_r2 = 1.0 - (1.0 - fit.r2) * (n - (intercept ? 1 : 0)) / double(n - k);

  const Eigen::MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.std_err.resize(k);
  fit.t_stat.resize(k);
  for (int j = 0; j < k; ++j) {
    fit.std_err[j] = std::sqrt(fit.sigma2 * xtx_inv(j, j));
    fit.t_stat[j] = fit.coef[j] / fit.std_err[j];
  }

  if (df_model > 0 && tss > fit.rss && fit.rss > 0.0) {
    fit.f_stat = (fit.r2 / df_model) / ((1.0 - fit.r2) / (n - k));
    if (std::isfinite(fit.f_stat)) {
      boost::math::fisher_f dist(df_model, n - k);
      fit.f_pvalue = boost::math::cdf(boost::math::complement(dist, fit.f_stat));
    } else {
      // r2 rounds to 1 when the fit is numerically perfect.
      fit.f_pvalue = 0.0;
    }
  } else if (tss > 0.0 && fit.rss == 0.0) {
    fit.f_stat = std::numeric_limits<double>::infinity();
    fit.f_pvalue = 0.0;
  } else {
    fit.f_stat = 0.0;
    fit.f_pvalue = 1.0;
  }
  return fit;
}

RollingResult rolling_ols(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int window) {
  if (x.size() != y.size()) throw DataError("rolling regression series lengths differ");
  const int n = static_cast<int>(y.size());
  if (window < 4) {
    throw ConfigError("rolling window must be at least 4 (got " + std::to_string(window) + ")");
  }
  if (n < window) {
    throw DataError("sample of " + std::to_string(n) + " observations is shorter than window " +
                    std::to_string(window));
  }
  RollingResult out;
  out.window = window;
  const int n_win = n - window + 1;
  out.fits.reserve(n_win);
  double adj_sum = 0.0;
  for (int w = 0; w < n_win; ++w) {
    out.fits.push_back(ols_fit(x.segment(w, window), y.segment(w, window), true));
    out.window_end.push_back(w + window - 1);
    adj_sum += out.fits.back().adj_r2;
  }
  out.mean_adj_r2 = adj_sum / n_win;
  out.pooled_f_pvalue = ols_fit(x, y, true).f_pvalue;
  return out;
}

Eigen::MatrixXd make_lag_matrix(const Eigen::MatrixXd& data, int p) {
  const int t_total = static_cast<int>(data.rows());
  const int k = static_cast<int>(data.cols());
  if (p < 1) throw ConfigError("lag order must be at least 1");
  if (t_total <= p) throw DataError("not enough observations for " + std::to_string(p) + " lags");
  Eigen::MatrixXd out(t_total - p, k * p);
  for (int lag = 1; lag <= p; ++lag) {
    out.middleCols((lag - 1) * k, k) = data.middleRows(p - lag, t_total - p);
  }
  return out;
}

Eigen::MatrixXd trim_head(const Eigen::MatrixXd& data, int p) {
  return data.bottomRows(data.rows() - p);
}

Eigen::VectorXd diff_series(const Eigen::VectorXd& y) {
  return y.tail(y.size() - 1) - y.head(y.size() - 1);
}

}  // namespace gvarkit
