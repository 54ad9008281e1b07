#include "gvarkit/stattests.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <limits>

#include "gvarkit/errors.hpp"

namespace gvarkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

int det_index(Deterministic det) { return static_cast<int>(det); }

// MacKinnon (1994) tau -> p-value response surface for a single series,
// regression variants none / constant / constant+trend.
constexpr double kTauStar[3] = {-1.04, -1.61, -2.89};
constexpr double kTauMin[3] = {-19.04, -18.83, -16.18};
constexpr double kTauMax[3] = {kInf, 2.74, 0.70};
constexpr double kTauSmallP[3][3] = {
    {0.6344, 1.2378, 0.032496},
    {2.1659, 1.4412, 0.038269},
    {3.2512, 1.6047, 0.049588},
};
constexpr double kTauLargeP[3][4] = {
    {0.4797, 0.93557, -0.06999, 0.033066},
    {1.7339, 0.93202, -0.12745, -0.010368},
    {2.5261, 0.61654, -0.37956, -0.060285},
};

// MacKinnon (2010) critical-value response surface: cv = b0 + b1/T + b2/T^2
// + b3/T^3, rows ordered 1% / 5% / 10%.
constexpr double kCrit[3][3][4] = {
    {{-2.56574, -2.2358, -3.627, 0.0},
     {-1.941, -0.2686, -3.365, 31.223},
     {-1.61682, 0.2656, -2.714, 25.364}},
    {{-3.43035, -6.5393, -16.786, -79.433},
     {-2.86154, -2.8903, -4.234, -40.04},
     {-2.56677, -1.5384, -2.809, 0.0}},
    {{-3.95877, -9.0531, -28.428, -134.155},
     {-3.41049, -4.3904, -9.036, -45.374},
     {-3.12705, -2.5856, -3.925, -22.38}},
};

// Johansen trace-statistic critical values (90/95/99%) for system dimensions
// 1..8, one table per deterministic case (none / constant / constant+trend).
constexpr double kTraceCv[3][8][3] = {
    {{2.9762, 4.1296, 6.9406},
     {10.4741, 12.3212, 16.364},
     {21.7781, 24.2761, 29.5147},
     {37.0339, 40.1749, 46.5716},
     {56.2839, 60.0627, 67.6367},
     {79.5329, 83.9383, 92.7136},
     {106.7351, 111.7797, 121.7375},
     {137.9954, 143.6691, 154.7977}},
    {{2.7055, 3.8415, 6.6349},
     {13.4294, 15.4943, 19.9349},
     {27.0669, 29.7961, 35.4628},
     {44.4929, 47.8545, 54.6815},
     {65.8202, 69.8189, 77.8202},
     {91.109, 95.7542, 104.9637},
     {120.3673, 125.6185, 135.9825},
     {153.6341, 159.529, 171.0905}},
    {{2.7055, 3.8415, 6.6349},
     {16.1619, 18.3985, 23.1485},
     {32.0645, 35.0116, 41.0815},
     {51.6492, 55.2459, 62.5202},
     {75.1027, 79.3422, 87.7748},
     {102.4674, 107.3429, 116.9829},
     {133.7852, 139.278, 150.0778},
     {169.0618, 175.1584, 187.1891}},
};

void check_not_constant(const Eigen::VectorXd& y, const char* test) {
  if (y.maxCoeff() == y.minCoeff()) {
    throw DataError(std::string(test) + " cannot be run on a constant series");
  }
}

// Residuals of each column of y after projecting out the columns of x.
Eigen::MatrixXd project_out(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
  if (x.cols() == 0) return y;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  return y - x * qr.solve(y);
}

// Remove a polynomial trend fitted on an equispaced [-1, 1] grid; order -1
// leaves the input untouched, order 0 demeans.
Eigen::MatrixXd detrend_poly(const Eigen::MatrixXd& y, int order) {
  if (order < 0) return y;
  const int n = static_cast<int>(y.rows());
  Eigen::MatrixXd basis(n, order + 1);
  for (int t = 0; t < n; ++t) {
    const double v = n == 1 ? -1.0 : -1.0 + 2.0 * t / (n - 1);
    double p = 1.0;
    for (int j = order; j >= 0; --j) {
      basis(t, j) = p;
      p *= v;
    }
  }
  return project_out(y, basis);
}

struct AdfRegression {
  Eigen::MatrixXd x;
  Eigen::VectorXd lhs;
};

AdfRegression build_adf_regression(const Eigen::VectorXd& y, const Eigen::VectorXd& dy, int lags,
                                   int rows, Deterministic det) {
  AdfRegression reg;
  const int ndet = deterministic_count(det);
  reg.x.resize(rows, 1 + lags + ndet);
  reg.lhs.resize(rows);
  const int offset = static_cast<int>(dy.size()) - rows;  // first usable dy index
  for (int i = 0; i < rows; ++i) {
    const int t = offset + i;
    reg.lhs[i] = dy[t];
    reg.x(i, 0) = y[t];  // level one period before dy[t]
    for (int l = 1; l <= lags; ++l) reg.x(i, l) = dy[t - l];
  }
  reg.x.rightCols(ndet) = deterministic_terms(rows, det);
  return reg;
}

}  // namespace

bool UnitRootResult::reject_at(double level) const { return pvalue < level; }

double mackinnon_pvalue(double tau, Deterministic det) {
  const int r = det_index(det);
  if (tau > kTauMax[r]) return 1.0;
  if (tau < kTauMin[r]) return 0.0;
  double z;
  if (tau <= kTauStar[r]) {
    const double* c = kTauSmallP[r];
    z = c[0] + tau * (c[1] + tau * c[2]);
  } else {
    const double* c = kTauLargeP[r];
    z = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
  }
  return norm_cdf(z);
}

std::array<double, 3> mackinnon_critical_values(Deterministic det, int n_obs) {
  const int r = det_index(det);
  std::array<double, 3> out{};
  const double t = n_obs;
  for (int i = 0; i < 3; ++i) {
    const double* b = kCrit[r][i];
    out[i] = b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t);
  }
  return out;
}

UnitRootResult adf_test(const Eigen::VectorXd& y, int lags, Deterministic det) {
  if (lags < 0) throw ConfigError("ADF lag order must be non-negative");
  const int n = static_cast<int>(y.size());
  if (n <= lags + 10) {
    throw DataError("series of length " + std::to_string(n) + " is too short for ADF with " +
                    std::to_string(lags) + " lags");
  }
  check_not_constant(y, "ADF test");
  const Eigen::VectorXd dy = diff_series(y);
  const int rows = n - 1 - lags;
  const AdfRegression reg = build_adf_regression(y, dy, lags, rows, det);
  const OlsFit fit = ols_fit(reg.x, reg.lhs, /*intercept=*/false);

  UnitRootResult res;
  res.statistic = fit.t_stat[0];
  res.lags = lags;
  res.n_obs = rows;
  res.det = det;
  res.pvalue = mackinnon_pvalue(res.statistic, det);
  const auto cv = mackinnon_critical_values(det, rows);
  res.cv1 = cv[0];
  res.cv5 = cv[1];
  res.cv10 = cv[2];
  return res;
}

UnitRootResult adf_test_auto(const Eigen::VectorXd& y, int max_lag, Deterministic det) {
  if (max_lag < 0) throw ConfigError("ADF maximum lag must be non-negative");
  const int n = static_cast<int>(y.size());
  if (n <= max_lag + 10) {
    throw DataError("series of length " + std::to_string(n) + " is too short for ADF with up to " +
                    std::to_string(max_lag) + " lags");
  }
  check_not_constant(y, "ADF test");
  const Eigen::VectorXd dy = diff_series(y);
  const int rows = n - 1 - max_lag;  // common sample across candidate lags
  int best_lag = 0;
  double best_aic = kInf;
  for (int p = 0; p <= max_lag; ++p) {
    const AdfRegression reg = build_adf_regression(y, dy, p, rows, det);
    const OlsFit fit = ols_fit(reg.x, reg.lhs, /*intercept=*/false);
    const double aic = rows * std::log(fit.rss / rows) + 2.0 * fit.n_coef;
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = p;
    }
  }
  return adf_test(y, best_lag, det);
}

UnitRootResult pp_test(const Eigen::VectorXd& y, int truncation_lags, Deterministic det) {
  const int n = static_cast<int>(y.size()) - 1;
  const int ndet = deterministic_count(det);
  if (n <= ndet + 3 || n <= 10) {
    throw DataError("series too short for the Phillips-Perron test");
  }
  check_not_constant(y, "Phillips-Perron test");
  const int q = truncation_lags >= 0
                    ? truncation_lags
                    : static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 0.25)));
  if (q >= n) throw ConfigError("Phillips-Perron truncation lag exceeds the sample");

  Eigen::MatrixXd x(n, ndet + 1);
  x.leftCols(ndet) = deterministic_terms(n, det);
  x.col(ndet) = y.head(n);
  const Eigen::VectorXd lhs = y.tail(n);
  const OlsFit fit = ols_fit(x, lhs, /*intercept=*/false);

  const double rho = fit.coef[ndet];
  const double se = fit.std_err[ndet];
  const double s = std::sqrt(fit.sigma2);
  const double t_rho = (rho - 1.0) / se;

  const Eigen::VectorXd& u = fit.residuals;
  const double gamma0 = u.squaredNorm() / n;
  double lam2 = gamma0;
  for (int j = 1; j <= q; ++j) {
    const double gj = u.tail(n - j).dot(u.head(n - j)) / n;
    lam2 += 2.0 * (1.0 - double(j) / (q + 1)) * gj;
  }
  if (lam2 <= 0.0) throw NumericError("Phillips-Perron long-run variance is not positive");

  UnitRootResult res;
  res.statistic = std::sqrt(gamma0 / lam2) * t_rho -
                  (lam2 - gamma0) * n * se / (2.0 * std::sqrt(lam2) * s);
  res.lags = q;
  res.n_obs = n;
  res.det = det;
  res.pvalue = mackinnon_pvalue(res.statistic, det);
  const auto cv = mackinnon_critical_values(det, n);
  res.cv1 = cv[0];
  res.cv5 = cv[1];
  res.cv10 = cv[2];
  return res;
}

int JohansenResult::selected_rank(double level) const {
  int idx;
  if (level == 0.90) {
    idx = 0;
  } else if (level == 0.95) {
    idx = 1;
  } else if (level == 0.99) {
    idx = 2;
  } else {
    throw ConfigError("Johansen rank selection level must be 0.90, 0.95 or 0.99");
  }
  for (std::size_t r = 0; r < trace_stat.size(); ++r) {
    const double cv = trace_cv[r][idx];
    if (std::isnan(cv)) {
      throw ConfigError("trace critical values are tabulated only up to 8 variables");
    }
    if (trace_stat[r] < cv) return static_cast<int>(r);
  }
  return static_cast<int>(trace_stat.size());
}

JohansenResult johansen_trace(const Eigen::MatrixXd& data, int lag_diffs, Deterministic det) {
  if (lag_diffs < 0) throw ConfigError("Johansen lag order must be non-negative");
  const int n = static_cast<int>(data.rows());
  const int k = static_cast<int>(data.cols());
  if (k < 2) throw DataError("Johansen test needs at least two series");
  const int t_eff = n - 1 - lag_diffs;
  if (t_eff < (lag_diffs + 2) * k + 2) {
    throw DataError("sample too short for the Johansen test with " + std::to_string(lag_diffs) +
                    " lagged differences");
  }
  const int det_order = static_cast<int>(det) - 1;  // none=-1, constant=0, trend=1
  const int f = det_order > -1 ? 0 : det_order;

  const Eigen::MatrixXd x = detrend_poly(data, det_order);
  const Eigen::MatrixXd dx_full = x.bottomRows(n - 1) - x.topRows(n - 1);

  Eigen::MatrixXd z, dx;
  if (lag_diffs > 0) {
    z = make_lag_matrix(dx_full, lag_diffs);
    dx = dx_full.bottomRows(t_eff);
  } else {
    z.resize(t_eff, 0);
    dx = dx_full;
  }
  z = detrend_poly(z, f);
  dx = detrend_poly(dx, f);
  const Eigen::MatrixXd r0t = project_out(dx, z);

  // Levels lagged by lag_diffs+1 relative to the difference equations, which
  // aligns one-to-one with the trimmed differences.
  Eigen::MatrixXd lx = x.topRows(n - lag_diffs).bottomRows(t_eff);
  lx = detrend_poly(lx, f);
  const Eigen::MatrixXd rkt = project_out(lx, z);

  const double T = static_cast<double>(rkt.rows());
  const Eigen::MatrixXd skk = rkt.transpose() * rkt / T;
  const Eigen::MatrixXd sk0 = rkt.transpose() * r0t / T;
  const Eigen::MatrixXd s00 = r0t.transpose() * r0t / T;

  const Eigen::LDLT<Eigen::MatrixXd> s00_ldlt(s00);
  if (s00_ldlt.info() != Eigen::Success || !s00_ldlt.isPositive()) {
    throw NumericError("Johansen short-run residual covariance is rank deficient");
  }
  const Eigen::MatrixXd sig = sk0 * s00_ldlt.solve(sk0.transpose());

  const Eigen::LLT<Eigen::MatrixXd> skk_llt(skk);
  if (skk_llt.info() != Eigen::Success) {
    throw NumericError("Johansen level moment matrix is rank deficient (collinear series?)");
  }
  const Eigen::MatrixXd l_inv =
      skk_llt.matrixL().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd m = l_inv * sig * l_inv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("Johansen eigen decomposition failed");

  JohansenResult res;
  res.n_obs = static_cast<int>(T);
  res.lags = lag_diffs;
  res.det = det;
  res.eigenvalues.resize(k);
  for (int i = 0; i < k; ++i) {
    double ev = es.eigenvalues()[k - 1 - i];  // descending
    if (ev < 0.0 && ev > -1e-12) ev = 0.0;
    if (ev < 0.0 || ev >= 1.0) throw NumericError("Johansen eigenvalue outside [0, 1)");
    res.eigenvalues[i] = ev;
  }
  res.trace_stat.resize(k);
  res.trace_cv.resize(k);
  for (int r = 0; r < k; ++r) {
    double acc = 0.0;
    for (int i = r; i < k; ++i) acc += std::log1p(-res.eigenvalues[i]);
    res.trace_stat[r] = -T * acc;
    const int dim = k - r;
    if (dim <= 8) {
      const double* cv = kTraceCv[det_order + 1][dim - 1];
      res.trace_cv[r] = {cv[0], cv[1], cv[2]};
    } else {
      res.trace_cv[r] = {kNaN, kNaN, kNaN};
    }
  }
  return res;
}

GrangerResult granger_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int lags) {
  if (lags < 1) throw ConfigError("Granger test lag order must be at least 1");
  if (x.size() != y.size()) throw DataError("Granger test series lengths differ");
  const int n = static_cast<int>(y.size());
  const int rows = n - lags;
  if (rows <= 2 * lags + 1) {
    throw DataError("series too short for the Granger test with " + std::to_string(lags) +
                    " lags");
  }
  Eigen::MatrixXd both(n, 2);
  both.col(0) = y;
  both.col(1) = x;
  const Eigen::MatrixXd lagged = make_lag_matrix(both, lags);  // [y_{t-l}, x_{t-l}] pairs
  const Eigen::VectorXd lhs = y.tail(rows);

  Eigen::MatrixXd xu(rows, 1 + 2 * lags);
  xu.col(0).setOnes();
  Eigen::MatrixXd xr(rows, 1 + lags);
  xr.col(0).setOnes();
  for (int l = 0; l < lags; ++l) {
    xu.col(1 + l) = lagged.col(2 * l);             // own lags
    xu.col(1 + lags + l) = lagged.col(2 * l + 1);  // candidate-cause lags
    xr.col(1 + l) = lagged.col(2 * l);
  }
  const OlsFit unrestricted = ols_fit(xu, lhs, /*intercept=*/false);
  const OlsFit restricted = ols_fit(xr, lhs, /*intercept=*/false);

  GrangerResult res;
  res.lags = lags;
  res.n_obs = rows;
  const double df2 = rows - 2.0 * lags - 1.0;
  res.f_stat = (restricted.rss - unrestricted.rss) / lags / (unrestricted.rss / df2);
  if (res.f_stat < 0.0 && res.f_stat > -1e-12) res.f_stat = 0.0;
  boost::math::fisher_f dist(lags, df2);
  res.pvalue = boost::math::cdf(boost::math::complement(dist, std::max(res.f_stat, 0.0)));
  return res;
}

JarqueBeraResult jarque_bera(const Eigen::VectorXd& residuals) {
  const int n = static_cast<int>(residuals.size());
  if (n < 8) throw DataError("Jarque-Bera needs at least eight observations");
  const double mean = residuals.mean();
  const Eigen::ArrayXd c = residuals.array() - mean;
  const double m2 = c.square().mean();
  if (m2 <= 0.0) throw DataError("Jarque-Bera input has zero variance");
  const double m3 = c.cube().mean();
  const double m4 = c.square().square().mean();

  JarqueBeraResult res;
  res.n_obs = n;
  res.skewness = m3 / std::pow(m2, 1.5);
  res.kurtosis = m4 / (m2 * m2);
  res.statistic = n / 6.0 * (res.skewness * res.skewness +
                             0.25 * (res.kurtosis - 3.0) * (res.kurtosis - 3.0));
  boost::math::chi_squared chi2(2.0);
  res.pvalue = boost::math::cdf(boost::math::complement(chi2, res.statistic));
  return res;
}

}  // namespace gvarkit
