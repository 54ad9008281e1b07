#include "gvarkit/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gvarkit/errors.hpp"

namespace gvarkit {

namespace {

int find_label(const std::vector<std::string>& labels, const std::string& country,
               const std::string& variable) {
  const std::string want = country + "." + variable;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == want) return static_cast<int>(i);
  }
  throw ConfigError("no global variable '" + want + "' in the model");
}

// Square root factor of a positive semidefinite covariance: M M' = cov.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) {
    throw NumericError("shock covariance is not positive semidefinite");
  }
  const Eigen::VectorXd droot = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd m = ldlt.matrixL();
  m = m * droot.asDiagonal();
  return ldlt.transpositionsP().transpose() * m;
}

// One simulated path given its shock sequence.
Eigen::MatrixXd iterate_path(const SolvedDraw& draw, const ForecastOrigin& origin, int n_ahead,
                             const Eigen::MatrixXd& shocks) {
  const int k = static_cast<int>(origin.x_last.size());
  Eigen::MatrixXd path(n_ahead, k);
  Eigen::VectorXd x = origin.x_last;
  for (int h = 1; h <= n_ahead; ++h) {
    x = draw.b0 + draw.b1 * double(origin.trend_last + h) + draw.f * x +
        shocks.row(h - 1).transpose();
    path.row(h - 1) = x.transpose();
  }
  return path;
}

std::vector<Eigen::MatrixXd> fan_quantiles(const std::vector<Eigen::MatrixXd>& paths) {
  const int rows = static_cast<int>(paths.front().rows());
  const int cols = static_cast<int>(paths.front().cols());
  std::vector<Eigen::MatrixXd> out(kFanQuantiles.size(), Eigen::MatrixXd(rows, cols));
  std::vector<double> sample(paths.size());
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (std::size_t d = 0; d < paths.size(); ++d) sample[d] = paths[d](r, c);
      for (std::size_t q = 0; q < kFanQuantiles.size(); ++q) {
        out[q](r, c) = empirical_quantile(sample, kFanQuantiles[q]);
      }
    }
  }
  return out;
}

void check_draw_dims(const std::vector<SolvedDraw>& draws, int k) {
  if (draws.empty()) throw ConfigError("forecasting needs at least one solved draw");
  for (const auto& d : draws) {
    if (d.f.rows() != k || d.f.cols() != k || d.b0.size() != k || d.b1.size() != k ||
        d.sigma_e.rows() != k || d.sigma_e.cols() != k) {
      throw DataError("solved draw dimensions do not match the forecast origin");
    }
  }
}

}  // namespace

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  const double h = (n - 1) * p;
  const int lo = static_cast<int>(std::floor(h));
  if (lo >= n - 1) return values[n - 1];
  const double frac = h - lo;
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

ForecastOrigin make_origin(const Panel& panel, const std::vector<std::string>& countries) {
  ForecastOrigin origin;
  const int t_last = panel.n_periods() - 1;
  origin.trend_last = t_last;  // trend is 1-based over the T-1 estimation rows
  origin.x_last.resize(static_cast<int>(countries.size()) * panel.n_variables());
  int idx = 0;
  for (const auto& country : countries) {
    const int ci = panel.country_index(country);
    for (int v = 0; v < panel.n_variables(); ++v) {
      origin.labels.push_back(country + "." + panel.variables()[v]);
      origin.x_last[idx++] = panel.value(ci, v, t_last);
    }
  }
  return origin;
}

ForecastFan forecast_unconditional(const std::vector<SolvedDraw>& draws,
                                   const ForecastOrigin& origin, int n_ahead,
                                   std::uint64_t seed, bool zero_shocks) {
  if (n_ahead < 1) throw ConfigError("forecast horizon must be at least 1");
  const int k = static_cast<int>(origin.x_last.size());
  check_draw_dims(draws, k);

  ForecastFan fan;
  fan.n_ahead = n_ahead;
  fan.labels = origin.labels;
  fan.paths.reserve(draws.size());
  for (std::size_t d = 0; d < draws.size(); ++d) {
    Eigen::MatrixXd shocks = Eigen::MatrixXd::Zero(n_ahead, k);
    if (!zero_shocks) {
      Rng rng = Rng::substream(seed, "forecast/draw/" + std::to_string(d));
      const Eigen::MatrixXd factor = psd_factor(draws[d].sigma_e);
      Eigen::VectorXd z(k);
      for (int h = 0; h < n_ahead; ++h) {
        for (int i = 0; i < k; ++i) z[i] = rng.normal();
        shocks.row(h) = (factor * z).transpose();
      }
    }
    fan.paths.push_back(iterate_path(draws[d], origin, n_ahead, shocks));
  }
  fan.quantiles = fan_quantiles(fan.paths);
  return fan;
}

ForecastFan forecast_conditional(const std::vector<SolvedDraw>& draws,
                                 const ForecastOrigin& origin, int n_ahead,
                                 const ConditioningSpec& spec, std::uint64_t seed) {
  if (n_ahead < 1) throw ConfigError("forecast horizon must be at least 1");
  if (spec.mode == ConditioningMode::none) {
    return forecast_unconditional(draws, origin, n_ahead, seed);
  }
  if (spec.constraints.empty()) {
    throw ConfigError("conditional forecast requested without any constraints");
  }
  if (spec.mode == ConditioningMode::band && !(spec.rel_half_width > 0.0)) {
    throw ConfigError("band conditioning requires a positive relative half-width");
  }
  const int k = static_cast<int>(origin.x_last.size());
  check_draw_dims(draws, k);

  // Flatten constraints to (coordinate, horizon, value) rows.
  struct Row {
    int coord;
    int horizon;
    double value;
  };
  std::vector<Row> rows;
  for (const auto& c : spec.constraints) {
    if (c.horizons.size() != c.values.size()) {
      throw ConfigError("constraint horizons and values differ in length for " + c.country +
                        "." + c.variable);
    }
    if (c.horizons.empty()) {
      throw ConfigError("empty constraint path for " + c.country + "." + c.variable);
    }
    const int coord = find_label(origin.labels, c.country, c.variable);
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
      if (c.horizons[i] < 1 || c.horizons[i] > n_ahead) {
        throw ConfigError("constraint horizon " + std::to_string(c.horizons[i]) +
                          " outside 1.." + std::to_string(n_ahead));
      }
      rows.push_back({coord, c.horizons[i], c.values[i]});
    }
  }
  const int nr = static_cast<int>(rows.size());

  ForecastFan fan;
  fan.n_ahead = n_ahead;
  fan.labels = origin.labels;
  fan.conditioning = spec;
  fan.paths.reserve(draws.size());

  for (std::size_t d = 0; d < draws.size(); ++d) {
    const SolvedDraw& sd = draws[d];
    Rng rng = Rng::substream(seed, "forecast/draw/" + std::to_string(d));

    // Deterministic skeleton and powers of F.
    std::vector<Eigen::MatrixXd> fpow(n_ahead);  // fpow[j] = F^j
    fpow[0] = Eigen::MatrixXd::Identity(k, k);
    for (int j = 1; j < n_ahead; ++j) fpow[j] = sd.f * fpow[j - 1];
    Eigen::MatrixXd base(n_ahead, k);  // shock-free path
    {
      Eigen::VectorXd x = origin.x_last;
      for (int h = 1; h <= n_ahead; ++h) {
        x = sd.b0 + sd.b1 * double(origin.trend_last + h) + sd.f * x;
        base.row(h - 1) = x.transpose();
      }
    }

    // Band mode: perturb each constrained value inside its band first. The
    // perturbations use their own substream so the shock sequence matches
    // fixed mode and a narrowing band converges to it draw by draw.
    std::vector<double> target(nr);
    for (int r = 0; r < nr; ++r) target[r] = rows[r].value;
    if (spec.mode == ConditioningMode::band) {
      Rng band_rng = Rng::substream(seed, "forecast/band/" + std::to_string(d));
      for (int r = 0; r < nr; ++r) {
        const double w = spec.rel_half_width * std::fabs(rows[r].value);
        target[r] += band_rng.uniform(-w, w);
      }
    }

    // Unconstrained stacked shocks E ~ N(0, I_H (x) Sigma_e).
    const Eigen::MatrixXd factor = psd_factor(sd.sigma_e);
    Eigen::VectorXd e_u(n_ahead * k);
    Eigen::VectorXd z(k);
    for (int h = 0; h < n_ahead; ++h) {
      for (int i = 0; i < k; ++i) z[i] = rng.normal();
      e_u.segment(h * k, k) = factor * z;
    }

    // Constraint rows over the stacked shocks: x_{T+h}[v] depends on shock j
    // through row v of F^{h-j}.
    Eigen::MatrixXd rmat = Eigen::MatrixXd::Zero(nr, n_ahead * k);
    Eigen::VectorXd dvec(nr);
    for (int r = 0; r < nr; ++r) {
      const int h = rows[r].horizon;
      for (int j = 1; j <= h; ++j) {
        rmat.row(r).segment((j - 1) * k, k) = fpow[h - j].row(rows[r].coord);
      }
      dvec[r] = target[r] - base(h - 1, rows[r].coord);
    }

    // Omega R' with Omega = I_H (x) Sigma_e, built block row by block row.
    Eigen::MatrixXd omega_rt(n_ahead * k, nr);
    for (int h = 0; h < n_ahead; ++h) {
      omega_rt.middleRows(h * k, k) =
          sd.sigma_e * rmat.middleCols(h * k, k).transpose();
    }
    const Eigen::MatrixXd rort = rmat * omega_rt;  // R Omega R'
    Eigen::LDLT<Eigen::MatrixXd> ldlt(rort);
    if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
      throw NumericError(
          "degenerate conditioning: the constraint covariance is singular (draw " +
          std::to_string(d) + ")");
    }
    const Eigen::VectorXd e_c = e_u + omega_rt * ldlt.solve(dvec - rmat * e_u);

    // Rebuild the path, imposing each constrained coordinate exactly.
    Eigen::MatrixXd path(n_ahead, k);
    Eigen::VectorXd x = origin.x_last;
    for (int h = 1; h <= n_ahead; ++h) {
      x = sd.b0 + sd.b1 * double(origin.trend_last + h) + sd.f * x +
          e_c.segment((h - 1) * k, k);
      for (int r = 0; r < nr; ++r) {
        if (rows[r].horizon == h) x[rows[r].coord] = target[r];
      }
      path.row(h - 1) = x.transpose();
    }
    fan.paths.push_back(std::move(path));
  }
  fan.quantiles = fan_quantiles(fan.paths);
  return fan;
}

GirfResult girf(const std::vector<SolvedDraw>& draws, const std::vector<std::string>& labels,
                const std::string& shock_country, const std::string& shock_variable,
                int horizon) {
  if (horizon < 0) throw ConfigError("impulse response horizon must be >= 0");
  if (draws.empty()) throw ConfigError("impulse responses need at least one solved draw");
  const int k = static_cast<int>(labels.size());
  const int j = find_label(labels, shock_country, shock_variable);

  GirfResult out;
  out.shock_country = shock_country;
  out.shock_variable = shock_variable;
  out.horizon = horizon;
  out.labels = labels;
  out.responses.reserve(draws.size());
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const SolvedDraw& sd = draws[d];
    if (sd.sigma_e.rows() != k || sd.f.rows() != k) {
      throw DataError("solved draw dimensions do not match the label count");
    }
    const double sjj = sd.sigma_e(j, j);
    if (!(sjj > 0.0)) {
      throw NumericError("degenerate shock: " + shock_country + "." + shock_variable +
                         " has zero residual variance in draw " + std::to_string(d));
    }
    Eigen::VectorXd delta = sd.sigma_e.col(j) / std::sqrt(sjj);
    Eigen::MatrixXd resp(horizon + 1, k);
    resp.row(0) = delta.transpose();
    for (int h = 1; h <= horizon; ++h) {
      delta = sd.f * delta;
      resp.row(h) = delta.transpose();
    }
    out.responses.push_back(std::move(resp));
  }
  out.quantiles = fan_quantiles(out.responses);
  return out;
}

}  // namespace gvarkit
