#include "gvarkit/bgvar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/math/distributions/fisher_f.hpp>

#include "gvarkit/errors.hpp"
#include "gvarkit/strings.hpp"
#include "gvarkit/var.hpp"

namespace gvarkit {

namespace {

constexpr double kThetaFloor = 1e-7;
constexpr double kThetaCeil = 1e7;

// Cholesky of a precision matrix with escalating diagonal jitter; used for
// every conditional normal draw in the sampler.
Eigen::LLT<Eigen::MatrixXd> precision_llt(Eigen::MatrixXd prec, int draw_index) {
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  double jitter = 1e-10 * prec.diagonal().mean();
  for (int attempt = 0; llt.info() != Eigen::Success && attempt < 3; ++attempt) {
    prec.diagonal().array() += jitter;
    jitter *= 10.0;
    llt.compute(prec);
  }
  if (llt.info() != Eigen::Success) {
    throw NumericError("coefficient precision matrix not positive definite at draw " +
                       std::to_string(draw_index));
  }
  return llt;
}

// log Gamma(shape tau, rate tau*lambda/2) density at theta.
double log_gamma_pdf(double theta, double tau, double rate) {
  return tau * std::log(rate) - std::lgamma(tau) + (tau - 1.0) * std::log(theta) - rate * theta;
}

// log posterior kernel of the tail parameter tau given a block of local
// scales: Exp(1) prior plus the Gamma(tau, tau*prodlambda/2) likelihood.
double tau_log_post(double tau, double prod_lambda, const std::vector<double>& theta) {
  double lp = -tau;  // Exp(1) prior, log density up to a constant
  const double rate = 0.5 * tau * prod_lambda;
  for (double th : theta) lp += log_gamma_pdf(th, tau, rate);
  return lp;
}

struct NgGroupState {
  double lambda2 = 0.01;
  double tau = 0.6;
  double tuning = 0.43;
  double accept = 0.0;
};

}  // namespace

void PriorConfig::validate() const {
  if (!(d_lambda > 0.0) || !(e_lambda > 0.0)) {
    throw ConfigError("Normal-Gamma global-scale hyperparameters must be positive");
  }
  if (!(tau_start > 0.0)) throw ConfigError("initial tail parameter tau must be positive");
  if (!(a_sigma > 0.0) || !(b_sigma > 0.0)) {
    throw ConfigError("residual variance hyperparameters must be positive");
  }
  if (!(det_variance > 0.0) || !(vague_variance > 0.0)) {
    throw ConfigError("prior variances must be positive");
  }
}

NgDraws run_ng_gibbs(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
                     const Eigen::MatrixXd& a_prior, const std::vector<ShrinkGroup>& groups,
                     const PriorConfig& prior, int n_draws, int n_burn, int thin, Rng& rng) {
  prior.validate();
  const int t = static_cast<int>(y.rows());
  const int m = static_cast<int>(y.cols());
  const int kdim = static_cast<int>(x.cols());
  if (x.rows() != t) throw DataError("sampler outcome and design row counts differ");
  if (a_prior.rows() != kdim || a_prior.cols() != m) {
    throw ConfigError("prior mean matrix does not match the design dimensions");
  }
  if (n_draws < 1 || n_burn < 0 || thin < 1) {
    throw ConfigError("draw schedule requires n_draws >= 1, n_burn >= 0, thin >= 1");
  }
  if (t <= kdim + 2) throw DataError("sampler needs more observations than design columns");
  for (const auto& g : groups) {
    if (g.row_start < 0 || g.row_count < 1 || g.row_start + g.row_count > kdim) {
      throw ConfigError("shrinkage group exceeds the design row range");
    }
  }

  // Least-squares starting point.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < kdim) throw DataError("sampler design matrix is rank deficient");
  Eigen::MatrixXd a = qr.solve(y);
  Eigen::MatrixXd u = y - x * a;
  const Eigen::MatrixXd sigma_ols = u.transpose() * u / double(t - kdim);
  Eigen::VectorXd d = sigma_ols.diagonal();  // decorrelated residual variances

  const Eigen::MatrixXd xtx = x.transpose() * x;
  // psi(m, c): regression weight of residual column c < m in equation m; the
  // decorrelation matrix W has rows [-psi_m, 1, 0, ...].
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m);
  const double init_scale = prior.ng_enabled ? prior.det_variance : prior.vague_variance;
  Eigen::MatrixXd theta = Eigen::MatrixXd::Constant(kdim, m, init_scale);
  Eigen::MatrixXd ltheta = Eigen::MatrixXd::Constant(m, m, init_scale);

  std::vector<NgGroupState> gs(groups.size());
  for (auto& g : gs) g.tau = prior.tau_start;
  NgGroupState ls;  // decorrelation block state
  ls.tau = prior.tau_start;

  const int ntot = n_burn + n_draws * thin;
  NgDraws out;
  out.coef.reserve(n_draws);
  out.sigma.reserve(n_draws);

  std::vector<double> theta_vec;
  for (int irep = 0; irep < ntot; ++irep) {
    // -- coefficient columns, equation by equation
    for (int mm = 0; mm < m; ++mm) {
      Eigen::MatrixXd e0 = u;
      e0.col(mm) = y.col(mm);  // residuals with this equation's coefficients zeroed
      const int njs = m - mm;
      const Eigen::MatrixXd z = e0 * w.bottomRows(njs).transpose();
      Eigen::VectorXd wv(njs);
      double prec_scale = 0.0;
      for (int j = mm; j < m; ++j) {
        const double wjm = w(j, mm);
        wv[j - mm] = wjm / d[j];
        prec_scale += wjm * wjm / d[j];
      }
      Eigen::MatrixXd prec = prec_scale * xtx;
      prec.diagonal() += theta.col(mm).cwiseInverse();
      const Eigen::VectorXd rhs =
          x.transpose() * (z * wv) + a_prior.col(mm).cwiseQuotient(theta.col(mm));
      const auto llt = precision_llt(std::move(prec), irep);
      Eigen::VectorXd zn(kdim);
      for (int i = 0; i < kdim; ++i) zn[i] = rng.normal();
      a.col(mm) = llt.solve(rhs) + llt.matrixU().solve(zn);
      u.col(mm) = y.col(mm) - x * a.col(mm);
    }

    // -- decorrelation rows: regress each residual column on its predecessors
    for (int mm = 1; mm < m; ++mm) {
      const Eigen::MatrixXd xr = u.leftCols(mm);
      Eigen::MatrixXd prec = xr.transpose() * xr / d[mm];
      for (int c = 0; c < mm; ++c) prec(c, c) += 1.0 / ltheta(mm, c);
      const Eigen::VectorXd rhs = xr.transpose() * u.col(mm) / d[mm];
      const auto llt = precision_llt(std::move(prec), irep);
      Eigen::VectorXd zn(mm);
      for (int i = 0; i < mm; ++i) zn[i] = rng.normal();
      const Eigen::VectorXd row = llt.solve(rhs) + llt.matrixU().solve(zn);
      for (int c = 0; c < mm; ++c) w(mm, c) = -row[c];
    }

    // -- Normal-Gamma scale updates
    if (prior.ng_enabled) {
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const ShrinkGroup& g = groups[gi];
        double prod_before = 1.0;
        for (std::size_t hj = 0; hj < groups.size(); ++hj) {
          if (groups[hj].family == g.family &&
              groups[hj].order_in_family < g.order_in_family) {
            prod_before *= gs[hj].lambda2;
          }
        }
        auto tblock = theta.middleRows(g.row_start, g.row_count);
        const auto ablock = a.middleRows(g.row_start, g.row_count);
        const auto pblock = a_prior.middleRows(g.row_start, g.row_count);
        const double count = double(g.row_count) * m;

        gs[gi].lambda2 = rng.gamma(prior.d_lambda + gs[gi].tau * count,
                                   prior.e_lambda + 0.5 * gs[gi].tau * tblock.sum() * prod_before);
        const double prod_incl = prod_before * gs[gi].lambda2;
        for (int i = 0; i < g.row_count; ++i) {
          for (int j = 0; j < m; ++j) {
            const double chi =
                std::max(std::pow(ablock(i, j) - pblock(i, j), 2.0), 1e-10);
            // The scale product can underflow; keep psi on the proper
            // two-parameter path (theta is clamped below regardless).
            const double psi = std::max(gs[gi].tau * prod_incl, 1e-10);
            const double res = rng.gig(gs[gi].tau - 0.5, chi, psi);
            tblock(i, j) = std::clamp(res, kThetaFloor, kThetaCeil);
          }
        }
        if (prior.sample_tau) {
          theta_vec.clear();
          for (int j = 0; j < m; ++j) {
            for (int i = 0; i < g.row_count; ++i) theta_vec.push_back(tblock(i, j));
          }
          const double prop = std::exp(rng.normal(0.0, gs[gi].tuning)) * gs[gi].tau;
          const double diff = tau_log_post(prop, prod_incl, theta_vec) -
                              tau_log_post(gs[gi].tau, prod_incl, theta_vec) + std::log(prop) -
                              std::log(gs[gi].tau);
          if (diff > std::log(std::max(rng.uniform(), 1e-300))) {
            gs[gi].tau = prop;
            gs[gi].accept += 1.0;
          }
          if (irep > 0 && irep < n_burn / 2) {
            const double rate = gs[gi].accept / irep;
            if (rate > 0.30) gs[gi].tuning *= 1.01;
            if (rate < 0.15) gs[gi].tuning *= 0.99;
          }
        }
      }
      if (m > 1) {
        double lsum = 0.0;
        for (int i = 1; i < m; ++i)
          for (int j = 0; j < i; ++j) lsum += ltheta(i, j);
        const double count = 0.5 * m * (m - 1);
        ls.lambda2 = rng.gamma(prior.d_lambda + ls.tau * count,
                               prior.e_lambda + 0.5 * ls.tau * lsum);
        for (int i = 1; i < m; ++i) {
          for (int j = 0; j < i; ++j) {
            const double chi = std::max(w(i, j) * w(i, j), 1e-10);
            const double psi = std::max(ls.tau * ls.lambda2, 1e-10);
            const double res = rng.gig(ls.tau - 0.5, chi, psi);
            ltheta(i, j) = std::clamp(res, kThetaFloor, kThetaCeil);
          }
        }
        if (prior.sample_tau) {
          theta_vec.clear();
          for (int i = 1; i < m; ++i)
            for (int j = 0; j < i; ++j) theta_vec.push_back(ltheta(i, j));
          const double prop = std::exp(rng.normal(0.0, ls.tuning)) * ls.tau;
          const double diff = tau_log_post(prop, ls.lambda2, theta_vec) -
                              tau_log_post(ls.tau, ls.lambda2, theta_vec) + std::log(prop) -
                              std::log(ls.tau);
          if (diff > std::log(std::max(rng.uniform(), 1e-300))) {
            ls.tau = prop;
            ls.accept += 1.0;
          }
          if (irep > 0 && irep < n_burn / 2) {
            const double rate = ls.accept / irep;
            if (rate > 0.30) ls.tuning *= 1.01;
            if (rate < 0.15) ls.tuning *= 0.99;
          }
        }
      }
    }

    // -- decorrelated residual variances
    const Eigen::MatrixXd eta = u * w.transpose();
    for (int mm = 0; mm < m; ++mm) {
      d[mm] = rng.inv_gamma(prior.a_sigma + 0.5 * t,
                            prior.b_sigma + 0.5 * eta.col(mm).squaredNorm());
    }

    if (irep >= n_burn && (irep - n_burn) % thin == 0) {
      const Eigen::MatrixXd winv =
          w.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(m, m));
      const Eigen::MatrixXd sig = winv * d.asDiagonal() * winv.transpose();
      out.coef.push_back(a);
      out.sigma.push_back(0.5 * (sig + sig.transpose()));
    }
  }
  return out;
}

int PosteriorDraws::n_stable() const {
  int n = 0;
  for (unsigned char f : stable_flags) n += f ? 1 : 0;
  return n;
}

double PosteriorDraws::stable_fraction() const {
  return stable_flags.empty() ? 0.0 : double(n_stable()) / double(stable_flags.size());
}

CountryModel country_model_from_draw(const CountryDraw& draw, int n_vars, Deterministic det,
                                     const std::string& country) {
  const int m = n_vars;
  const int ndet = deterministic_count(det);
  if (draw.coef.rows() != 3 * m + ndet || draw.coef.cols() != m) {
    throw DataError("draw coefficient matrix does not match the declared dimensions");
  }
  CountryModel cm;
  cm.country = country;
  cm.k = m;
  cm.k_star = m;
  cm.det = det;
  cm.psi1 = draw.coef.topRows(m).transpose();
  cm.lambda0 = draw.coef.middleRows(m, m).transpose();
  cm.lambda1 = draw.coef.middleRows(2 * m, m).transpose();
  cm.a0 = ndet >= 1 ? draw.coef.row(3 * m).transpose() : Eigen::VectorXd::Zero(m).eval();
  cm.a1 = ndet >= 2 ? draw.coef.row(3 * m + 1).transpose() : Eigen::VectorXd::Zero(m).eval();
  cm.sigma = draw.sigma;
  return cm;
}

PosteriorDraws sample_posterior(const Panel& panel, const WeightMatrix& weights,
                                const PriorConfig& prior, Deterministic det, int n_draws,
                                int n_burn, int thin, std::uint64_t seed, int n_threads) {
  prior.validate();
  if (n_draws < 100) throw ConfigError("posterior needs at least 100 retained draws");
  if (n_burn < 0 || thin < 1) throw ConfigError("burn-in must be >= 0 and thinning >= 1");
  if (n_threads < 1) throw ConfigError("thread count must be >= 1");
  const int nc = static_cast<int>(weights.countries.size());
  if (nc < 2) throw ConfigError("a global model needs at least two countries");
  const int m = panel.n_variables();
  const int ndet = deterministic_count(det);

  // Shared design per country plus the common prior mean and group layout.
  std::vector<VarxDesign> designs;
  designs.reserve(nc);
  for (const auto& country : weights.countries) {
    const Eigen::MatrixXd block = panel.country_block(panel.country_index(country));
    designs.push_back(build_varx_design(block, build_star(panel, weights, country), det));
  }
  Eigen::MatrixXd a_prior = Eigen::MatrixXd::Zero(3 * m + ndet, m);
  for (int i = 0; i < m; ++i) a_prior(i, i) = prior.prior_mean_own_lag;
  const std::vector<ShrinkGroup> groups = {
      {m, m, 0, 0},      // contemporaneous star block
      {2 * m, m, 0, 1},  // lagged star block
      {0, m, 1, 0},      // own lag block
  };

  std::vector<NgDraws> chains(nc);
  std::vector<std::exception_ptr> errors(nc);
  std::atomic<int> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= nc) return;
      try {
        Rng rng = Rng::substream(seed, "bgvar/" + weights.countries[i]);
        chains[i] =
            run_ng_gibbs(designs[i].y, designs[i].x, a_prior, groups, prior, n_draws, n_burn,
                         thin, rng);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::min(n_threads, nc);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i < nc; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  PosteriorDraws post;
  post.countries = weights.countries;
  post.variables = panel.variables();
  post.det = det;
  post.n_draws = n_draws;
  post.n_burn = n_burn;
  post.thin = thin;
  post.seed = seed;
  post.trend_last = panel.n_periods() - 1;
  post.draws.resize(n_draws);
  for (int di = 0; di < n_draws; ++di) {
    post.draws[di].reserve(nc);
    for (int i = 0; i < nc; ++i) {
      post.draws[di].push_back({chains[i].coef[di], chains[i].sigma[di]});
    }
  }

  post.stable_flags = stability_flags(post, weights);
  return post;
}

std::vector<unsigned char> stability_flags(const PosteriorDraws& draws,
                                           const WeightMatrix& weights) {
  const int m = static_cast<int>(draws.variables.size());
  const int nc = static_cast<int>(draws.countries.size());
  std::vector<LinkMatrix> links;
  links.reserve(nc);
  for (const auto& country : weights.countries) {
    links.push_back(build_link(weights.countries, m, weights, country));
  }
  std::vector<unsigned char> flags(draws.draws.size(), 0);
  for (std::size_t di = 0; di < draws.draws.size(); ++di) {
    std::vector<CountryModel> models;
    models.reserve(nc);
    for (int i = 0; i < nc; ++i) {
      models.push_back(
          country_model_from_draw(draws.draws[di][i], m, draws.det, draws.countries[i]));
    }
    try {
      const GlobalModel gm = stack_global(models, links, draws.variables,
                                          std::numeric_limits<double>::infinity());
      if (gm.f.allFinite() && companion_moduli(gm.f).front() < 1.0) {
        flags[di] = 1;
      }
    } catch (const NumericError&) {
      // an unsolvable stacked draw is never usable, hence unstable
    }
  }
  return flags;
}

StableSubset filter_stable(const PosteriorDraws& draws) {
  StableSubset out;
  out.n_total = static_cast<int>(draws.draws.size());
  out.draws = draws;
  out.draws.draws.clear();
  out.draws.stable_flags.clear();
  for (std::size_t di = 0; di < draws.draws.size(); ++di) {
    if (di < draws.stable_flags.size() && draws.stable_flags[di]) {
      out.draws.draws.push_back(draws.draws[di]);
      out.draws.stable_flags.push_back(1);
    }
  }
  out.n_stable = static_cast<int>(out.draws.draws.size());
  out.draws.n_draws = out.n_stable;
  out.fraction = out.n_total > 0 ? double(out.n_stable) / out.n_total : 0.0;
  if (out.n_stable == 0) {
    throw NumericError(
        "no stable posterior draws: every stacked companion matrix has spectral radius >= 1; "
        "tighten the shrinkage prior or difference the data");
  }
  return out;
}

std::vector<SolvedDraw> solve_draws(const PosteriorDraws& draws, const WeightMatrix& weights,
                                    bool stable_only, double cond_limit) {
  if (draws.countries != weights.countries) {
    throw ConfigError("posterior and weight matrix country orderings differ");
  }
  const int m = static_cast<int>(draws.variables.size());
  std::vector<LinkMatrix> links;
  links.reserve(draws.countries.size());
  for (const auto& country : draws.countries) {
    links.push_back(build_link(draws.countries, m, weights, country));
  }
  std::vector<SolvedDraw> out;
  for (std::size_t di = 0; di < draws.draws.size(); ++di) {
    if (stable_only && (di >= draws.stable_flags.size() || !draws.stable_flags[di])) continue;
    std::vector<CountryModel> models;
    models.reserve(draws.countries.size());
    for (std::size_t i = 0; i < draws.countries.size(); ++i) {
      models.push_back(
          country_model_from_draw(draws.draws[di][i], m, draws.det, draws.countries[i]));
    }
    try {
      GlobalModel gm = stack_global(models, links, draws.variables, cond_limit);
      out.push_back({std::move(gm.b0), std::move(gm.b1), std::move(gm.f), std::move(gm.sigma_e)});
    } catch (const NumericError& e) {
      throw NumericError("draw " + std::to_string(di) + ": " + e.what());
    }
  }
  if (out.empty()) {
    throw NumericError(
        "no posterior draws available to solve (zero stable draws); tighten the shrinkage "
        "prior or difference the data");
  }
  return out;
}

namespace {

// Bartlett long-run variance of a segment, the spectral density at zero used
// by the Geweke statistic.
double bartlett_lrv(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const double mean = x.mean();
  const Eigen::VectorXd c = x.array() - mean;
  const int bw = static_cast<int>(std::floor(4.0 * std::pow(n / 100.0, 0.25)));
  double s0 = c.squaredNorm() / n;
  for (int l = 1; l <= bw && l < n; ++l) {
    const double gl = c.tail(n - l).dot(c.head(n - l)) / n;
    s0 += 2.0 * (1.0 - double(l) / (bw + 1)) * gl;
  }
  return s0;
}

}  // namespace

GewekeResult geweke_diag(const Eigen::MatrixXd& chains) {
  const int n = static_cast<int>(chains.rows());
  if (n < 100) throw DataError("Geweke diagnostic needs chains of at least 100 iterations");
  const int na = n / 10;
  const int nb = n / 2;
  GewekeResult out;
  out.z.resize(chains.cols());
  for (int p = 0; p < chains.cols(); ++p) {
    const Eigen::VectorXd col = chains.col(p);
    const double var = (col.array() - col.mean()).square().sum();
    if (!(var > 0.0)) {
      out.z[p] = std::numeric_limits<double>::quiet_NaN();
      ++out.n_skipped;
      continue;
    }
    const Eigen::VectorXd head = col.head(na);
    const Eigen::VectorXd tail = col.tail(nb);
    const double se2 = bartlett_lrv(head) / na + bartlett_lrv(tail) / nb;
    if (!(se2 > 0.0) || !std::isfinite(se2)) {
      out.z[p] = std::numeric_limits<double>::quiet_NaN();
      ++out.n_skipped;
      continue;
    }
    const double z = (head.mean() - tail.mean()) / std::sqrt(se2);
    out.z[p] = z;
    ++out.n_tested;
    if (std::fabs(z) > 1.96) ++out.n_exceed;
  }
  return out;
}

GewekeResult geweke_diag(const PosteriorDraws& draws) {
  const int nd = static_cast<int>(draws.draws.size());
  if (nd < 100) throw DataError("Geweke diagnostic needs chains of at least 100 iterations");
  int nparam = 0;
  for (const auto& cd : draws.draws.front()) {
    nparam += static_cast<int>(cd.coef.size());
  }
  Eigen::MatrixXd chains(nd, nparam);
  for (int di = 0; di < nd; ++di) {
    int idx = 0;
    for (const auto& cd : draws.draws[di]) {
      const auto& coef = cd.coef;
      for (int j = 0; j < coef.cols(); ++j) {
        for (int i = 0; i < coef.rows(); ++i) chains(di, idx++) = coef(i, j);
      }
    }
  }
  return geweke_diag(chains);
}

AutocorrBuckets residual_autocorr_ftest(
    const std::vector<Eigen::MatrixXd>& residuals_by_country) {
  AutocorrBuckets out;
  for (const auto& res : residuals_by_country) {
    const int n = static_cast<int>(res.rows());
    if (n < 20) throw DataError("autocorrelation F-test needs residual series of length >= 20");
    for (int v = 0; v < res.cols(); ++v) {
      const Eigen::VectorXd e = res.col(v);
      const Eigen::MatrixXd lag = e.head(n - 1);
      const Eigen::VectorXd cur = e.tail(n - 1);
      const OlsFit fit = ols_fit(lag, cur, true);
      const double fstat = fit.t_stat[1] * fit.t_stat[1];
      double p = 1.0;
      if (std::isfinite(fstat)) {
        const boost::math::fisher_f_distribution<double> fdist(1.0, double(n - 3));
        p = boost::math::cdf(boost::math::complement(fdist, fstat));
      } else {
        p = 0.0;
      }
      out.pvalues.push_back(p);
      if (p > 0.10) {
        ++out.counts[0];
      } else if (p > 0.05) {
        ++out.counts[1];
      } else if (p > 0.01) {
        ++out.counts[2];
      } else {
        ++out.counts[3];
      }
    }
  }
  return out;
}

CrossCorrTable cross_unit_corr(const std::vector<Eigen::MatrixXd>& residuals_by_country,
                               const std::vector<std::string>& countries,
                               const std::vector<std::string>& variables) {
  const int nc = static_cast<int>(residuals_by_country.size());
  if (nc != static_cast<int>(countries.size())) {
    throw ConfigError("residual blocks and country names differ in count");
  }
  if (nc < 2) throw ConfigError("cross-country correlation needs at least two countries");
  const int nv = static_cast<int>(variables.size());
  const int t = static_cast<int>(residuals_by_country.front().rows());
  for (const auto& res : residuals_by_country) {
    if (res.rows() != t || res.cols() != nv) {
      throw DataError("residual blocks are not aligned across countries");
    }
  }

  CrossCorrTable out;
  out.variables = variables;
  out.avg_corr.resize(nc, nv);
  out.counts.assign(nv, {0, 0, 0, 0});
  for (int v = 0; v < nv; ++v) {
    for (int i = 0; i < nc; ++i) {
      double sum = 0.0;
      int pairs = 0;
      const Eigen::VectorXd a = residuals_by_country[i].col(v);
      const double sa = std::sqrt((a.array() - a.mean()).square().sum());
      for (int j = 0; j < nc; ++j) {
        if (j == i) continue;
        const Eigen::VectorXd b = residuals_by_country[j].col(v);
        const double sb = std::sqrt((b.array() - b.mean()).square().sum());
        if (sa > 0.0 && sb > 0.0) {
          sum += ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / (sa * sb);
          ++pairs;
        }
      }
      const double avg = pairs > 0 ? sum / pairs : 0.0;
      out.avg_corr(i, v) = avg;
      if (avg < 0.1) {
        ++out.counts[v][0];
      } else if (avg < 0.2) {
        ++out.counts[v][1];
      } else if (avg < 0.5) {
        ++out.counts[v][2];
      } else {
        ++out.counts[v][3];
      }
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> posterior_mean_residuals(const PosteriorDraws& draws,
                                                      const Panel& panel,
                                                      const WeightMatrix& weights) {
  if (draws.countries != weights.countries) {
    throw ConfigError("posterior and weight matrix country orderings differ");
  }
  if (draws.draws.empty()) throw DataError("posterior holds no draws");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(draws.countries.size());
  for (std::size_t i = 0; i < draws.countries.size(); ++i) {
    const Eigen::MatrixXd block =
        panel.country_block(panel.country_index(draws.countries[i]));
    const VarxDesign design =
        build_varx_design(block, build_star(panel, weights, draws.countries[i]), draws.det);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(draws.draws.front()[i].coef.rows(),
                                                 draws.draws.front()[i].coef.cols());
    for (const auto& dset : draws.draws) mean += dset[i].coef;
    mean /= double(draws.draws.size());
    out.push_back(design.y - design.x * mean);
  }
  return out;
}

DiagnosticsReport make_diagnostics(const PosteriorDraws& draws, const Panel& panel,
                                   const WeightMatrix& weights) {
  DiagnosticsReport rep;
  rep.n_draws = static_cast<int>(draws.draws.size());
  rep.n_burn = draws.n_burn;
  rep.thin = draws.thin;
  rep.n_stable = draws.n_stable();
  rep.geweke = geweke_diag(draws);
  const auto residuals = posterior_mean_residuals(draws, panel, weights);
  rep.autocorr = residual_autocorr_ftest(residuals);
  rep.cross_corr = cross_unit_corr(residuals, draws.countries, draws.variables);
  return rep;
}

namespace {

void append_matrix_rows(std::string& out, const Eigen::MatrixXd& mat) {
  for (int i = 0; i < mat.rows(); ++i) {
    for (int j = 0; j < mat.cols(); ++j) {
      if (j) out += ' ';
      out += format_full_double(mat(i, j));
    }
    out += '\n';
  }
}

Eigen::MatrixXd read_matrix_rows(std::istream& in, int rows, int cols, const char* what) {
  Eigen::MatrixXd mat(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!(in >> mat(i, j))) {
        throw DataError(std::string("draw file truncated while reading ") + what);
      }
    }
  }
  return mat;
}

}  // namespace

std::string draws_to_text(const PosteriorDraws& draws) {
  std::string out = "gvarkit draws 1\n";
  out += "countries " + std::to_string(draws.countries.size());
  for (const auto& c : draws.countries) out += " " + c;
  out += "\nvariables " + std::to_string(draws.variables.size());
  for (const auto& v : draws.variables) out += " " + v;
  out += "\ndet " + to_string(draws.det) + "\n";
  out += "schedule " + std::to_string(draws.n_burn) + " " + std::to_string(draws.thin) + "\n";
  out += "seed " + std::to_string(draws.seed) + "\n";
  out += "config_hash " + std::to_string(draws.config_hash) + "\n";
  out += "trend_last " + std::to_string(draws.trend_last) + "\n";
  const int coef_rows =
      draws.draws.empty() ? 0 : static_cast<int>(draws.draws.front().front().coef.rows());
  out += "coef_rows " + std::to_string(coef_rows) + "\n";
  for (std::size_t di = 0; di < draws.draws.size(); ++di) {
    const int stable = di < draws.stable_flags.size() && draws.stable_flags[di] ? 1 : 0;
    out += "draw " + std::to_string(di) + " " + std::to_string(stable) + "\n";
    for (const auto& cd : draws.draws[di]) {
      append_matrix_rows(out, cd.coef);
      append_matrix_rows(out, cd.sigma);
    }
  }
  return out;
}

PosteriorDraws draws_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "gvarkit draws 1") {
    throw DataError("not a gvarkit draw file (bad header)");
  }
  PosteriorDraws out;
  auto read_tokens = [&](const std::string& head) {
    if (!std::getline(in, line)) throw DataError("draw file ended before '" + head + "'");
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty() || tok[0] != head) {
      throw DataError("draw file: expected '" + head + "', found '" + line + "'");
    }
    return tok;
  };
  auto tok = read_tokens("countries");
  for (std::size_t i = 2; i < tok.size(); ++i) out.countries.push_back(tok[i]);
  if (tok.size() < 2 || out.countries.size() != std::stoul(tok[1])) {
    throw DataError("draw file: country list does not match its declared count");
  }
  tok = read_tokens("variables");
  for (std::size_t i = 2; i < tok.size(); ++i) out.variables.push_back(tok[i]);
  if (tok.size() < 2 || out.variables.size() != std::stoul(tok[1])) {
    throw DataError("draw file: variable list does not match its declared count");
  }
  tok = read_tokens("det");
  if (tok.size() != 2) throw DataError("draw file: malformed det line");
  out.det = deterministic_from_string(tok[1]);
  tok = read_tokens("schedule");
  if (tok.size() != 3) throw DataError("draw file: malformed schedule line");
  out.n_burn = std::stoi(tok[1]);
  out.thin = std::stoi(tok[2]);
  tok = read_tokens("seed");
  if (tok.size() != 2) throw DataError("draw file: malformed seed line");
  out.seed = std::stoull(tok[1]);
  tok = read_tokens("config_hash");
  if (tok.size() != 2) throw DataError("draw file: malformed config_hash line");
  out.config_hash = std::stoull(tok[1]);
  tok = read_tokens("trend_last");
  if (tok.size() != 2) throw DataError("draw file: malformed trend_last line");
  out.trend_last = std::stoi(tok[1]);
  tok = read_tokens("coef_rows");
  if (tok.size() != 2) throw DataError("draw file: malformed coef_rows line");
  const int coef_rows = std::stoi(tok[1]);
  const int m = static_cast<int>(out.variables.size());
  const int nc = static_cast<int>(out.countries.size());

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    int index = 0, stable = 0;
    ls >> head >> index >> stable;
    if (head != "draw") throw DataError("draw file: expected a draw block, found '" + line + "'");
    std::vector<CountryDraw> dset;
    dset.reserve(nc);
    for (int i = 0; i < nc; ++i) {
      CountryDraw cd;
      cd.coef = read_matrix_rows(in, coef_rows, m, "a coefficient block");
      cd.sigma = read_matrix_rows(in, m, m, "a covariance block");
      dset.push_back(std::move(cd));
    }
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    out.draws.push_back(std::move(dset));
    out.stable_flags.push_back(static_cast<unsigned char>(stable != 0));
  }
  if (out.draws.empty()) throw DataError("draw file holds no draws");
  out.n_draws = static_cast<int>(out.draws.size());
  return out;
}

void save_draws(const PosteriorDraws& draws, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << draws_to_text(draws);
  if (!out) throw DataError("write failed for '" + path + "'");
}

PosteriorDraws load_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return draws_from_text(ss.str());
}

}  // namespace gvarkit
