#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gvarkit/errors.hpp"
#include "gvarkit/gvar.hpp"
#include "gvarkit/panel.hpp"
#include "gvarkit/rng.hpp"
#include "gvarkit/var.hpp"
#include "helpers.hpp"

using namespace gvarkit;

namespace {

// Panel of iid normals: the regression identities hold for arbitrary data.
Panel random_panel(const std::vector<std::string>& countries,
                   const std::vector<std::string>& variables, int t_total, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Period> periods;
  for (int t = 0; t < t_total; ++t) periods.push_back(Period{1990 + t, 0});
  std::vector<double> values;
  values.reserve(countries.size() * variables.size() * static_cast<std::size_t>(t_total));
  for (std::size_t c = 0; c < countries.size(); ++c)
    for (std::size_t v = 0; v < variables.size(); ++v)
      for (int t = 0; t < t_total; ++t) values.push_back(rng.normal());
  return Panel(countries, variables, periods, values);
}

WeightMatrix random_weights(const std::vector<std::string>& countries, std::uint64_t seed) {
  Rng rng(seed);
  const int n = static_cast<int>(countries.size());
  Eigen::MatrixXd flows(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flows(i, j) = i == j ? 0.0 : 0.5 + rng.uniform();
  return build_weights(flows, WeightMode::row_stochastic, countries);
}

// Global state vector at panel time t in label order (country-major).
Eigen::VectorXd global_state(const Panel& panel, const std::vector<std::string>& countries,
                             int t) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(countries.size()) * panel.n_variables());
  int r = 0;
  for (const auto& c : countries) {
    const int ci = panel.country_index(c);
    for (int v = 0; v < panel.n_variables(); ++v) x(r++) = panel.value(ci, v, t);
  }
  return x;
}

}  // namespace

TEST_SUITE("gvar") {

TEST_CASE("star variables are the weighted cross-country averages") {
  const std::vector<std::string> countries{"A", "B", "C"};
  const std::vector<std::string> variables{"u", "v"};
  const Panel panel = random_panel(countries, variables, 30, 5);
  const WeightMatrix w = random_weights(countries, 6);

  const Eigen::MatrixXd star = build_star(panel, w, "B");
  REQUIRE(star.rows() == 30);
  REQUIRE(star.cols() == 2);
  const int bi = w.index_of("B");
  for (int t = 0; t < 30; ++t) {
    for (int v = 0; v < 2; ++v) {
      double expect = 0.0;
      for (const auto& c : countries) {
        expect += w.w(bi, w.index_of(c)) * panel.value(panel.country_index(c), v, t);
      }
      CHECK(star(t, v) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("star construction requires row-stochastic weights") {
  const std::vector<std::string> countries{"A", "B"};
  const Panel panel = random_panel(countries, {"u"}, 20, 1);
  Eigen::MatrixXd flows(2, 2);
  flows << 0, 3, 3, 0;
  const WeightMatrix mx = build_weights(flows, WeightMode::max_normalized, countries);
  CHECK_THROWS_AS(build_star(panel, mx, "A"), ConfigError);
}

TEST_CASE("varx design stacks own lag, star levels and deterministics") {
  const std::vector<std::string> countries{"A", "B"};
  const Panel panel = random_panel(countries, {"u", "v"}, 25, 9);
  const WeightMatrix w = random_weights(countries, 10);
  const Eigen::MatrixXd block = panel.country_block(panel.country_index("A"));
  const Eigen::MatrixXd star = build_star(panel, w, "A");

  const VarxDesign d = build_varx_design(block, star, Deterministic::constant_trend);
  REQUIRE(d.y.rows() == 24);
  REQUIRE(d.x.cols() == 2 + 2 + 2 + 2);
  REQUIRE(d.labels.size() == 8);
  // Row for t = 1: [x_0 | x*_1 | x*_0 | 1 | 1].
  CHECK(d.y(0, 0) == block(1, 0));
  CHECK(d.x(0, 0) == block(0, 0));
  CHECK(d.x(0, 1) == block(0, 1));
  CHECK(d.x(0, 2) == star(1, 0));
  CHECK(d.x(0, 3) == star(1, 1));
  CHECK(d.x(0, 4) == star(0, 0));
  CHECK(d.x(0, 5) == star(0, 1));
  CHECK(d.x(0, 6) == 1.0);
  CHECK(d.x(0, 7) == 1.0);
  CHECK(d.x(23, 7) == 24.0);  // trend is 1-based over the trimmed rows
}

TEST_CASE("country estimation reconstructs its regression identity") {
  const std::vector<std::string> countries{"A", "B", "C"};
  const Panel panel = random_panel(countries, {"u", "v"}, 40, 21);
  const WeightMatrix w = random_weights(countries, 22);
  const Eigen::MatrixXd block = panel.country_block(panel.country_index("A"));
  const Eigen::MatrixXd star = build_star(panel, w, "A");

  const CountryModel m = estimate_varx(block, star, Deterministic::constant_trend, "A");
  CHECK(m.k == 2);
  CHECK(m.k_star == 2);
  REQUIRE(m.residuals.rows() == 39);
  for (int t = 1; t < 40; ++t) {
    const Eigen::VectorXd x = block.row(t).transpose();
    const Eigen::VectorXd fitted = m.a0 + m.a1 * static_cast<double>(t) +
                                   m.psi1 * block.row(t - 1).transpose() +
                                   m.lambda0 * star.row(t).transpose() +
                                   m.lambda1 * star.row(t - 1).transpose();
    const Eigen::VectorXd resid = x - fitted;
    CHECK((resid - m.residuals.row(t - 1).transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  // A = [I, -Lambda0], B = [Psi1, Lambda1].
  const Eigen::MatrixXd a = m.a_mat();
  CHECK((a.leftCols(2) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.rightCols(2) + m.lambda0).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd b = m.b_mat();
  CHECK((b.leftCols(2) - m.psi1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b.rightCols(2) - m.lambda1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("link matrix maps the global state to own and starred variables") {
  const std::vector<std::string> countries{"A", "B", "C"};
  const std::vector<std::string> variables{"u", "v"};
  const Panel panel = random_panel(countries, variables, 15, 31);
  const WeightMatrix w = random_weights(countries, 32);

  const LinkMatrix link = build_link(countries, 2, w, "B");
  REQUIRE(link.w.rows() == 4);
  REQUIRE(link.w.cols() == 6);
  const Eigen::VectorXd x = global_state(panel, countries, 7);
  const Eigen::VectorXd z = link.w * x;
  const Eigen::MatrixXd star = build_star(panel, w, "B");
  const int bi = panel.country_index("B");
  CHECK(z(0) == doctest::Approx(panel.value(bi, 0, 7)).epsilon(1e-12));
  CHECK(z(1) == doctest::Approx(panel.value(bi, 1, 7)).epsilon(1e-12));
  CHECK(z(2) == doctest::Approx(star(7, 0)).epsilon(1e-12));
  CHECK(z(3) == doctest::Approx(star(7, 1)).epsilon(1e-12));
}

TEST_CASE("stacked system satisfies the structural and solved identities") {
  const std::vector<std::string> countries{"A", "B", "C"};
  const std::vector<std::string> variables{"u", "v"};
  const Panel panel = random_panel(countries, variables, 50, 41);
  const WeightMatrix w = random_weights(countries, 42);

  std::vector<CountryModel> models;
  std::vector<LinkMatrix> links;
  for (const auto& c : countries) {
    const Eigen::MatrixXd block = panel.country_block(panel.country_index(c));
    const Eigen::MatrixXd star = build_star(panel, w, c);
    models.push_back(estimate_varx(block, star, Deterministic::constant_trend, c));
    links.push_back(build_link(countries, 2, w, c));
  }
  const GlobalModel gm = stack_global(models, links, variables);
  REQUIRE(gm.k() == 6);
  CHECK(gm.labels[0] == "A.u");
  CHECK(gm.labels[5] == "C.v");
  CHECK(gm.label_index("B", "v") == 3);

  // Structural identity: G x_t = a0 + a1 t + H x_{t-1} + eps_t at every
  // estimation row, with eps stacked from the country residuals.
  for (int t = 1; t < 50; ++t) {
    const Eigen::VectorXd xt = global_state(panel, countries, t);
    const Eigen::VectorXd xp = global_state(panel, countries, t - 1);
    Eigen::VectorXd eps(6);
    for (int i = 0; i < 3; ++i)
      eps.segment(2 * i, 2) = models[static_cast<std::size_t>(i)].residuals.row(t - 1).transpose();
    const Eigen::VectorXd lhs = gm.g * xt;
    const Eigen::VectorXd rhs = gm.a0 + gm.a1 * static_cast<double>(t) + gm.h * xp + eps;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);

    // Solved identity: x_t = b0 + b1 t + F x_{t-1} + G^{-1} eps_t.
    const Eigen::VectorXd e = gm.g.partialPivLu().solve(eps);
    const Eigen::VectorXd rhs2 =
        gm.b0 + gm.b1 * static_cast<double>(t) + gm.f * xp + e;
    CHECK((xt - rhs2).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Solve consistency and covariance symmetry.
  CHECK((gm.g * gm.f - gm.h).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((gm.g * gm.b0 - gm.a0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((gm.sigma_e - gm.sigma_e.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(gm.g_condition >= 1.0);

  // The convenience entry point reproduces the manual stacking.
  const GlobalModel direct = estimate_gvar(panel, w, Deterministic::constant_trend);
  CHECK((direct.f - gm.f).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((direct.sigma_e - gm.sigma_e).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(direct.trend_last == 49);

  // One zero-shock step of the solved system.
  const Eigen::VectorXd x49 = global_state(panel, countries, 49);
  const Eigen::VectorXd next = iterate_global(direct, x49, 50.0);
  CHECK((next - (direct.b0 + 50.0 * direct.b1 + direct.f * x49)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(iterate_global(direct, Eigen::VectorXd::Zero(3), 1.0), DataError);
}

TEST_CASE("zero foreign loadings collapse the stack to country vars") {
  const std::vector<std::string> countries{"A", "B"};
  const std::vector<std::string> variables{"u", "v"};
  const Panel panel = random_panel(countries, variables, 60, 51);
  const WeightMatrix w = random_weights(countries, 52);

  std::vector<CountryModel> models;
  std::vector<LinkMatrix> links;
  std::vector<VarEstimate> vars;
  for (const auto& c : countries) {
    const Eigen::MatrixXd block = panel.country_block(panel.country_index(c));
    const VarEstimate ve = estimate_var(block, 1, Deterministic::constant);
    vars.push_back(ve);
    CountryModel m;
    m.country = c;
    m.k = 2;
    m.k_star = 2;
    m.det = Deterministic::constant;
    m.a0 = ve.alpha;
    m.a1 = Eigen::VectorXd::Zero(2);
    m.psi1 = ve.phi[0];
    m.lambda0 = Eigen::MatrixXd::Zero(2, 2);
    m.lambda1 = Eigen::MatrixXd::Zero(2, 2);
    m.sigma = ve.sigma_w;
    m.residuals = ve.residuals;
    models.push_back(std::move(m));
    links.push_back(build_link(countries, 2, w, c));
  }
  const GlobalModel gm = stack_global(models, links, variables);
  CHECK((gm.f.block(0, 0, 2, 2) - vars[0].phi[0]).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((gm.f.block(2, 2, 2, 2) - vars[1].phi[0]).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(gm.f.block(0, 2, 2, 2).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(gm.f.block(2, 0, 2, 2).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((gm.b0.segment(0, 2) - vars[0].alpha).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((gm.sigma_e.block(0, 0, 2, 2) - vars[0].sigma_w).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("two-country scalar system matches the hand-solved form") {
  const double l1 = 0.4, l2 = -0.3;    // contemporaneous star loadings
  const double psi1 = 0.5, psi2 = 0.7;  // own lags
  const double mu1 = 0.2, mu2 = -0.1;   // lagged star loadings
  const double s1 = 1.5, s2 = 0.8;      // residual variances

  std::vector<CountryModel> models(2);
  const char* names[2] = {"A", "B"};
  const double lam[2] = {l1, l2}, psi[2] = {psi1, psi2}, mu[2] = {mu1, mu2}, sig[2] = {s1, s2};
  for (int i = 0; i < 2; ++i) {
    CountryModel& m = models[static_cast<std::size_t>(i)];
    m.country = names[i];
    m.k = 1;
    m.k_star = 1;
    m.det = Deterministic::none;
    m.a0 = Eigen::VectorXd::Zero(1);
    m.a1 = Eigen::VectorXd::Zero(1);
    m.psi1 = Eigen::MatrixXd::Constant(1, 1, psi[i]);
    m.lambda0 = Eigen::MatrixXd::Constant(1, 1, lam[i]);
    m.lambda1 = Eigen::MatrixXd::Constant(1, 1, mu[i]);
    m.sigma = Eigen::MatrixXd::Constant(1, 1, sig[i]);
  }
  Eigen::MatrixXd flows(2, 2);
  flows << 0, 1, 1, 0;
  const WeightMatrix w = build_weights(flows, WeightMode::row_stochastic, {"A", "B"});
  const std::vector<LinkMatrix> links{build_link({"A", "B"}, 1, w, "A"),
                                      build_link({"A", "B"}, 1, w, "B")};
  const GlobalModel gm = stack_global(models, links, {"x"});

  // G = [[1, -l1], [-l2, 1]], H = [[psi1, mu1], [mu2, psi2]].
  CHECK(gm.g(0, 0) == 1.0);
  CHECK(gm.g(0, 1) == -l1);
  CHECK(gm.g(1, 0) == -l2);
  CHECK(gm.g(1, 1) == 1.0);
  CHECK(gm.h(0, 0) == psi1);
  CHECK(gm.h(0, 1) == mu1);
  CHECK(gm.h(1, 0) == mu2);
  CHECK(gm.h(1, 1) == psi2);

  const double det = 1.0 - l1 * l2;
  Eigen::MatrixXd f_hand(2, 2);
  f_hand << (psi1 + l1 * mu2) / det, (mu1 + l1 * psi2) / det,
      (l2 * psi1 + mu2) / det, (l2 * mu1 + psi2) / det;
  CHECK((gm.f - f_hand).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd ginv(2, 2);
  ginv << 1.0 / det, l1 / det, l2 / det, 1.0 / det;
  Eigen::MatrixXd sig_eps = Eigen::MatrixXd::Zero(2, 2);
  sig_eps(0, 0) = s1;
  sig_eps(1, 1) = s2;
  const Eigen::MatrixXd se_hand = ginv * sig_eps * ginv.transpose();
  CHECK((gm.sigma_e - se_hand).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("near-singular contemporaneous matrices are rejected") {
  std::vector<CountryModel> models(2);
  const char* names[2] = {"A", "B"};
  for (int i = 0; i < 2; ++i) {
    CountryModel& m = models[static_cast<std::size_t>(i)];
    m.country = names[i];
    m.k = 1;
    m.k_star = 1;
    m.det = Deterministic::none;
    m.a0 = Eigen::VectorXd::Zero(1);
    m.a1 = Eigen::VectorXd::Zero(1);
    m.psi1 = Eigen::MatrixXd::Constant(1, 1, 0.5);
    m.lambda0 = Eigen::MatrixXd::Constant(1, 1, 1.0);  // G becomes singular
    m.lambda1 = Eigen::MatrixXd::Zero(1, 1);
    m.sigma = Eigen::MatrixXd::Identity(1, 1);
  }
  Eigen::MatrixXd flows(2, 2);
  flows << 0, 1, 1, 0;
  const WeightMatrix w = build_weights(flows, WeightMode::row_stochastic, {"A", "B"});
  const std::vector<LinkMatrix> links{build_link({"A", "B"}, 1, w, "A"),
                                      build_link({"A", "B"}, 1, w, "B")};
  CHECK_THROWS_AS(stack_global(models, links, {"x"}), NumericError);

  // A tight condition-number budget also rejects a healthy system.
  models[0].lambda0(0, 0) = 0.4;
  models[1].lambda0(0, 0) = 0.4;
  CHECK_THROWS_AS(stack_global(models, links, {"x"}, 1.0 + 1e-12), NumericError);
}

TEST_CASE("model text serialization round trips bit-exactly") {
  const std::vector<std::string> countries{"A", "B", "C"};
  const Panel panel = random_panel(countries, {"u", "v"}, 45, 61);
  const WeightMatrix w = random_weights(countries, 62);
  const GlobalModel gm = estimate_gvar(panel, w, Deterministic::constant_trend);

  const std::string text = global_model_to_text(gm);
  const GlobalModel back = global_model_from_text(text);
  CHECK(back.countries == gm.countries);
  CHECK(back.variables == gm.variables);
  CHECK(back.labels == gm.labels);
  CHECK(back.det == gm.det);
  CHECK(back.trend_last == gm.trend_last);
  CHECK((back.f - gm.f).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.g - gm.g).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.h - gm.h).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.sigma_e - gm.sigma_e).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b0 - gm.b0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b1 - gm.b1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.g_condition == gm.g_condition);

  // Trailing annotation lines after the terminator are ignored.
  const GlobalModel annotated = global_model_from_text(text + "meta cfg=deadbeef seed=42\n");
  CHECK((annotated.f - gm.f).cwiseAbs().maxCoeff() == 0.0);

  // File round trip.
  testutil::TempDir tmp("gvar_model");
  save_global_model(gm, tmp.file("m.txt"));
  const GlobalModel from_file = load_global_model(tmp.file("m.txt"));
  CHECK((from_file.f - gm.f).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(global_model_from_text("bogus\n"), DataError);
}

}  // TEST_SUITE
