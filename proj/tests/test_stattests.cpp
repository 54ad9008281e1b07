#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gvarkit/errors.hpp"
#include "gvarkit/rng.hpp"
#include "gvarkit/stattests.hpp"
#include "helpers.hpp"

using namespace gvarkit;
using testutil::load_matrix;
using testutil::load_series;
using testutil::test_data_file;

// Expected statistics in this suite were frozen from independent
// reference implementations run on the committed series files
// (tests/data/freeze_oracles.py regenerates both).

TEST_SUITE("stattests") {

TEST_CASE("adf statistic and p-value on the random-walk series") {
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  REQUIRE(rw.size() == 200);

  const UnitRootResult c = adf_test(rw, 2, Deterministic::constant);
  CHECK(c.statistic == doctest::Approx(-1.4297899006619108).epsilon(1e-8));
  CHECK(c.pvalue == doctest::Approx(0.5679141066420995).epsilon(1e-6));
  CHECK(c.lags == 2);
  CHECK(!c.reject_at(0.05));

  const UnitRootResult ct = adf_test(rw, 2, Deterministic::constant_trend);
  CHECK(ct.statistic == doctest::Approx(-2.225285649360087).epsilon(1e-8));
  CHECK(ct.pvalue == doctest::Approx(0.47563349154402623).epsilon(1e-6));
}

TEST_CASE("adf automatic lag selection matches the aic scan") {
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  const UnitRootResult r = adf_test_auto(rw, 4, Deterministic::constant);
  CHECK(r.lags == 3);
  CHECK(r.statistic == doctest::Approx(-1.3020945609388273).epsilon(1e-8));
  CHECK(r.pvalue == doctest::Approx(0.6282135055020063).epsilon(1e-6));
}

TEST_CASE("adf rejects on the stationary ar(1) series") {
  const Eigen::VectorXd ar = load_series(test_data_file("series_ar.txt"));
  REQUIRE(ar.size() == 150);
  const UnitRootResult r = adf_test(ar, 1, Deterministic::constant);
  CHECK(r.statistic == doctest::Approx(-5.6325443166412565).epsilon(1e-8));
  CHECK(r.pvalue == doctest::Approx(1.0812269286055574e-06).epsilon(1e-4));
  CHECK(r.reject_at(0.01));
  CHECK(r.reject_at(0.05));
  CHECK(r.reject_at(0.10));
}

TEST_CASE("adf statistic is scale invariant") {
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  const UnitRootResult a = adf_test(rw, 2, Deterministic::constant);
  const UnitRootResult b = adf_test(100.0 * rw, 2, Deterministic::constant);
  CHECK(std::abs(a.statistic - b.statistic) < 1e-9);
}

TEST_CASE("adf critical values bracket the p-value decision") {
  const Eigen::VectorXd ar = load_series(test_data_file("series_ar.txt"));
  const UnitRootResult r = adf_test(ar, 1, Deterministic::constant);
  CHECK(r.cv1 < r.cv5);
  CHECK(r.cv5 < r.cv10);
  CHECK(r.statistic < r.cv1);  // strongly stationary
  // MacKinnon surface is monotone: a more negative tau gives a smaller p.
  CHECK(mackinnon_pvalue(-3.0, Deterministic::constant) <
        mackinnon_pvalue(-2.0, Deterministic::constant));
}

TEST_CASE("adf input validation") {
  Eigen::VectorXd tiny(5);
  tiny << 1, 2, 3, 2, 1;
  CHECK_THROWS_AS(adf_test(tiny, 2, Deterministic::constant), DataError);
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(50, 3.0);
  CHECK_THROWS_AS(adf_test(flat, 1, Deterministic::constant), DataError);
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  CHECK_THROWS_AS(adf_test(rw, -1, Deterministic::constant), ConfigError);
}

TEST_CASE("phillips-perron z-tau on frozen series") {
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  const Eigen::VectorXd ar = load_series(test_data_file("series_ar.txt"));

  const UnitRootResult rc = pp_test(rw, -1, Deterministic::constant);
  CHECK(rc.statistic == doctest::Approx(-1.3548636865556678).epsilon(1e-8));
  CHECK(!rc.reject_at(0.05));

  const UnitRootResult rt = pp_test(rw, -1, Deterministic::constant_trend);
  CHECK(rt.statistic == doctest::Approx(-2.0677744727588063).epsilon(1e-8));

  const UnitRootResult ac = pp_test(ar, -1, Deterministic::constant);
  CHECK(ac.statistic == doctest::Approx(-7.311157594237828).epsilon(1e-8));
  CHECK(ac.reject_at(0.01));

  // Default truncation lag follows the 4*(T/100)^0.25 rule.
  const int expect_q = static_cast<int>(std::floor(4.0 * std::pow(200.0 / 100.0, 0.25)));
  CHECK(rc.lags == expect_q);
  const UnitRootResult explicit_q = pp_test(rw, expect_q, Deterministic::constant);
  CHECK(explicit_q.statistic == rc.statistic);
}

TEST_CASE("trend-stationary series splits the deterministic specifications") {
  Rng rng(123);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) y(i) = 0.1 * i + 0.1 * rng.normal();
  const UnitRootResult c = adf_test(y, 1, Deterministic::constant);
  const UnitRootResult ct = adf_test(y, 1, Deterministic::constant_trend);
  CHECK(c.pvalue > 0.10);    // looks nonstationary without a trend term
  CHECK(ct.pvalue < 0.05);   // trend-stationary once the trend is included
}

TEST_CASE("johansen trace on the cointegrated pair") {
  const Eigen::MatrixXd pair = load_matrix(test_data_file("series_coint2.csv"));
  REQUIRE(pair.rows() == 200);
  REQUIRE(pair.cols() == 2);
  const JohansenResult r = johansen_trace(pair, 1, Deterministic::constant);
  REQUIRE(r.trace_stat.size() == 2);
  CHECK(r.trace_stat[0] == doctest::Approx(86.92782668102257).epsilon(1e-8));
  CHECK(r.trace_stat[1] == doctest::Approx(0.4595865560227051).epsilon(1e-8));
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(0.35384010054991843).epsilon(1e-8));
  CHECK(r.eigenvalues[1] == doctest::Approx(0.00231845245015305).epsilon(1e-6));
  REQUIRE(r.trace_cv.size() == 2);
  CHECK(r.trace_cv[0][0] == doctest::Approx(13.4294).epsilon(1e-6));
  CHECK(r.trace_cv[0][1] == doctest::Approx(15.4943).epsilon(1e-6));
  CHECK(r.trace_cv[0][2] == doctest::Approx(19.9349).epsilon(1e-6));
  CHECK(r.trace_cv[1][0] == doctest::Approx(2.7055).epsilon(1e-6));
  CHECK(r.trace_cv[1][1] == doctest::Approx(3.8415).epsilon(1e-6));
  CHECK(r.trace_cv[1][2] == doctest::Approx(6.6349).epsilon(1e-6));
  CHECK(r.selected_rank(0.95) == 1);  // r=0 rejected, r<=1 not
  CHECK(r.trace_stat[0] > r.trace_stat[1]);
}

TEST_CASE("johansen trace on three independent walks") {
  const Eigen::MatrixXd walks = load_matrix(test_data_file("series_walks3.csv"));
  REQUIRE(walks.rows() == 250);
  REQUIRE(walks.cols() == 3);
  const JohansenResult c1 = johansen_trace(walks, 1, Deterministic::constant);
  REQUIRE(c1.trace_stat.size() == 3);
  CHECK(c1.trace_stat[0] == doctest::Approx(21.164331044248975).epsilon(1e-8));
  CHECK(c1.trace_stat[1] == doctest::Approx(4.302731777802179).epsilon(1e-8));
  CHECK(c1.trace_stat[2] == doctest::Approx(0.08760040213083002).epsilon(1e-6));
  CHECK(c1.selected_rank(0.95) == 0);

  const JohansenResult n2 = johansen_trace(walks, 2, Deterministic::none);
  CHECK(n2.trace_stat[0] == doctest::Approx(24.23577897341319).epsilon(1e-8));
  CHECK(n2.trace_stat[1] == doctest::Approx(4.5460998141286195).epsilon(1e-8));
  CHECK(n2.trace_stat[2] == doctest::Approx(1.1951622295292557).epsilon(1e-7));
}

TEST_CASE("johansen trace is invariant under series reordering") {
  const Eigen::MatrixXd pair = load_matrix(test_data_file("series_coint2.csv"));
  Eigen::MatrixXd swapped(pair.rows(), 2);
  swapped.col(0) = pair.col(1);
  swapped.col(1) = pair.col(0);
  const JohansenResult a = johansen_trace(pair, 1, Deterministic::constant);
  const JohansenResult b = johansen_trace(swapped, 1, Deterministic::constant);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(a.trace_stat[static_cast<std::size_t>(i)] -
                   b.trace_stat[static_cast<std::size_t>(i)]) < 1e-7);
  }
}

TEST_CASE("johansen input validation") {
  const Eigen::MatrixXd pair = load_matrix(test_data_file("series_coint2.csv"));
  CHECK_THROWS_AS(johansen_trace(pair.col(0), 1, Deterministic::constant), DataError);
  CHECK_THROWS_AS(johansen_trace(pair, -1, Deterministic::constant), ConfigError);
  Eigen::MatrixXd collinear(100, 2);
  collinear.col(0) = Eigen::VectorXd::LinSpaced(100, 0, 99);
  collinear.col(1) = 2.0 * collinear.col(0);
  CHECK_THROWS_AS(johansen_trace(collinear, 1, Deterministic::constant), NumericError);
}

TEST_CASE("granger f-test on the planted-causality pair") {
  const Eigen::MatrixXd g = load_matrix(test_data_file("series_granger.csv"));
  REQUIRE(g.rows() == 200);
  const Eigen::VectorXd gx = g.col(0), gy = g.col(1);

  const GrangerResult fwd = granger_test(gx, gy, 2);
  CHECK(fwd.f_stat == doctest::Approx(17.151162075127026).epsilon(1e-8));
  CHECK(fwd.pvalue == doctest::Approx(1.393176848242269e-07).epsilon(1e-5));

  const GrangerResult rev = granger_test(gy, gx, 2);
  CHECK(rev.f_stat == doctest::Approx(1.643596294194331).epsilon(1e-8));
  CHECK(rev.pvalue == doctest::Approx(0.19597733073655324).epsilon(1e-6));
}

TEST_CASE("granger f-statistic is invariant under affine rescaling") {
  const Eigen::MatrixXd g = load_matrix(test_data_file("series_granger.csv"));
  const Eigen::VectorXd gx = g.col(0), gy = g.col(1);
  const GrangerResult base = granger_test(gx, gy, 2);
  const GrangerResult sx = granger_test((3.0 * gx.array() - 7.0).matrix(), gy, 2);
  const GrangerResult sy = granger_test(gx, (0.2 * gy.array() + 11.0).matrix(), 2);
  CHECK(std::abs(base.f_stat - sx.f_stat) < 1e-9);
  CHECK(std::abs(base.f_stat - sy.f_stat) < 1e-9);
}

TEST_CASE("granger input validation") {
  Eigen::VectorXd x(10), y(10);
  x.setLinSpaced(10, 0, 9);
  y = x;
  CHECK_THROWS_AS(granger_test(x, y, 0), ConfigError);
  Eigen::VectorXd shorter(9);
  shorter.setZero();
  CHECK_THROWS_AS(granger_test(x, shorter, 1), DataError);
  Eigen::VectorXd tiny(4);
  tiny << 1, 2, 1, 2;
  CHECK_THROWS_AS(granger_test(tiny, tiny, 2), DataError);
}

TEST_CASE("jarque-bera on frozen samples") {
  const Eigen::VectorXd normal = load_series(test_data_file("series_normal.txt"));
  REQUIRE(normal.size() == 300);
  const JarqueBeraResult n = jarque_bera(normal);
  CHECK(n.statistic == doctest::Approx(1.7564661533442723).epsilon(1e-10));
  CHECK(n.pvalue == doctest::Approx(0.41551644914561636).epsilon(1e-8));
  CHECK(n.skewness == doctest::Approx(-0.18291039629523853).epsilon(1e-10));
  CHECK(n.kurtosis == doctest::Approx(2.918192665512089).epsilon(1e-10));
  CHECK(n.pvalue > 0.05);

  const Eigen::VectorXd expo = load_series(test_data_file("series_expo.txt"));
  const JarqueBeraResult e = jarque_bera(expo);
  CHECK(e.statistic == doctest::Approx(288.9597422284388).epsilon(1e-10));
  CHECK(e.pvalue == doctest::Approx(1.7913862194335312e-63).epsilon(1e-4));
  CHECK(e.skewness == doctest::Approx(1.721752442598692).epsilon(1e-10));
  CHECK(e.kurtosis == doctest::Approx(6.3554513085271935).epsilon(1e-10));
  CHECK(e.pvalue < 0.01);
}

TEST_CASE("jarque-bera two-point sample has the closed form n/6") {
  const int n = 40;
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = (i % 2 == 0) ? -1.0 : 1.0;
  const JarqueBeraResult r = jarque_bera(y);
  // S = 0 and K = 1, so JB = n/6 * (0 + (1-3)^2/4) = n/6.
  CHECK(r.statistic == doctest::Approx(n / 6.0).epsilon(1e-12));
  CHECK(r.skewness == doctest::Approx(0.0));
  CHECK(r.kurtosis == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jarque-bera input validation") {
  Eigen::VectorXd tiny(5);
  tiny << 1, 2, 3, 4, 5;
  CHECK_THROWS_AS(jarque_bera(tiny), DataError);
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(20, 1.0);
  CHECK_THROWS_AS(jarque_bera(flat), DataError);
}

TEST_CASE("deterministic results: identical inputs give bit-identical statistics") {
  const Eigen::VectorXd rw = load_series(test_data_file("series_rw.txt"));
  const UnitRootResult a = adf_test(rw, 2, Deterministic::constant);
  const UnitRootResult b = adf_test(rw, 2, Deterministic::constant);
  CHECK(a.statistic == b.statistic);
  CHECK(a.pvalue == b.pvalue);
  const Eigen::MatrixXd pair = load_matrix(test_data_file("series_coint2.csv"));
  CHECK(johansen_trace(pair, 1, Deterministic::constant).trace_stat[0] ==
        johansen_trace(pair, 1, Deterministic::constant).trace_stat[0]);
}

}  // TEST_SUITE
