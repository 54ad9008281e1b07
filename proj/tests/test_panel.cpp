#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gvarkit/errors.hpp"
#include "gvarkit/panel.hpp"
#include "helpers.hpp"

using namespace gvarkit;

namespace {

Panel panel_from_text(const std::string& csv, const IngestOptions& opts = {}) {
  std::istringstream in(csv);
  return Panel::from_long_csv_stream(in, opts, "<test>");
}

const char* kSmallPanel =
    "country,variable,date,value\n"
    "A,P,2001,1\n"
    "A,P,2002,2\n"
    "A,P,2003,4\n"
    "A,Q,2001,10\n"
    "A,Q,2002,20\n"
    "A,Q,2003,30\n"
    "B,P,2001,5\n"
    "B,P,2002,6\n"
    "B,P,2003,7\n"
    "B,Q,2001,-1\n"
    "B,Q,2002,-2\n"
    "B,Q,2003,-3\n";

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("Period parses years and quarters") {
  const Period y = Period::parse("2001");
  CHECK(y.year == 2001);
  CHECK(y.quarter == 0);
  CHECK(!y.is_quarterly());
  CHECK(y.str() == "2001");

  const Period q = Period::parse("1995Q3");
  CHECK(q.year == 1995);
  CHECK(q.quarter == 3);
  CHECK(q.is_quarterly());
  CHECK(q.str() == "1995Q3");

  CHECK(Period::parse("1995Q4").ordinal() + 1 == Period::parse("1996Q1").ordinal());
  CHECK(Period::parse("2001") < Period::parse("2002"));
  CHECK(Period::parse("2001Q1") < Period::parse("2001Q2"));

  CHECK_THROWS_AS(Period::parse("20x1"), DataError);
  CHECK_THROWS_AS(Period::parse("2001Q5"), DataError);
  CHECK_THROWS_AS(Period::parse("2001Q0"), DataError);
  CHECK_THROWS_AS(Period::parse(""), DataError);
}

TEST_CASE("ingest orders series and values correctly") {
  const Panel p = panel_from_text(kSmallPanel);
  CHECK(p.n_countries() == 2);
  CHECK(p.n_variables() == 2);
  CHECK(p.n_periods() == 3);
  CHECK(p.series("A", "P")(2) == 4.0);
  CHECK(p.series("B", "Q")(0) == -1.0);
  const Eigen::MatrixXd block = p.country_block(p.country_index("B"));
  CHECK(block.rows() == 3);
  CHECK(block.cols() == 2);
  CHECK(block(1, 0) == 6.0);   // B.P 2002
  CHECK(block(2, 1) == -3.0);  // B.Q 2003
  CHECK_THROWS_AS(p.country_index("Z"), DataError);
  CHECK_THROWS_AS(p.variable_index("Z"), DataError);
}

TEST_CASE("csv round trip is bit-identical") {
  const Panel p = panel_from_text(kSmallPanel);
  const std::string once = p.to_long_csv();
  const Panel p2 = panel_from_text(once);
  CHECK(p2.to_long_csv() == once);
}

TEST_CASE("header and field errors are data errors") {
  CHECK_THROWS_AS(panel_from_text("country,var,date,value\nA,P,2001,1\n"), DataError);
  CHECK_THROWS_AS(panel_from_text("country,variable,date,value\n"), DataError);
  CHECK_THROWS_AS(panel_from_text("country,variable,date,value\nA,P,2001\n"), DataError);
  CHECK_THROWS_AS(panel_from_text("country,variable,date,value\nA,P,2001,zzz\n"), DataError);
  CHECK_THROWS_AS(
      panel_from_text("country,variable,date,value\nA,P,2001,1\nA,P,2001,2\n"),
      DataError);  // duplicate
  CHECK_THROWS_AS(
      panel_from_text("country,variable,date,value\nA,P,2001,1\nA,P,2002Q1,2\n"),
      DataError);  // mixed frequency
}

TEST_CASE("interior gaps interpolate only when enabled") {
  const std::string with_gap =
      "country,variable,date,value\n"
      "A,P,2001,1\n"
      "A,P,2003,3\n"
      "A,Q,2001,1\n"
      "A,Q,2002,1\n"
      "A,Q,2003,1\n";
  CHECK_THROWS_AS(panel_from_text(with_gap), DataError);

  IngestOptions opts;
  opts.interpolate_interior_gaps = true;
  const Panel p = panel_from_text(with_gap, opts);
  CHECK(p.series("A", "P")(1) == doctest::Approx(2.0));  // linear fill
  CHECK(p.transform_record(0, 0).had_gaps);
  CHECK(!p.transform_record(0, 1).had_gaps);

  // Leading/trailing gaps always reject.
  const std::string leading =
      "country,variable,date,value\n"
      "A,P,2002,2\n"
      "A,P,2003,3\n"
      "A,Q,2001,1\n"
      "A,Q,2002,1\n"
      "A,Q,2003,1\n";
  CHECK_THROWS_AS(panel_from_text(leading, opts), DataError);
}

TEST_CASE("panel constructor validates dimensions") {
  CHECK_THROWS_AS(Panel({}, {"P"}, {Period{2001, 0}}, {}), DataError);
  CHECK_THROWS_AS(Panel({"A"}, {"P"}, {Period{2001, 0}}, {1.0, 2.0}), DataError);
  CHECK_THROWS_AS(
      Panel({"A"}, {"P"}, {Period{2002, 0}, Period{2001, 0}}, {1.0, 2.0}), DataError);
}

TEST_CASE("log and difference transforms and their inversion") {
  const std::string csv =
      "country,variable,date,value\n"
      "A,P,2001,100\n"
      "A,P,2002,110\n"
      "A,P,2003,121\n"
      "A,P,2004,133.1\n"
      "A,Q,2001,5\n"
      "A,Q,2002,7\n"
      "A,Q,2003,6\n"
      "A,Q,2004,8\n";
  const Panel raw = panel_from_text(csv);
  const Panel t = raw.transformed({{"P", true, 1}});
  CHECK(t.n_periods() == 3);  // shortened by max diff order
  const Eigen::VectorXd dlp = t.series("A", "P");
  for (int i = 0; i < 3; ++i) {
    CHECK(dlp(i) == doctest::Approx(std::log(1.1)).epsilon(1e-12));
  }
  // Untransformed series are trimmed to stay aligned.
  CHECK(t.series("A", "Q")(0) == 7.0);

  const auto& rec = t.transform_record(0, 0);
  CHECK(rec.log);
  CHECK(rec.diff == 1);
  REQUIRE(rec.initial_values.size() == 1);
  CHECK(rec.initial_values[0] == doctest::Approx(std::log(100.0)).epsilon(1e-14));

  std::vector<double> tv(dlp.data(), dlp.data() + dlp.size());
  const std::vector<double> back = invert_transform(rec, tv);
  REQUIRE(back.size() == 4);
  CHECK(back[0] == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(back[3] == doctest::Approx(133.1).epsilon(1e-9));

  CHECK_THROWS_AS(raw.transformed({{"P", false, -1}}), ConfigError);
  const std::string neg =
      "country,variable,date,value\n"
      "A,P,2001,-1\n"
      "A,P,2002,2\n";
  CHECK_THROWS_AS(panel_from_text(neg).transformed({{"P", true, 0}}), DataError);
}

TEST_CASE("second difference keeps two initial values") {
  const std::string csv =
      "country,variable,date,value\n"
      "A,P,2001,1\n"
      "A,P,2002,4\n"
      "A,P,2003,9\n"
      "A,P,2004,16\n"
      "A,P,2005,25\n";
  const Panel t = panel_from_text(csv).transformed({{"P", false, 2}});
  CHECK(t.n_periods() == 3);
  const Eigen::VectorXd dd = t.series("A", "P");
  for (int i = 0; i < 3; ++i) CHECK(dd(i) == doctest::Approx(2.0));
  const auto& rec = t.transform_record(0, 0);
  REQUIRE(rec.initial_values.size() == 2);
  std::vector<double> tv(dd.data(), dd.data() + dd.size());
  const auto back = invert_transform(rec, tv);
  REQUIRE(back.size() == 5);
  CHECK(back[4] == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("row-stochastic weights: rows sum to one and renormalization is idempotent") {
  Eigen::MatrixXd flows(3, 3);
  flows << 0, 2, 6, 3, 0, 1, 5, 5, 0;
  const WeightMatrix w = build_weights(flows, WeightMode::row_stochastic, {"A", "B", "C"});
  CHECK(w.mode == WeightMode::row_stochastic);
  for (int i = 0; i < 3; ++i) {
    CHECK(w.w(i, i) == 0.0);
    CHECK(std::abs(w.w.row(i).sum() - 1.0) < 1e-12);
  }
  CHECK(w.w(0, 1) == doctest::Approx(0.25));
  CHECK(w.w(0, 2) == doctest::Approx(0.75));

  const WeightMatrix again = build_weights(w.w, WeightMode::row_stochastic, {"A", "B", "C"});
  CHECK((again.w - w.w).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(w.index_of("C") == 2);
  CHECK_THROWS_AS(w.index_of("Z"), DataError);
}

TEST_CASE("symmetric two-country flows become the exchange matrix") {
  Eigen::MatrixXd flows(2, 2);
  flows << 0, 5, 5, 0;
  const WeightMatrix w = build_weights(flows, WeightMode::row_stochastic, {"A", "B"});
  CHECK(w.w(0, 1) == 1.0);
  CHECK(w.w(1, 0) == 1.0);
  CHECK(w.w(0, 0) == 0.0);
  CHECK(w.w(1, 1) == 0.0);
}

TEST_CASE("max-normalized weights divide by the largest off-diagonal flow") {
  Eigen::MatrixXd flows(3, 3);
  flows << 9, 2, 8, 4, 0, 1, 5, 5, 0;  // diagonal 9 must be ignored
  const WeightMatrix w = build_weights(flows, WeightMode::max_normalized, {"A", "B", "C"});
  CHECK(w.w(0, 0) == 0.0);  // diagonal forced to zero
  CHECK(w.w(0, 2) == doctest::Approx(1.0));
  CHECK(w.w(1, 0) == doctest::Approx(0.5));
  CHECK(w.w(2, 1) == doctest::Approx(5.0 / 8.0));
  const WeightMatrix again = build_weights(w.w, WeightMode::max_normalized, {"A", "B", "C"});
  CHECK((again.w - w.w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("weight normalization failures") {
  Eigen::MatrixXd flows = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(build_weights(flows, WeightMode::row_stochastic, {"A", "B"}), DataError);
  CHECK_THROWS_AS(build_weights(flows, WeightMode::max_normalized, {"A", "B"}), DataError);
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, 1, 0;
  CHECK_THROWS_AS(build_weights(neg, WeightMode::row_stochastic, {"A", "B"}), DataError);
  Eigen::MatrixXd rect(2, 3);
  rect.setOnes();
  CHECK_THROWS_AS(build_weights(rect, WeightMode::row_stochastic, {"A", "B"}), DataError);
  Eigen::MatrixXd one(1, 1);
  one.setZero();
  CHECK_THROWS_AS(build_weights(one, WeightMode::row_stochastic, {"A"}), DataError);
}

TEST_CASE("flows csv round trip") {
  testutil::TempDir tmp("flows");
  Eigen::MatrixXd flows(2, 2);
  flows << 0, 2.5, 7, 0;
  const std::string path = tmp.file("flows.csv");
  testutil::write_file(path, flows_to_csv({"A", "B"}, flows));
  const FlowTable ft = load_flows_csv(path);
  REQUIRE(ft.countries == std::vector<std::string>{"A", "B"});
  CHECK((ft.flows - flows).cwiseAbs().maxCoeff() == 0.0);

  testutil::write_file(tmp.file("bad.csv"), "x,A,B\nB,0,1\nA,1,0\n");
  CHECK_THROWS_AS(load_flows_csv(tmp.file("bad.csv")), DataError);  // row order mismatch
}

TEST_CASE("repository fixture panel loads balanced") {
  const Panel p = Panel::from_long_csv(testutil::repo_data_file("panel.csv"));
  CHECK(p.n_countries() == 5);
  CHECK(p.n_variables() == 3);
  CHECK(p.n_periods() == 60);
  CHECK(p.time_index().front().str() == "1995Q1");
  CHECK(p.time_index().back().str() == "2009Q4");
}

}  // TEST_SUITE
