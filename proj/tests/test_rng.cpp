#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gvarkit/rng.hpp"

using gvarkit::Rng;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <typename Draw>
Moments sample_moments(int n, Draw draw) {
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  return {mean, sumsq / n - mean * mean};
}

// GIG(lambda, chi, psi) moments: E[X^r] = (chi/psi)^(r/2) K_{lambda+r}(w) / K_lambda(w),
// w = sqrt(chi * psi).
Moments gig_moments(double lambda, double chi, double psi) {
  const double w = std::sqrt(chi * psi);
  const double k0 = boost::math::cyl_bessel_k(lambda, w);
  const double k1 = boost::math::cyl_bessel_k(lambda + 1.0, w);
  const double k2 = boost::math::cyl_bessel_k(lambda + 2.0, w);
  const double s = std::sqrt(chi / psi);
  const double m1 = s * k1 / k0;
  const double m2 = s * s * k2 / k0;
  return {m1, m2 - m1 * m1};
}

void check_mean(const Moments& sample, const Moments& expect, int n) {
  const double se = std::sqrt(expect.var / n);
  INFO("sample mean ", sample.mean, " expected ", expect.mean, " se ", se);
  CHECK(std::abs(sample.mean - expect.mean) < 5.0 * se);
}

}  // namespace

TEST_SUITE("rng") {

TEST_CASE("identical seeds reproduce identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(42), d(42);
  for (int i = 0; i < 200; ++i) {
    CHECK(c.uniform() == d.uniform());
    CHECK(c.normal() == d.normal());
    CHECK(c.gamma(2.0, 1.0) == d.gamma(2.0, 1.0));
    CHECK(c.gig(0.5, 1.0, 1.0) == d.gig(0.5, 1.0, 1.0));
  }
}

TEST_CASE("derived substreams differ by label and from the base") {
  const std::uint64_t base = 42;
  const std::uint64_t sa = Rng::derive_seed(base, "a");
  const std::uint64_t sb = Rng::derive_seed(base, "b");
  CHECK(sa != sb);
  CHECK(sa != base);
  CHECK(Rng::derive_seed(base, "a") == sa);  // stable
  CHECK(Rng::derive_seed(base + 1, "a") != sa);
  CHECK(Rng::derive_seed(base, "bgvar/China") != Rng::derive_seed(base, "bgvar/India"));
}

TEST_CASE("uniform stays in [0,1) with mean one half") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const int n = 200000;
  const auto m = sample_moments(n, [&] { return rng.normal(); });
  check_mean(m, {0.0, 1.0}, n);
  CHECK(std::abs(m.var - 1.0) < 0.03);
}

TEST_CASE("gamma moments: mean shape/rate") {
  Rng rng(13);
  const int n = 200000;
  // Gamma(shape a, rate b): mean a/b, var a/b^2.
  auto m = sample_moments(n, [&] { return rng.gamma(3.0, 2.0); });
  check_mean(m, {1.5, 0.75}, n);
  m = sample_moments(n, [&] { return rng.gamma(0.4, 1.0); });  // shape < 1 branch
  check_mean(m, {0.4, 0.4}, n);
}

TEST_CASE("exponential moments") {
  Rng rng(17);
  const int n = 200000;
  const auto m = sample_moments(n, [&] { return rng.exponential(2.0); });
  check_mean(m, {0.5, 0.25}, n);
}

TEST_CASE("inv_gamma mean rate/(shape-1)") {
  Rng rng(19);
  const int n = 200000;
  // InvGamma(shape a, rate b): mean b/(a-1), var b^2/((a-1)^2 (a-2)).
  const auto m = sample_moments(n, [&] { return rng.inv_gamma(4.0, 3.0); });
  check_mean(m, {1.0, 0.5}, n);
}

TEST_CASE("gig moments match Bessel-function formulas") {
  const int n = 200000;
  struct Case {
    double lambda, chi, psi;
  };
  const Case cases[] = {
      {0.1, 2.0, 3.0},    // rou-shift region
      {-0.5, 1.0, 2.0},   // negative order
      {2.5, 0.5, 1.5},    // lambda > 1
      {1.0, 4.0, 4.0},    // symmetric chi = psi
      {0.3, 0.01, 0.01},  // tiny omega, hat-concave branch
  };
  int seed = 100;
  for (const auto& c : cases) {
    CAPTURE(c.lambda);
    CAPTURE(c.chi);
    CAPTURE(c.psi);
    Rng rng(seed++);
    const auto expect = gig_moments(c.lambda, c.chi, c.psi);
    const auto m = sample_moments(n, [&] { return rng.gig(c.lambda, c.chi, c.psi); });
    check_mean(m, expect, n);
  }
}

TEST_CASE("gig gamma limit chi=0") {
  Rng rng(23);
  const int n = 200000;
  // GIG(lambda, 0, psi) = Gamma(shape lambda, rate psi/2): mean 2*lambda/psi.
  const auto m = sample_moments(n, [&] { return rng.gig(2.0, 0.0, 3.0); });
  check_mean(m, {4.0 / 3.0, 8.0 / 9.0}, n);
}

TEST_CASE("gig inverse-gamma limit psi=0") {
  Rng rng(29);
  const int n = 200000;
  // GIG(lambda, chi, 0) = InvGamma(shape -lambda, rate chi/2):
  // mean (chi/2)/(-lambda-1), var mean^2/(-lambda-2).
  const double mean = (3.0 / 2.0) / (4.0 - 1.0);
  const auto m = sample_moments(n, [&] { return rng.gig(-4.0, 3.0, 0.0); });
  check_mean(m, {mean, mean * mean / 2.0}, n);
}

TEST_CASE("gig draws are strictly positive") {
  Rng rng(31);
  for (int i = 0; i < 5000; ++i) {
    CHECK(rng.gig(0.6, 1e-6, 2.0) > 0.0);
  }
}

}  // TEST_SUITE
