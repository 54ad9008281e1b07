#include "gvarkit/rng.hpp"

#include <cmath>
#include <limits>

#include "gvarkit/errors.hpp"

namespace gvarkit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mode of the two-parameter gig density (maximum of sqrt(f)).
double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0)
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

}  // namespace

std::uint64_t Rng::derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a offset basis
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(base ^ h);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

double Rng::exponential(double rate) {
  double u = uniform();
  while (u <= 0.0) u = uniform();
  return -std::log(u) / rate;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw NumericError("gamma draw requires positive shape and rate");
  if (shape < 1.0) {
    // Boost shape by one, then apply the power-of-uniform correction.
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double Rng::gig(double lambda, double chi, double psi) {
  constexpr double kZeroTol = 1e-12;
  if (chi < 0.0 || psi < 0.0) throw NumericError("gig draw requires chi, psi >= 0");
  if (chi <= kZeroTol) {
    if (!(lambda > 0.0)) throw NumericError("gig with chi = 0 requires lambda > 0");
    return gamma(lambda, psi / 2.0);
  }
  if (psi <= kZeroTol) {
    if (!(lambda < 0.0)) throw NumericError("gig with psi = 0 requires lambda < 0");
    return 1.0 / gamma(-lambda, chi / 2.0);
  }
  const double alpha = std::sqrt(chi / psi);
  const double omega = std::sqrt(chi * psi);
  const bool invert = lambda < 0.0;
  const double z = gig_two_param(std::fabs(lambda), omega);
  return invert ? alpha / z : alpha * z;
}

double Rng::gig_two_param(double lambda, double omega) {
  if (lambda > 2.0 || omega > 3.0) return gig_rou_shift(lambda, omega);
  if (lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2) return gig_rou_noshift(lambda, omega);
  return gig_hat_concave(lambda, omega);
}

// Ratio-of-uniforms without mode shift; valid when the density is not too
// peaked (moderate lambda and omega).
double Rng::gig_rou_noshift(double lambda, double omega) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  // Maximum of x*sqrt(f(x)) solves s*x^2 - (lambda+1)/2*x... quadratic root:
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * uniform();
    double v = uniform();
    while (v <= 0.0) v = uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Ratio-of-uniforms shifted to the mode; cubic roots give the bounding
// rectangle. Used for peaked densities (large lambda or omega).
double Rng::gig_rou_shift(double lambda, double omega) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * M_PI) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);
  for (;;) {
    const double u = uminus + uniform() * (uplus - uminus);
    double v = uniform();
    while (v <= 0.0) v = uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Rejection from a three-piece hat (constant around the mode, power in the
// middle, exponential tail). Valid for 0 <= lambda < 1 and small omega where
// the ratio-of-uniforms rectangles degenerate.
double Rng::gig_hat_concave(double lambda, double omega) {
  const double xm = gig_mode(lambda, omega);
  double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  double a0 = k0 * x0;
  double k1 = 0.0, a1 = 0.0;
  if (x0 >= 2.0 / omega) {
    x0 = 2.0 / omega;
    a0 = k0 * x0;
  } else {
    k1 = std::exp(-omega);
    a1 = (lambda == 0.0) ? k1 * std::log(2.0 / (omega * omega))
                         : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
  }
  const double k2 = std::pow(2.0 / omega, lambda - 1.0);
  const double a2 = 2.0 * k2 * std::exp(-1.0) / omega;
  const double atot = a0 + a1 + a2;
  for (;;) {
    double v = atot * uniform();
    double x, hx;
    if (v <= a0) {
      x = x0 * v / a0;
      hx = k0;
    } else if ((v -= a0) <= a1) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + lambda / k1 * v, 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= a1;
      const double lo = std::max(x0, 2.0 / omega);
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    double u = uniform() * hx;
    while (u <= 0.0) u = uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace gvarkit
