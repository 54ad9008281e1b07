#ifndef GVARKIT_RNG_HPP_
#define GVARKIT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace gvarkit {

// Deterministic random source. All distributions are implemented on top of
// the raw 64-bit stream so that a (seed, call sequence) pair reproduces the
// exact same doubles regardless of standard-library internals. Substreams
// are derived by hashing a label into the seed, so adding a consumer never
// perturbs another consumer's stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Derived seed for a named substream (FNV-1a over the label, mixed with
  // the base seed via splitmix64 finalization).
  static std::uint64_t derive_seed(std::uint64_t base, std::string_view label);
  static Rng substream(std::uint64_t base, std::string_view label) {
    return Rng(derive_seed(base, label));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal (Box-Muller, pair cached).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, rate): mean = shape/rate. Marsaglia-Tsang squeeze.
  double gamma(double shape, double rate);

  // Inverse gamma with shape a and rate b: X = 1/Gamma(a, b).
  double inv_gamma(double shape, double rate) { return 1.0 / gamma(shape, rate); }

  double exponential(double rate) ;

  // Generalized inverse Gaussian with density
  //   f(x) ~ x^(lambda-1) exp(-(chi/x + psi*x)/2),  x > 0.
  // chi = 0 requires lambda > 0 (plain gamma); psi = 0 requires lambda < 0
  // (inverse gamma). Implementation follows Hoermann & Leydold (2014).
  double gig(double lambda, double chi, double psi);

 private:
  double gig_two_param(double lambda, double omega);  // chi = psi = omega case
  double gig_rou_shift(double lambda, double omega);
  double gig_rou_noshift(double lambda, double omega);
  double gig_hat_concave(double lambda, double omega);

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gvarkit

#endif  // GVARKIT_RNG_HPP_
