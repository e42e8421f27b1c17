#include "cfsim/rcus_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cfsim/rng.hpp"

namespace cfsim {

void wilson_interval(std::size_t errors, std::size_t trials, double& lower,
                     double& upper) {
  if (trials == 0) {
    lower = 0.0;
    upper = 1.0;
    return;
  }
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = errors / n;
  const double z2n = z * z / n;
  const double center = (p + 0.5 * z2n) / (1.0 + z2n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n) / (1.0 + z2n);
  lower = errors == 0 ? 0.0 : std::max(0.0, center - half);
  upper = errors == trials ? 1.0 : std::min(1.0, center + half);
}

OracleEstimate rcus_mc_oracle(const UrllcLink& link, std::size_t n_trials,
                              std::uint64_t seed) {
  OracleEstimate est;
  est.trials = n_trials;
  const double log_m1 = log_competing_codewords(link.b_bits);
  if (std::isfinite(log_m1)) {
    Rng rng = make_rng(seed);
    ComplexNormal symbol(1.0);
    ComplexNormal noise(link.sigma2_eff);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
      double sum = 0.0;
      for (int n = 0; n < link.n_d; ++n) {
        const std::complex<double> q = symbol(rng);
        const std::complex<double> y = link.g_eff * q + noise(rng);
        sum += gid(q, y, link.g_hat, link.s);
      }
      // r is drawn from (0, 1]: 1 - U with U in [0, 1).
      const double r = 1.0 - unif(rng);
      if (sum <= log_m1 - std::log(r)) ++est.errors;
    }
  }
  est.eps = n_trials ? static_cast<double>(est.errors) / n_trials : 0.0;
  wilson_interval(est.errors, n_trials, est.lower, est.upper);
  return est;
}

}  // namespace cfsim
