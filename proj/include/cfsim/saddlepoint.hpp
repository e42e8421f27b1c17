/**
 * @file saddlepoint.hpp
 * @brief Saddlepoint evaluation of the RCUs tail
 * Pr{ sum_{n=1}^{n_d} i_s <= ln((2^b - 1) / r) } and optimization of s.
 *
 * With kappa(zeta) = ln E[exp(zeta i_s)] and R = ln(2^b - 1) / n_d:
 *  - R >= kappa'(0): the rate exceeds the GMI and the result is 1.
 *  - kappa'(-1) <= R < kappa'(0): solve kappa'(zeta0) = R, u = -zeta0, and
 *    eps = exp(n [kappa(zeta0) - zeta0 R]) (Psi(u) + Psi(1 - u)),
 *    Psi(u) = exp(n u^2 kappa''/2) Q(u sqrt(n kappa'')).
 *  - R < kappa'(-1): eps = exp(n [kappa(-1) + R]) (T1 + T2) with the
 *    Gaussian-corrected terms evaluated at zeta = -1.
 * Everything is computed in the log domain.
 */
#pragma once

#include <cstddef>
#include <cstdint>

#include "cfsim/information_density.hpp"

namespace cfsim {

enum class SaddlepointRegime {
  kNoCompetitors,  ///< b = 0
  kAboveMean,      ///< R >= E[i_s]
  kSaddle,
  kBelowCritical,
  kMonteCarlo,     ///< root finding failed; oracle estimate used
};

struct SaddlepointResult {
  double eps = 1.0;
  double log_eps = 0.0;
  double zeta = 0.0;  ///< saddlepoint (<= 0)
  SaddlepointRegime regime = SaddlepointRegime::kAboveMean;
  bool fell_back = false;
};

/// exp(x^2) erfc(x) for x >= 0.
double erfcx(double x);

/// Generic evaluation from any CGF; returns fell_back = true (and eps = NaN)
/// when the root cannot be bracketed or the CGF is not finite.
SaddlepointResult saddlepoint_tail(const Cgf& cgf, double rate, int n);

enum class CgfMethod { kClosedForm, kQuadrature };

/**
 * Conditional error probability of the link at its current s, clipped to
 * [0, 1]. Falls back to rcus_mc_oracle(link, fallback_trials, fallback_seed)
 * when root finding fails.
 */
SaddlepointResult saddlepoint_eps(const UrllcLink& link,
                                  CgfMethod method = CgfMethod::kClosedForm,
                                  std::uint64_t fallback_seed = 0,
                                  std::size_t fallback_trials = 100000);

/**
 * s maximizing the saddlepoint exponent -ln(eps) / n_d over
 * [1e-3 s0, 1e3 s0], s0 = 1 / (sigma^2 + |g_hat|^2): a log-spaced grid
 * followed by golden-section refinement. Never worse than s0; returns s0 when
 * the objective is flat.
 */
double optimize_s(const UrllcLink& link);

/// optimize_s then saddlepoint_eps.
SaddlepointResult link_error_probability(UrllcLink link);

}  // namespace cfsim
