/**
 * @file rcus_oracle.hpp
 * @brief Direct Monte-Carlo estimate of the RCUs probability, used to
 * cross-check the saddlepoint evaluation.
 */
#pragma once

#include <cstddef>
#include <cstdint>

#include "cfsim/information_density.hpp"

namespace cfsim {

struct OracleEstimate {
  double eps = 0.0;
  double lower = 0.0;  ///< Wilson 95% interval
  double upper = 0.0;
  std::size_t trials = 0;
  std::size_t errors = 0;
};

/// Wilson score interval at z = 1.96.
void wilson_interval(std::size_t errors, std::size_t trials, double& lower,
                     double& upper);

/**
 * Simulates sum_{n=1}^{n_d} i_s(q[n], g q[n] + z[n]) <= ln((2^b - 1) / r)
 * with q ~ CN(0,1), z ~ CN(0, sigma^2), r ~ U(0,1).
 */
OracleEstimate rcus_mc_oracle(const UrllcLink& link, std::size_t n_trials,
                              std::uint64_t seed);

}  // namespace cfsim
