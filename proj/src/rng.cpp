#include "cfsim/rng.hpp"

#include <cmath>

namespace cfsim {

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

ComplexNormal::ComplexNormal(double variance)
    : normal_(0.0, std::sqrt(variance / 2.0)) {}

std::complex<double> ComplexNormal::operator()(Rng& rng) {
  const double re = normal_(rng);
  const double im = normal_(rng);
  return {re, im};
}

}  // namespace cfsim
