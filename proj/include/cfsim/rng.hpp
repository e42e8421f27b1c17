/**
 * @file rng.hpp
 * @brief Seed lineage for the simulator. Every random draw comes from a
 * stream keyed by (master seed, purpose, drop, block, slot), so any single
 * drop can be regenerated in isolation and worker count never changes
 * results.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace cfsim {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint64_t {
  kDrop = 1,
  kPositions,
  kServiceClass,
  kShadowing,
  kAngles,
  kChannel,
  kPilotNoise,
  kNormalization,
  kActivation,
  kOracle,
  kTest,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless counter-to-seed map. Distinct tuples give statistically
/// independent seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                    std::uint64_t drop = 0,
                                    std::uint64_t block = 0,
                                    std::uint64_t slot = 0) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ drop);
  h = mix64(h ^ block);
  h = mix64(h ^ slot);
  return h;
}

/// Sub-stream of an already derived seed, for modules that receive a single
/// seed but need several independent draws.
constexpr std::uint64_t subseed(std::uint64_t seed, StreamPurpose purpose) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(purpose) + 0x51ed27ULL));
}

Rng make_rng(std::uint64_t seed);

/// Draws CN(0, variance).
class ComplexNormal {
 public:
  explicit ComplexNormal(double variance = 1.0);
  std::complex<double> operator()(Rng& rng);

 private:
  boost::random::normal_distribution<double> normal_;  // ziggurat
};

}  // namespace cfsim
