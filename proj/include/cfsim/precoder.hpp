/**
 * @file precoder.hpp
 * @brief Local MR and LP-MMSE downlink precoders with E{||w||^2} = 1.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cfsim/channel.hpp"
#include "cfsim/scenario.hpp"

namespace cfsim {

enum class PrecoderScheme { kMr, kLpMmse };

const char* to_string(PrecoderScheme scheme);
/// Accepts "MR" and "LP-MMSE". Throws std::invalid_argument otherwise.
PrecoderScheme parse_precoder(std::string_view name);

/**
 * Precoding vectors for one coherence block. Entries of unserved pairs are
 * empty; a served pair whose estimate is exactly zero gets a zero vector,
 * which radiates nothing.
 */
struct PrecoderSet {
  PrecoderScheme scheme = PrecoderScheme::kMr;
  int num_aps = 0;
  std::vector<Eigen::VectorXcd> w;  ///< [k * L + l]
  int degenerate = 0;               ///< zero-norm estimates seen

  const Eigen::VectorXcd& at(int k, int l) const {
    return w[static_cast<std::size_t>(k) * num_aps + l];
  }
};

PrecoderSet mr_precoder(const ChannelBlock& block,
                        const NetworkScenario& scenario);

/// p_k (sum_{i in U_j} p_i (h_ij h_ij^H + C_ij) + sigma_ul^2 I)^-1 h_kj.
PrecoderSet lpmmse_unnormalized(const ChannelBlock& block,
                                const NetworkScenario& scenario);

/// Divides the unnormalized LP-MMSE vectors by sqrt(norm_const(k, l)).
PrecoderSet lpmmse_precoder(const ChannelBlock& block,
                            const NetworkScenario& scenario,
                            const Eigen::MatrixXd& norm_const);

/**
 * Statistics gathered from dedicated channel blocks that never enter the
 * performance evaluation: the LP-MMSE normalization E{||w_bar||^2} and the
 * mean precoded gain E{h_kl^H w_kl} that UEs use as their channel knowledge.
 */
struct NormalizationEnsemble {
  PrecoderScheme scheme = PrecoderScheme::kMr;
  int blocks = 0;
  Eigen::MatrixXd norm_const;   ///< K x L; 1 for MR, 0 where unserved
  Eigen::MatrixXcd mean_gain;   ///< K x L, E{h_kl^H w_kl}
};

/// Block b of the ensemble uses derive_seed(seed, kNormalization, 0, b).
NormalizationEnsemble normalization_ensemble(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> stats, PrecoderScheme scheme,
    int num_blocks, std::uint64_t seed);

/// One ensemble per scheme, all drawn from the same blocks.
std::vector<NormalizationEnsemble> normalization_ensembles(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> stats,
    std::span<const PrecoderScheme> schemes, int num_blocks,
    std::uint64_t seed);

PrecoderSet compute_precoders(const ChannelBlock& block,
                              const NetworkScenario& scenario,
                              const NormalizationEnsemble& ensemble);

}  // namespace cfsim
