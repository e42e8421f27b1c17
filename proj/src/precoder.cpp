#include "cfsim/precoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cfsim/rng.hpp"

namespace cfsim {

const char* to_string(PrecoderScheme scheme) {
  return scheme == PrecoderScheme::kMr ? "MR" : "LP-MMSE";
}

PrecoderScheme parse_precoder(std::string_view name) {
  if (name == "MR") return PrecoderScheme::kMr;
  if (name == "LP-MMSE") return PrecoderScheme::kLpMmse;
  throw std::invalid_argument("unknown precoder '" + std::string(name) + "'");
}

PrecoderSet mr_precoder(const ChannelBlock& block,
                        const NetworkScenario& scenario) {
  const int L = scenario.num_aps();
  PrecoderSet set;
  set.scheme = PrecoderScheme::kMr;
  set.num_aps = L;
  set.w.resize(block.h_hat.size());
  for (int l = 0; l < L; ++l) {
    for (int k : scenario.served_ues[l]) {
      const Eigen::VectorXcd& est = block.estimate(k, l);
      const double norm = est.norm();
      auto& w = set.w[static_cast<std::size_t>(k) * L + l];
      if (norm > 0.0) {
        w = est / norm;
      } else {
        w = Eigen::VectorXcd::Zero(est.size());
        ++set.degenerate;
      }
    }
  }
  return set;
}

PrecoderSet lpmmse_unnormalized(const ChannelBlock& block,
                                const NetworkScenario& scenario) {
  const int L = scenario.num_aps();
  const int M = scenario.antennas();
  const auto& ul = block.stats->uplink;
  PrecoderSet set;
  set.scheme = PrecoderScheme::kLpMmse;
  set.num_aps = L;
  set.w.resize(block.h_hat.size());

  for (int l = 0; l < L; ++l) {
    const auto& ues = scenario.served_ues[l];
    if (ues.empty()) continue;
    Eigen::MatrixXcd Z = block.stats->lpmmse_base[l];
    Eigen::MatrixXcd H(M, static_cast<Eigen::Index>(ues.size()));
    Eigen::MatrixXcd Hp(M, static_cast<Eigen::Index>(ues.size()));
    for (std::size_t n = 0; n < ues.size(); ++n) {
      const int i = ues[n];
      const auto col = static_cast<Eigen::Index>(n);
      H.col(col) = block.estimate(i, l);
      Hp.col(col) = std::sqrt(ul.pilot_power_w[i]) * H.col(col);
    }
    Z.noalias() += Hp * Hp.adjoint();
    const Eigen::MatrixXcd X = Z.llt().solve(H);
    for (std::size_t n = 0; n < ues.size(); ++n) {
      const int k = ues[n];
      set.w[static_cast<std::size_t>(k) * L + l] =
          ul.pilot_power_w[k] * X.col(static_cast<Eigen::Index>(n));
    }
  }
  return set;
}

PrecoderSet lpmmse_precoder(const ChannelBlock& block,
                            const NetworkScenario& scenario,
                            const Eigen::MatrixXd& norm_const) {
  PrecoderSet set = lpmmse_unnormalized(block, scenario);
  const int L = scenario.num_aps();
  for (int l = 0; l < L; ++l) {
    for (int k : scenario.served_ues[l]) {
      const double c = norm_const(k, l);
      auto& w = set.w[static_cast<std::size_t>(k) * L + l];
      if (c > 0.0) {
        w /= std::sqrt(c);
      } else {
        w.setZero();
        ++set.degenerate;
      }
    }
  }
  return set;
}

std::vector<NormalizationEnsemble> normalization_ensembles(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> stats,
    std::span<const PrecoderScheme> schemes, int num_blocks,
    std::uint64_t seed) {
  if (num_blocks < 1)
    throw std::invalid_argument("normalization ensemble needs >= 1 block");
  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const std::size_t S = schemes.size();

  std::vector<Eigen::MatrixXd> power_sum(S, Eigen::MatrixXd::Zero(K, L));
  std::vector<Eigen::MatrixXcd> gain_sum(S, Eigen::MatrixXcd::Zero(K, L));
  for (int b = 0; b < num_blocks; ++b) {
    const ChannelBlock block = draw_block(
        scenario, stats, derive_seed(seed, StreamPurpose::kNormalization, 0, b));
    for (std::size_t s = 0; s < S; ++s) {
      const PrecoderSet set = schemes[s] == PrecoderScheme::kMr
                                  ? mr_precoder(block, scenario)
                                  : lpmmse_unnormalized(block, scenario);
      for (int l = 0; l < L; ++l) {
        for (int k : scenario.served_ues[l]) {
          const Eigen::VectorXcd& w = set.at(k, l);
          power_sum[s](k, l) += w.squaredNorm();
          gain_sum[s](k, l) += block.channel(k, l).dot(w);
        }
      }
    }
  }

  std::vector<NormalizationEnsemble> out(S);
  for (std::size_t s = 0; s < S; ++s) {
    NormalizationEnsemble& ens = out[s];
    ens.scheme = schemes[s];
    ens.blocks = num_blocks;
    ens.norm_const = power_sum[s] / num_blocks;
    ens.mean_gain = gain_sum[s] / static_cast<double>(num_blocks);
    if (ens.scheme == PrecoderScheme::kLpMmse) {
      // E{h^H w_bar} / sqrt(E{||w_bar||^2}) = E{h^H w}.
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
          if (ens.norm_const(k, l) > 0.0)
            ens.mean_gain(k, l) /= std::sqrt(ens.norm_const(k, l));
    }
  }
  return out;
}

NormalizationEnsemble normalization_ensemble(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> stats, PrecoderScheme scheme,
    int num_blocks, std::uint64_t seed) {
  const PrecoderScheme one[] = {scheme};
  return std::move(
      normalization_ensembles(scenario, std::move(stats), one, num_blocks, seed)
          .front());
}

PrecoderSet compute_precoders(const ChannelBlock& block,
                              const NetworkScenario& scenario,
                              const NormalizationEnsemble& ensemble) {
  return ensemble.scheme == PrecoderScheme::kMr
             ? mr_precoder(block, scenario)
             : lpmmse_precoder(block, scenario, ensemble.norm_const);
}

}  // namespace cfsim
