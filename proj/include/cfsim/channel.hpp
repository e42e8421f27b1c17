/**
 * @file channel.hpp
 * @brief Block-fading channel realizations and pilot-based MMSE estimation.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "cfsim/scenario.hpp"

namespace cfsim {

struct UplinkConfig {
  std::vector<double> pilot_power_w;  ///< per UE
  double noise_w = 0.0;
  int tau_p = 1;

  static UplinkConfig uniform(int num_ues, double power_w, double noise_w,
                              int tau_p);
};

/**
 * Realization-independent estimator quantities. Psi_tl depends only on the
 * correlation matrices of the UEs sharing pilot t, so its inverse, the
 * estimator gain sqrt(p_k tau_p) R_kl Psi^-1 and the error covariance C_kl
 * are computed once per scenario and shared by every block.
 */
struct EstimationStatistics {
  UplinkConfig uplink;
  int num_aps = 0;
  int tau_p = 0;
  std::vector<Eigen::MatrixXcd> psi_inv;     ///< [t * L + l]; empty if unused
  std::vector<Eigen::MatrixXcd> gain;        ///< [k * L + l]; served pairs
  std::vector<Eigen::MatrixXcd> error_cov;   ///< [k * L + l]; served pairs
  /// sigma_ul^2 I + sum_{i in U_l} p_i C_il, the block-independent part of
  /// the LP-MMSE matrix at AP l.
  std::vector<Eigen::MatrixXcd> lpmmse_base;

  const Eigen::MatrixXcd& Psi_inv(int t, int l) const {
    return psi_inv[static_cast<std::size_t>(t) * num_aps + l];
  }
  const Eigen::MatrixXcd& C(int k, int l) const {
    return error_cov[static_cast<std::size_t>(k) * num_aps + l];
  }
};

std::shared_ptr<const EstimationStatistics> estimation_statistics(
    const NetworkScenario& scenario, const UplinkConfig& ul);

/// One coherence block. Estimates exist only where D_kl is set.
struct ChannelBlock {
  int num_ues = 0;
  int num_aps = 0;
  int antennas = 0;
  std::vector<Eigen::VectorXcd> h;      ///< [k * L + l]
  std::vector<Eigen::VectorXcd> h_hat;  ///< [k * L + l]; size 0 if unserved
  std::shared_ptr<const EstimationStatistics> stats;

  const Eigen::VectorXcd& channel(int k, int l) const {
    return h[static_cast<std::size_t>(k) * num_aps + l];
  }
  const Eigen::VectorXcd& estimate(int k, int l) const {
    return h_hat[static_cast<std::size_t>(k) * num_aps + l];
  }
  const Eigen::MatrixXcd& C(int k, int l) const { return stats->C(k, l); }
};

/// h_kl = R_kl^{1/2} e, e ~ CN(0, I_M), for every (k, l).
std::vector<Eigen::VectorXcd> realize_channels(const NetworkScenario& scenario,
                                               std::uint64_t seed);

ChannelBlock mmse_estimate(std::vector<Eigen::VectorXcd> h,
                           const NetworkScenario& scenario,
                           std::shared_ptr<const EstimationStatistics> stats,
                           std::uint64_t seed);

ChannelBlock mmse_estimate(std::vector<Eigen::VectorXcd> h,
                           const NetworkScenario& scenario,
                           const UplinkConfig& ul, std::uint64_t seed);

/// realize_channels followed by mmse_estimate with sub-seeds of `seed`.
ChannelBlock draw_block(const NetworkScenario& scenario,
                        std::shared_ptr<const EstimationStatistics> stats,
                        std::uint64_t seed);

}  // namespace cfsim
