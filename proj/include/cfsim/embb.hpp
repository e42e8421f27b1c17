/**
 * @file embb.hpp
 * @brief eMBB downlink SE with the hardening bound.
 *
 * The channel expectations E{g_kkj} and E{|sum_j varrho_ij g_kij|^2} are
 * estimated by Monte Carlo. Precoders do not depend on the activation
 * pattern, so the moments are stored pattern-free: a mean per served pair
 * and, for every (eMBB UE k, UE i), the real Gram matrix
 * S_ki[j, j'] = E{Re(g_kij conj(g_kij'))} over j, j' in L_i. Any slot's
 * second moment is then the quadratic form varrho_i^T S_ki varrho_i.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cfsim/channel.hpp"
#include "cfsim/precoder.hpp"
#include "cfsim/scenario.hpp"

namespace cfsim {

/// Served (i, j) pairs ordered by UE then AP; pairs of UE i occupy
/// [offset[i], offset[i + 1]).
struct ServedPairs {
  std::vector<int> ue;
  std::vector<int> ap;
  std::vector<int> offset;

  static ServedPairs from(const NetworkScenario& scenario);
  int size() const { return static_cast<int>(ue.size()); }
  int count(int i) const { return offset[i + 1] - offset[i]; }
};

/// K x P matrix with entry (k, p) = g_{k, ue[p], ap[p]} = h_{k,ap}^H w_{ue,ap}.
Eigen::MatrixXcd effective_gains(const ChannelBlock& block,
                                 const PrecoderSet& precoders,
                                 const ServedPairs& pairs);

struct EffectiveGainStats {
  int n_samples = 0;
  ServedPairs pairs;
  std::vector<int> embb_ues;
  int num_ues = 0;
  Eigen::MatrixXcd mean;            ///< K x P sample mean of g
  std::vector<Eigen::MatrixXd> gram;  ///< [e * K + i], e indexes embb_ues

  /// E{g_kkj}; zero when AP j does not serve k.
  std::complex<double> mean_gain(int k, int j) const;
  /// E{|sum_{j in L_i} amp_j g_kij|^2} for eMBB UE at position e.
  double second_moment(int e, int i, const Eigen::VectorXd& amp_i) const;
};

/// Mergeable Monte-Carlo sums. Blocks are folded into fixed-size chunks
/// before reaching the running total, which bounds round-off growth.
class GainMomentAccumulator {
 public:
  GainMomentAccumulator(const NetworkScenario& scenario, ServedPairs pairs);

  void add(const Eigen::MatrixXcd& gains);
  void merge(const GainMomentAccumulator& other);
  EffectiveGainStats finalize() const;
  int samples() const { return total_samples_ + chunk_samples_; }

 private:
  struct Sums {
    Eigen::MatrixXcd mean;
    std::vector<Eigen::MatrixXd> gram;
  };
  Sums zero() const;
  void flush();
  static void fold(Sums& into, const Sums& from);

  static constexpr int kChunk = 32;
  ServedPairs pairs_;
  std::vector<int> embb_ues_;
  int num_ues_ = 0;
  Sums total_, chunk_;
  int total_samples_ = 0;
  int chunk_samples_ = 0;
};

/// Draws n_blocks evaluation blocks (derive_seed(seed, kChannel, 0, b)) and
/// accumulates the gain moments for the ensemble's precoder.
EffectiveGainStats estimate_gain_stats(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> est,
    const NormalizationEnsemble& ensemble, int n_blocks, std::uint64_t seed);

struct SinrDiagnostics {
  int nonpositive_denominators = 0;
};

/**
 * Effective SINR of every eMBB UE (order of scenario.embb_ues) for one slot.
 * `amplitude` is the K x L matrix of varrho coefficients.
 */
std::vector<double> sinr_embb(const EffectiveGainStats& stats,
                              const NetworkScenario& scenario,
                              const Eigen::MatrixXd& amplitude, double sigma2_d,
                              SinrDiagnostics* diag = nullptr);

struct SEReport {
  std::vector<double> se;  ///< bits/s/Hz per eMBB UE
  double sum_se = 0.0;
  bool outage = false;     ///< sum_se == 0
};

/// One slot's share of the SE: (tau_d / tau_c) (1 / T) log2(1 + sinr).
double se_slot_term(double sinr, int tau_d, int tau_c, int num_slots);

/// per_slot_sinr is T x K_e; per-UE SE accumulates se_slot_term in slot order.
SEReport se_embb(const std::vector<std::vector<double>>& per_slot_sinr,
                 int tau_d, int tau_c);

}  // namespace cfsim
