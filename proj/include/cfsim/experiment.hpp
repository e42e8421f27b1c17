/**
 * @file experiment.hpp
 * @brief Per-drop evaluation and the parallel drop loop.
 *
 * Within a drop every (strategy, precoder, policy) group sees the same
 * channel blocks and the same activation patterns. Seeds:
 *   drop seed        derive_seed(master, kDrop, d)
 *   scenario         drop seed
 *   channel block b  derive_seed(drop seed, kChannel, 0, b)
 *   normalization b  derive_seed(drop seed, kNormalization, 0, b)
 *   activation b     derive_seed(drop seed, kActivation, 0, b)
 *   oracle fallback  derive_seed(drop seed, kOracle, b, t * K + k)
 */
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cfsim/coexistence.hpp"
#include "cfsim/config.hpp"
#include "cfsim/embb.hpp"
#include "cfsim/precoder.hpp"
#include "cfsim/scenario.hpp"

namespace cfsim {

struct GroupResult {
  Strategy strategy = Strategy::kSpc;
  PrecoderScheme precoder = PrecoderScheme::kMr;
  int policy = 0;  ///< index into SimConfig::policies

  std::vector<double> se;  ///< per eMBB UE, mean over blocks
  double sum_se = 0.0;     ///< mean over blocks
  double outage = 0.0;     ///< fraction of blocks with zero sum SE
  std::vector<double> eps;  ///< per URLLC UE; NaN if never active
  long long eps_slots = 0;
  long long fallbacks = 0;
};

struct DropResult {
  int drop = 0;
  std::uint64_t seed = 0;
  std::vector<int> embb_ues;
  std::vector<int> urllc_ues;
  std::vector<GroupResult> groups;  ///< precoder, strategy, policy order
  SinrDiagnostics diagnostics;
  long long degenerate_precoders = 0;
};

std::uint64_t drop_seed(const SimConfig& cfg, int drop);

NetworkScenario drop_scenario(const SimConfig& cfg, int drop);

/// Activation pattern of block b in a scenario.
ActivationPattern block_activation(const SimConfig& cfg,
                                   const NetworkScenario& scenario,
                                   std::uint64_t seed, int block);

DropResult evaluate_drop(const SimConfig& cfg, int drop);

/**
 * Evaluates drops 0..n_drops-1 on `workers` threads and hands results to
 * `sink` strictly in drop order from the calling thread.
 */
void run_drops(const SimConfig& cfg, int workers,
               const std::function<void(const DropResult&)>& sink);

}  // namespace cfsim
