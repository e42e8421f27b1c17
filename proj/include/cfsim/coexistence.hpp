/**
 * @file coexistence.hpp
 * @brief URLLC activation patterns, eMBB puncturing coefficients for the
 * SPC/LPu/CPu/NPu strategies, and weighted fractional power allocation.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfsim/scenario.hpp"

namespace cfsim {

enum class Strategy { kSpc, kLpu, kCpu, kNpu };

inline constexpr Strategy kAllStrategies[] = {Strategy::kSpc, Strategy::kLpu,
                                              Strategy::kCpu, Strategy::kNpu};

const char* to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// A[t, u, j] for URLLC index u; nonzero only at j = master[u].
struct ActivationPattern {
  int num_slots = 0;
  int num_aps = 0;
  std::vector<int> master;           ///< per URLLC index
  std::vector<std::uint8_t> active;  ///< num_slots x K_u row-major

  int num_urllc() const { return static_cast<int>(master.size()); }
  bool is_active(int t, int u) const {
    return active[static_cast<std::size_t>(t) * master.size() + u] != 0;
  }
  bool A(int t, int u, int j) const { return j == master[u] && is_active(t, u); }
  /// Activation bits of slot t, one per URLLC UE.
  std::span<const std::uint8_t> slot(int t) const {
    return {active.data() + static_cast<std::size_t>(t) * master.size(),
            master.size()};
  }
};

/// Independent Bernoulli(a_u) draws per (slot, URLLC UE), slot-major.
ActivationPattern sample_activation(int num_urllc, int num_aps, int num_slots,
                                    double a_u,
                                    std::span<const int> master_ap,
                                    std::uint64_t seed);

/// Per-scenario sets used by the puncturing rules.
struct CoexistenceTopology {
  int num_aps = 0;
  std::vector<int> urllc_master;                 ///< per URLLC index
  std::vector<std::vector<int>> urllc_at_ap;     ///< K^u_j as URLLC indices
  std::vector<std::vector<int>> cluster_aps;     ///< L_{U_j}, includes j
};

CoexistenceTopology coexistence_topology(const NetworkScenario& scenario);

/// A_tilde (length L) for one slot given its K_u activation bits.
Eigen::VectorXd slot_coefficients(std::span<const std::uint8_t> slot_active,
                                  Strategy strategy,
                                  const CoexistenceTopology& topo);

/// T x L coefficient matrix.
Eigen::MatrixXd coexistence_coefficients(const ActivationPattern& pattern,
                                         Strategy strategy,
                                         const CoexistenceTopology& topo);

struct PowerPolicy {
  std::string name = "FPA";
  double omega = 0.5;  ///< URLLC weight in (0, 1)
  double nu = 0.0;     ///< exponent on the large-scale gain
};

/// Downlink powers in W. Rows of the other service class are zero.
struct SlotPowers {
  Eigen::MatrixXd embb;   ///< K x L
  Eigen::MatrixXd urllc;  ///< K x L

  /// varrho_kl = sqrt(A_tilde rho_e) or sqrt(A rho_u); the coefficients are
  /// already folded into the powers.
  Eigen::MatrixXd amplitude() const { return (embb + urllc).cwiseSqrt(); }
};

struct PowerAllocation {
  PowerPolicy policy;
  double rho_max = 0.0;
  std::vector<SlotPowers> slots;
};

/**
 * Weighted fractional power allocation at every AP for one slot. An AP with
 * no scheduled eMBB UE and no active URLLC UE transmits nothing.
 */
SlotPowers fpa_slot_powers(const NetworkScenario& scenario,
                           const CoexistenceTopology& topo,
                           std::span<const std::uint8_t> slot_active,
                           const Eigen::VectorXd& a_tilde,
                           const PowerPolicy& policy, double rho_max);

PowerAllocation fpa_powers(const NetworkScenario& scenario,
                           const CoexistenceTopology& topo,
                           const ActivationPattern& pattern,
                           const Eigen::MatrixXd& a_tilde,
                           const PowerPolicy& policy, double rho_max);

}  // namespace cfsim
