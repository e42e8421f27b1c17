#include "cfsim/coexistence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cfsim/rng.hpp"

namespace cfsim {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kSpc: return "SPC";
    case Strategy::kLpu: return "LPu";
    case Strategy::kCpu: return "CPu";
    case Strategy::kNpu: return "NPu";
  }
  return "?";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

ActivationPattern sample_activation(int num_urllc, int num_aps, int num_slots,
                                    double a_u,
                                    std::span<const int> master_ap,
                                    std::uint64_t seed) {
  if (!(a_u >= 0.0 && a_u <= 1.0))
    throw std::invalid_argument("activation probability must lie in [0, 1]");
  if (static_cast<int>(master_ap.size()) != num_urllc)
    throw std::invalid_argument("one master AP per URLLC UE required");
  ActivationPattern p;
  p.num_slots = num_slots;
  p.num_aps = num_aps;
  p.master.assign(master_ap.begin(), master_ap.end());
  p.active.resize(static_cast<std::size_t>(num_slots) * num_urllc);
  Rng rng = make_rng(seed);
  std::bernoulli_distribution bern(a_u);
  for (auto& a : p.active) a = bern(rng) ? 1 : 0;
  return p;
}

CoexistenceTopology coexistence_topology(const NetworkScenario& scenario) {
  const int L = scenario.num_aps();
  CoexistenceTopology topo;
  topo.num_aps = L;
  topo.urllc_at_ap.assign(L, {});
  for (std::size_t u = 0; u < scenario.urllc_ues.size(); ++u) {
    const int k = scenario.urllc_ues[u];
    topo.urllc_master.push_back(scenario.master_ap[k]);
    topo.urllc_at_ap[scenario.master_ap[k]].push_back(static_cast<int>(u));
  }
  topo.cluster_aps.assign(L, {});
  for (int j = 0; j < L; ++j) {
    std::vector<char> in(L, 0);
    in[j] = 1;
    for (int k : scenario.served_ues[j])
      for (int l : scenario.serving_aps[k]) in[l] = 1;
    for (int l = 0; l < L; ++l)
      if (in[l]) topo.cluster_aps[j].push_back(l);
  }
  return topo;
}

Eigen::VectorXd slot_coefficients(std::span<const std::uint8_t> slot_active,
                                  Strategy strategy,
                                  const CoexistenceTopology& topo) {
  const int L = topo.num_aps;
  Eigen::VectorXd a_tilde = Eigen::VectorXd::Ones(L);
  if (strategy == Strategy::kSpc) return a_tilde;

  // Active URLLC transmissions per AP: sum_{i in K^u_l} A[t, i, l].
  std::vector<int> count(L, 0);
  int total = 0;
  for (std::size_t u = 0; u < slot_active.size(); ++u) {
    if (slot_active[u]) {
      ++count[topo.urllc_master[u]];
      ++total;
    }
  }
  for (int j = 0; j < L; ++j) {
    int n = 0;
    switch (strategy) {
      case Strategy::kLpu:
        n = count[j];
        break;
      case Strategy::kCpu:
        for (int l : topo.cluster_aps[j]) n += count[l];
        break;
      case Strategy::kNpu:
        n = total;
        break;
      case Strategy::kSpc:
        break;
    }
    a_tilde(j) = std::max(0, 1 - n);
  }
  return a_tilde;
}

Eigen::MatrixXd coexistence_coefficients(const ActivationPattern& pattern,
                                         Strategy strategy,
                                         const CoexistenceTopology& topo) {
  Eigen::MatrixXd out(pattern.num_slots, topo.num_aps);
  for (int t = 0; t < pattern.num_slots; ++t)
    out.row(t) = slot_coefficients(pattern.slot(t), strategy, topo).transpose();
  return out;
}

SlotPowers fpa_slot_powers(const NetworkScenario& scenario,
                           const CoexistenceTopology& topo,
                           std::span<const std::uint8_t> slot_active,
                           const Eigen::VectorXd& a_tilde,
                           const PowerPolicy& policy, double rho_max) {
  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const double w = policy.omega;
  SlotPowers p{Eigen::MatrixXd::Zero(K, L), Eigen::MatrixXd::Zero(K, L)};

  for (int j = 0; j < L; ++j) {
    double embb_sum = 0.0;
    if (a_tilde(j) != 0.0) {
      for (int k : scenario.served_ues[j])
        if (!scenario.is_urllc(k))
          embb_sum += std::pow(scenario.beta(k, j), policy.nu);
    }
    double urllc_sum = 0.0;
    for (int u : topo.urllc_at_ap[j])
      if (slot_active[u])
        urllc_sum += std::pow(scenario.beta(scenario.urllc_ues[u], j), policy.nu);

    const double denom = (1.0 - w) * a_tilde(j) * embb_sum + w * urllc_sum;
    if (!(denom > 0.0)) continue;

    if (a_tilde(j) != 0.0) {
      for (int k : scenario.served_ues[j]) {
        if (scenario.is_urllc(k)) continue;
        p.embb(k, j) = (1.0 - w) * rho_max * a_tilde(j) *
                       std::pow(scenario.beta(k, j), policy.nu) / denom;
      }
    }
    for (int u : topo.urllc_at_ap[j]) {
      if (!slot_active[u]) continue;
      const int k = scenario.urllc_ues[u];
      p.urllc(k, j) = w * rho_max * std::pow(scenario.beta(k, j), policy.nu) / denom;
    }
  }
  return p;
}

PowerAllocation fpa_powers(const NetworkScenario& scenario,
                           const CoexistenceTopology& topo,
                           const ActivationPattern& pattern,
                           const Eigen::MatrixXd& a_tilde,
                           const PowerPolicy& policy, double rho_max) {
  if (!(policy.omega > 0.0 && policy.omega < 1.0))
    throw std::invalid_argument("power policy: omega must lie in (0, 1)");
  PowerAllocation alloc;
  alloc.policy = policy;
  alloc.rho_max = rho_max;
  for (int t = 0; t < pattern.num_slots; ++t) {
    alloc.slots.push_back(fpa_slot_powers(scenario, topo, pattern.slot(t),
                                          a_tilde.row(t).transpose(), policy,
                                          rho_max));
  }
  return alloc;
}

}  // namespace cfsim
