#include "cfsim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "cfsim/rng.hpp"

namespace cfsim {

UplinkConfig UplinkConfig::uniform(int num_ues, double power_w, double noise_w,
                                   int tau_p) {
  UplinkConfig ul;
  ul.pilot_power_w.assign(num_ues, power_w);
  ul.noise_w = noise_w;
  ul.tau_p = tau_p;
  return ul;
}

std::shared_ptr<const EstimationStatistics> estimation_statistics(
    const NetworkScenario& scenario, const UplinkConfig& ul) {
  if (!(ul.noise_w > 0.0) || ul.tau_p < 1)
    throw std::invalid_argument("uplink: noise_w and tau_p must be positive");
  if (static_cast<int>(ul.pilot_power_w.size()) != scenario.num_ues())
    throw std::invalid_argument("uplink: one pilot power per UE required");
  if (ul.tau_p != scenario.tau_p)
    throw std::invalid_argument("uplink: tau_p differs from the scenario's");

  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const int M = scenario.antennas();
  const int tau_p = scenario.tau_p;

  auto stats = std::make_shared<EstimationStatistics>();
  stats->uplink = ul;
  stats->num_aps = L;
  stats->tau_p = tau_p;
  stats->psi_inv.resize(static_cast<std::size_t>(tau_p) * L);
  stats->gain.resize(static_cast<std::size_t>(K) * L);
  stats->error_cov.resize(static_cast<std::size_t>(K) * L);

  for (int l = 0; l < L; ++l) {
    for (int k : scenario.served_ues[l]) {
      const int t = scenario.pilot[k];
      auto& psi_inv = stats->psi_inv[static_cast<std::size_t>(t) * L + l];
      if (psi_inv.size() == 0) {
        Eigen::MatrixXcd psi =
            ul.noise_w * Eigen::MatrixXcd::Identity(M, M);
        for (int i = 0; i < K; ++i) {
          if (scenario.pilot[i] == t)
            psi += ul.pilot_power_w[i] * ul.tau_p * scenario.R(i, l);
        }
        psi_inv = psi.ldlt().solve(Eigen::MatrixXcd::Identity(M, M));
        psi_inv = 0.5 * (psi_inv + psi_inv.adjoint()).eval();
      }
      const double ptau = ul.pilot_power_w[k] * ul.tau_p;
      const Eigen::MatrixXcd& R = scenario.R(k, l);
      const Eigen::MatrixXcd RPsi = R * psi_inv;
      const std::size_t idx = static_cast<std::size_t>(k) * L + l;
      stats->gain[idx] = std::sqrt(ptau) * RPsi;
      Eigen::MatrixXcd C = R - ptau * RPsi * R;
      stats->error_cov[idx] = 0.5 * (C + C.adjoint());
    }
  }
  stats->lpmmse_base.resize(L);
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXcd Z = ul.noise_w * Eigen::MatrixXcd::Identity(M, M);
    for (int i : scenario.served_ues[l])
      Z += ul.pilot_power_w[i] * stats->C(i, l);
    stats->lpmmse_base[l] = std::move(Z);
  }
  return stats;
}

std::vector<Eigen::VectorXcd> realize_channels(const NetworkScenario& scenario,
                                               std::uint64_t seed) {
  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const int M = scenario.antennas();
  Rng rng = make_rng(seed);
  ComplexNormal cn(1.0);
  std::vector<Eigen::VectorXcd> h(static_cast<std::size_t>(K) * L);
  Eigen::VectorXcd e(M);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      for (int m = 0; m < M; ++m) e(m) = cn(rng);
      auto& out = h[static_cast<std::size_t>(k) * L + l];
      out.resize(M);
      out.noalias() = scenario.R_sqrt(k, l) * e;
    }
  }
  return h;
}

ChannelBlock mmse_estimate(std::vector<Eigen::VectorXcd> h,
                           const NetworkScenario& scenario,
                           std::shared_ptr<const EstimationStatistics> stats,
                           std::uint64_t seed) {
  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const int M = scenario.antennas();
  const int tau_p = scenario.tau_p;

  ChannelBlock block;
  block.num_ues = K;
  block.num_aps = L;
  block.antennas = M;
  block.h = std::move(h);
  block.h_hat.resize(static_cast<std::size_t>(K) * L);

  Rng rng = make_rng(seed);
  ComplexNormal cn(1.0);
  std::vector<Eigen::VectorXcd> y(static_cast<std::size_t>(tau_p));
  std::vector<char> have(static_cast<std::size_t>(tau_p));

  for (int l = 0; l < L; ++l) {
    std::fill(have.begin(), have.end(), 0);
    for (int k : scenario.served_ues[l]) {
      const int t = scenario.pilot[k];
      if (!have[t]) {
        y[t] = Eigen::VectorXcd::Zero(M);
        have[t] = 1;
      }
    }
    // Observation noise is drawn for every pilot slot in index order so the
    // stream does not depend on which pilots happen to be in use.
    for (int t = 0; t < tau_p; ++t) {
      Eigen::VectorXcd noise(M);
      for (int m = 0; m < M; ++m) noise(m) = cn(rng);
      if (have[t]) y[t] = noise;
    }
    for (int t = 0; t < tau_p; ++t) {
      if (!have[t]) continue;
      y[t] *= std::sqrt(stats->uplink.noise_w);
      for (int i = 0; i < K; ++i) {
        if (scenario.pilot[i] == t)
          y[t] += std::sqrt(stats->uplink.pilot_power_w[i] * tau_p) *
                  block.channel(i, l);
      }
    }
    for (int k : scenario.served_ues[l]) {
      const std::size_t idx = static_cast<std::size_t>(k) * L + l;
      block.h_hat[idx] = stats->gain[idx] * y[scenario.pilot[k]];
    }
  }
  block.stats = std::move(stats);
  return block;
}

ChannelBlock mmse_estimate(std::vector<Eigen::VectorXcd> h,
                           const NetworkScenario& scenario,
                           const UplinkConfig& ul, std::uint64_t seed) {
  return mmse_estimate(std::move(h), scenario,
                       estimation_statistics(scenario, ul), seed);
}

ChannelBlock draw_block(const NetworkScenario& scenario,
                        std::shared_ptr<const EstimationStatistics> stats,
                        std::uint64_t seed) {
  auto h = realize_channels(scenario, subseed(seed, StreamPurpose::kChannel));
  return mmse_estimate(std::move(h), scenario, std::move(stats),
                       subseed(seed, StreamPurpose::kPilotNoise));
}

}  // namespace cfsim
