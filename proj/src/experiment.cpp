#include "cfsim/experiment.hpp"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "cfsim/channel.hpp"
#include "cfsim/rng.hpp"
#include "cfsim/saddlepoint.hpp"
#include "cfsim/urllc.hpp"

namespace cfsim {

std::uint64_t drop_seed(const SimConfig& cfg, int drop) {
  return derive_seed(cfg.master_seed, StreamPurpose::kDrop,
                     static_cast<std::uint64_t>(drop));
}

NetworkScenario drop_scenario(const SimConfig& cfg, int drop) {
  return make_scenario(cfg.geometry, cfg.tau_p, drop_seed(cfg, drop));
}

ActivationPattern block_activation(const SimConfig& cfg,
                                   const NetworkScenario& scenario,
                                   std::uint64_t seed, int block) {
  std::vector<int> masters;
  for (int k : scenario.urllc_ues) masters.push_back(scenario.master_ap[k]);
  return sample_activation(
      static_cast<int>(masters.size()), scenario.num_aps(), cfg.num_slots,
      cfg.a_u, masters,
      derive_seed(seed, StreamPurpose::kActivation, 0,
                  static_cast<std::uint64_t>(block)));
}

namespace {

using MaskKey = std::string;

MaskKey key_of(std::span<const std::uint8_t> slot) {
  return MaskKey(slot.begin(), slot.end());
}

bool any_active(std::span<const std::uint8_t> slot) {
  return std::any_of(slot.begin(), slot.end(), [](std::uint8_t a) { return a; });
}

}  // namespace

DropResult evaluate_drop(const SimConfig& cfg, int drop) {
  const std::uint64_t seed = drop_seed(cfg, drop);
  const NetworkScenario sc = make_scenario(cfg.geometry, cfg.tau_p, seed);
  const int K = sc.num_ues();
  const auto est = estimation_statistics(
      sc, UplinkConfig::uniform(K, cfg.p_ul_w, cfg.sigma2_ul_w, cfg.tau_p));
  const CoexistenceTopology topo = coexistence_topology(sc);
  const ServedPairs pairs = ServedPairs::from(sc);

  const int S = static_cast<int>(cfg.strategies.size());
  const int P = static_cast<int>(cfg.policies.size());
  const int T = cfg.num_slots;
  const int Ku = static_cast<int>(sc.urllc_ues.size());

  std::vector<ActivationPattern> patterns;
  patterns.reserve(cfg.n_blocks);
  for (int b = 0; b < cfg.n_blocks; ++b)
    patterns.push_back(block_activation(cfg, sc, seed, b));

  // Powers depend on the slot only through its activation mask.
  std::vector<std::map<MaskKey, Eigen::MatrixXd>> amp_cache(S * P);
  auto amplitude_for = [&](int si, int pi,
                           std::span<const std::uint8_t> slot) -> const Eigen::MatrixXd& {
    auto& cache = amp_cache[si * P + pi];
    MaskKey key = key_of(slot);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Eigen::VectorXd a_tilde = slot_coefficients(slot, cfg.strategies[si], topo);
    const SlotPowers pw =
        fpa_slot_powers(sc, topo, slot, a_tilde, cfg.policies[pi], cfg.rho_max_w);
    return cache.emplace(std::move(key), pw.amplitude()).first->second;
  };

  DropResult out;
  out.drop = drop;
  out.seed = seed;
  out.embb_ues = sc.embb_ues;
  out.urllc_ues = sc.urllc_ues;

  const int NP = static_cast<int>(cfg.precoders.size());
  const std::vector<NormalizationEnsemble> ensembles = normalization_ensembles(
      sc, est, cfg.precoders, cfg.n_norm_blocks, seed);
  std::vector<GainMomentAccumulator> acc(NP, GainMomentAccumulator(sc, pairs));
  std::vector<EpsAccumulator> eps_acc(static_cast<std::size_t>(NP) * S * P * Ku);
  auto eps_slot = [&](int c, int si, int pi, int u) -> EpsAccumulator& {
    return eps_acc[((static_cast<std::size_t>(c) * S + si) * P + pi) * Ku + u];
  };

  // Every precoder sees the same blocks.
  for (int b = 0; b < cfg.n_blocks; ++b) {
    const ChannelBlock block =
        draw_block(sc, est, derive_seed(seed, StreamPurpose::kChannel, 0, b));
    const ActivationPattern& pat = patterns[b];
    for (int c = 0; c < NP; ++c) {
      const NormalizationEnsemble& ensemble = ensembles[c];
      const PrecoderSet w = compute_precoders(block, sc, ensemble);
      out.degenerate_precoders += w.degenerate;
      const Eigen::MatrixXcd G = effective_gains(block, w, pairs);
      acc[c].add(G);

      for (int t = 0; t < T; ++t) {
        const auto slot = pat.slot(t);
        if (!any_active(slot)) continue;
        for (int si = 0; si < S; ++si) {
          for (int pi = 0; pi < P; ++pi) {
            const Eigen::MatrixXd& amp = amplitude_for(si, pi, slot);
            for (int u = 0; u < Ku; ++u) {
              if (!slot[u]) continue;
              const int k = sc.urllc_ues[u];
              auto link = effective_link(sc, pairs, G, amp, ensemble, k,
                                         cfg.sigma2_d_w, cfg.n_d, cfg.b_bits);
              if (!link) continue;
              link->s = optimize_s(*link);
              eps_slot(c, si, pi, u).add(saddlepoint_eps(
                  *link, CgfMethod::kClosedForm,
                  derive_seed(seed, StreamPurpose::kOracle, b,
                              static_cast<std::uint64_t>(t) * K + k),
                  static_cast<std::size_t>(cfg.n_mc_trials)));
            }
          }
        }
      }
    }
  }

  for (int c = 0; c < NP; ++c) {
    const EffectiveGainStats stats = acc[c].finalize();
    for (int si = 0; si < S; ++si) {
      for (int pi = 0; pi < P; ++pi) {
        std::map<MaskKey, std::vector<double>> sinr_cache;
        GroupResult g;
        g.strategy = cfg.strategies[si];
        g.precoder = cfg.precoders[c];
        g.policy = pi;
        g.se.assign(sc.embb_ues.size(), 0.0);
        long long outages = 0;
        double sum_se = 0.0;
        std::vector<std::vector<double>> per_slot(T);
        for (int b = 0; b < cfg.n_blocks; ++b) {
          for (int t = 0; t < T; ++t) {
            const auto slot = patterns[b].slot(t);
            MaskKey key = key_of(slot);
            auto it = sinr_cache.find(key);
            if (it == sinr_cache.end()) {
              it = sinr_cache
                       .emplace(std::move(key),
                                sinr_embb(stats, sc, amplitude_for(si, pi, slot),
                                          cfg.sigma2_d_w, &out.diagnostics))
                       .first;
            }
            per_slot[t] = it->second;
          }
          const SEReport rep = se_embb(per_slot, cfg.tau_d, cfg.tau_c);
          for (std::size_t e = 0; e < rep.se.size(); ++e) g.se[e] += rep.se[e];
          sum_se += rep.sum_se;
          if (rep.outage) ++outages;
        }
        for (double& v : g.se) v /= cfg.n_blocks;
        g.sum_se = sum_se / cfg.n_blocks;
        g.outage = static_cast<double>(outages) / cfg.n_blocks;
        for (int u = 0; u < Ku; ++u) {
          const EpsAccumulator& a = eps_slot(c, si, pi, u);
          g.eps.push_back(a.mean());
          g.eps_slots += a.count;
          g.fallbacks += a.fallbacks;
        }
        out.groups.push_back(std::move(g));
      }
    }
  }
  return out;
}

void run_drops(const SimConfig& cfg, int workers,
               const std::function<void(const DropResult&)>& sink) {
  const int n = cfg.n_drops;
  workers = std::clamp(workers, 1, std::max(1, n));

  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::optional<DropResult>> done(n);
  std::exception_ptr failure;
  int next = 0;
  bool stop = false;

  auto work = [&] {
    for (;;) {
      int d;
      {
        std::lock_guard lock(mu);
        if (stop || next >= n) return;
        d = next++;
      }
      try {
        DropResult r = evaluate_drop(cfg, d);
        std::lock_guard lock(mu);
        done[d] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failure) {
          failure = std::make_exception_ptr(std::runtime_error(
              "drop " + std::to_string(d) + ": " + e.what()));
        }
        stop = true;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(work);

  std::exception_ptr sink_failure;
  for (int d = 0; d < n && !sink_failure; ++d) {
    DropResult r;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return done[d].has_value() || failure; });
      if (!done[d]) break;
      r = std::move(*done[d]);
      done[d].reset();
    }
    try {
      sink(r);
    } catch (...) {
      sink_failure = std::current_exception();
      std::lock_guard lock(mu);
      stop = true;
    }
  }
  for (auto& th : pool) th.join();
  if (sink_failure) std::rethrow_exception(sink_failure);
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cfsim
