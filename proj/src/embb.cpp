#include "cfsim/embb.hpp"

#include <cmath>
#include <stdexcept>

#include "cfsim/rng.hpp"

namespace cfsim {

ServedPairs ServedPairs::from(const NetworkScenario& scenario) {
  ServedPairs p;
  p.offset.push_back(0);
  for (int i = 0; i < scenario.num_ues(); ++i) {
    for (int j : scenario.serving_aps[i]) {
      p.ue.push_back(i);
      p.ap.push_back(j);
    }
    p.offset.push_back(static_cast<int>(p.ue.size()));
  }
  return p;
}

Eigen::MatrixXcd effective_gains(const ChannelBlock& block,
                                 const PrecoderSet& precoders,
                                 const ServedPairs& pairs) {
  const int K = block.num_ues;
  const int L = block.num_aps;
  const int M = block.antennas;
  Eigen::MatrixXcd G(K, pairs.size());

  std::vector<std::vector<int>> pairs_at(L);
  for (int p = 0; p < pairs.size(); ++p) pairs_at[pairs.ap[p]].push_back(p);

  Eigen::MatrixXcd H(M, K);
  for (int j = 0; j < L; ++j) {
    const auto& ps = pairs_at[j];
    if (ps.empty()) continue;
    for (int k = 0; k < K; ++k) H.col(k) = block.channel(k, j);
    Eigen::MatrixXcd W(M, static_cast<Eigen::Index>(ps.size()));
    for (std::size_t n = 0; n < ps.size(); ++n)
      W.col(static_cast<Eigen::Index>(n)) = precoders.at(pairs.ue[ps[n]], j);
    const Eigen::MatrixXcd HW = H.adjoint() * W;
    for (std::size_t n = 0; n < ps.size(); ++n)
      G.col(ps[n]) = HW.col(static_cast<Eigen::Index>(n));
  }
  return G;
}

std::complex<double> EffectiveGainStats::mean_gain(int k, int j) const {
  for (int p = pairs.offset[k]; p < pairs.offset[k + 1]; ++p)
    if (pairs.ap[p] == j) return mean(k, p);
  return {0.0, 0.0};
}

double EffectiveGainStats::second_moment(int e, int i,
                                         const Eigen::VectorXd& amp_i) const {
  const auto& S = gram[static_cast<std::size_t>(e) * num_ues + i];
  return amp_i.dot(S.selfadjointView<Eigen::Lower>() * amp_i);
}

GainMomentAccumulator::GainMomentAccumulator(const NetworkScenario& scenario,
                                             ServedPairs pairs)
    : pairs_(std::move(pairs)),
      embb_ues_(scenario.embb_ues),
      num_ues_(scenario.num_ues()) {
  total_ = zero();
  chunk_ = zero();
}

GainMomentAccumulator::Sums GainMomentAccumulator::zero() const {
  Sums s;
  s.mean = Eigen::MatrixXcd::Zero(num_ues_, pairs_.size());
  s.gram.reserve(embb_ues_.size() * num_ues_);
  for (std::size_t e = 0; e < embb_ues_.size(); ++e)
    for (int i = 0; i < num_ues_; ++i)
      s.gram.push_back(Eigen::MatrixXd::Zero(pairs_.count(i), pairs_.count(i)));
  return s;
}

void GainMomentAccumulator::fold(Sums& into, const Sums& from) {
  into.mean += from.mean;
  for (std::size_t n = 0; n < into.gram.size(); ++n) into.gram[n] += from.gram[n];
}

void GainMomentAccumulator::flush() {
  if (chunk_samples_ == 0) return;
  fold(total_, chunk_);
  total_samples_ += chunk_samples_;
  chunk_samples_ = 0;
  chunk_.mean.setZero();
  for (auto& g : chunk_.gram) g.setZero();
}

void GainMomentAccumulator::add(const Eigen::MatrixXcd& gains) {
  chunk_.mean += gains;
  Eigen::VectorXd re, im;
  for (std::size_t e = 0; e < embb_ues_.size(); ++e) {
    const int k = embb_ues_[e];
    for (int i = 0; i < num_ues_; ++i) {
      const int n = pairs_.count(i);
      if (n == 0) continue;
      const auto g = gains.row(k).segment(pairs_.offset[i], n);
      re = g.real().transpose();
      im = g.imag().transpose();
      auto& S = chunk_.gram[e * num_ues_ + i];
      S.selfadjointView<Eigen::Lower>().rankUpdate(re);
      S.selfadjointView<Eigen::Lower>().rankUpdate(im);
    }
  }
  if (++chunk_samples_ == kChunk) flush();
}

void GainMomentAccumulator::merge(const GainMomentAccumulator& other) {
  flush();
  fold(total_, other.total_);
  fold(total_, other.chunk_);
  total_samples_ += other.total_samples_ + other.chunk_samples_;
}

EffectiveGainStats GainMomentAccumulator::finalize() const {
  Sums sums = total_;
  fold(sums, chunk_);
  const int n = samples();
  if (n < 1) throw std::logic_error("gain moments: no samples accumulated");
  EffectiveGainStats st;
  st.n_samples = n;
  st.pairs = pairs_;
  st.embb_ues = embb_ues_;
  st.num_ues = num_ues_;
  st.mean = sums.mean / static_cast<double>(n);
  st.gram = std::move(sums.gram);
  for (auto& g : st.gram) g /= static_cast<double>(n);
  return st;
}

EffectiveGainStats estimate_gain_stats(
    const NetworkScenario& scenario,
    std::shared_ptr<const EstimationStatistics> est,
    const NormalizationEnsemble& ensemble, int n_blocks, std::uint64_t seed) {
  if (n_blocks < 2) throw std::invalid_argument("n_blocks must be >= 2");
  ServedPairs pairs = ServedPairs::from(scenario);
  GainMomentAccumulator acc(scenario, pairs);
  for (int b = 0; b < n_blocks; ++b) {
    const ChannelBlock block =
        draw_block(scenario, est, derive_seed(seed, StreamPurpose::kChannel, 0, b));
    const PrecoderSet w = compute_precoders(block, scenario, ensemble);
    acc.add(effective_gains(block, w, pairs));
  }
  return acc.finalize();
}

std::vector<double> sinr_embb(const EffectiveGainStats& stats,
                              const NetworkScenario& scenario,
                              const Eigen::MatrixXd& amplitude, double sigma2_d,
                              SinrDiagnostics* diag) {
  const auto& pairs = stats.pairs;
  const int K = scenario.num_ues();

  // varrho restricted to each UE's serving set; skipped when all zero.
  std::vector<Eigen::VectorXd> amp(K);
  std::vector<char> transmits(K, 0);
  for (int i = 0; i < K; ++i) {
    const int n = pairs.count(i);
    amp[i].resize(n);
    for (int q = 0; q < n; ++q) {
      amp[i](q) = amplitude(i, pairs.ap[pairs.offset[i] + q]);
      if (amp[i](q) != 0.0) transmits[i] = 1;
    }
  }

  std::vector<double> out(stats.embb_ues.size(), 0.0);
  for (std::size_t e = 0; e < stats.embb_ues.size(); ++e) {
    const int k = stats.embb_ues[e];
    if (!transmits[k]) continue;
    std::complex<double> desired{0.0, 0.0};
    for (int q = 0; q < pairs.count(k); ++q)
      desired += amp[k](q) * stats.mean(k, pairs.offset[k] + q);
    const double signal = std::norm(desired);

    double total = 0.0;
    for (int i = 0; i < K; ++i)
      if (transmits[i]) total += stats.second_moment(static_cast<int>(e), i, amp[i]);

    const double denom = total - signal + sigma2_d;
    if (!(denom > 0.0)) {
      if (diag) ++diag->nonpositive_denominators;
      continue;
    }
    out[e] = signal / denom;
  }
  return out;
}

double se_slot_term(double sinr, int tau_d, int tau_c, int num_slots) {
  return static_cast<double>(tau_d) / tau_c / num_slots * std::log2(1.0 + sinr);
}

SEReport se_embb(const std::vector<std::vector<double>>& per_slot_sinr,
                 int tau_d, int tau_c) {
  if (per_slot_sinr.empty()) throw std::invalid_argument("se_embb: T must be >= 1");
  const int T = static_cast<int>(per_slot_sinr.size());
  const std::size_t num_embb = per_slot_sinr.front().size();
  SEReport r;
  r.se.assign(num_embb, 0.0);
  for (const auto& slot : per_slot_sinr) {
    if (slot.size() != num_embb)
      throw std::invalid_argument("se_embb: ragged SINR table");
    for (std::size_t e = 0; e < num_embb; ++e)
      r.se[e] += se_slot_term(slot[e], tau_d, tau_c, T);
  }
  for (double se : r.se) r.sum_se += se;
  r.outage = r.sum_se == 0.0;
  return r;
}

}  // namespace cfsim
