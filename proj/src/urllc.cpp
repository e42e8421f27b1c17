#include "cfsim/urllc.hpp"

#include <cmath>
#include <limits>

namespace cfsim {

std::complex<double> precoded_gain(const Eigen::MatrixXcd& gains,
                                   const ServedPairs& pairs,
                                   const Eigen::MatrixXd& amplitude, int k,
                                   int i) {
  std::complex<double> sum(0.0, 0.0);
  for (int p = pairs.offset[i]; p < pairs.offset[i + 1]; ++p) {
    const double amp = amplitude(i, pairs.ap[p]);
    if (amp != 0.0) sum += amp * gains(k, p);
  }
  return sum;
}

std::optional<UrllcLink> effective_link(const NetworkScenario& scenario,
                                        const ServedPairs& pairs,
                                        const Eigen::MatrixXcd& gains,
                                        const Eigen::MatrixXd& amplitude,
                                        const NormalizationEnsemble& ensemble,
                                        int ue, double sigma2_d, int n_d,
                                        int b_bits) {
  const int master = scenario.master_ap[ue];
  const double amp = amplitude(ue, master);
  if (amp == 0.0) return std::nullopt;

  UrllcLink link;
  link.n_d = n_d;
  link.b_bits = b_bits;
  link.g_eff = precoded_gain(gains, pairs, amplitude, ue, ue);
  link.g_hat = amp * ensemble.mean_gain(ue, master);

  double interference = 0.0;
  for (int i = 0; i < scenario.num_ues(); ++i) {
    if (i == ue) continue;
    interference += std::norm(precoded_gain(gains, pairs, amplitude, ue, i));
  }
  link.sigma2_eff = interference + sigma2_d;
  return link;
}

double EpsAccumulator::mean() const {
  return count ? sum / static_cast<double>(count)
               : std::numeric_limits<double>::quiet_NaN();
}

double availability(std::span<const double> eps, double target, int* excluded) {
  int valid = 0, met = 0, skipped = 0;
  for (double e : eps) {
    if (std::isnan(e)) {
      ++skipped;
      continue;
    }
    ++valid;
    if (e <= target) ++met;
  }
  if (excluded) *excluded = skipped;
  return valid ? static_cast<double>(met) / valid
               : std::numeric_limits<double>::quiet_NaN();
}

ErrorProbReport make_report(std::vector<double> eps, double target) {
  ErrorProbReport r;
  r.eps_target = target;
  r.availability = availability(eps, target, &r.excluded);
  r.eps = std::move(eps);
  return r;
}

}  // namespace cfsim
