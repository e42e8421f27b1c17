/**
 * @file urllc.hpp
 * @brief URLLC downlink links, per-UE error probability and network
 * availability.
 *
 * A URLLC UE is served by its master AP only, so its effective channel in a
 * slot is varrho_km h_km^H w_km. The UE decodes with the statistical mean of
 * that gain; everything else it receives (other URLLC streams, eMBB streams,
 * thermal noise) is lumped into the effective noise variance.
 */
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "cfsim/embb.hpp"
#include "cfsim/information_density.hpp"
#include "cfsim/precoder.hpp"
#include "cfsim/rcus_oracle.hpp"
#include "cfsim/saddlepoint.hpp"
#include "cfsim/scenario.hpp"

namespace cfsim {

/// sum_{j in L_i} amplitude(i, j) g_{k,i,j} from one block's K x P gains.
std::complex<double> precoded_gain(const Eigen::MatrixXcd& gains,
                                   const ServedPairs& pairs,
                                   const Eigen::MatrixXd& amplitude, int k,
                                   int i);

/**
 * Link of URLLC UE `ue` in one slot, or nullopt when the UE receives no
 * power (inactive). `amplitude` is the slot's K x L varrho matrix.
 */
std::optional<UrllcLink> effective_link(const NetworkScenario& scenario,
                                        const ServedPairs& pairs,
                                        const Eigen::MatrixXcd& gains,
                                        const Eigen::MatrixXd& amplitude,
                                        const NormalizationEnsemble& ensemble,
                                        int ue, double sigma2_d, int n_d,
                                        int b_bits);

/// Running mean of slot error probabilities for one UE.
struct EpsAccumulator {
  double sum = 0.0;
  long long count = 0;
  long long fallbacks = 0;

  void add(const SaddlepointResult& r) {
    sum += r.eps;
    ++count;
    if (r.fell_back) ++fallbacks;
  }
  /// NaN when the UE was never active.
  double mean() const;
};

struct ErrorProbReport {
  std::vector<double> eps;  ///< per URLLC UE, NaN if never active
  double availability = 0.0;
  double eps_target = 0.0;
  int excluded = 0;  ///< UEs without a single active slot
};

/// Fraction of finite entries with eps <= target. NaN entries are skipped
/// and counted in `excluded`; an all-NaN input gives NaN.
double availability(std::span<const double> eps, double target,
                    int* excluded = nullptr);

ErrorProbReport make_report(std::vector<double> eps, double target);

}  // namespace cfsim
