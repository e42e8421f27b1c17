// Hand-built scenarios for unit tests. Correlation matrices are beta * I
// unless a test overwrites them.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfsim/scenario.hpp"

namespace cfsim::test {

inline NetworkScenario manual_scenario(const Eigen::MatrixXd& beta, int antennas,
                                       int tau_p,
                                       std::vector<ServiceClass> classes = {}) {
  NetworkScenario sc;
  const int K = static_cast<int>(beta.rows());
  const int L = static_cast<int>(beta.cols());
  sc.geometry.num_aps = L;
  sc.geometry.num_ues = K;
  sc.geometry.antennas_per_ap = antennas;
  sc.ap_pos.assign(L, {});
  sc.ue_pos.assign(K, {});
  sc.service_class =
      classes.empty() ? std::vector<ServiceClass>(K, ServiceClass::kEmbb) : classes;
  sc.beta = beta;
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      Eigen::MatrixXcd R =
          beta(k, l) * Eigen::MatrixXcd::Identity(antennas, antennas);
      sc.corr_sqrt.push_back(psd_sqrt(R));
      sc.corr.push_back(std::move(R));
    }
  }
  sc.tau_p = tau_p;
  const PilotClustering pc = assign_pilots_and_clusters(sc, tau_p);
  sc.pilot = pc.pilot;
  sc.master_ap = pc.master_ap;
  sc.served = pc.served;
  sc.rebuild_index_sets();
  return sc;
}

/// Replaces every correlation matrix of UE k at AP l (and its square root).
inline void set_correlation(NetworkScenario& sc, int k, int l,
                            const Eigen::MatrixXcd& R) {
  const std::size_t idx = static_cast<std::size_t>(k) * sc.num_aps() + l;
  sc.corr[idx] = R;
  sc.corr_sqrt[idx] = psd_sqrt(R);
  sc.beta(k, l) = R.trace().real() / R.rows();
}

/// Serves exactly the (k, l) pairs flagged in `mask` (K x L, row-major).
inline void set_service(NetworkScenario& sc, const std::vector<char>& mask) {
  sc.served = mask;
  sc.rebuild_index_sets();
}

}  // namespace cfsim::test
