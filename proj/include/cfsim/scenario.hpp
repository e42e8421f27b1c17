/**
 * @file scenario.hpp
 * @brief Network drops: AP/UE geometry, 3GPP UMi large-scale gains, local
 * scattering spatial correlation, pilot assignment and user-centric
 * clustering.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace cfsim {

enum class ServiceClass { kEmbb, kUrllc };

const char* to_string(ServiceClass c);

struct GeometryConfig {
  int num_aps = 100;
  int antennas_per_ap = 4;
  int num_ues = 40;
  /// Fraction of UEs tagged URLLC.
  double urllc_fraction = 0.2;
  double side_km = 1.0;
  double ap_height_m = 10.0;
  double ue_height_m = 1.5;
  double asd_deg = 15.0;
  /// Angle draws used for the local-scattering expectation.
  int angle_samples = 10000;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const GeometryConfig& cfg);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

struct PilotClustering {
  std::vector<int> pilot;       ///< 0-based pilot index per UE
  std::vector<int> master_ap;   ///< per UE
  std::vector<char> served;     ///< K x L row-major, D_kl != 0
};

/// One network realization. Immutable once make_scenario() returns.
struct NetworkScenario {
  GeometryConfig geometry;
  std::vector<Position> ap_pos;
  std::vector<Position> ue_pos;
  std::vector<ServiceClass> service_class;
  /// Set when urllc_fraction > 0 but rounds to zero URLLC UEs.
  bool urllc_fraction_degenerate = false;

  Eigen::MatrixXd beta;  ///< K x L, linear scale
  std::vector<Eigen::MatrixXcd> corr;       ///< R_kl at [k * L + l]
  std::vector<Eigen::MatrixXcd> corr_sqrt;  ///< F with F F^H = R_kl

  int tau_p = 0;
  std::vector<int> pilot;
  std::vector<int> master_ap;
  std::vector<char> served;

  // Index sets derived from `served`.
  std::vector<std::vector<int>> serving_aps;  ///< L_k
  std::vector<std::vector<int>> served_ues;   ///< U_l
  std::vector<int> embb_ues;
  std::vector<int> urllc_ues;

  int num_aps() const { return geometry.num_aps; }
  int num_ues() const { return geometry.num_ues; }
  int antennas() const { return geometry.antennas_per_ap; }
  bool serves(int k, int l) const {
    return served[static_cast<std::size_t>(k) * num_aps() + l] != 0;
  }
  bool is_urllc(int k) const { return service_class[k] == ServiceClass::kUrllc; }
  const Eigen::MatrixXcd& R(int k, int l) const {
    return corr[static_cast<std::size_t>(k) * num_aps() + l];
  }
  const Eigen::MatrixXcd& R_sqrt(int k, int l) const {
    return corr_sqrt[static_cast<std::size_t>(k) * num_aps() + l];
  }
  /// Position of k within urllc_ues, or -1.
  int urllc_index(int k) const;

  /// Rebuilds serving_aps / served_ues / class lists from the raw fields.
  void rebuild_index_sets();
};

/// Uniform AP/UE positions and a seeded URLLC tagging.
NetworkScenario drop_network(const GeometryConfig& cfg, std::uint64_t seed);

/// UMi gain in dB for a 3-D distance (m) and shadowing realization (dB).
double umi_gain_db(double distance_3d_m, double shadowing_db);

double distance_3d(const Position& ap, const Position& ue, double height_diff);

/// K x L large-scale gains with i.i.d. N(0, 4^2) dB shadowing.
Eigen::MatrixXd large_scale_gains(const NetworkScenario& scenario,
                                  std::uint64_t seed);

struct AnglePerturbation {
  double azimuth = 0.0;
  double elevation = 0.0;
};

std::vector<AnglePerturbation> draw_angle_perturbations(int count,
                                                        double asd_rad,
                                                        std::uint64_t seed);

/// Normalized (unit-diagonal) local scattering correlation for a
/// half-wavelength ULA, averaged over the given perturbations.
Eigen::MatrixXcd local_scattering_correlation(
    int antennas, double azimuth, double elevation,
    std::span<const AnglePerturbation> perturbations);

/// R_kl = beta_kl times the normalized local scattering matrix.
std::vector<Eigen::MatrixXcd> spatial_correlation(
    const NetworkScenario& scenario, const GeometryConfig& cfg,
    std::uint64_t seed);

/// Hermitian PSD square-root factor via eigendecomposition.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& R);

/**
 * Joint pilot assignment and DCC clustering.
 *
 * The master AP of each UE is the argmax of its large-scale gains. The first
 * tau_p UEs take pilots 0..tau_p-1; every later UE picks the pilot with the
 * least accumulated gain at its master AP. Every UE is served by its master.
 * Each AP then serves, for every pilot not already taken by one of its
 * master UEs, the strongest eMBB UE on that pilot. URLLC UEs are served only
 * by their master. Ties go to the lowest index.
 */
PilotClustering assign_pilots_and_clusters(const NetworkScenario& scenario,
                                           int tau_p);

/// Full drop: positions, gains, correlation, pilots and clusters.
NetworkScenario make_scenario(const GeometryConfig& cfg, int tau_p,
                              std::uint64_t seed);

}  // namespace cfsim
