#include "cfsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfsim/rng.hpp"

namespace cfsim {

namespace {

constexpr double kPathLossIntercept = -30.5;
constexpr double kPathLossSlope = 36.7;
constexpr double kShadowingStdDb = 4.0;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

const char* to_string(ServiceClass c) {
  return c == ServiceClass::kUrllc ? "URLLC" : "eMBB";
}

void validate(const GeometryConfig& cfg) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("geometry: " + what);
  };
  if (cfg.num_aps < 1) fail("num_aps must be >= 1");
  if (cfg.antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
  if (cfg.num_ues < 1) fail("num_ues must be >= 1");
  if (cfg.num_aps * cfg.antennas_per_ap <= cfg.num_ues)
    fail("num_aps * antennas_per_ap must exceed num_ues");
  if (!(cfg.urllc_fraction >= 0.0 && cfg.urllc_fraction <= 1.0))
    fail("urllc_fraction must lie in [0, 1]");
  if (!(cfg.side_km > 0.0)) fail("side_km must be positive");
  if (!(cfg.asd_deg >= 0.0)) fail("asd_deg must be nonnegative");
  if (cfg.angle_samples < 1) fail("angle_samples must be >= 1");
}

int NetworkScenario::urllc_index(int k) const {
  auto it = std::find(urllc_ues.begin(), urllc_ues.end(), k);
  return it == urllc_ues.end() ? -1
                               : static_cast<int>(it - urllc_ues.begin());
}

void NetworkScenario::rebuild_index_sets() {
  const int K = num_ues();
  const int L = num_aps();
  serving_aps.assign(K, {});
  served_ues.assign(L, {});
  embb_ues.clear();
  urllc_ues.clear();
  for (int k = 0; k < K; ++k) {
    (is_urllc(k) ? urllc_ues : embb_ues).push_back(k);
    if (served.empty()) continue;
    for (int l = 0; l < L; ++l) {
      if (serves(k, l)) {
        serving_aps[k].push_back(l);
        served_ues[l].push_back(k);
      }
    }
  }
}

NetworkScenario drop_network(const GeometryConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  NetworkScenario sc;
  sc.geometry = cfg;

  Rng pos_rng = make_rng(subseed(seed, StreamPurpose::kPositions));
  std::uniform_real_distribution<double> coord(0.0, 1000.0 * cfg.side_km);
  sc.ap_pos.resize(cfg.num_aps);
  for (auto& p : sc.ap_pos) {
    p.x = coord(pos_rng);
    p.y = coord(pos_rng);
  }
  sc.ue_pos.resize(cfg.num_ues);
  for (auto& p : sc.ue_pos) {
    p.x = coord(pos_rng);
    p.y = coord(pos_rng);
  }

  const int num_urllc =
      static_cast<int>(std::lround(cfg.urllc_fraction * cfg.num_ues));
  sc.urllc_fraction_degenerate = cfg.urllc_fraction > 0.0 && num_urllc == 0;

  std::vector<int> order(cfg.num_ues);
  std::iota(order.begin(), order.end(), 0);
  Rng class_rng = make_rng(subseed(seed, StreamPurpose::kServiceClass));
  std::shuffle(order.begin(), order.end(), class_rng);
  sc.service_class.assign(cfg.num_ues, ServiceClass::kEmbb);
  for (int i = 0; i < num_urllc; ++i)
    sc.service_class[order[i]] = ServiceClass::kUrllc;

  sc.rebuild_index_sets();
  return sc;
}

double umi_gain_db(double distance_3d_m, double shadowing_db) {
  return kPathLossIntercept - kPathLossSlope * std::log10(distance_3d_m) +
         shadowing_db;
}

double distance_3d(const Position& ap, const Position& ue, double height_diff) {
  return std::hypot(ap.x - ue.x, ap.y - ue.y, height_diff);
}

Eigen::MatrixXd large_scale_gains(const NetworkScenario& scenario,
                                  std::uint64_t seed) {
  const auto& g = scenario.geometry;
  const double dh = g.ap_height_m - g.ue_height_m;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> shadow(0.0, kShadowingStdDb);

  Eigen::MatrixXd beta(g.num_ues, g.num_aps);
  for (int k = 0; k < g.num_ues; ++k) {
    for (int l = 0; l < g.num_aps; ++l) {
      const double d = distance_3d(scenario.ap_pos[l], scenario.ue_pos[k], dh);
      beta(k, l) = std::pow(10.0, umi_gain_db(d, shadow(rng)) / 10.0);
    }
  }
  return beta;
}

std::vector<AnglePerturbation> draw_angle_perturbations(int count,
                                                        double asd_rad,
                                                        std::uint64_t seed) {
  std::vector<AnglePerturbation> out(count);
  if (asd_rad == 0.0) return out;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> n(0.0, asd_rad);
  for (auto& p : out) {
    p.azimuth = n(rng);
    p.elevation = n(rng);
  }
  return out;
}

namespace {

struct PerturbationTable {
  std::vector<double> cos_az, sin_az, cos_el, sin_el;

  explicit PerturbationTable(std::span<const AnglePerturbation> p) {
    for (const auto& a : p) {
      cos_az.push_back(std::cos(a.azimuth));
      sin_az.push_back(std::sin(a.azimuth));
      cos_el.push_back(std::cos(a.elevation));
      sin_el.push_back(std::sin(a.elevation));
    }
  }
  std::size_t size() const { return cos_az.size(); }
};

// The ULA response makes every sample a a^H Toeplitz, so only the first
// column c_d = E[exp(j pi d x)], x = sin(az) cos(el), is accumulated.
Eigen::MatrixXcd toeplitz_correlation(int antennas, double azimuth,
                                      double elevation,
                                      const PerturbationTable& table) {
  const std::size_t n = table.size();
  std::vector<std::complex<double>> col(antennas, {0.0, 0.0});
  const double sa = std::sin(azimuth), ca = std::cos(azimuth);
  const double se = std::sin(elevation), ce = std::cos(elevation);

  // Split real/imaginary arrays; the per-lag update below vectorizes.
  thread_local std::vector<double> step_re, step_im, term_re, term_im;
  step_re.resize(n);
  step_im.resize(n);
  term_re.resize(n);
  term_im.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sin_az = sa * table.cos_az[i] + ca * table.sin_az[i];
    const double cos_el = ce * table.cos_el[i] - se * table.sin_el[i];
    const double phase = std::numbers::pi * sin_az * cos_el;
    step_re[i] = term_re[i] = std::cos(phase);
    step_im[i] = term_im[i] = std::sin(phase);
  }
  for (int d = 1; d < antennas; ++d) {
    if (d > 1) {
      for (std::size_t i = 0; i < n; ++i) {
        const double re = term_re[i] * step_re[i] - term_im[i] * step_im[i];
        const double im = term_re[i] * step_im[i] + term_im[i] * step_re[i];
        term_re[i] = re;
        term_im[i] = im;
      }
    }
    double acc_re = 0.0, acc_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc_re += term_re[i];
      acc_im += term_im[i];
    }
    col[d] = {acc_re, acc_im};
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  col[0] = {1.0, 0.0};
  for (int d = 1; d < antennas; ++d) col[d] *= inv_n;

  Eigen::MatrixXcd R(antennas, antennas);
  for (int m = 0; m < antennas; ++m) {
    for (int n = 0; n < antennas; ++n) {
      R(m, n) = m >= n ? col[m - n] : std::conj(col[n - m]);
    }
  }
  return R;
}

}  // namespace

Eigen::MatrixXcd local_scattering_correlation(
    int antennas, double azimuth, double elevation,
    std::span<const AnglePerturbation> perturbations) {
  return toeplitz_correlation(antennas, azimuth, elevation,
                              PerturbationTable(perturbations));
}

std::vector<Eigen::MatrixXcd> spatial_correlation(
    const NetworkScenario& scenario, const GeometryConfig& cfg,
    std::uint64_t seed) {
  const PerturbationTable table(draw_angle_perturbations(
      cfg.angle_samples, deg_to_rad(cfg.asd_deg), seed));
  const double dh = cfg.ue_height_m - cfg.ap_height_m;
  const int K = cfg.num_ues;
  const int L = cfg.num_aps;
  std::vector<Eigen::MatrixXcd> out(static_cast<std::size_t>(K) * L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      const auto& ap = scenario.ap_pos[l];
      const auto& ue = scenario.ue_pos[k];
      const double az = std::atan2(ue.y - ap.y, ue.x - ap.x);
      const double el = std::atan2(dh, std::hypot(ue.x - ap.x, ue.y - ap.y));
      out[static_cast<std::size_t>(k) * L + l] =
          scenario.beta(k, l) *
          toeplitz_correlation(cfg.antennas_per_ap, az, el, table);
    }
  }
  return out;
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& R) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

PilotClustering assign_pilots_and_clusters(const NetworkScenario& scenario,
                                           int tau_p) {
  if (tau_p < 1) throw std::invalid_argument("tau_p must be >= 1");
  const int K = scenario.num_ues();
  const int L = scenario.num_aps();
  const auto& beta = scenario.beta;

  PilotClustering pc;
  pc.master_ap.resize(K);
  pc.pilot.assign(K, -1);
  for (int k = 0; k < K; ++k) {
    Eigen::Index best = 0;
    beta.row(k).maxCoeff(&best);  // first maximum on ties
    pc.master_ap[k] = static_cast<int>(best);
  }

  for (int k = 0; k < K; ++k) {
    if (k < tau_p) {
      pc.pilot[k] = k;
      continue;
    }
    const int master = pc.master_ap[k];
    std::vector<double> contamination(tau_p, 0.0);
    for (int i = 0; i < k; ++i)
      contamination[pc.pilot[i]] += beta(i, master);
    pc.pilot[k] = static_cast<int>(
        std::min_element(contamination.begin(), contamination.end()) -
        contamination.begin());
  }

  pc.served.assign(static_cast<std::size_t>(K) * L, 0);
  auto at = [&](int k, int l) -> char& {
    return pc.served[static_cast<std::size_t>(k) * L + l];
  };
  for (int k = 0; k < K; ++k) at(k, pc.master_ap[k]) = 1;

  for (int l = 0; l < L; ++l) {
    std::vector<char> pilot_taken(tau_p, 0);
    for (int k = 0; k < K; ++k)
      if (pc.master_ap[k] == l) pilot_taken[pc.pilot[k]] = 1;
    for (int t = 0; t < tau_p; ++t) {
      if (pilot_taken[t]) continue;
      int best = -1;
      for (int k = 0; k < K; ++k) {
        if (pc.pilot[k] != t || scenario.is_urllc(k)) continue;
        if (best < 0 || beta(k, l) > beta(best, l)) best = k;
      }
      if (best >= 0) at(best, l) = 1;
    }
  }
  return pc;
}

NetworkScenario make_scenario(const GeometryConfig& cfg, int tau_p,
                              std::uint64_t seed) {
  NetworkScenario sc = drop_network(cfg, seed);
  sc.beta = large_scale_gains(sc, subseed(seed, StreamPurpose::kShadowing));
  sc.corr = spatial_correlation(sc, cfg, subseed(seed, StreamPurpose::kAngles));
  sc.corr_sqrt.reserve(sc.corr.size());
  for (const auto& R : sc.corr) sc.corr_sqrt.push_back(psd_sqrt(R));

  PilotClustering pc = assign_pilots_and_clusters(sc, tau_p);
  sc.tau_p = tau_p;
  sc.pilot = std::move(pc.pilot);
  sc.master_ap = std::move(pc.master_ap);
  sc.served = std::move(pc.served);
  sc.rebuild_index_sets();
  return sc;
}

}  // namespace cfsim
