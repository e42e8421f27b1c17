#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "cfsim/scenario.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfsim;

namespace {

GeometryConfig small_geometry() {
  GeometryConfig g;
  g.num_aps = 16;
  g.num_ues = 12;
  g.angle_samples = 2000;
  return g;
}

double db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace

TEST_CASE("drop_network: class split and coordinates") {
  GeometryConfig g;
  g.angle_samples = 10;
  const NetworkScenario sc = drop_network(g, 7);
  CHECK(sc.urllc_ues.size() == 8);
  CHECK(sc.embb_ues.size() == 32);
  for (const auto& p : sc.ap_pos) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1000.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1000.0);
  }
  for (const auto& p : sc.ue_pos) {
    CHECK(p.x >= 0.0);
    CHECK(p.y <= 1000.0);
  }
  CHECK_FALSE(sc.urllc_fraction_degenerate);

  g.urllc_fraction = 0.0;
  const NetworkScenario none = drop_network(g, 7);
  CHECK(none.urllc_ues.empty());
  CHECK(none.embb_ues.size() == 40);

  g.urllc_fraction = 0.01;  // 0.4 UEs rounds to zero
  CHECK(drop_network(g, 7).urllc_fraction_degenerate);
}

TEST_CASE("make_scenario is bit-for-bit deterministic") {
  const GeometryConfig g = small_geometry();
  const NetworkScenario a = make_scenario(g, 4, 3);
  const NetworkScenario b = make_scenario(g, 4, 3);
  CHECK(a.beta == b.beta);
  CHECK(a.pilot == b.pilot);
  CHECK(a.served == b.served);
  for (std::size_t i = 0; i < a.corr.size(); ++i) CHECK(a.corr[i] == b.corr[i]);
  const NetworkScenario c = make_scenario(g, 4, 4);
  CHECK(a.beta != c.beta);
}

TEST_CASE("UMi gain at reference distances") {
  // d_3D = 8.5 m: -30.5 - 36.7 log10(8.5) = -64.6097 dB.
  CHECK(umi_gain_db(8.5, 0.0) == doctest::Approx(-64.6097).epsilon(1e-6));
  CHECK(umi_gain_db(100.0, 0.0) == doctest::Approx(-103.9).epsilon(1e-12));
  CHECK(distance_3d({0, 0}, {0, 0}, 8.5) == doctest::Approx(8.5));
  CHECK(distance_3d({0, 0}, {30, 40}, 0.0) == doctest::Approx(50.0));
}

TEST_CASE("shadowing moments over 1e5 draws") {
  NetworkScenario sc;
  sc.geometry.num_aps = 100;
  sc.geometry.num_ues = 1000;
  sc.ap_pos.assign(100, {500, 500});
  sc.ue_pos.assign(1000, {500, 500});
  const Eigen::MatrixXd beta = large_scale_gains(sc, 21);
  const double base = umi_gain_db(8.5, 0.0);
  double sum = 0, sum2 = 0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    const double f = db(beta.data()[i]) - base;
    sum += f;
    sum2 += f * f;
  }
  const double n = static_cast<double>(beta.size());
  const double mean = sum / n;
  CHECK(std::abs(mean) <= 0.05);
  CHECK(std::sqrt(sum2 / n - mean * mean) == doctest::Approx(4.0).epsilon(0.05 / 4.0));
}

TEST_CASE("local scattering correlation: unit diagonal, Hermitian, PSD") {
  const auto pert = draw_angle_perturbations(10000, 15.0 * std::numbers::pi / 180.0, 5);
  for (double az : {-2.0, -0.3, 0.0, 0.7, 2.9}) {
    const Eigen::MatrixXcd R = local_scattering_correlation(8, az, -0.1, pert);
    for (int m = 0; m < 8; ++m) CHECK(std::abs(R(m, m) - 1.0) <= 1e-2);
    CHECK((R - R.adjoint()).norm() <= 1e-12 * R.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * R.trace().real());
    // A 15 degree spread leaves the matrix far from rank one.
    CHECK(eig.eigenvalues().maxCoeff() / std::max(eig.eigenvalues().minCoeff(), 1e-300) > 1.0);
    CHECK(eig.eigenvalues().maxCoeff() < 8.0 * 0.999);
  }
}

TEST_CASE("zero angular spread gives the rank-one array response") {
  const auto pert = draw_angle_perturbations(100, 0.0, 5);
  const double az = 0.4, el = -0.2;
  const Eigen::MatrixXcd R = local_scattering_correlation(4, az, el, pert);
  Eigen::VectorXcd a(4);
  for (int m = 0; m < 4; ++m)
    a(m) = std::polar(1.0, std::numbers::pi * m * std::sin(az) * std::cos(el));
  CHECK((R - a * a.adjoint()).norm() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
  CHECK(eig.eigenvalues().maxCoeff() / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scenario correlation matrices satisfy trace and PSD invariants") {
  const GeometryConfig g = small_geometry();
  const NetworkScenario sc = make_scenario(g, 4, 17);
  for (int k = 0; k < sc.num_ues(); ++k) {
    for (int l = 0; l < sc.num_aps(); ++l) {
      const Eigen::MatrixXcd& R = sc.R(k, l);
      const double tr = R.trace().real();
      CHECK(tr / g.antennas_per_ap == doctest::Approx(sc.beta(k, l)).epsilon(1e-2));
      CHECK((R - R.adjoint()).norm() <= 1e-12 * R.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * tr);
      const Eigen::MatrixXcd& F = sc.R_sqrt(k, l);
      CHECK((F * F.adjoint() - R).norm() <= 1e-9 * R.norm());
    }
  }
}

TEST_CASE("pilots: enough orthogonal pilots means no sharing") {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Random(6, 5).cwiseAbs();
  const NetworkScenario sc = test::manual_scenario(beta, 2, 8);
  std::set<int> used(sc.pilot.begin(), sc.pilot.end());
  CHECK(used.size() == 6);
}

TEST_CASE("pilots and clusters on a full-size drop") {
  GeometryConfig g;
  g.angle_samples = 10;
  const NetworkScenario sc = make_scenario(g, 10, 7);
  const int K = sc.num_ues(), L = sc.num_aps();

  std::map<int, int> reuse;
  for (int k = 0; k < K; ++k) {
    CHECK(sc.pilot[k] >= 0);
    CHECK(sc.pilot[k] < 10);
    ++reuse[sc.pilot[k]];
  }
  int total = 0;
  for (auto [t, n] : reuse) total += n;
  CHECK(total == K);

  for (int k = 0; k < K; ++k) {
    Eigen::Index best;
    sc.beta.row(k).maxCoeff(&best);
    CHECK(sc.master_ap[k] == best);
    CHECK(sc.serves(k, sc.master_ap[k]));
    CHECK_FALSE(sc.serving_aps[k].empty());
    if (sc.is_urllc(k)) CHECK(sc.serving_aps[k].size() == 1);
  }

  // At most one UE per pilot at each AP, except UEs forced onto a shared
  // master.
  for (int l = 0; l < L; ++l) {
    std::map<int, std::vector<int>> by_pilot;
    for (int k : sc.served_ues[l]) by_pilot[sc.pilot[k]].push_back(k);
    for (const auto& [t, ues] : by_pilot) {
      if (ues.size() <= 1) continue;
      for (int k : ues) CHECK(sc.master_ap[k] == l);
    }
  }
}

TEST_CASE("single AP: every UE is mastered and served by it") {
  Eigen::MatrixXd beta(5, 1);
  beta << 1e-9, 2e-9, 3e-9, 4e-9, 5e-9;
  const NetworkScenario sc = test::manual_scenario(
      beta, 8, 2,
      {ServiceClass::kEmbb, ServiceClass::kUrllc, ServiceClass::kEmbb,
       ServiceClass::kEmbb, ServiceClass::kUrllc});
  for (int k = 0; k < 5; ++k) {
    CHECK(sc.master_ap[k] == 0);
    CHECK(sc.serves(k, 0));
  }
}

TEST_CASE("geometry validation") {
  GeometryConfig g;
  g.num_ues = 400;  // L*M = 400
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
  g = GeometryConfig{};
  g.urllc_fraction = 1.5;
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
  g = GeometryConfig{};
  g.side_km = 0.0;
  CHECK_THROWS_AS(validate(g), std::invalid_argument);
}
