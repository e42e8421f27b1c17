#include <cmath>
#include <limits>

#include "cfsim/urllc.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cfsim;
using cd = std::complex<double>;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// UE0 URLLC at AP0; UE1 eMBB served by AP0 and AP1.
struct Toy {
  NetworkScenario sc;
  ServedPairs pairs;
  Eigen::MatrixXcd G;
  NormalizationEnsemble ens;
};

Toy toy() {
  Eigen::MatrixXd beta(2, 2);
  beta << 1.0, 1e-3, 0.5, 0.8;
  Toy t;
  t.sc = test::manual_scenario(beta, 1, 2, {ServiceClass::kUrllc, ServiceClass::kEmbb});
  test::set_service(t.sc, {1, 0, 1, 1});
  t.pairs = ServedPairs::from(t.sc);  // (0,0), (1,0), (1,1)
  t.G.resize(2, 3);
  t.G << cd(1.0, 0.5), cd(0.2, -0.1), cd(0.0, 0.3),  //
      cd(0.1, 0.0), cd(2.0, 0.0), cd(1.5, 0.5);
  t.ens.scheme = PrecoderScheme::kMr;
  t.ens.mean_gain = Eigen::MatrixXcd::Zero(2, 2);
  t.ens.mean_gain(0, 0) = cd(0.9, 0.4);
  return t;
}

}  // namespace

TEST_CASE("precoded gain sums the serving APs") {
  const Toy t = toy();
  Eigen::MatrixXd amp(2, 2);
  amp << 0.5, 0.0, 0.3, 0.4;
  CHECK(precoded_gain(t.G, t.pairs, amp, 0, 0) == 0.5 * cd(1.0, 0.5));
  const cd g01 = precoded_gain(t.G, t.pairs, amp, 0, 1);
  CHECK(std::abs(g01 - (0.3 * cd(0.2, -0.1) + 0.4 * cd(0.0, 0.3))) < 1e-15);
}

TEST_CASE("effective URLLC link") {
  const Toy t = toy();
  Eigen::MatrixXd amp(2, 2);
  amp << 0.5, 0.0, 0.3, 0.4;
  const auto link = effective_link(t.sc, t.pairs, t.G, amp, t.ens, 0, 0.01, 114, 160);
  REQUIRE(link.has_value());
  CHECK(link->g_eff == 0.5 * cd(1.0, 0.5));
  CHECK(link->g_hat == 0.5 * cd(0.9, 0.4));
  const double interf = std::norm(0.3 * cd(0.2, -0.1) + 0.4 * cd(0.0, 0.3));
  CHECK(link->sigma2_eff == doctest::Approx(interf + 0.01));
  CHECK(link->n_d == 114);
  CHECK(link->b_bits == 160);

  amp(0, 0) = 0.0;
  CHECK_FALSE(effective_link(t.sc, t.pairs, t.G, amp, t.ens, 0, 0.01, 114, 160).has_value());
}

TEST_CASE("eps accumulator") {
  EpsAccumulator a;
  CHECK(std::isnan(a.mean()));
  SaddlepointResult r;
  r.eps = 0.2;
  a.add(r);
  r.eps = 0.4;
  r.fell_back = true;
  a.add(r);
  CHECK(a.mean() == doctest::Approx(0.3));
  CHECK(a.count == 2);
  CHECK(a.fallbacks == 1);
}

TEST_CASE("availability") {
  const std::vector<double> eps{1e-7, 1e-3, 1e-5, kNan, 0.5};
  int excluded = -1;
  CHECK(availability(eps, 1e-5, &excluded) == doctest::Approx(0.5));
  CHECK(excluded == 1);
  CHECK(availability(eps, 1.0) == 1.0);
  CHECK(availability(eps, 0.0) == 0.0);
  CHECK(std::isnan(availability(std::vector<double>{kNan, kNan}, 1e-5)));
  const ErrorProbReport rep = make_report(eps, 1e-5);
  CHECK(rep.availability == doctest::Approx(0.5));
  CHECK(rep.excluded == 1);
  CHECK(rep.eps.size() == 5);
  CHECK(rep.eps_target == 1e-5);
}
