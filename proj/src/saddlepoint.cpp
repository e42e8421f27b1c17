#include "cfsim/saddlepoint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cfsim/rcus_oracle.hpp"

namespace cfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(const CgfValue& v) {
  return std::isfinite(v.value) && std::isfinite(v.d1) && std::isfinite(v.d2);
}

SaddlepointResult failed() {
  SaddlepointResult r;
  r.eps = std::numeric_limits<double>::quiet_NaN();
  r.log_eps = r.eps;
  r.fell_back = true;
  r.regime = SaddlepointRegime::kMonteCarlo;
  return r;
}

SaddlepointResult clipped(double log_eps, double zeta, SaddlepointRegime regime) {
  SaddlepointResult r;
  r.log_eps = std::min(0.0, log_eps);
  r.eps = std::exp(r.log_eps);
  r.zeta = zeta;
  r.regime = regime;
  return r;
}

// exp(n u^2 k2 / 2) Q(u sqrt(n k2)) for u >= 0.
double psi(double u, double n, double k2) {
  return 0.5 * erfcx(u * std::sqrt(n * k2) / std::numbers::sqrt2);
}

}  // namespace

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; the first omitted term is below 1e-10 relative here.
  const double inv2 = 1.0 / (x * x);
  const double series =
      1.0 - 0.5 * inv2 + 0.75 * inv2 * inv2 - 1.875 * inv2 * inv2 * inv2;
  return series / (x * std::sqrt(std::numbers::pi));
}

SaddlepointResult saddlepoint_tail(const Cgf& cgf, double rate, int n) {
  if (rate == -kInf) {
    SaddlepointResult r;
    r.eps = 0.0;
    r.log_eps = -kInf;
    r.regime = SaddlepointRegime::kNoCompetitors;
    return r;
  }
  const CgfValue at0 = cgf(0.0);
  if (!finite(at0)) return failed();
  if (rate >= at0.d1) return clipped(0.0, 0.0, SaddlepointRegime::kAboveMean);

  const double nd = static_cast<double>(n);
  double lo;
  const double limit = cgf.lower_limit();
  if (limit < -1.0) {
    const CgfValue at1 = cgf(-1.0);
    if (!finite(at1)) return failed();
    if (rate < at1.d1) {
      const double gap = at1.d1 - rate;
      const double base = nd * (at1.value + rate);
      double t1 = 0.0, t2 = 1.0;
      if (at1.d2 > 0.0) {
        const double sd = std::sqrt(nd * at1.d2);
        t1 = std::exp(-nd * gap * gap / (2.0 * at1.d2)) * 0.5 *
             erfcx((sd + nd * gap / sd) / std::numbers::sqrt2);
        t2 = 0.5 * std::erfc(-(nd * gap / sd) / std::numbers::sqrt2);
      }
      return clipped(base + std::log(t1 + t2), -1.0,
                     SaddlepointRegime::kBelowCritical);
    }
    lo = -1.0;
  } else {
    // kappa' diverges to -inf at the pole, so the root lies inside.
    lo = limit * (1.0 - 1e-12);
  }

  // Safeguarded Newton on kappa'(zeta) = rate over [lo, 0].
  double hi = 0.0;
  double zeta = 0.5 * (lo + hi);
  CgfValue v{};
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    v = cgf(zeta);
    if (!finite(v)) {
      lo = zeta;
      zeta = 0.5 * (lo + hi);
      continue;
    }
    const double f = v.d1 - rate;
    if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(rate))) {
      converged = true;
      break;
    }
    (f < 0.0 ? lo : hi) = zeta;
    const double step = zeta - f / v.d2;
    zeta = (v.d2 > 0.0 && step > lo && step < hi) ? step : 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(lo))) {
      v = cgf(zeta);
      converged = finite(v);
      break;
    }
  }
  if (!converged) return failed();

  const double u = -zeta;
  const double base = nd * (v.value - zeta * rate);
  const double tail = psi(u, nd, v.d2) + psi(1.0 - u, nd, v.d2);
  return clipped(base + std::log(tail), zeta, SaddlepointRegime::kSaddle);
}

SaddlepointResult saddlepoint_eps(const UrllcLink& link, CgfMethod method,
                                  std::uint64_t fallback_seed,
                                  std::size_t fallback_trials) {
  const double rate = rate_nats(link);
  SaddlepointResult r;
  if (method == CgfMethod::kClosedForm) {
    r = saddlepoint_tail(InformationDensityCgf(link), rate, link.n_d);
  } else {
    r = saddlepoint_tail(QuadratureCgf(link), rate, link.n_d);
  }
  if (r.fell_back) {
    const OracleEstimate mc = rcus_mc_oracle(link, fallback_trials, fallback_seed);
    r.eps = mc.eps;
    r.log_eps = std::log(mc.eps);
  }
  return r;
}

double optimize_s(const UrllcLink& link) {
  const double s0 = 1.0 / (link.sigma2_eff + std::norm(link.g_hat));
  if (std::norm(link.g_hat) == 0.0 || !std::isfinite(s0)) return s0;

  const double rate = rate_nats(link);
  auto objective = [&](double log_s) {
    UrllcLink l = link;
    l.s = std::exp(log_s);
    const SaddlepointResult r =
        saddlepoint_tail(InformationDensityCgf(l), rate, l.n_d);
    return r.fell_back ? -kInf : -r.log_eps / l.n_d;
  };

  constexpr int kGrid = 25;
  const double center = std::log(s0);
  const double half_width = 3.0 * std::numbers::ln10;
  std::array<double, kGrid> xs{}, fs{};
  int best = 0;
  for (int i = 0; i < kGrid; ++i) {
    xs[i] = center - half_width + 2.0 * half_width * i / (kGrid - 1);
    fs[i] = objective(xs[i]);
    if (fs[i] > fs[best]) best = i;
  }
  const double f0 = objective(center);
  const auto [mn, mx] = std::minmax_element(fs.begin(), fs.end());
  if (!(*mx - *mn > 1e-12 * std::max(1.0, std::abs(*mx)))) return s0;

  // Golden-section maximization between the best grid point's neighbours.
  double a = xs[std::max(best - 1, 0)];
  double b = xs[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-5) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  double x_best = fc >= fd ? c : d;
  double f_best = std::max(fc, fd);
  if (fs[best] > f_best) {
    x_best = xs[best];
    f_best = fs[best];
  }
  return f_best > f0 ? std::exp(x_best) : s0;
}

SaddlepointResult link_error_probability(UrllcLink link) {
  link.s = optimize_s(link);
  return saddlepoint_eps(link);
}

}  // namespace cfsim
