#include "cfsim/information_density.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cfsim {

double gid(std::complex<double> q, std::complex<double> y,
           std::complex<double> g_hat, double s) {
  const double a = 1.0 + s * std::norm(g_hat);
  return -s * std::norm(y - g_hat * q) + s * std::norm(y) / a + std::log(a);
}

double log_competing_codewords(int b_bits) {
  if (b_bits < 0) throw std::invalid_argument("b_bits must be nonnegative");
  if (b_bits == 0) return -std::numeric_limits<double>::infinity();
  return b_bits * std::numbers::ln2 + std::log1p(-std::exp2(-b_bits));
}

double rate_nats(const UrllcLink& link) {
  return log_competing_codewords(link.b_bits) / link.n_d;
}

InformationDensityCgf::InformationDensityCgf(std::complex<double> g,
                                             std::complex<double> g_hat,
                                             double sigma2, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("s must be positive");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
  const double a = 1.0 + s * std::norm(g_hat);
  log_a_ = std::log(a);

  // i_s - ln a = u^H Q u with u = (q, z) and
  // Q = -s conj(v1) v1^T + (s / a) conj(v2) v2^T, v1 = (g - g_hat, 1),
  // v2 = (g, 1). Whitening by diag(1, sigma) gives the 2x2 Hermitian form
  // whose eigenvalues are the CGF poles.
  const std::complex<double> d = g - g_hat;
  const double sigma = std::sqrt(sigma2);
  const double q11 = -s * std::norm(d) + s / a * std::norm(g);
  const double q22 = sigma2 * (-s + s / a);
  const std::complex<double> q12 = sigma * (-s * std::conj(d) + s / a * std::conj(g));

  const double half_trace = 0.5 * (q11 + q22);
  const double disc = std::hypot(0.5 * (q11 - q22), std::abs(q12));
  const double det = q11 * q22 - std::norm(q12);
  // Recover the smaller-magnitude root from the determinant.
  if (half_trace >= 0.0) {
    lambda_hi_ = half_trace + disc;
    lambda_lo_ = lambda_hi_ != 0.0 ? det / lambda_hi_ : 0.0;
  } else {
    lambda_lo_ = half_trace - disc;
    lambda_hi_ = det / lambda_lo_;
  }
  if (lambda_lo_ > lambda_hi_) std::swap(lambda_lo_, lambda_hi_);
}

CgfValue InformationDensityCgf::operator()(double zeta) const {
  CgfValue v;
  v.value = zeta * log_a_;
  v.d1 = log_a_;
  for (double lambda : {lambda_lo_, lambda_hi_}) {
    const double den = 1.0 - zeta * lambda;
    if (!(den > 0.0)) {
      const double inf = std::numeric_limits<double>::infinity();
      return {inf, std::numeric_limits<double>::quiet_NaN(), inf};
    }
    v.value -= std::log1p(-zeta * lambda);
    v.d1 += lambda / den;
    v.d2 += (lambda / den) * (lambda / den);
  }
  return v;
}

double InformationDensityCgf::lower_limit() const {
  return lambda_lo_ < 0.0 ? 1.0 / lambda_lo_
                          : -std::numeric_limits<double>::infinity();
}

double InformationDensityCgf::upper_limit() const {
  return lambda_hi_ > 0.0 ? 1.0 / lambda_hi_
                          : std::numeric_limits<double>::infinity();
}

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite order must be >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    J(i, i - 1) = std::sqrt(i / 2.0);
    J(i - 1, i) = J(i, i - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  GaussHermiteRule rule;
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(eig.eigenvalues()(i));
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

QuadratureCgf::QuadratureCgf(const UrllcLink& link, int nodes_per_dim)
    : link_(link), rule_(gauss_hermite(nodes_per_dim)) {
  // Each real coordinate of q and z / sigma is N(0, 1/2), whose density is
  // proportional to exp(-t^2): the nodes are used unscaled.
  const int n = nodes_per_dim;
  const double sigma = std::sqrt(link.sigma2_eff);
  const double inv_pi = 1.0 / std::numbers::pi;
  values_.reserve(static_cast<std::size_t>(n) * n * n * n);
  weights_.reserve(values_.capacity());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const std::complex<double> q(rule_.nodes[a], rule_.nodes[b]);
      const double wq = rule_.weights[a] * rule_.weights[b];
      const std::complex<double> gq = link.g_eff * q;
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          const std::complex<double> z(sigma * rule_.nodes[c],
                                       sigma * rule_.nodes[d]);
          values_.push_back(gid(q, gq + z, link.g_hat, link.s));
          weights_.push_back(wq * rule_.weights[c] * rule_.weights[d] *
                             inv_pi * inv_pi);
        }
      }
    }
  }
}

CgfValue QuadratureCgf::operator()(double zeta) const {
  double shift = -std::numeric_limits<double>::infinity();
  for (double v : values_) shift = std::max(shift, zeta * v);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double e = weights_[i] * std::exp(zeta * values_[i] - shift);
    m0 += e;
    m1 += e * values_[i];
    m2 += e * values_[i] * values_[i];
  }
  CgfValue v;
  v.value = std::log(m0) + shift;
  v.d1 = m1 / m0;
  v.d2 = std::max(0.0, m2 / m0 - v.d1 * v.d1);
  return v;
}

double QuadratureCgf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m += weights_[i] * values_[i];
  return m;
}

}  // namespace cfsim
