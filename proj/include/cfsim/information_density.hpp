/**
 * @file information_density.hpp
 * @brief Generalized information density of the scaled nearest-neighbor
 * decoder and its cumulant generating function.
 *
 * With codeword symbols q ~ CN(0,1), received y = g q + z, z ~ CN(0, sigma^2)
 * and decoder channel g_hat,
 *
 *   i_s(q, y) = -s |y - g_hat q|^2 + s |y|^2 / (1 + s |g_hat|^2)
 *               + ln(1 + s |g_hat|^2).
 *
 * Two CGF evaluators are provided. InformationDensityCgf whitens (q, z) and
 * writes i_s as ln(a) + lambda_1 |e_1|^2 + lambda_2 |e_2|^2 with e ~ CN(0, I),
 * so kappa(zeta) = zeta ln a - sum ln(1 - zeta lambda_i) exactly.
 * QuadratureCgf integrates over the four real Gaussian coordinates with a
 * tensorized Gauss-Hermite rule and does not use that decomposition.
 */
#pragma once

#include <complex>
#include <vector>

namespace cfsim {

/// Effective URLLC link for one slot.
struct UrllcLink {
  std::complex<double> g_eff{0.0, 0.0};  ///< realized precoded gain
  std::complex<double> g_hat{0.0, 0.0};  ///< decoder-side mean gain
  double sigma2_eff = 0.0;               ///< W
  int n_d = 1;                           ///< channel uses
  int b_bits = 0;
  double s = 1.0;
};

double gid(std::complex<double> q, std::complex<double> y,
           std::complex<double> g_hat, double s);

/// ln(2^b - 1); -inf when b = 0.
double log_competing_codewords(int b_bits);

/// ln(2^b - 1) / n_d in nats per channel use.
double rate_nats(const UrllcLink& link);

/// kappa and its first two derivatives at one point.
struct CgfValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class Cgf {
 public:
  virtual ~Cgf() = default;
  virtual CgfValue operator()(double zeta) const = 0;
  /// Open interval on which the CGF is finite (may be infinite).
  virtual double lower_limit() const = 0;
  virtual double upper_limit() const = 0;
};

class InformationDensityCgf final : public Cgf {
 public:
  InformationDensityCgf(std::complex<double> g, std::complex<double> g_hat,
                        double sigma2, double s);
  explicit InformationDensityCgf(const UrllcLink& link)
      : InformationDensityCgf(link.g_eff, link.g_hat, link.sigma2_eff, link.s) {}

  CgfValue operator()(double zeta) const override;
  double lower_limit() const override;
  double upper_limit() const override;

  /// E[i_s] = kappa'(0).
  double mean() const { return log_a_ + lambda_lo_ + lambda_hi_; }
  double lambda_lo() const { return lambda_lo_; }
  double lambda_hi() const { return lambda_hi_; }

 private:
  double log_a_ = 0.0;
  double lambda_lo_ = 0.0;
  double lambda_hi_ = 0.0;
};

/// Nodes and weights for int exp(-t^2) f(t) dt (Golub-Welsch).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int n);

class QuadratureCgf final : public Cgf {
 public:
  QuadratureCgf(const UrllcLink& link, int nodes_per_dim = 32);

  CgfValue operator()(double zeta) const override;
  /// The rule cannot detect divergence; callers get the RCUs range [-1, 0].
  double lower_limit() const override { return -1.0 - 1e-9; }
  double upper_limit() const override { return 1.0; }

  /// E[i_s] by the same rule.
  double mean() const;

 private:
  UrllcLink link_;
  GaussHermiteRule rule_;
  std::vector<double> values_;   ///< i_s at every node
  std::vector<double> weights_;  ///< product weights, sum to 1
};

}  // namespace cfsim
