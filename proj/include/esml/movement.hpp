#ifndef ESML_MOVEMENT_HPP
#define ESML_MOVEMENT_HPP

#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "esml/constraint.hpp"
#include "esml/copula.hpp"
#include "esml/marginal.hpp"
#include "esml/quadrature.hpp"
#include "esml/rng.hpp"

namespace esml {

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Law H of one movement vector's first two coordinates: either a direct
/// bivariate Gaussian or marginals composed through a copula,
///   h(x) = c(H1(x1), H2(x2)) h1(x1) h2(x2).
/// Coordinates 3..d are i.i.d. from an independent tail marginal (standard
/// Gaussian by default); selection uses coordinate 1 and the constraint
/// uses coordinates 1-2, so the tail never feeds back into the chain.
///
/// A bivariate Gaussian is also exposed through its Sklar decomposition
/// (Gaussian marginals + Gaussian copula), which the quadrature layer uses
/// to map the plane onto the unit square.
class MovementDistribution {
 public:
  enum class Kind { BivariateGaussian, Composed };

  static MovementDistribution bivariate_gaussian(std::array<double, 2> mean, Matrix2 cov) {
    if (!(cov[0][1] == cov[1][0]))
      throw std::domain_error("MovementDistribution: covariance must be symmetric");
    const double det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if (!(cov[0][0] > 0.0 && det > 0.0))
      throw std::domain_error("MovementDistribution: covariance must be positive definite");
    MovementDistribution m(Kind::BivariateGaussian,
                           Marginal1D::gaussian(mean[0], std::sqrt(cov[0][0])),
                           Marginal1D::gaussian(mean[1], std::sqrt(cov[1][1])),
                           make_gaussian_copula(cov));
    m.mean_ = mean;
    m.cov_ = cov;
    return m;
  }

  static MovementDistribution standard_gaussian() {
    return bivariate_gaussian({0.0, 0.0}, {{{1.0, 0.0}, {0.0, 1.0}}});
  }

  static MovementDistribution composed(Marginal1D m1, Marginal1D m2, Copula c) {
    return MovementDistribution(Kind::Composed, m1, m2, std::move(c));
  }

  MovementDistribution with_tail(Marginal1D tail) const {
    MovementDistribution m = *this;
    m.tail_ = tail;
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  const Marginal1D& marginal1() const noexcept { return m1_; }
  const Marginal1D& marginal2() const noexcept { return m2_; }
  const Copula& copula() const noexcept { return copula_; }
  const Marginal1D& tail() const noexcept { return tail_; }

  /// Joint density of the first two coordinates; strictly positive on R^2.
  double density(double x1, double x2) const {
    if (kind_ == Kind::BivariateGaussian) {
      const double det = cov_[0][0] * cov_[1][1] - cov_[0][1] * cov_[1][0];
      const double dx = x1 - mean_[0];
      const double dy = x2 - mean_[1];
      const double q =
          (cov_[1][1] * dx * dx - 2.0 * cov_[0][1] * dx * dy + cov_[0][0] * dy * dy) / det;
      return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
    }
    // the marginal cdf saturates to {0,1} in doubles deep in the tails; clamp
    // into the open square so the density stays total on R^2
    return copula_.density(clamp01(m1_.cdf(x1)), clamp01(m2_.cdf(x2))) * m1_.pdf(x1) *
           m2_.pdf(x2);
  }

  /// Joint CDF H(x1, x2) = C(H1(x1), H2(x2)).
  double cdf(double x1, double x2) const {
    return copula_.cdf(m1_.cdf(x1), m2_.cdf(x2));
  }

  /// One draw of the first two coordinates.
  void sample2(RandomStream& rng, double& x1, double& x2) const {
    if (kind_ == Kind::BivariateGaussian) {
      // Cholesky transform of two independent normals
      const double l11 = std::sqrt(cov_[0][0]);
      const double l21 = cov_[0][1] / l11;
      const double l22 = std::sqrt(cov_[1][1] - l21 * l21);
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      x1 = mean_[0] + l11 * z1;
      x2 = mean_[1] + l21 * z1 + l22 * z2;
      return;
    }
    const auto [u, v] = copula_.sample(rng);
    x1 = m1_.quantile(clamp01(u));
    x2 = m2_.quantile(clamp01(v));
  }

  /// Full d-dimensional movement; coordinates 3..d i.i.d. from the tail
  /// marginal.
  std::vector<double> sample(int d, RandomStream& rng) const {
    if (d < 2) throw std::domain_error("MovementDistribution::sample: d must be >= 2");
    std::vector<double> x(static_cast<std::size_t>(d));
    sample2(rng, x[0], x[1]);
    for (int k = 2; k < d; ++k)
      x[static_cast<std::size_t>(k)] = tail_.quantile(clamp01(rng.uniform()));
    return x;
  }

 private:
  MovementDistribution(Kind k, Marginal1D m1, Marginal1D m2, Copula c)
      : kind_(k), m1_(m1), m2_(m2), copula_(std::move(c)) {}

  static Copula make_gaussian_copula(const Matrix2& cov) {
    const double rho = cov[0][1] / std::sqrt(cov[0][0] * cov[1][1]);
    if (rho == 0.0) return Copula::product();
    return Copula::gaussian(rho);
  }

  static double clamp01(double u) noexcept {
    if (u <= 0.0) return std::numeric_limits<double>::min();
    const double top = std::nextafter(1.0, 0.0);
    return u >= top ? top : u;
  }

  Kind kind_;
  Marginal1D m1_;
  Marginal1D m2_;
  Copula copula_;
  Marginal1D tail_ = Marginal1D::standard_gaussian();
  std::array<double, 2> mean_{0.0, 0.0};
  Matrix2 cov_{{{1.0, 0.0}, {0.0, 1.0}}};
};

/// P(n.x < delta) under H, using the first two components of n. Strictly
/// increasing in delta and always in (0,1) for a strictly positive density.
inline double halfspace_mass(const MovementDistribution& m, const ConstraintNormal& n,
                             double delta, const QuadratureSpec& spec = {}) {
  const double a = n.n1();
  const double b = n.n2();
  if (a == 0.0 && b == 0.0)
    throw std::domain_error("halfspace_mass: first two components of n are both zero");

  if (m.kind() == MovementDistribution::Kind::BivariateGaussian) {
    // n.x is 1-D Gaussian
    const double mu = a * m.marginal1().mean() + b * m.marginal2().mean();
    const double s1 = m.marginal1().stddev();
    const double s2 = m.marginal2().stddev();
    const double rho = m.copula().kind() == Copula::Kind::Gaussian ? m.copula().rho() : 0.0;
    const double var = a * a * s1 * s1 + 2.0 * a * b * rho * s1 * s2 + b * b * s2 * s2;
    return norm_cdf((delta - mu) / std::sqrt(var));
  }

  if (b == 0.0) {
    const double x = delta / a;
    return a > 0.0 ? m.marginal1().cdf(x) : 1.0 - m.marginal1().cdf(x);
  }
  if (a == 0.0) {
    const double y = delta / b;
    return b > 0.0 ? m.marginal2().cdf(y) : 1.0 - m.marginal2().cdf(y);
  }

  // integrate the conditional feasible probability over the first marginal
  const auto& c = m.copula();
  const auto& h1 = m.marginal1();
  const auto& h2 = m.marginal2();
  auto f = [&](double u1) {
    const double x1 = h1.quantile(u1);
    const double y = (delta - a * x1) / b;
    const double w = c.conditional(u1, h2.cdf(y));
    return b > 0.0 ? w : 1.0 - w;
  };
  return quad::integrate(f, 0.0, 1.0, spec);
}

}  // namespace esml

#endif  // ESML_MOVEMENT_HPP
