#ifndef ESML_COPULA_HPP
#define ESML_COPULA_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "esml/errors.hpp"
#include "esml/generator.hpp"
#include "esml/normal.hpp"
#include "esml/quadrature.hpp"
#include "esml/rng.hpp"

namespace esml {

/// Bivariate copula: product (independence), Archimedean (from a generator,
/// C = psi(psi^-1(u) + psi^-1(v))), or Gaussian with correlation rho.
///
/// Archimedean density and conditional are evaluated in log space so deep
/// tails (u or v near 0) do not underflow. Sampling uses the
/// conditional-distribution method: u ~ U(0,1), then v solves
/// dC/du(u, v) = w for an independent uniform w -- closed form for the
/// product and Gaussian kinds, bisection to 1e-12 for Archimedean.
class Copula {
 public:
  enum class Kind { Product, Archimedean, Gaussian };

  static Copula product() { return Copula(Kind::Product, std::nullopt, 0.0); }
  static Copula archimedean(ArchimedeanGenerator g) {
    return Copula(Kind::Archimedean, std::move(g), 0.0);
  }
  static Copula gumbel(double theta) { return archimedean(ArchimedeanGenerator::gumbel(theta)); }
  static Copula gaussian(double rho) {
    if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("Copula: rho must be in (-1,1)");
    return Copula(Kind::Gaussian, std::nullopt, rho);
  }

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  const ArchimedeanGenerator& generator() const { return *gen_; }

  double cdf(double u, double v) const {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
      throw std::domain_error("Copula::cdf: arguments must be in [0,1]");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    switch (kind_) {
      case Kind::Product:
        return u * v;
      case Kind::Archimedean:
        return gen_->psi(gen_->psi_inverse(u) + gen_->psi_inverse(v));
      case Kind::Gaussian:
        return gaussian_cdf(norm_quantile(u), norm_quantile(v));
    }
    return 0.0;
  }

  /// Copula density on the open square.
  double density(double u, double v) const {
    check_interior(u, v);
    switch (kind_) {
      case Kind::Product:
        return 1.0;
      case Kind::Archimedean: {
        const double tu = gen_->psi_inverse(u);
        const double tv = gen_->psi_inverse(v);
        return std::exp(gen_->log_psi_second(tu + tv) - gen_->log_abs_psi_prime(tu) -
                        gen_->log_abs_psi_prime(tv));
      }
      case Kind::Gaussian: {
        const double x = norm_quantile(u);
        const double y = norm_quantile(v);
        const double q = 1.0 - rho_ * rho_;
        return std::exp((2.0 * rho_ * x * y - rho_ * rho_ * (x * x + y * y)) / (2.0 * q)) /
               std::sqrt(q);
      }
    }
    return 0.0;
  }

  /// P(V <= v | U = u) = dC/du.
  double conditional(double u, double v) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Copula::conditional: u must be in (0,1)");
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    switch (kind_) {
      case Kind::Product:
        return v;
      case Kind::Archimedean: {
        const double tu = gen_->psi_inverse(u);
        const double tv = gen_->psi_inverse(v);
        return std::exp(gen_->log_abs_psi_prime(tu + tv) - gen_->log_abs_psi_prime(tu));
      }
      case Kind::Gaussian: {
        const double x = norm_quantile(u);
        const double y = norm_quantile(v);
        return norm_cdf((y - rho_ * x) / std::sqrt(1.0 - rho_ * rho_));
      }
    }
    return 0.0;
  }

  /// Solve conditional(u, v) = w for v.
  double conditional_inverse(double u, double w) const {
    if (!(u > 0.0 && u < 1.0 && w > 0.0 && w < 1.0))
      throw std::domain_error("Copula::conditional_inverse: arguments must be in (0,1)");
    switch (kind_) {
      case Kind::Product:
        return w;
      case Kind::Gaussian: {
        const double x = norm_quantile(u);
        return norm_cdf(rho_ * x + std::sqrt(1.0 - rho_ * rho_) * norm_quantile(w));
      }
      case Kind::Archimedean: {
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
          const double mid = 0.5 * (lo + hi);
          if (conditional(u, mid) < w)
            lo = mid;
          else
            hi = mid;
          if (hi - lo < 1e-12) return 0.5 * (lo + hi);
        }
        throw numeric_error("Copula::conditional_inverse: bisection did not converge");
      }
    }
    return w;
  }

  /// One draw from the copula; marginals are uniform on (0,1).
  std::pair<double, double> sample(RandomStream& rng) const {
    switch (kind_) {
      case Kind::Product:
        return {rng.uniform(), rng.uniform()};
      case Kind::Gaussian: {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        return {norm_cdf(z1), norm_cdf(rho_ * z1 + std::sqrt(1.0 - rho_ * rho_) * z2)};
      }
      case Kind::Archimedean: {
        const double u = clamp_open(rng.uniform());
        const double w = clamp_open(rng.uniform());
        return {u, conditional_inverse(u, w)};
      }
    }
    return {0.5, 0.5};
  }

 private:
  Copula(Kind k, std::optional<ArchimedeanGenerator> g, double rho)
      : kind_(k), gen_(std::move(g)), rho_(rho) {}

  static void check_interior(double u, double v) {
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0))
      throw std::domain_error("Copula::density: arguments must be strictly inside (0,1)^2");
  }
  static double clamp_open(double u) noexcept {
    return u >= 1.0 ? 1.0 - 1e-16 : u;
  }

  // Phi_2(x, y; rho) by 1-D quadrature of phi(z) * Phi((y - rho z)/sqrt(1-rho^2)).
  double gaussian_cdf(double x, double y) const {
    if (rho_ == 0.0) return norm_cdf(x) * norm_cdf(y);
    const double q = std::sqrt(1.0 - rho_ * rho_);
    QuadratureSpec tight;
    tight.abs_tol = 1e-13;
    tight.rel_tol = 1e-13;
    const double lo = std::min(-40.0, x - 1.0);
    return quad::integrate(
        [&](double z) { return norm_pdf(z) * norm_cdf((y - rho_ * z) / q); }, lo,
        std::min(x, 40.0), tight);
  }

  Kind kind_;
  std::optional<ArchimedeanGenerator> gen_;
  double rho_;
};

}  // namespace esml

#endif  // ESML_COPULA_HPP
