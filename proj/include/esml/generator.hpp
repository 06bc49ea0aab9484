#ifndef ESML_GENERATOR_HPP
#define ESML_GENERATOR_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace esml {

/// Archimedean generator psi: [0,inf) -> [0,1], psi(0)=1, psi(inf)=0,
/// strictly decreasing where positive. Gumbel family:
///   psi(t) = exp(-t^(1/theta)),  psi_inverse(y) = (-ln y)^theta,  theta >= 1.
class ArchimedeanGenerator {
 public:
  enum class Family { Gumbel };

  static ArchimedeanGenerator gumbel(double theta) {
    if (!(theta >= 1.0)) throw std::domain_error("ArchimedeanGenerator: Gumbel theta must be >= 1");
    return ArchimedeanGenerator(Family::Gumbel, theta);
  }

  Family family() const noexcept { return family_; }
  double theta() const noexcept { return theta_; }

  double psi(double t) const {
    check_t(t);
    if (t == 0.0) return 1.0;
    return std::exp(-std::pow(t, 1.0 / theta_));
  }

  /// First derivative; negative wherever psi is positive. Singular at t=0
  /// for theta > 1.
  double psi_prime(double t) const {
    check_derivative_point(t);
    if (theta_ == 1.0) return -std::exp(-t);
    const double a = 1.0 / theta_;
    return -a * std::pow(t, a - 1.0) * std::exp(-std::pow(t, a));
  }

  double psi_second(double t) const {
    check_derivative_point(t);
    if (theta_ == 1.0) return std::exp(-t);
    const double a = 1.0 / theta_;
    const double ta = std::pow(t, a);
    return a * std::exp(-ta) * std::pow(t, a - 2.0) * ((1.0 - a) + a * ta);
  }

  /// log|psi'(t)|, stable where psi' underflows.
  double log_abs_psi_prime(double t) const {
    check_derivative_point(t);
    if (theta_ == 1.0) return -t;
    const double a = 1.0 / theta_;
    return std::log(a) + (a - 1.0) * std::log(t) - std::pow(t, a);
  }

  /// log psi''(t); psi'' >= 0 for theta >= 1.
  double log_psi_second(double t) const {
    check_derivative_point(t);
    if (theta_ == 1.0) return -t;
    const double a = 1.0 / theta_;
    const double ta = std::pow(t, a);
    return std::log(a) + (a - 2.0) * std::log(t) - ta + std::log((1.0 - a) + a * ta);
  }

  /// Inverse of psi on (0,1].
  double psi_inverse(double u) const {
    if (!(u > 0.0 && u <= 1.0))
      throw std::domain_error("ArchimedeanGenerator::psi_inverse: u must be in (0,1]");
    if (u == 1.0) return 0.0;
    return std::pow(-std::log(u), theta_);
  }

 private:
  ArchimedeanGenerator(Family f, double theta) : family_(f), theta_(theta) {}

  static void check_t(double t) {
    if (!(t >= 0.0)) throw std::domain_error("ArchimedeanGenerator: t must be >= 0");
  }
  void check_derivative_point(double t) const {
    check_t(t);
    if (t == 0.0 && theta_ > 1.0)
      throw std::domain_error("ArchimedeanGenerator: derivative singular at t=0 for theta>1");
    if (t == 0.0)
      return;  // theta == 1: psi = exp(-t), derivatives finite at 0
  }

  Family family_;
  double theta_;
};

struct GeneratorEval {
  double psi;
  double psi_prime;
  double psi_second;
};

inline GeneratorEval generator_eval(const ArchimedeanGenerator& g, double t) {
  return {g.psi(t), g.psi_prime(t), g.psi_second(t)};
}

inline double generator_inverse(const ArchimedeanGenerator& g, double u) {
  return g.psi_inverse(u);
}

struct MonotonicityReport {
  bool pass = true;
  // (derivative order k, grid point t) of the first violation, if any
  std::optional<std::pair<int, double>> first_violation;
};

namespace detail {

// k-th derivative by nested central differences; step shrinks with order and
// adapts to the scale of t.
template <class Psi>
double nth_central_diff(const Psi& psi, double t, int k, double h) {
  if (k == 0) return psi(t);
  return (nth_central_diff(psi, t + h, k - 1, h) - nth_central_diff(psi, t - h, k - 1, h)) /
         (2.0 * h);
}

template <class Psi>
double numeric_derivative(const Psi& psi, double t, int k) {
  if (k == 0) return psi(t);
  const double scale = std::max(t, 1e-3);
  double h = scale * std::pow(6e-16, 1.0 / (k + 2));
  h = std::min(h, 0.45 * t);  // stay inside the domain t > 0
  return nth_central_diff(psi, t, k, h);
}

}  // namespace detail

/// Numeric m-monotonicity check of a generator on a grid: requires
/// (-1)^k psi^(k)(t) >= -1e-8 for k = 0..m-2, and psi^(m-2) decreasing and
/// convex along the grid. The tolerance absorbs finite-difference noise.
template <class Psi>
MonotonicityReport m_monotone_check(const Psi& psi, int m, std::span<const double> grid) {
  if (m < 2) throw std::domain_error("m_monotone_check: m must be >= 2");
  if (grid.empty()) throw std::domain_error("m_monotone_check: empty grid");
  constexpr double tol = 1e-8;
  MonotonicityReport rep;

  for (double t : grid) {
    for (int k = 0; k <= m - 2; ++k) {
      const double dk = detail::numeric_derivative(psi, t, k);
      const double signed_value = (k % 2 == 0) ? dk : -dk;
      if (signed_value < -tol) {
        rep.pass = false;
        rep.first_violation = {k, t};
        return rep;
      }
    }
  }

  // (-1)^(m-2) psi^(m-2) decreasing and convex along the grid (the signed
  // derivative is the nonnegative one; without the sign the check is wrong
  // for odd m, where psi' increases toward zero)
  const double sign = (m - 2) % 2 == 0 ? 1.0 : -1.0;
  std::vector<double> dm(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    dm[i] = sign * detail::numeric_derivative(psi, grid[i], m - 2);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double scale = std::max({std::fabs(dm[i]), std::fabs(dm[i + 1]), 1.0});
    if (dm[i + 1] - dm[i] > tol * scale) {
      rep.pass = false;
      rep.first_violation = {m - 2, grid[i + 1]};
      return rep;
    }
  }
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    // convexity via divided differences (grid may be non-uniform)
    const double s1 = (dm[i + 1] - dm[i]) / (grid[i + 1] - grid[i]);
    const double s2 = (dm[i + 2] - dm[i + 1]) / (grid[i + 2] - grid[i + 1]);
    const double scale = std::max({std::fabs(s1), std::fabs(s2), 1.0});
    if (s2 - s1 < -1e-6 * scale) {
      rep.pass = false;
      rep.first_violation = {m - 2, grid[i + 2]};
      return rep;
    }
  }
  return rep;
}

inline MonotonicityReport m_monotone_check(const ArchimedeanGenerator& g, int m,
                                           std::span<const double> grid) {
  return m_monotone_check([&](double t) { return g.psi(t); }, m, grid);
}

/// n log-spaced points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo && n >= 2)) throw std::domain_error("log_grid: bad parameters");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return g;
}

}  // namespace esml

#endif  // ESML_GENERATOR_HPP
