#ifndef ESML_COPULA_REPORT_HPP
#define ESML_COPULA_REPORT_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "esml/copula.hpp"
#include "esml/generator.hpp"
#include "esml/movement.hpp"
#include "esml/quadrature.hpp"
#include "esml/rng.hpp"
#include "esml/stats.hpp"

namespace esml {

/// Numeric cross-validation of a copula and of the composed movement density
/// built from it. Two alternative algebraic forms of the Archimedean density
/// circulate; both are evaluated against the chain-rule form and their
/// deviation is reported, not asserted:
///   - the ratio form psi''(s)/psi'(s) h1 h2 (single ratio, no marginal
///     quantile factors),
///   - for Gumbel, a closed product form of h written in terms of H, H1, H2.
struct CopulaReport {
  double density_integral = std::numeric_limits<double>::quiet_NaN();
  double max_fd_rel_error = std::numeric_limits<double>::quiet_NaN();
  double uniform_marginal_max_err = std::numeric_limits<double>::quiet_NaN();
  double tau_quadrature = std::numeric_limits<double>::quiet_NaN();
  double tau_empirical = std::numeric_limits<double>::quiet_NaN();
  long long tau_samples = 0;
  double product_copula_max_dev = std::numeric_limits<double>::quiet_NaN();
  double psi_ratio_density_max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  double closed_form_density_max_rel_dev = std::numeric_limits<double>::quiet_NaN();
  bool monotonicity_pass = false;
  int monotonicity_order = 4;
};

namespace detail {

// psi''(s)/psi'(s) h1 h2 variant of the composed density (reported only;
// dimensionally it cannot be a density -- psi' < 0).
inline double psi_ratio_density(const MovementDistribution& m, double x1, double x2) {
  const auto& g = m.copula().generator();
  const double s = g.psi_inverse(m.marginal1().cdf(x1)) + g.psi_inverse(m.marginal2().cdf(x2));
  return g.psi_second(s) / g.psi_prime(s) * m.marginal1().pdf(x1) * m.marginal2().pdf(x2);
}

// Gumbel closed product form of h in terms of H, H1, H2.
inline double gumbel_closed_density(const MovementDistribution& m, double x1, double x2) {
  const double theta = m.copula().generator().theta();
  const double u = m.marginal1().cdf(x1);
  const double v = m.marginal2().cdf(x2);
  const double lu = -std::log(u);
  const double lv = -std::log(v);
  const double s = std::pow(lu, theta) + std::pow(lv, theta);
  const double big = m.cdf(x1, x2) * m.marginal1().pdf(x1) * m.marginal2().pdf(x2) / (u * v);
  return big * std::pow(lu * lv / std::pow(s, 2.0 / theta), theta - 1.0) *
         (1.0 - (theta - 1.0) / (theta * s));
}

}  // namespace detail

inline CopulaReport copula_validation(const MovementDistribution& m, int grid_points,
                                      long long tau_samples, const QuadratureSpec& spec = {}) {
  const Copula& c = m.copula();
  CopulaReport rep;

  rep.density_integral = quad::integrate_rect(
      [&](double u, double v) { return c.density(u, v); }, 0.0, 1.0, 0.0, 1.0, spec);

  const double fd_step = 1e-4;
  double max_fd = 0.0, max_marg = 0.0;
  for (int i = 1; i <= grid_points; ++i) {
    const double u = static_cast<double>(i) / (grid_points + 1);
    max_marg = std::max(max_marg, std::fabs(c.cdf(u, 1.0) - u));
    max_marg = std::max(max_marg, std::fabs(c.cdf(1.0, u) - u));
    for (int j = 1; j <= grid_points; ++j) {
      const double v = static_cast<double>(j) / (grid_points + 1);
      const double fd = (c.cdf(u + fd_step, v + fd_step) - c.cdf(u + fd_step, v - fd_step) -
                         c.cdf(u - fd_step, v + fd_step) + c.cdf(u - fd_step, v - fd_step)) /
                        (4.0 * fd_step * fd_step);
      const double dens = c.density(u, v);
      max_fd = std::max(max_fd, std::fabs(fd - dens) / dens);
    }
  }
  rep.max_fd_rel_error = max_fd;
  rep.uniform_marginal_max_err = max_marg;

  rep.tau_quadrature =
      4.0 * quad::integrate_rect([&](double u, double v) { return c.cdf(u, v) * c.density(u, v); },
                                 0.0, 1.0, 0.0, 1.0, spec) -
      1.0;

  if (tau_samples > 1) {
    RandomStream rng = RandomStream::derived(spec.mc_seed, 3);
    std::vector<double> us, vs;
    us.reserve(static_cast<std::size_t>(tau_samples));
    vs.reserve(static_cast<std::size_t>(tau_samples));
    for (long long i = 0; i < tau_samples; ++i) {
      const auto [u, v] = c.sample(rng);
      us.push_back(u);
      vs.push_back(v);
    }
    rep.tau_empirical = stats::kendall_tau(us, vs);
    rep.tau_samples = tau_samples;
  }

  const bool archimedean = c.kind() == Copula::Kind::Archimedean;
  if (archimedean && c.generator().theta() == 1.0) {
    double dev = 0.0;
    for (int i = 1; i <= grid_points; ++i)
      for (int j = 1; j <= grid_points; ++j) {
        const double u = static_cast<double>(i) / (grid_points + 1);
        const double v = static_cast<double>(j) / (grid_points + 1);
        dev = std::max(dev, std::fabs(c.cdf(u, v) - u * v));
      }
    rep.product_copula_max_dev = dev;
  }

  if (archimedean) {
    const auto grid = log_grid(1e-4, 50.0, 200);
    rep.monotonicity_pass = m_monotone_check(c.generator(), 4, grid).pass;
    double dev_ratio = 0.0, dev_closed = 0.0;
    for (int i = 1; i <= grid_points; ++i)
      for (int j = 1; j <= grid_points; ++j) {
        // probe x-grid through the marginal quantiles
        const double x1 = m.marginal1().quantile(static_cast<double>(i) / (grid_points + 1));
        const double x2 = m.marginal2().quantile(static_cast<double>(j) / (grid_points + 1));
        const double h = m.density(x1, x2);
        dev_ratio = std::max(dev_ratio,
                             std::fabs(detail::psi_ratio_density(m, x1, x2) - h) / h);
        dev_closed = std::max(dev_closed,
                              std::fabs(detail::gumbel_closed_density(m, x1, x2) - h) / h);
      }
    rep.psi_ratio_density_max_rel_dev = dev_ratio;
    rep.closed_form_density_max_rel_dev = dev_closed;
  }
  return rep;
}

}  // namespace esml

#endif  // ESML_COPULA_REPORT_HPP
