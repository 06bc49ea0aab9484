#ifndef ESML_ANALYSIS_HPP
#define ESML_ANALYSIS_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "esml/constraint.hpp"
#include "esml/errors.hpp"
#include "esml/movement.hpp"
#include "esml/quadrature.hpp"
#include "esml/rng.hpp"
#include "esml/stats.hpp"

namespace esml {

namespace detail {

inline double clamp_unit(double u) noexcept {
  if (u <= 0.0) return std::numeric_limits<double>::min();
  const double top = std::nextafter(1.0, 0.0);
  return u >= top ? top : u;
}

}  // namespace detail

/// The movement law truncated to the feasible half-space n.x < delta and the
/// objects built on it: the resampled density h_delta, its first-coordinate
/// strip mass, and the selected (best-of-lambda) density h*_delta.
///
/// All integrals run over the unit square via the marginal quantile maps,
/// i.e. dH = c(u1, u2) du1 du2. When the constraint involves only the first
/// coordinate ([n]_2 = 0) everything collapses to one-dimensional integrals
/// against the first marginal.
class TruncatedLaw {
 public:
  TruncatedLaw(MovementDistribution m, ConstraintNormal n, double delta,
               QuadratureSpec spec = {})
      : m_(std::move(m)), n_(std::move(n)), delta_(delta), spec_(spec) {
    if (!(delta > 0.0)) throw std::domain_error("TruncatedLaw: delta must be positive");
    a_ = n_.n1();
    b_ = n_.n2();
    if (a_ == 0.0 && b_ == 0.0)
      throw std::domain_error("TruncatedLaw: first two components of n are both zero");
    mass_ = halfspace_mass(m_, n_, delta_, spec_);
  }

  double delta() const noexcept { return delta_; }
  double feasible_mass() const noexcept { return mass_; }
  const MovementDistribution& movement() const noexcept { return m_; }
  const ConstraintNormal& normal() const noexcept { return n_; }

  bool feasible(double x1, double x2) const noexcept { return n_.dot2(x1, x2) < delta_; }

  /// h_delta(x) = h(x) 1{n.x < delta} / H(L_delta).
  double resampled_density(double x1, double x2) const {
    if (!feasible(x1, x2)) return 0.0;
    return m_.density(x1, x2) / mass_;
  }

  /// H((-inf, x1) x R intersected with L_delta), unnormalized.
  double mass_below(double x1) const {
    if (b_ == 0.0) {
      const double edge = delta_ / a_;
      if (a_ > 0.0) return m_.marginal1().cdf(std::min(x1, edge));
      return std::max(0.0, m_.marginal1().cdf(x1) - m_.marginal1().cdf(edge));
    }
    const double u1 = m_.marginal1().cdf(x1);
    if (u1 <= 0.0) return 0.0;
    return quad::integrate([&](double u) { return conditional_feasible(u); }, 0.0, u1, spec_);
  }

  /// F_delta(x1) = H_delta((-inf, x1) x R).
  double selection_marginal_cdf(double x1) const { return mass_below(x1) / mass_; }

  /// h*_delta(x) = lambda h_delta(x) F_delta(x1)^(lambda-1).
  double selected_density(int lambda, double x1, double x2) const {
    require_lambda(lambda);
    if (!feasible(x1, x2)) return 0.0;
    const double f = selection_marginal_cdf(x1);
    return lambda * resampled_density(x1, x2) * std::pow(f, lambda - 1);
  }

  /// Expectation of g(x1) under h*_delta for g depending on the first
  /// coordinate only.
  template <class G1>
  double selected_expectation_x1(int lambda, const G1& g) const {
    require_lambda(lambda);
    if (b_ == 0.0) {
      const auto& h1 = m_.marginal1();
      const double c0 = a_ > 0.0 ? 0.0 : h1.cdf(delta_ / a_);
      const double z = mass_;
      // w = F_delta(x1) as integration variable: E = int_0^1 g lambda w^(l-1) dw
      return quad::integrate(
          [&](double w) {
            const double u = detail::clamp_unit(c0 + z * w);
            return g(h1.quantile(u)) * lambda * std::pow(w, lambda - 1);
          },
          0.0, 1.0, spec_);
    }
    return selected_expectation(lambda, [&](double x1, double) { return g(x1); });
  }

  /// Expectation of g(x1, x2) under h*_delta.
  template <class G2>
  double selected_expectation(int lambda, const G2& g) const {
    require_lambda(lambda);
    const auto& h1 = m_.marginal1();
    const auto& h2 = m_.marginal2();
    const auto& cop = m_.copula();
    if (b_ == 0.0) {
      // x2 conditionally unconstrained: integrate the copula slice directly
      const double c0 = a_ > 0.0 ? 0.0 : h1.cdf(delta_ / a_);
      const double z = mass_;
      QuadratureSpec inner = spec_;
      inner.abs_tol *= 0.1;
      inner.rel_tol *= 0.1;
      return quad::integrate(
          [&](double w) {
            const double u = detail::clamp_unit(c0 + z * w);
            const double x1 = h1.quantile(u);
            const double gi = quad::integrate(
                [&](double v) {
                  const double vv = detail::clamp_unit(v);
                  return g(x1, h2.quantile(vv)) * cop.density(u, vv);
                },
                0.0, 1.0, inner);
            return gi * lambda * std::pow(w, lambda - 1);
          },
          0.0, 1.0, spec_);
    }

    QuadratureSpec inner = spec_;
    inner.abs_tol *= 0.1;
    inner.rel_tol *= 0.1;
    const double z = mass_;
    auto outer = [&](double u1) {
      const double u = detail::clamp_unit(u1);
      const double x1 = h1.quantile(u);
      const double y = (delta_ - a_ * x1) / b_;
      const double vy = h2.cdf(y);
      double lo = 0.0, hi = 1.0;
      if (b_ > 0.0)
        hi = vy;
      else
        lo = vy;
      if (hi <= lo) return 0.0;
      const double fd = std::pow(mass_below(x1) / z, lambda - 1);
      if (fd == 0.0) return 0.0;
      const double gi = quad::integrate(
          [&](double v) {
            const double vv = detail::clamp_unit(v);
            return g(x1, h2.quantile(vv)) * cop.density(u, vv);
          },
          lo, hi, inner);
      return fd * gi;
    };
    return lambda / z * quad::integrate(outer, 0.0, 1.0, spec_);
  }

  /// P(n.x <= c) of the selected movement; reduces to the max-order-statistic
  /// CDF F_delta(c/[n]_1)^lambda when the constraint is one-dimensional.
  double selected_ndot_cdf(int lambda, double c) const {
    require_lambda(lambda);
    if (c >= delta_) return 1.0;
    if (b_ == 0.0) {
      const double f = std::pow(selection_marginal_cdf(c / a_), lambda);
      // for a < 0, n.x <= c means x1 >= c/a (complement, boundary is null)
      return a_ > 0.0 ? f : 1.0 - f;
    }
    return selected_partial_mass(lambda, c);
  }

 private:
  void require_lambda(int lambda) const {
    if (lambda < 2) throw std::domain_error("TruncatedLaw: lambda must be >= 2");
  }

  // P(x2 feasible | u1) under the copula
  double conditional_feasible(double u1) const {
    const double u = detail::clamp_unit(u1);
    const double x1 = m_.marginal1().quantile(u);
    const double y = (delta_ - a_ * x1) / b_;
    const double w = m_.copula().conditional(u, m_.marginal2().cdf(y));
    return b_ > 0.0 ? w : 1.0 - w;
  }

  // generic-path P(n.x <= c), c < delta
  double selected_partial_mass(int lambda, double c) const {
    const auto& h1 = m_.marginal1();
    const auto& h2 = m_.marginal2();
    const auto& cop = m_.copula();
    const double z = mass_;
    auto outer = [&](double u1) {
      const double u = detail::clamp_unit(u1);
      const double x1 = h1.quantile(u);
      const double yc = (c - a_ * x1) / b_;
      const double w = cop.conditional(u, h2.cdf(yc));
      const double inner = b_ > 0.0 ? w : 1.0 - w;
      if (inner <= 0.0) return 0.0;
      const double fd = std::pow(mass_below(x1) / z, lambda - 1);
      return fd * inner;
    };
    return lambda / z * quad::integrate(outer, 0.0, 1.0, spec_);
  }

  MovementDistribution m_;
  ConstraintNormal n_;
  double delta_;
  QuadratureSpec spec_;
  double a_ = 0.0, b_ = 0.0;
  double mass_ = 0.0;
};

/// h_delta(x): the movement density truncated to n.x < delta, renormalized.
inline double resampled_density(const MovementDistribution& m, const ConstraintNormal& n,
                                double delta, double x1, double x2,
                                const QuadratureSpec& spec = {}) {
  return TruncatedLaw(m, n, delta, spec).resampled_density(x1, x2);
}

inline double selection_marginal_cdf(const MovementDistribution& m, const ConstraintNormal& n,
                                     double delta, double x1, const QuadratureSpec& spec = {}) {
  return TruncatedLaw(m, n, delta, spec).selection_marginal_cdf(x1);
}

inline double selected_density(const MovementDistribution& m, const ConstraintNormal& n,
                               int lambda, double delta, double x1, double x2,
                               const QuadratureSpec& spec = {}) {
  return TruncatedLaw(m, n, delta, spec).selected_density(lambda, x1, x2);
}

/// Transition kernel mass P(delta, (lo, hi)): probability the next
/// normalized distance D' = delta - n.M* lands in the interval.
inline double transition_prob(const MovementDistribution& m, const ConstraintNormal& n,
                              int lambda, double delta, double lo, double hi,
                              const QuadratureSpec& spec = {}) {
  if (!(lo < hi)) throw std::domain_error("transition_prob: interval must have lo < hi");
  TruncatedLaw law(m, n, delta, spec);
  // D' in (lo, hi)  <=>  n.x in (delta - hi, delta - lo)
  const double upper = law.selected_ndot_cdf(lambda, delta - lo);
  const double lower =
      std::isinf(hi) ? 0.0 : law.selected_ndot_cdf(lambda, delta - hi);
  return std::max(0.0, upper - lower);
}

struct ProbeRow {
  double eps;
  double diff_plus;   // |P(delta+eps, A) - P(delta, A)|
  double diff_minus;  // |P(delta-eps, A) - P(delta, A)|
};

/// Numeric probe of kernel continuity in delta.
inline std::vector<ProbeRow> kernel_continuity_probe(const MovementDistribution& m,
                                                     const ConstraintNormal& n, int lambda,
                                                     double delta, double lo, double hi,
                                                     const std::vector<double>& eps_list,
                                                     const QuadratureSpec& spec = {}) {
  for (double e : eps_list)
    if (!(delta - e > 0.0))
      throw std::domain_error("kernel_continuity_probe: delta - eps must stay positive");
  const double base = transition_prob(m, n, lambda, delta, lo, hi, spec);
  std::vector<ProbeRow> rows;
  rows.reserve(eps_list.size());
  for (double e : eps_list) {
    if (e == 0.0) {
      rows.push_back({0.0, 0.0, 0.0});
      continue;
    }
    const double p_plus = transition_prob(m, n, lambda, delta + e, lo, hi, spec);
    const double p_minus = transition_prob(m, n, lambda, delta - e, lo, hi, spec);
    rows.push_back({e, std::fabs(p_plus - base), std::fabs(p_minus - base)});
  }
  return rows;
}

struct DeltaInfinityResult {
  double estimate = 0.0;     // quadrature of the untruncated selection-weighted mean
  double mc_estimate = 0.0;  // Monte-Carlo confirmation
  double ci = 0.0;           // 99% half-width of the MC estimate
  double gain_limit = 0.0;   // lambda * estimate: large-delta limit of E[n.M*]
};

/// delta_infinity = integral of n.x H1(x1)^(lambda-1) h(x) dx, by quadrature
/// with Monte-Carlo confirmation. The large-delta limit of the selected
/// movement's mean gain is lambda times this value (the selected density
/// tends to lambda h H1^(lambda-1)); both are reported.
inline DeltaInfinityResult delta_infinity(const MovementDistribution& m,
                                          const ConstraintNormal& n, int lambda,
                                          const QuadratureSpec& spec = {}) {
  if (lambda < 2) throw std::domain_error("delta_infinity: lambda must be >= 2");
  const double a = n.n1();
  const double b = n.n2();
  const auto& h1 = m.marginal1();
  const auto& h2 = m.marginal2();

  DeltaInfinityResult r;
  if (b == 0.0) {
    r.estimate = a * quad::integrate(
                         [&](double u) {
                           const double uu = detail::clamp_unit(u);
                           return h1.quantile(uu) * std::pow(uu, lambda - 1);
                         },
                         0.0, 1.0, spec);
  } else {
    const auto& cop = m.copula();
    QuadratureSpec inner = spec;
    inner.abs_tol *= 0.1;
    inner.rel_tol *= 0.1;
    r.estimate = quad::integrate(
        [&](double u) {
          const double uu = detail::clamp_unit(u);
          const double x1 = h1.quantile(uu);
          const double w = std::pow(uu, lambda - 1);
          const double ex2 = quad::integrate(
              [&](double v) {
                const double vv = detail::clamp_unit(v);
                return (a * x1 + b * h2.quantile(vv)) * cop.density(uu, vv);
              },
              0.0, 1.0, inner);
          return w * ex2;
        },
        0.0, 1.0, spec);
  }

  RandomStream rng = RandomStream::derived(spec.mc_seed, 1);
  const long long nmc = spec.mc_samples;
  double mean = 0.0, m2 = 0.0;
  for (long long i = 0; i < nmc; ++i) {
    double x1, x2;
    m.sample2(rng, x1, x2);
    const double y = (a * x1 + b * x2) * std::pow(h1.cdf(x1), lambda - 1);
    const double d = y - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (y - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(nmc - 1));
  r.mc_estimate = mean;
  r.ci = 2.5758293035489004 * sd / std::sqrt(static_cast<double>(nmc));  // 99%
  r.gain_limit = lambda * r.estimate;
  if (std::fabs(r.estimate - r.mc_estimate) > 3.0 * r.ci)
    throw numeric_error("delta_infinity: quadrature and Monte Carlo disagree beyond 3 ci");
  return r;
}

/// Exponential moment of |alpha n.x| under H, with a tail-decay check on the
/// expanding boxes [-k,k]^2, k = 5, 10, 20, 40: if a shell contributes at
/// least as much as its predecessor, the moment is flagged divergent.
inline double exp_moment(const MovementDistribution& m, const ConstraintNormal& n, double alpha,
                         const QuadratureSpec& spec = {}) {
  if (!(alpha > 0.0)) throw std::domain_error("exp_moment: alpha must be positive");
  const double a = n.n1();
  const double b = n.n2();
  const auto& h1 = m.marginal1();
  const auto& h2 = m.marginal2();
  const auto& cop = m.copula();

  auto integrand = [&](double u, double v) {
    const double uu = detail::clamp_unit(u);
    const double vv = detail::clamp_unit(v);
    const double w = a * h1.quantile(uu) + b * h2.quantile(vv);
    return std::exp(std::fabs(alpha * w)) * cop.density(uu, vv);
  };
  auto box = [&](double x1lo, double x1hi, double x2lo, double x2hi) {
    const double ulo = h1.cdf(x1lo), uhi = h1.cdf(x1hi);
    const double vlo = h2.cdf(x2lo), vhi = h2.cdf(x2hi);
    if (uhi <= ulo || vhi <= vlo) return 0.0;
    return quad::integrate_rect(integrand, ulo, uhi, vlo, vhi, spec);
  };

  static constexpr double ks[4] = {5.0, 10.0, 20.0, 40.0};
  double total = box(-ks[0], ks[0], -ks[0], ks[0]);
  double prev_shell = total;
  for (int i = 1; i < 4; ++i) {
    const double K = ks[i], k = ks[i - 1];
    // the shell [-K,K]^2 \ [-k,k]^2 as four rectangles
    const double shell = box(-K, -k, -K, K) + box(k, K, -K, K) + box(-k, k, -K, -k) +
                         box(-k, k, k, K);
    if (!std::isfinite(shell) || (shell >= prev_shell && shell > spec.abs_tol))
      throw divergent_moment("exp_moment: shell contributions do not decay (alpha=" +
                             std::to_string(alpha) + ")");
    total += shell;
    prev_shell = shell;
  }
  if (!std::isfinite(total)) throw divergent_moment("exp_moment: integral overflowed");
  return total;
}

struct DriftPoint {
  double alpha = 0.0;
  double delta = 0.0;
  double value = 0.0;      // Delta V_alpha(delta)
  double ratio = 0.0;      // Delta V_alpha / V_alpha
  double mc_stderr = 0.0;  // standard error of the MC ratio estimate
};
using DriftCurve = std::vector<DriftPoint>;

/// Expected one-step change of V_alpha(delta) = exp(alpha delta):
///   Delta V = V(delta) * (E[exp(-alpha n.M*) | D = delta] - 1),
/// by quadrature with a Monte-Carlo standard error as cross-check.
inline DriftPoint drift(const MovementDistribution& m, const ConstraintNormal& n, int lambda,
                        double alpha, double delta, const QuadratureSpec& spec = {}) {
  if (!(alpha > 0.0)) throw std::domain_error("drift: alpha must be positive");
  TruncatedLaw law(m, n, delta, spec);
  const double a = n.n1();
  const double b = n.n2();

  double expectation;
  if (b == 0.0) {
    expectation = law.selected_expectation_x1(
        lambda, [&](double x1) { return std::exp(-alpha * a * x1); });
  } else {
    expectation = law.selected_expectation(
        lambda, [&](double x1, double x2) { return std::exp(-alpha * (a * x1 + b * x2)); });
  }

  // Monte Carlo: simulate selected movements at threshold delta
  RandomStream rng = RandomStream::derived(spec.mc_seed, 2);
  const long long nmc = spec.mc_samples;
  double mean = 0.0, m2 = 0.0;
  for (long long i = 0; i < nmc; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    double best_w = 0.0;
    for (int j = 0; j < lambda; ++j) {
      double x1, x2;
      long long guard = 0;
      do {
        m.sample2(rng, x1, x2);
        if (++guard > 10'000'000)
          throw numeric_error("drift: feasible mass too small for MC sampling");
      } while (!(n.dot2(x1, x2) < delta));
      if (x1 > best) {
        best = x1;
        best_w = n.dot2(x1, x2);
      }
    }
    const double y = std::exp(-alpha * best_w);
    const double d = y - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (y - mean);
  }
  const double se = std::sqrt(m2 / static_cast<double>(nmc - 1) / static_cast<double>(nmc));

  DriftPoint p;
  p.alpha = alpha;
  p.delta = delta;
  p.ratio = expectation - 1.0;
  p.value = std::exp(alpha * delta) * p.ratio;
  p.mc_stderr = se;
  const double mc_ratio = mean - 1.0;
  if (std::fabs(p.ratio - mc_ratio) > 3.0 * se + 1e-6)
    throw numeric_error("drift: quadrature and Monte Carlo disagree beyond 3 sigma (delta=" +
                        std::to_string(delta) + ")");
  return p;
}

struct BetaResult {
  double beta = 0.0;
  double gain_limit = 0.0;  // large-delta limit of the conditional mean
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<double> grid;
  std::vector<double> conditional_mean;  // E[n.M* | D = delta] on the grid
};

/// Smallest grid threshold beyond which the conditional mean of n.M* stays
/// inside (2/3, 4/3) of its large-delta limit on the whole remaining grid.
/// The limit is lambda * delta_infinity (the selected density tends to
/// lambda h H1^(lambda-1)).
inline BetaResult find_beta(const MovementDistribution& m, const ConstraintNormal& n, int lambda,
                            const QuadratureSpec& spec = {}, double grid_lo = 0.01,
                            double grid_hi = 100.0, int grid_points = 400) {
  const DeltaInfinityResult di = delta_infinity(m, n, lambda, spec);
  if (!(di.gain_limit > 0.0))
    throw no_beta_found("find_beta: nonpositive gain limit, no bracket exists");

  BetaResult r;
  r.gain_limit = di.gain_limit;
  r.bracket_lo = 2.0 * di.gain_limit / 3.0;
  r.bracket_hi = 4.0 * di.gain_limit / 3.0;

  const double a = n.n1();
  const double b = n.n2();
  const double llo = std::log(grid_lo), lhi = std::log(grid_hi);
  r.grid.resize(static_cast<std::size_t>(grid_points));
  r.conditional_mean.resize(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double delta = std::exp(llo + (lhi - llo) * i / (grid_points - 1));
    r.grid[static_cast<std::size_t>(i)] = delta;
    TruncatedLaw law(m, n, delta, spec);
    double g;
    if (b == 0.0)
      g = law.selected_expectation_x1(lambda, [&](double x1) { return a * x1; });
    else
      g = law.selected_expectation(
          lambda, [&](double x1, double x2) { return a * x1 + b * x2; });
    r.conditional_mean[static_cast<std::size_t>(i)] = g;
  }

  int first_ok = -1;
  for (int i = grid_points - 1; i >= 0; --i) {
    const double g = r.conditional_mean[static_cast<std::size_t>(i)];
    if (g > r.bracket_lo && g < r.bracket_hi)
      first_ok = i;
    else
      break;
  }
  if (first_ok < 0)
    throw no_beta_found("find_beta: conditional mean never stays inside the bracket on (" +
                        std::to_string(grid_lo) + ", " + std::to_string(grid_hi) + "]");
  r.beta = r.grid[static_cast<std::size_t>(first_ok)];
  return r;
}

}  // namespace esml

#endif  // ESML_ANALYSIS_HPP
