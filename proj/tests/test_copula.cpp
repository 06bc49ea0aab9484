#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "esml/copula.hpp"
#include "esml/rng.hpp"
#include "esml/stats.hpp"

using namespace esml;

TEST_CASE("cdf values at known points") {
  const auto prod = Copula::product();
  REQUIRE(prod.cdf(0.5, 0.5) == 0.25);

  const auto g2 = Copula::gumbel(2.0);
  // exp(-sqrt(2) ln 2) = 2^{-sqrt 2}
  REQUIRE(g2.cdf(0.5, 0.5) == Catch::Approx(0.37521422724648177).epsilon(1e-12));

  // uniform marginals
  for (const auto& c : {Copula::product(), Copula::gumbel(2.0), Copula::gaussian(0.5)}) {
    for (double u : {0.05, 0.3, 0.77, 0.999}) {
      REQUIRE(c.cdf(u, 1.0) == Catch::Approx(u).margin(1e-10));
      REQUIRE(c.cdf(1.0, u) == Catch::Approx(u).margin(1e-10));
      REQUIRE(c.cdf(u, 0.0) == 0.0);
    }
  }
}

TEST_CASE("gaussian copula diagonal closed form") {
  // C(1/2, 1/2; rho) = 1/4 + asin(rho)/(2 pi)
  for (double rho : {-0.8, -0.3, 0.0, 0.5, 0.9}) {
    const auto c = Copula::gaussian(rho);
    const double expected = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
    REQUIRE(c.cdf(0.5, 0.5) == Catch::Approx(expected).margin(1e-10));
  }
}

TEST_CASE("cdf monotone nondecreasing in each argument") {
  for (const auto& c : {Copula::gumbel(1.5), Copula::gaussian(-0.5)}) {
    double prev = 0.0;
    for (double u = 0.05; u <= 0.95; u += 0.05) {
      const double v = c.cdf(u, 0.6);
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("density values and finite-difference consistency") {
  REQUIRE(Copula::product().density(0.123, 0.987) == 1.0);

  // theta = 1 reduces to the product copula
  const auto g1 = Copula::gumbel(1.0);
  REQUIRE(g1.density(0.3, 0.7) == Catch::Approx(1.0).epsilon(1e-12));

  const auto g2 = Copula::gumbel(2.0);
  REQUIRE(g2.density(0.5, 0.5) == Catch::Approx(1.51597012276989940).epsilon(1e-12));

  // centered mixed second difference of C within 1e-4 relative
  for (const auto& c : {Copula::gumbel(2.0), Copula::gumbel(4.0), Copula::gaussian(0.6)}) {
    const double h = 1e-4;
    for (double u : {0.2, 0.5, 0.8}) {
      for (double v : {0.3, 0.6}) {
        const double fd = (c.cdf(u + h, v + h) - c.cdf(u + h, v - h) - c.cdf(u - h, v + h) +
                           c.cdf(u - h, v - h)) /
                          (4.0 * h * h);
        REQUIRE(fd == Catch::Approx(c.density(u, v)).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("density integrates to one") {
  for (double theta : {1.5, 2.0}) {
    const auto c = Copula::gumbel(theta);
    const double v = quad::integrate_rect(
        [&](double u, double w) { return c.density(u, w); }, 0.0, 1.0, 0.0, 1.0);
    REQUIRE(v == Catch::Approx(1.0).margin(1e-6));
  }
  const auto gc = Copula::gaussian(0.5);
  const double v = quad::integrate_rect(
      [&](double u, double w) { return gc.density(u, w); }, 0.0, 1.0, 0.0, 1.0);
  REQUIRE(v == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("theta = 1 gumbel equals the product copula to 1e-14") {
  const auto g1 = Copula::gumbel(1.0);
  for (double u = 0.05; u < 1.0; u += 0.09) {
    for (double v = 0.05; v < 1.0; v += 0.09) {
      REQUIRE(std::fabs(g1.cdf(u, v) - u * v) < 1e-14);
    }
  }
}

TEST_CASE("conditional is a cdf in v and inverts correctly") {
  for (const auto& c : {Copula::gumbel(2.0), Copula::gaussian(0.4), Copula::product()}) {
    for (double u : {0.2, 0.5, 0.9}) {
      double prev = 0.0;
      for (double v = 0.1; v < 1.0; v += 0.1) {
        const double w = c.conditional(u, v);
        REQUIRE(w >= prev);
        REQUIRE(w <= 1.0);
        prev = w;
      }
      for (double w : {0.1, 0.5, 0.9}) {
        const double v = c.conditional_inverse(u, w);
        REQUIRE(c.conditional(u, v) == Catch::Approx(w).margin(1e-8));
      }
    }
  }
}

TEST_CASE("sampling: uniform marginals and deterministic replay") {
  const auto c = Copula::gumbel(2.0);
  RandomStream rng(101);
  const int n = 100000;
  std::vector<double> us(n), vs(n);
  for (int i = 0; i < n; ++i) {
    const auto [u, v] = c.sample(rng);
    us[static_cast<std::size_t>(i)] = u;
    vs[static_cast<std::size_t>(i)] = v;
  }
  REQUIRE(stats::ks_statistic(us, [](double x) { return x; }) < 0.01);
  REQUIRE(stats::ks_statistic(vs, [](double x) { return x; }) < 0.01);

  RandomStream rng2(101);
  for (int i = 0; i < 100; ++i) {
    const auto [u, v] = c.sample(rng2);
    REQUIRE(u == us[static_cast<std::size_t>(i)]);
    REQUIRE(v == vs[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("kendall tau of samples matches the quadrature value") {
  struct Case {
    Copula c;
    double tau_closed;  // (theta-1)/theta for gumbel, 0 for product
  };
  const std::vector<Case> cases = {{Copula::product(), 0.0},
                                   {Copula::gumbel(2.0), 0.5},
                                   {Copula::gumbel(1.5), 1.0 / 3.0}};
  for (const auto& [c, tau_closed] : cases) {
    const double tau_quad =
        4.0 * quad::integrate_rect(
                  [&](double u, double v) { return c.cdf(u, v) * c.density(u, v); }, 0.0, 1.0,
                  0.0, 1.0) -
        1.0;
    REQUIRE(tau_quad == Catch::Approx(tau_closed).margin(1e-5));

    RandomStream rng(55);
    const int n = 100000;
    std::vector<double> us(n), vs(n);
    for (int i = 0; i < n; ++i) {
      const auto [u, v] = c.sample(rng);
      us[static_cast<std::size_t>(i)] = u;
      vs[static_cast<std::size_t>(i)] = v;
    }
    const double tau_emp = stats::kendall_tau(us, vs);
    REQUIRE(tau_emp == Catch::Approx(tau_quad).margin(tau_closed == 0.0 ? 0.01 : 0.02));
  }
}

TEST_CASE("domain errors") {
  const auto c = Copula::gumbel(2.0);
  REQUIRE_THROWS_AS(c.cdf(-0.1, 0.5), std::domain_error);
  REQUIRE_THROWS_AS(c.cdf(0.5, 1.1), std::domain_error);
  REQUIRE_THROWS_AS(c.density(0.0, 0.5), std::domain_error);
  REQUIRE_THROWS_AS(c.density(0.5, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(Copula::gaussian(1.0), std::domain_error);
  REQUIRE_THROWS_AS(Copula::gumbel(0.9), std::domain_error);
}
