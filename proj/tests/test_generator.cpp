#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "esml/generator.hpp"

using namespace esml;

TEST_CASE("gumbel generator closed forms") {
  const auto g1 = ArchimedeanGenerator::gumbel(1.0);
  // theta = 1: psi = exp(-t)
  REQUIRE(g1.psi(0.7) == Catch::Approx(0.49658530379140951).epsilon(1e-14));
  REQUIRE(g1.psi(0.0) == 1.0);
  REQUIRE(g1.psi_prime(0.3) == Catch::Approx(-std::exp(-0.3)).epsilon(1e-14));
  REQUIRE(g1.psi_prime(2.0) < 0.0);

  const auto g2 = ArchimedeanGenerator::gumbel(2.0);
  REQUIRE(g2.psi(0.0) == 1.0);
  REQUIRE(g2.psi(4.0) == Catch::Approx(std::exp(-2.0)).epsilon(1e-14));
  // psi'' >= 0 on the positive axis for theta >= 1
  for (double t : {0.01, 0.1, 1.0, 10.0}) REQUIRE(g2.psi_second(t) >= 0.0);
}

TEST_CASE("generator_eval triple") {
  const auto g = ArchimedeanGenerator::gumbel(1.0);
  const auto e = generator_eval(g, 0.7);
  REQUIRE(e.psi == Catch::Approx(0.49658530379140951).epsilon(1e-14));
  REQUIRE(e.psi_prime == Catch::Approx(-0.49658530379140951).epsilon(1e-14));
  REQUIRE(e.psi_second == Catch::Approx(0.49658530379140951).epsilon(1e-14));
  REQUIRE(e.psi <= 1.0);
  REQUIRE(e.psi_prime <= 0.0);
}

TEST_CASE("inverse closed form and round trip") {
  const auto g2 = ArchimedeanGenerator::gumbel(2.0);
  REQUIRE(generator_inverse(g2, 1.0) == 0.0);
  REQUIRE(generator_inverse(g2, std::exp(-1.0)) == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(generator_inverse(g2, 0.5) == Catch::Approx(0.48045301391820142).epsilon(1e-13));

  for (double theta : {1.0, 1.5, 2.0, 4.0}) {
    const auto g = ArchimedeanGenerator::gumbel(theta);
    for (double t : log_grid(1e-6, 50.0, 60)) {
      REQUIRE(g.psi_inverse(g.psi(t)) == Catch::Approx(t).epsilon(1e-10));
    }
  }
}

TEST_CASE("log-space forms agree with direct evaluation") {
  for (double theta : {1.0, 1.7, 3.0}) {
    const auto g = ArchimedeanGenerator::gumbel(theta);
    for (double t : {0.05, 0.5, 2.0, 20.0}) {
      REQUIRE(std::exp(g.log_abs_psi_prime(t)) ==
              Catch::Approx(-g.psi_prime(t)).epsilon(1e-12));
      REQUIRE(std::exp(g.log_psi_second(t)) == Catch::Approx(g.psi_second(t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("domain errors") {
  REQUIRE_THROWS_AS(ArchimedeanGenerator::gumbel(0.5), std::domain_error);
  const auto g = ArchimedeanGenerator::gumbel(2.0);
  REQUIRE_THROWS_AS(g.psi(-1.0), std::domain_error);
  REQUIRE_THROWS_AS(g.psi_prime(0.0), std::domain_error);  // singular for theta > 1
  REQUIRE_THROWS_AS(g.psi_inverse(0.0), std::domain_error);
  REQUIRE_THROWS_AS(g.psi_inverse(1.5), std::domain_error);
  // theta = 1 derivatives exist at 0
  const auto g1 = ArchimedeanGenerator::gumbel(1.0);
  REQUIRE(g1.psi_prime(0.0) == -1.0);
  REQUIRE(g1.psi_second(0.0) == 1.0);
}

TEST_CASE("m-monotonicity: gumbel generators pass") {
  const auto grid = log_grid(1e-4, 50.0, 200);
  REQUIRE(m_monotone_check(ArchimedeanGenerator::gumbel(2.0), 4, grid).pass);
  REQUIRE(m_monotone_check(ArchimedeanGenerator::gumbel(1.0), 2, grid).pass);
  REQUIRE(m_monotone_check(ArchimedeanGenerator::gumbel(1.5), 3, grid).pass);
  REQUIRE(m_monotone_check(ArchimedeanGenerator::gumbel(4.0), 4, grid).pass);
}

TEST_CASE("m-monotonicity: exp(-t^2) fails at the second derivative") {
  // the theta = 1/2 shape, outside the valid family: psi''(t) = (4t^2-2)e^{-t^2}
  const auto grid = log_grid(1e-4, 50.0, 200);
  const auto rep = m_monotone_check([](double t) { return std::exp(-t * t); }, 4, grid);
  REQUIRE_FALSE(rep.pass);
  REQUIRE(rep.first_violation.has_value());
  REQUIRE(rep.first_violation->first == 2);
  // the violating grid point sits where 4t^2 < 2
  REQUIRE(rep.first_violation->second < 0.7071067811865476);
}

TEST_CASE("m-monotonicity rejects bad arguments") {
  const auto g = ArchimedeanGenerator::gumbel(2.0);
  const std::vector<double> empty;
  REQUIRE_THROWS_AS(m_monotone_check(g, 4, empty), std::domain_error);
  const auto grid = log_grid(1e-2, 10.0, 10);
  REQUIRE_THROWS_AS(m_monotone_check(g, 1, grid), std::domain_error);
}
