#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "esml/marginal.hpp"

using namespace esml;

TEST_CASE("gaussian pdf/cdf at known points") {
  const auto m = Marginal1D::standard_gaussian();
  REQUIRE(m.pdf(0.0) == Catch::Approx(0.3989422804014327).epsilon(1e-14));
  REQUIRE(m.cdf(0.0) == Catch::Approx(0.5).epsilon(1e-14));
  REQUIRE(m.cdf(1.0) == Catch::Approx(0.8413447460685429).epsilon(1e-14));
  const auto s = Marginal1D::gaussian(2.0, 3.0);
  REQUIRE(s.cdf(2.0) == Catch::Approx(0.5).epsilon(1e-14));
  REQUIRE(s.pdf(2.0) == Catch::Approx(0.3989422804014327 / 3.0).epsilon(1e-14));
}

TEST_CASE("pdf strictly positive far into the tails") {
  const auto m = Marginal1D::standard_gaussian();
  REQUIRE(m.pdf(-37.0) > 0.0);
  REQUIRE(m.pdf(37.0) > 0.0);
  REQUIRE(m.cdf(-37.0) > 0.0);
  // the upper tail saturates at 1 in doubles around x = 8.3; probe below that
  REQUIRE(m.cdf(8.0) < 1.0);
}

TEST_CASE("quantile inverts the cdf to 1e-10") {
  const auto m = Marginal1D::gaussian(-0.5, 2.0);
  for (double u = 0.0005; u < 1.0; u += 0.0007) {
    REQUIRE(m.cdf(m.quantile(u)) == Catch::Approx(u).margin(1e-10));
  }
  // deep tails
  for (double u : {1e-12, 1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9}) {
    REQUIRE(m.cdf(m.quantile(u)) == Catch::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("cdf strictly increasing") {
  const auto m = Marginal1D::standard_gaussian();
  double prev = m.cdf(-8.0);
  for (double x = -7.5; x <= 8.0; x += 0.5) {
    const double cur = m.cdf(x);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("invalid parameters and arguments are rejected") {
  REQUIRE_THROWS_AS(Marginal1D::gaussian(0.0, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(Marginal1D::gaussian(0.0, -1.0), std::domain_error);
  const auto m = Marginal1D::standard_gaussian();
  REQUIRE_THROWS_AS(m.quantile(0.0), std::domain_error);
  REQUIRE_THROWS_AS(m.quantile(1.0), std::domain_error);
  REQUIRE_THROWS_AS(m.quantile(-0.1), std::domain_error);
}
