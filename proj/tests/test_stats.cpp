#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "esml/normal.hpp"
#include "esml/rng.hpp"
#include "esml/stats.hpp"

using namespace esml;

TEST_CASE("ks statistic of a perfect grid sample is small") {
  std::vector<double> xs;
  const int n = 1000;
  for (int i = 0; i < n; ++i) xs.push_back((i + 0.5) / n);
  REQUIRE(stats::ks_statistic(xs, [](double x) { return x; }) ==
          Catch::Approx(0.0005).epsilon(1e-6));
}

TEST_CASE("ks detects a wrong reference distribution") {
  RandomStream rng(3);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = rng.normal();
  REQUIRE(stats::ks_statistic(xs, norm_cdf) < 0.015);
  // against a shifted reference the distance is large
  REQUIRE(stats::ks_statistic(xs, [](double x) { return norm_cdf(x - 1.0); }) > 0.3);
}

TEST_CASE("two-sample ks on identical vs shifted samples") {
  RandomStream rng(5);
  std::vector<double> a(20000), b(20000), c(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    c[i] = rng.normal() + 1.0;
  }
  REQUIRE(stats::ks_statistic_2sample(a, b) < 0.02);
  REQUIRE(stats::ks_statistic_2sample(a, c) > 0.3);
}

TEST_CASE("chi-square p-value against known critical values") {
  // 19 dof: p = 0.001 at statistic 43.82, p = 0.5 at 18.34
  std::vector<double> obs(20, 100.0), exp(20, 100.0);
  auto r = stats::chi2_test(obs, exp);
  REQUIRE(r.statistic == 0.0);
  REQUIRE(r.p_value == Catch::Approx(1.0));
  obs[0] = 180.0;
  obs[1] = 20.0;  // statistic = 64 + 64 = 128 -> p tiny
  r = stats::chi2_test(obs, exp);
  REQUIRE(r.statistic == Catch::Approx(128.0));
  REQUIRE(r.p_value < 1e-10);
}

TEST_CASE("chi-square p-value matches the 19-dof critical point") {
  // P(chi2_19 > 43.82020) = 0.001; one cell absorbs the whole statistic
  std::vector<double> o(20, 100.0), e(20, 100.0);
  o[0] = 100.0 + std::sqrt(43.8202 * 100.0);
  const auto r = stats::chi2_test(o, e);
  REQUIRE(r.statistic == Catch::Approx(43.8202).epsilon(1e-9));
  REQUIRE(r.p_value == Catch::Approx(0.001).epsilon(0.002));
}

TEST_CASE("kendall tau: perfect concordance, discordance, independence") {
  std::vector<double> x(1000), y(1000), z(1000);
  RandomStream rng(9);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] * 2.0 + 1.0;
    z[i] = -x[i];
  }
  REQUIRE(stats::kendall_tau(x, y) == Catch::Approx(1.0));
  REQUIRE(stats::kendall_tau(x, z) == Catch::Approx(-1.0));
  std::vector<double> u(20000), v(20000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.uniform();
    v[i] = rng.uniform();
  }
  REQUIRE(std::fabs(stats::kendall_tau(u, v)) < 0.012);
}

TEST_CASE("linear fit recovers slope and intercept") {
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 0.25 * i);
  }
  const auto f = stats::linear_fit(x, y);
  REQUIRE(f.slope == Catch::Approx(-0.25).epsilon(1e-12));
  REQUIRE(f.intercept == Catch::Approx(3.0).epsilon(1e-12));
  REQUIRE(f.r_squared == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mean_var on a known sample") {
  std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto mv = stats::mean_var(xs);
  REQUIRE(mv.mean == Catch::Approx(2.5));
  REQUIRE(mv.var == Catch::Approx(5.0 / 3.0));
}
