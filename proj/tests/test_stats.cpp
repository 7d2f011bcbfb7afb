#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wigner/rng.hpp"
#include "wigner/stats.hpp"

using namespace wigner;

TEST_CASE("incomplete beta closed forms") {
  using stats::regularized_incomplete_beta;
  for (const double x : {0.05, 0.2, 0.41, 0.5, 0.66, 0.9, 0.99}) {
    INFO("x ", x);
    CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2.0, 1.0, x) == doctest::Approx(x * x).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(1.0, 2.0, x) ==
          doctest::Approx(2.0 * x - x * x).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2.0, 2.0, x) ==
          doctest::Approx(3.0 * x * x - 2.0 * x * x * x).epsilon(1e-12));
    // Reflection identity.
    CHECK(regularized_incomplete_beta(3.5, 1.25, x) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(1.25, 3.5, 1.0 - x))
              .epsilon(1e-12));
  }
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, -0.5) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.5) == 1.0);
  CHECK_THROWS(regularized_incomplete_beta(0.0, 1.0, 0.5));
  CHECK_THROWS(regularized_incomplete_beta(1.0, -2.0, 0.5));
}

TEST_CASE("exact binomial interval at the boundaries") {
  SUBCASE("zero events") {
    const auto est = stats::tail_probability(0, 100);
    CHECK(est.point == 0.0);
    CHECK(est.lo == 0.0);
    // Upper endpoint solves (1 - hi)^100 = 0.025.
    CHECK(std::abs(std::pow(1.0 - est.hi, 100.0) - 0.025) <= 1e-6);
    CHECK(est.n_samples == 100);
    CHECK(est.n_events == 0);
  }
  SUBCASE("all events") {
    const auto est = stats::tail_probability(100, 100);
    CHECK(est.point == 1.0);
    CHECK(est.hi == 1.0);
    CHECK(std::abs(std::pow(est.lo, 100.0) - 0.025) <= 1e-6);
  }
  SUBCASE("half events") {
    const auto est = stats::tail_probability(50, 100);
    CHECK(est.point == 0.5);
    CHECK(est.lo > 0.39);
    CHECK(est.lo < 0.41);
    CHECK(est.hi > 0.59);
    CHECK(est.hi < 0.61);
  }
  SUBCASE("interval always brackets the point estimate") {
    for (const std::size_t events : {0u, 1u, 7u, 33u, 99u, 100u}) {
      const auto est = stats::tail_probability(events, 100);
      REQUIRE(est.lo <= est.point);
      REQUIRE(est.point <= est.hi);
      REQUIRE(est.lo >= 0.0);
      REQUIRE(est.hi <= 1.0);
    }
  }
  SUBCASE("narrower interval at lower confidence") {
    const auto wide = stats::tail_probability(20, 100, 0.99);
    const auto tight = stats::tail_probability(20, 100, 0.9);
    CHECK(tight.lo > wide.lo);
    CHECK(tight.hi < wide.hi);
  }
  SUBCASE("rejects malformed inputs") {
    CHECK_THROWS(stats::tail_probability(3, 0));
    CHECK_THROWS(stats::tail_probability(5, 4));
    CHECK_THROWS(stats::tail_probability(1, 10, 0.0));
    CHECK_THROWS(stats::tail_probability(1, 10, 1.0));
  }
}

TEST_CASE("mean with normal interval") {
  SUBCASE("three values") {
    const auto est = stats::mean_with_ci({1.0, 2.0, 3.0});
    CHECK(est.point == doctest::Approx(2.0).epsilon(1e-15));
    const double se = std::sqrt(1.0 / 3.0);
    CHECK(est.lo == doctest::Approx(2.0 - 1.959963984540054 * se).epsilon(1e-12));
    CHECK(est.hi == doctest::Approx(2.0 + 1.959963984540054 * se).epsilon(1e-12));
    CHECK(est.n_samples == 3);
  }
  SUBCASE("single value degenerates to a point") {
    const auto est = stats::mean_with_ci({5.0});
    CHECK(est.point == 5.0);
    CHECK(est.lo == 5.0);
    CHECK(est.hi == 5.0);
  }
  SUBCASE("empty input rejected") { CHECK_THROWS(stats::mean_with_ci({})); }
}

namespace {

// Binomial event counts for p(eps) = amp * eps^slope, one rng draw per trial.
std::vector<std::size_t> synthetic_events(const std::vector<double>& grid, double amp,
                                          double slope, std::size_t n_samples,
                                          wigner::rng::Stream& stream) {
  std::vector<std::size_t> events(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = amp * std::pow(grid[i], slope);
    for (std::size_t s = 0; s < n_samples; ++s) {
      if (stream.uniform01() < p) ++events[i];
    }
  }
  return events;
}

}  // namespace

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> grid{0.2, 0.35, 0.5, 0.7, 1.0};
  const std::size_t n_samples = 20000;

  SUBCASE("noise-free counts, exact slope") {
    std::vector<std::size_t> events(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p = 0.5 * grid[i] * grid[i];
      events[i] = static_cast<std::size_t>(std::llround(p * 1e9));
    }
    const auto fit = stats::fit_log_log(grid, events, 1000000000);
    REQUIRE(fit.ok);
    CHECK(fit.bins_used == grid.size());
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(std::exp(fit.intercept) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(fit.r2 > 0.999999);
  }

  SUBCASE("binomial noise, calibrated error bars") {
    wigner::rng::Stream stream(777);
    const double true_slope = 3.7;
    int covered = 0;
    double slope_sum = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto events = synthetic_events(grid, 0.8, true_slope, n_samples, stream);
      const auto fit = stats::fit_log_log(grid, events, n_samples);
      REQUIRE(fit.ok);
      slope_sum += fit.slope;
      if (std::abs(fit.slope - true_slope) <= 2.0 * fit.slope_stderr) ++covered;
    }
    CHECK(covered >= 85);
    CHECK(slope_sum / 100.0 == doctest::Approx(true_slope).epsilon(0.05));
  }
}

TEST_CASE("log-log fit refuses starved or degenerate inputs") {
  SUBCASE("every bin under the event floor") {
    const auto fit = stats::fit_log_log({0.25, 0.5, 1.0}, {3, 7, 19}, 1000);
    CHECK_FALSE(fit.ok);
    CHECK(fit.bins_used == 0);
    CHECK(fit.diagnostic.find("fit refused") != std::string::npos);
  }
  SUBCASE("fewer than three usable bins") {
    const auto fit = stats::fit_log_log({0.25, 0.5, 1.0}, {3, 700, 900}, 1000);
    CHECK_FALSE(fit.ok);
    CHECK(fit.bins_used == 2);
    CHECK_FALSE(fit.diagnostic.empty());
  }
  SUBCASE("degenerate grid") {
    const auto fit = stats::fit_log_log({0.5, 0.5, 0.5}, {100, 100, 100}, 1000);
    CHECK_FALSE(fit.ok);
    CHECK(fit.diagnostic.find("degenerate") != std::string::npos);
  }
  SUBCASE("malformed inputs") {
    CHECK_THROWS(stats::fit_log_log({0.5, 1.0}, {10, 10, 10}, 100));
    CHECK_THROWS(stats::fit_log_log({0.5, 1.0}, {10, 10}, 0));
    CHECK_THROWS(stats::fit_log_log({-1.0, 0.5, 1.0}, {100, 100, 100}, 1000));
  }
}
