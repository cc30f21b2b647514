// Tests for the ensemble simulator: determinism under threading, agreement
// with closed forms, error scaling, Poisson realization, the Cauchy
// invariance, normalized coherence, and the phase-stability check.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <dephase/analytic_core.hpp>
#include <dephase/distributions.hpp>
#include <dephase/monte_carlo.hpp>
#include <dephase/rng.hpp>
#include <dephase/stats.hpp>

using namespace dephase;
using Catch::Approx;

namespace {

SimulationConfig base_config() {
  SimulationConfig config;
  config.dist = StudentT{0.5, 1.0};
  config.process = PoissonProcess{3.0};
  config.ensemble_size = 3000;
  config.times = {0.0, 0.5, 1.0, 2.0};
  config.seed = 42;
  return config;
}

} // namespace

TEST_CASE("simulation config validation") {
  auto config = base_config();
  config.ensemble_size = 1;
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.times = {};
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.times = {0.5, 1.0};
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.times = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.process = FixedProcess{0.0};
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.process = PoissonProcess{-1.0};
  CHECK_THROWS_AS(simulate(config), ConfigError);

  config = base_config();
  config.process = PoissonProcess{1e9};
  config.times = {0.0, 10.0};
  CHECK_THROWS_AS(simulate(config), RateTooHighError);
}

TEST_CASE("results are bit-identical for any worker count") {
  const auto config = base_config();
  const auto r1 = simulate(config, 1);
  const auto r2 = simulate(config, 2);
  const auto r3 = simulate(config, 3);
  const auto r1b = simulate(config, 1);
  REQUIRE(r1.curve.values.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(r1.curve.values[k] == r2.curve.values[k]);
    CHECK(r1.curve.values[k] == r3.curve.values[k]);
    CHECK(r1.curve.values[k] == r1b.curve.values[k]);
    CHECK(r1.stderr_values[k] == r2.stderr_values[k]);
    CHECK(r1.stderr_values[k] == r3.stderr_values[k]);
  }
  CHECK(r1.mean_collisions == r2.mean_collisions);

  auto other = config;
  other.seed = 43;
  const auto r_other = simulate(other, 1);
  CHECK(r_other.curve.values[2] != r1.curve.values[2]);

  CHECK(r1.curve.meta.engine == "monte-carlo");
  CHECK(r1.curve.meta.seed == 42);
  CHECK(r1.curve.meta.ensemble == 3000);
}

TEST_CASE("free evolution matches closed forms within 3 standard errors") {
  SimulationConfig config;
  config.dist = StableLaw{1.5, 0.8};
  config.process = NoProcess{};
  config.ensemble_size = 100000;
  config.seed = 7;
  config.times.push_back(0.0);
  for (int i = 1; i <= 16; ++i)
    config.times.push_back(2.2 * static_cast<double>(i) / 16.0);

  const auto result = simulate(config);
  CHECK(result.mean_collisions == 0.0);
  std::size_t misses = 0;
  for (std::size_t k = 0; k < config.times.size(); ++k) {
    const double exact =
        std::exp(-0.8 * std::pow(config.times[k], 1.5));
    CHECK(result.curve.values[k] >= 0.0);
    CHECK(result.curve.values[k] <= 1.0);
    CHECK(result.stderr_values[k] >= 0.0);
    if (std::abs(result.curve.values[k] - exact) >
        3.0 * std::max(result.stderr_values[k], 1e-12))
      ++misses;
  }
  CHECK(misses <= 1); // 3-sigma misses are ~0.3% per point

  // Heavy-tail family against the frozen characteristic-function values.
  SimulationConfig heavy;
  heavy.dist = StudentT{0.5, 1.0};
  heavy.ensemble_size = 100000;
  heavy.seed = 11;
  heavy.times = {0.0, 0.25, 0.5, 1.0, 2.0};
  const auto hres = simulate(heavy);
  const double frozen[] = {1.0, 0.60598438986831614, 0.45930272952102811,
                           0.28618221034154811, 0.12308006813893366};
  for (std::size_t k = 1; k < heavy.times.size(); ++k)
    CHECK(std::abs(hres.curve.values[k] - frozen[k]) <
          3.0 * hres.stderr_values[k]);
}

TEST_CASE("fixed resets reproduce the exact schedule formula") {
  // dt = T/4 with alpha = 0.5: R(T) = R0(T)^2.
  SimulationConfig config;
  config.dist = StableLaw{0.5, 1.0};
  config.process = FixedProcess{1.0};
  config.ensemble_size = 100000;
  config.seed = 99;
  config.times = {0.0, 4.0};
  const auto result = simulate(config);

  const auto schedule = CollisionSchedule::fixed_spacing(1.0, 4.0);
  const double exact =
      coherence_stable_with_collisions(StableLaw{0.5, 1.0}, schedule);
  CHECK(exact == Approx(std::exp(-4.0)).epsilon(1e-12)); // sanity
  const double r0 = std::exp(-std::sqrt(4.0));
  CHECK(exact == Approx(r0 * r0).epsilon(1e-12));
  CHECK(std::abs(result.curve.values[1] - exact) <
        3.0 * result.stderr_values[1]);
  CHECK(result.mean_collisions == 3.0); // resets at 1, 2, 3
}

TEST_CASE("standard error scales like 1/sqrt(N)") {
  SimulationConfig small;
  small.dist = StudentT{1.5, 1.0};
  small.process = PoissonProcess{1.0};
  small.ensemble_size = 2000;
  small.seed = 5;
  small.times = {0.0, 0.5, 1.0, 2.0};
  auto large = small;
  large.ensemble_size = 32000; // doubled four times

  const auto rs = simulate(small);
  const auto rl = simulate(large);
  double mean_small = 0.0, mean_large = 0.0;
  for (std::size_t k = 1; k < small.times.size(); ++k) {
    mean_small += rs.stderr_values[k];
    mean_large += rl.stderr_values[k];
  }
  const double ratio = mean_small / mean_large;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("Poisson process realization") {
  SimulationConfig config;
  config.dist = StudentT{1.0, 1.0};
  config.process = PoissonProcess{3.0};
  config.ensemble_size = 10000;
  config.seed = 21;
  config.times = {0.0, 2.5, 5.0};
  const auto result = simulate(config);
  // Mean collision count ~ Gamma * T_max, Poisson variance Gamma * T_max.
  const double expected = 3.0 * 5.0;
  const double se = std::sqrt(expected / 10000.0);
  CHECK(std::abs(result.mean_collisions - expected) < 5.0 * se);

  // The inter-collision gaps are exponential(Gamma) draws.
  RandomStream rng(777, 0);
  std::vector<double> gaps(10000);
  for (auto& g : gaps) g = rng.next_exponential(3.0);
  const double d =
      ks_statistic(gaps, [](double x) { return 1.0 - std::exp(-3.0 * x); });
  CHECK(d < ks_critical_value(0.01, gaps.size()));
}

TEST_CASE("Cauchy coherence is invariant under the fluctuation rate") {
  std::vector<EnsembleResult> runs;
  for (const double gamma : {0.0, 1.0, 10.0}) {
    SimulationConfig config;
    config.dist = StudentT{1.0, 1.0};
    config.process = gamma > 0.0 ? CollisionProcess{PoissonProcess{gamma}}
                                 : CollisionProcess{NoProcess{}};
    config.ensemble_size = 20000;
    config.seed = 31;
    config.times = {0.0, 0.5, 1.0, 2.0};
    runs.push_back(simulate(config));
  }
  for (const auto& run : runs)
    for (std::size_t k = 0; k < run.curve.times.size(); ++k)
      CHECK(std::abs(run.curve.values[k] -
                     std::exp(-run.curve.times[k])) <=
            3.0 * std::max(run.stderr_values[k], 1e-12));
  for (std::size_t k = 1; k < runs[0].curve.times.size(); ++k) {
    const double diff =
        std::abs(runs[1].curve.values[k] - runs[2].curve.values[k]);
    const double band = 3.0 * std::hypot(runs[1].stderr_values[k],
                                         runs[2].stderr_values[k]);
    CHECK(diff <= band);
  }
}

TEST_CASE("normalized coherence: identity at gamma = 0 and crossover shape") {
  SimulationConfig config;
  config.dist = StudentT{1.5, 1.0};
  config.ensemble_size = 20000;
  config.seed = 8;
  config.times = {0.0, 0.5};
  const auto identity = simulate_normalized_coherence(config, 0.5);
  CHECK(std::abs(identity.value - 1.0) <= 3.0 * identity.standard_error);
  CHECK(identity.reference_R0 == Approx(0.68447227480422899).epsilon(1e-7));

  // Truncated heavy tail: broadening at small rates (ratio below 1, falling
  // with Gamma), then rising again once the cutoff is sampled.
  const TruncatedDistribution trunc{StudentT{0.5, 1.0}, 1000.0};
  const auto ratio_at = [&](double gamma) {
    SimulationConfig c;
    c.dist = trunc;
    c.process = PoissonProcess{gamma};
    c.ensemble_size = 20000;
    c.seed = 17;
    c.times = {0.0, 0.5};
    return simulate_normalized_coherence(c, 0.5);
  };
  const auto slow = ratio_at(0.5);
  const auto mid = ratio_at(5.0);
  const auto near_star = ratio_at(63.0); // (delta_c)^alpha / T
  const auto fast = ratio_at(2000.0);
  CHECK(slow.value < 1.0 - 3.0 * slow.standard_error);
  CHECK(mid.value < slow.value);
  CHECK(fast.value > near_star.value);
}

TEST_CASE("normalized coherence validation") {
  SimulationConfig config;
  config.dist = StudentT{0.5, 1.0};
  config.ensemble_size = 100;
  config.times = {0.0, 0.5};
  CHECK_THROWS_AS(simulate_normalized_coherence(config, 0.7), ParameterError);

  config.times = {0.0, 30.0};
  // R0(30) ~ 1e-9: far below the 1e-6 conditioning floor.
  CHECK_THROWS_AS(simulate_normalized_coherence(config, 30.0),
                  IllConditionedError);
}

TEST_CASE("simulated phases satisfy the stability scaling") {
  // Identity schedule: both samples come from the same law.
  const CollisionSchedule trivial({0.0, 1.7});
  const double d1 =
      phase_distribution_check(StableLaw{1.2, 1.0}, trivial, 10000);
  CHECK(d1 < ks_critical_value_two_sample(0.01, 10000, 10000));

  // Gaussian member, three random intervals.
  const CollisionSchedule three({0.0, 0.31, 0.9, 2.0});
  const double d2 =
      phase_distribution_check(StableLaw{2.0, 0.7}, three, 100000);
  CHECK(d2 < ks_critical_value_two_sample(0.01, 100000, 100000));

  // Heavy member, ten equal intervals.
  const auto ten = CollisionSchedule::equal_intervals(10, 1.0);
  const double d3 =
      phase_distribution_check(StableLaw{0.5, 1.0}, ten, 100000);
  CHECK(d3 < ks_critical_value_two_sample(0.01, 100000, 100000));

  CHECK_THROWS_AS(phase_distribution_check(StableLaw{1.0, 1.0}, trivial, 100),
                  ParameterError);
}
