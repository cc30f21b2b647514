// Acceptance suite: nine end-to-end reproduction checks, one verdict line
// each ("CRITERION k: PASS/FAIL — ..."). Tolerances are pinned as constants
// next to each check. Two checks (5 and 6) encode targets that the engines
// measurably contradict at the pinned sample sizes; they run verbatim,
// print the measured values, and fail honestly — see the comments inside.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <dephase/analysis.hpp>
#include <dephase/analytic_core.hpp>
#include <dephase/distributions.hpp>
#include <dephase/monte_carlo.hpp>
#include <dephase/poisson_spectrum.hpp>
#include <dephase/stats.hpp>

using namespace dephase;

namespace {

void verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("CRITERION %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) /
                      static_cast<double>(n - 1);
  return out;
}

std::vector<double> log_ladder(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                        static_cast<double>(n - 1));
  return out;
}

EnsembleResult simulate_poisson(const DetuningDistribution& dist,
                                double gamma, std::size_t n,
                                std::vector<double> times,
                                std::uint64_t seed) {
  SimulationConfig config;
  config.dist = dist;
  config.process =
      gamma > 0.0 ? CollisionProcess{PoissonProcess{gamma}}
                  : CollisionProcess{NoProcess{}};
  config.ensemble_size = n;
  config.times = std::move(times);
  config.seed = seed;
  return simulate(config);
}

EnsembleResult simulate_fixed(const DetuningDistribution& dist, double dt,
                              std::size_t n, std::vector<double> times,
                              std::uint64_t seed) {
  SimulationConfig config;
  config.dist = dist;
  config.process = FixedProcess{dt};
  config.ensemble_size = n;
  config.times = std::move(times);
  config.seed = seed;
  return simulate(config);
}

} // namespace

// ---------------------------------------------------------------------------
// 1. A Cauchy ensemble (student-t, r = 1) is immune to resets: the line
//    shape and the coherence do not depend on the reset rate.
TEST_CASE("criterion 1: cauchy invariance") {
  constexpr double kRelTol = 1e-4; // spectral FWHM spread across rates
  const DetuningDistribution dist = StudentT{1.0, 1.0};
  const std::vector<double> rates = {0.0, 0.1, 1.0, 10.0};

  std::vector<double> widths;
  for (const double gamma : rates)
    widths.push_back(
        spectrum(dist, gamma, default_frequency_grid(dist, 2048)).fwhm);
  double spread = 0.0;
  for (const double w : widths)
    spread = std::max(spread, std::abs(w - widths[0]) / widths[0]);
  const bool laplace_ok = spread <= kRelTol;

  // Monte Carlo at N = 1e5: R(T) must sit on exp(-T) for every rate.
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0};
  bool mc_ok = true;
  double worst_pull = 0.0;
  for (std::size_t g = 0; g < rates.size(); ++g) {
    const EnsembleResult res =
        simulate_poisson(dist, rates[g], 100000, times, 100 + g);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double pull = std::abs(res.curve.values[k] - std::exp(-times[k])) /
                          res.stderr_values[k];
      worst_pull = std::max(worst_pull, pull);
      if (pull > 3.0) mc_ok = false;
    }
  }

  const bool pass = laplace_ok && mc_ok;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "FWHM spread %.2e (tol %.0e), worst MC pull %.2f sigma (max 3)",
                spread, kRelTol, worst_pull);
  verdict(1, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 2. FWHM ratio vs reset rate: monotone broadening for r = 0.5, monotone
//    narrowing for r = 1.5, with the ratio on the right side of 1 at rate 10.
TEST_CASE("criterion 2: fwhm ratio trend") {
  const std::vector<double> ladder = log_ladder(0.1, 100.0, 10);
  bool pass = true;
  std::string detail;
  for (const double r : {0.5, 1.5}) {
    const DetuningDistribution dist = StudentT{r, 1.0};
    const std::vector<double> grid = default_frequency_grid(dist, 1024);
    const double f0 = spectrum(dist, 0.0, grid).fwhm;
    std::vector<double> ratios;
    for (const double gamma : ladder)
      ratios.push_back(spectrum(dist, gamma, grid).fwhm / f0);

    bool monotone = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) {
      const bool up = ratios[i] > ratios[i - 1];
      if (r < 1.0 ? !up : up) monotone = false;
    }
    const double at10 = ratios[6]; // ladder[6] == 10
    const bool side = r < 1.0 ? at10 > 1.0 : at10 < 1.0;
    pass = pass && monotone && side;
    char part[96];
    std::snprintf(part, sizeof(part), "r=%.1f %s ratio(10)=%.3f; ", r,
                  monotone ? "monotone" : "NOT monotone", at10);
    detail += part;
  }
  verdict(2, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 3. For a stable law, n equal reset intervals give exactly
//    R(T) = R0(T)^(n^(1-alpha)); Monte Carlo must agree within 3 sigma.
TEST_CASE("criterion 3: stable-law exactness under equal intervals") {
  bool pass = true;
  double worst_pull = 0.0;
  for (const double alpha : {0.5, 2.0}) {
    const StableLaw law{alpha, 1.0};
    for (const double t : {0.5, 1.0, 2.0, 4.0}) {
      const auto schedule = CollisionSchedule::fixed_spacing(t / 4.0, t);
      const double exact = coherence_stable_with_collisions(law, schedule);
      const double closed =
          std::pow(std::exp(-std::pow(t, alpha)), std::pow(4.0, 1.0 - alpha));
      REQUIRE(exact == Catch::Approx(closed).margin(1e-12));

      const EnsembleResult res = simulate_fixed(
          law, t / 4.0, 100000, {0.0, t},
          1900 + static_cast<std::uint64_t>(10 * alpha + 4 * t));
      const double pull =
          std::abs(res.curve.values[1] - exact) / res.stderr_values[1];
      worst_pull = std::max(worst_pull, pull);
      if (pull > 3.0) pass = false;
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "worst MC pull %.2f sigma (max 3) over 8 (alpha, T) points",
                worst_pull);
  verdict(3, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 4. Reset coherence sits on the correct side of the free coherence for
//    every schedule: below for alpha < 1 (broadening), above for alpha > 1.
TEST_CASE("criterion 4: narrowing/broadening ordering") {
  constexpr double kTol = 1e-12;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int violations = 0;
  for (int s = 0; s < 200; ++s) {
    const double total = 0.5 + 2.5 * uni(rng);
    const int intervals = 1 + static_cast<int>(7.0 * uni(rng));
    std::vector<double> boundaries = {0.0, total};
    for (int j = 0; j < intervals - 1; ++j)
      boundaries.push_back(total * uni(rng));
    std::sort(boundaries.begin(), boundaries.end());
    const CollisionSchedule schedule(boundaries);
    for (const double alpha : {0.3, 0.7, 1.3, 1.8}) {
      const StableLaw law{alpha, 1.0};
      const double with_resets =
          coherence_stable_with_collisions(law, schedule);
      const double free_value = std::exp(-std::pow(total, alpha));
      const bool ok = alpha < 1.0 ? with_resets <= free_value + kTol
                                  : with_resets >= free_value - kTol;
      if (!ok) ++violations;
    }
  }
  const bool pass = violations == 0;
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "%d violations over 200 schedules x 4 exponents (tol 1e-12)",
                violations);
  verdict(4, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 5. Decay-rate scaling at N = 1e4 over the rate ladder {2, 5, 10, 20, 50}:
//    (a) every rung's log-coherence tail fits linearly with r^2 > 0.99, and
//    (b) the scaling fit gamma = a*G^(1-alpha_bar) + b recovers
//        alpha_bar = r within 0.1 for r in {0.5, 0.75}.
//
//    This check fails honestly: for the heavy tails the measured rate grows
//    like sqrt(G)*~0.93, so at the window opening T = 10/G the coherence is
//    exp(-9.3/sqrt(G)) — for G <= 5 (r = 0.5) and G = 2 (r = 0.75) that is
//    below the 5-sigma noise floor of a 1e4-particle ensemble, and the fit
//    window is empty by the module's own precondition. The surviving rungs
//    for r = 0.5 span less than a decade, so the scaling fit cannot run
//    either. The check documents this with per-rung diagnostics.
TEST_CASE("criterion 5: decay-rate scaling at the pinned ensemble size") {
  constexpr std::size_t kEnsemble = 10000;
  constexpr double kR2Min = 0.99;
  constexpr double kAlphaTol = 0.1;
  const std::vector<double> ladder = {2.0, 5.0, 10.0, 20.0, 50.0};

  bool all_fits_linear = true;
  bool scaling_ok = true;
  std::string detail;
  for (const double r : {0.5, 0.75}) {
    const DetuningDistribution dist = StudentT{r, 1.0};
    std::vector<std::pair<double, double>> rates;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const double gamma = ladder[i];
      const EnsembleResult res = simulate_poisson(
          dist, gamma, kEnsemble, linspace(0.0, 10.0 / gamma + 3.0, 80),
          500 + static_cast<std::uint64_t>(100 * r) + i);
      try {
        const DecayFit fit = fit_exponential_tail(res, gamma);
        rates.emplace_back(gamma, fit.gamma);
        std::printf("  r=%.2f G=%-4g gamma=%7.4f r2=%.4f window=[%.2f, %.2f]\n",
                    r, gamma, fit.gamma, fit.r_squared, fit.fit_window[0],
                    fit.fit_window[1]);
        if (fit.r_squared <= kR2Min) all_fits_linear = false;
      } catch (const NumericalError& error) {
        std::printf("  r=%.2f G=%-4g fit unavailable: %s\n", r, gamma,
                    error.what());
        all_fits_linear = false;
      }
    }
    try {
      const ScalingFit fit = fit_scaling_law(rates);
      const bool ok = std::abs(fit.alpha_bar - r) <= kAlphaTol;
      char part[96];
      std::snprintf(part, sizeof(part), "r=%.2f alpha_bar=%.3f%s; ", r,
                    fit.alpha_bar, ok ? "" : " (off)");
      detail += part;
      if (!ok) scaling_ok = false;
    } catch (const Error& error) {
      detail += "r=" + std::to_string(r).substr(0, 4) +
                " scaling fit impossible; ";
      scaling_ok = false;
    }
  }
  const bool pass = all_fits_linear && scaling_ok;
  verdict(5, pass,
          detail + (all_fits_linear ? "all rungs linear"
                                    : "rungs without a usable fit window"));
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 6. Truncated heavy tail: the normalized coherence at T = 0.5 has an
//    interior minimum in the reset rate for each cutoff, the minimum moves
//    up with the cutoff, and the slope of log G* vs log delta_c is 0.5+-0.2.
//
//    The first two clauses hold; the slope clause fails honestly. The
//    (delta_c)^alpha / T estimate is an onset scale — the rate where the
//    truncation first becomes visible. The minimum itself balances
//    heavy-tail broadening (~G^(1-alpha)) against truncated-variance
//    narrowing (~delta_c^(2-alpha)/G), which puts G* proportional to
//    delta_c itself: measured slope ~ 1.0. The check prints both.
TEST_CASE("criterion 6: cutoff crossover scaling") {
  constexpr double kSlopeTarget = 0.5;
  constexpr double kSlopeTol = 0.2;
  const double t_ref = 0.5;
  const CoreDistribution core = StudentT{0.5, 1.0};

  std::vector<double> log_dc, log_star;
  bool interior = true;
  std::string detail;
  for (const double delta_c : {100.0, 1000.0, 10000.0}) {
    const TruncatedDistribution trunc{core, delta_c};
    const double predicted = crossover_scale(trunc, t_ref);
    // Scan from e^-2 to e^+5 around the predicted onset so both the onset
    // and the minimum sit inside the window.
    const std::vector<double> ladder =
        log_ladder(predicted * std::exp(-2.0), predicted * std::exp(5.0), 8);
    std::vector<std::pair<double, double>> points;
    for (const double gamma : ladder) {
      const LaplaceEvaluator evaluator(trunc, gamma);
      const double ratio = invert_laplace(evaluator, {t_ref}).values[0] /
                           char_magnitude(trunc, t_ref);
      points.emplace_back(gamma, ratio);
    }
    try {
      const CrossoverResult crossover = find_crossover(points, predicted);
      log_dc.push_back(std::log(delta_c));
      log_star.push_back(std::log(crossover.gamma_star));
      char part[80];
      std::snprintf(part, sizeof(part), "dc=%g G*=%.3g (onset %.3g); ",
                    delta_c, crossover.gamma_star, predicted);
      detail += part;
    } catch (const ScanRangeError&) {
      interior = false;
      detail += "dc=" + std::to_string(delta_c) + " no interior minimum; ";
    }
  }

  bool increasing = interior && log_star.size() == 3 &&
                    log_star[0] < log_star[1] && log_star[1] < log_star[2];
  double slope = 0.0;
  if (increasing) {
    const double mx = (log_dc[0] + log_dc[1] + log_dc[2]) / 3.0;
    const double my = (log_star[0] + log_star[1] + log_star[2]) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      sxy += (log_dc[i] - mx) * (log_star[i] - my);
      sxx += (log_dc[i] - mx) * (log_dc[i] - mx);
    }
    slope = sxy / sxx;
  }
  const bool slope_ok =
      increasing && std::abs(slope - kSlopeTarget) <= kSlopeTol;
  const bool pass = interior && increasing && slope_ok;
  char tail_part[96];
  std::snprintf(tail_part, sizeof(tail_part),
                "slope(log G* / log dc) = %.3f (target %.1f +- %.1f)", slope,
                kSlopeTarget, kSlopeTol);
  verdict(6, pass, detail + tail_part);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 7. Fixed resets every 0.25: the interval product sits below the free
//    coherence for r = 0.5 and above it for r = 1.5, and Monte Carlo agrees.
TEST_CASE("criterion 7: zeno product ordering and simulation match") {
  constexpr double kQuadTol = 1e-8;
  const double dt = 0.25;
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0};
  bool ordering = true, mc_ok = true;
  double worst_pull = 0.0;
  for (const double r : {0.5, 1.5}) {
    const DetuningDistribution dist = StudentT{r, 1.0};
    const EnsembleResult res =
        simulate_fixed(dist, dt, 100000, times,
                       700 + static_cast<std::uint64_t>(10 * r));
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double product = zeno_product(
          dist, CollisionSchedule::fixed_spacing(dt, times[k]));
      const double free_value = char_magnitude(dist, times[k]);
      const bool side = r < 1.0 ? product < free_value - kQuadTol
                                : product > free_value + kQuadTol;
      if (!side) ordering = false;
      const double pull =
          std::abs(res.curve.values[k] - product) / res.stderr_values[k];
      worst_pull = std::max(worst_pull, pull);
      if (pull > 3.0) mc_ok = false;
    }
  }
  const bool pass = ordering && mc_ok;
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "ordering %s at T in {0.5, 1, 2}; worst MC pull %.2f sigma",
                ordering ? "correct" : "VIOLATED", worst_pull);
  verdict(7, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 8. Engine cross-validation: Laplace inversion vs Monte Carlo for the
//    heavy tail at rate 10, pointwise within 3 sigma on (0, 3].
TEST_CASE("criterion 8: laplace vs monte carlo") {
  const DetuningDistribution dist = StudentT{0.5, 1.0};
  const double gamma = 10.0;
  const std::vector<double> grid = linspace(0.25, 3.0, 12);
  const LaplaceEvaluator evaluator(dist, gamma);
  const CoherenceCurve inverted = invert_laplace(evaluator, grid);

  std::vector<double> mc_times = {0.0};
  mc_times.insert(mc_times.end(), grid.begin(), grid.end());
  const EnsembleResult res =
      simulate_poisson(dist, gamma, 100000, mc_times, 808);

  bool pass = true;
  double worst_pull = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double pull =
        std::abs(inverted.values[k] - res.curve.values[k + 1]) /
        res.stderr_values[k + 1];
    worst_pull = std::max(worst_pull, pull);
    if (pull > 3.0) pass = false;
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail),
                "worst pull %.2f sigma over 12 grid points (max 3)",
                worst_pull);
  verdict(8, pass, detail);
  REQUIRE(pass);
}

// ---------------------------------------------------------------------------
// 9. Property suites: stability of the accumulated phase, sampler
//    correctness, determinism under threading, stderr ~ 1/sqrt(N), and the
//    Laplace transform round-trip on the closed-form Cauchy resolvent.
TEST_CASE("criterion 9: property suites") {
  std::string detail;

  // (a) accumulated phase matches the rescaled single draw (stability).
  const double ks1 = phase_distribution_check(
      StableLaw{1.2, 1.0}, CollisionSchedule({0.0, 0.31, 0.9, 2.0}), 10000);
  const double ks2 = phase_distribution_check(
      StableLaw{0.5, 1.0}, CollisionSchedule::equal_intervals(10, 2.0), 10000);
  const double ks_crit = ks_critical_value_two_sample(0.01, 10000, 10000);
  const bool stability_ok = ks1 < ks_crit && ks2 < ks_crit;
  detail += stability_ok ? "stability KS ok; " : "stability KS FAILED; ";

  // (b) sampler: student-t r = 1 draws follow the Cauchy CDF.
  RandomStream stream(2024, 7);
  std::vector<double> draws(20000);
  const DetuningDistribution cauchy = StudentT{1.0, 1.0};
  for (double& x : draws) x = sample_one(cauchy, stream);
  const double ks3 = ks_statistic(std::move(draws), [](double x) {
    return 0.5 + std::atan(x) / kPi;
  });
  const bool sampler_ok = ks3 < ks_critical_value(0.01, 20000);
  detail += sampler_ok ? "sampler KS ok; " : "sampler KS FAILED; ";

  // (c) determinism: identical bits for 1 and 3 worker threads.
  SimulationConfig config;
  config.dist = StudentT{0.5, 1.0};
  config.process = PoissonProcess{3.0};
  config.ensemble_size = 3000;
  config.times = {0.0, 0.5, 1.0, 2.0};
  config.seed = 99;
  const EnsembleResult r1 = simulate(config, 1);
  const EnsembleResult r3 = simulate(config, 3);
  const bool deterministic = r1.curve.values == r3.curve.values &&
                             r1.stderr_values == r3.stderr_values;
  detail += deterministic ? "deterministic; " : "NOT deterministic; ";

  // (d) standard error scales as 1/sqrt(N): x16 particles -> /4 stderr.
  config.ensemble_size = 2000;
  config.seed = 17;
  const EnsembleResult small = simulate(config);
  config.ensemble_size = 32000;
  const EnsembleResult big = simulate(config);
  double ratio_sum = 0.0;
  for (std::size_t k = 1; k < config.times.size(); ++k)
    ratio_sum += small.stderr_values[k] / big.stderr_values[k];
  const double ratio = ratio_sum / static_cast<double>(config.times.size() - 1);
  const bool scaling_ok = ratio > 3.5 && ratio < 4.5;
  char part[48];
  std::snprintf(part, sizeof(part), "stderr ratio %.2f; ", ratio);
  detail += part;

  // (e) Laplace round-trip: the Cauchy resolvent is rate-invariant, so the
  // inversion must return exp(-T) for any rate.
  const LaplaceEvaluator evaluator(StudentT{1.0, 1.0}, 3.0);
  const CoherenceCurve curve = invert_laplace(evaluator, {0.5, 1.0, 2.0});
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < curve.times.size(); ++k)
    worst_rel = std::max(worst_rel,
                         std::abs(curve.values[k] - std::exp(-curve.times[k])) /
                             std::exp(-curve.times[k]));
  const bool laplace_ok = worst_rel < 1e-4;
  std::snprintf(part, sizeof(part), "laplace round-trip rel %.1e", worst_rel);
  detail += part;

  const bool pass =
      stability_ok && sampler_ok && deterministic && scaling_ok && laplace_ok;
  verdict(9, pass, detail);
  REQUIRE(pass);
}
