// dephase/monte_carlo.hpp — ensemble simulation of phase accumulation under
// resetting fluctuations: per-particle collision times, piecewise-constant
// detuning, and ensemble-averaged coherence with standard errors.
//
// Determinism: every particle owns a counter-based RNG stream derived from
// (seed, particle index), particles are processed in fixed chunks of 1024,
// and chunk accumulators are reduced in chunk order on the calling thread.
// Results are therefore bit-identical for any worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "analytic_core.hpp"
#include "distributions.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace dephase {

struct NoProcess {};
struct PoissonProcess {
  double gamma; // reset rate, units 1/time
};
struct FixedProcess {
  double dt; // reset spacing, units time
};
using CollisionProcess = std::variant<NoProcess, PoissonProcess, FixedProcess>;

inline std::string describe(const CollisionProcess& process) {
  if (std::holds_alternative<NoProcess>(process)) return "none";
  if (const auto* p = std::get_if<PoissonProcess>(&process))
    return "poisson(gamma=" + std::to_string(p->gamma) + ")";
  return "fixed(dt=" + std::to_string(std::get<FixedProcess>(process).dt) +
         ")";
}

struct SimulationConfig {
  DetuningDistribution dist = StableLaw{2.0, 1.0};
  CollisionProcess process = NoProcess{};
  std::size_t ensemble_size = 10000;
  std::vector<double> times; // output grid, starting at 0, increasing
  std::uint64_t seed = 0;
};

struct EnsembleResult {
  CoherenceCurve curve;
  std::vector<double> stderr_values; // per-time standard error of R
  double mean_collisions = 0.0;      // realized resets per particle
};

struct NormalizedCoherence {
  double value;          // R(T_ref) / R0(T_ref)
  double standard_error; // MC standard error propagated through the ratio
  double reference_R0;   // quadrature R0(T_ref)
};

namespace detail {

constexpr std::size_t kChunkParticles = 1024;
constexpr std::uint64_t kMaxCollisionsPerParticle = 1000000000ULL;

inline void validate_simulation_config(const SimulationConfig& config) {
  std::vector<std::string> issues;
  if (config.ensemble_size < 2)
    issues.push_back("ensemble_size: need at least 2 particles");
  if (config.times.empty()) {
    issues.push_back("times: must be nonempty");
  } else {
    if (config.times.front() != 0.0)
      issues.push_back("times: grid must start at 0");
    for (std::size_t i = 1; i < config.times.size(); ++i)
      if (!(config.times[i] > config.times[i - 1])) {
        issues.push_back("times: grid must be strictly increasing");
        break;
      }
  }
  if (const auto* p = std::get_if<PoissonProcess>(&config.process)) {
    if (!(p->gamma >= 0.0) || !std::isfinite(p->gamma))
      issues.push_back("process.gamma: must be finite and >= 0");
  } else if (const auto* f = std::get_if<FixedProcess>(&config.process)) {
    if (!(f->dt > 0.0)) issues.push_back("process.dt: must be positive");
  }
  if (!issues.empty()) throw ConfigError(issues);

  // Reject rates whose expected event count would overflow the per-particle
  // cap before burning time simulating them.
  const double t_max = config.times.back();
  double expected = 0.0;
  if (const auto* p = std::get_if<PoissonProcess>(&config.process))
    expected = p->gamma * t_max;
  else if (const auto* f = std::get_if<FixedProcess>(&config.process))
    expected = t_max / f->dt;
  if (expected > static_cast<double>(kMaxCollisionsPerParticle))
    throw RateTooHighError(
        "simulate: expected collisions per particle exceed 1e9");
}

struct ChunkSums {
  std::vector<double> cos_sum, sin_sum, cos2_sum, sin2_sum, cossin_sum;
  double events = 0.0;

  explicit ChunkSums(std::size_t n_times)
      : cos_sum(n_times, 0.0), sin_sum(n_times, 0.0), cos2_sum(n_times, 0.0),
        sin2_sum(n_times, 0.0), cossin_sum(n_times, 0.0) {}
};

// Kahan-compensated phase accumulator: heavy-tailed detunings mix huge and
// tiny increments, and a particle can see up to 1e9 of them.
struct CompensatedPhase {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

inline void accumulate_chunk(const SimulationConfig& config,
                             std::size_t chunk_index, ChunkSums& sums) {
  const std::size_t begin = chunk_index * kChunkParticles;
  const std::size_t end =
      std::min(begin + kChunkParticles, config.ensemble_size);
  const auto& times = config.times;
  const bool poisson = std::holds_alternative<PoissonProcess>(config.process);
  const bool fixed = std::holds_alternative<FixedProcess>(config.process);
  const double gamma =
      poisson ? std::get<PoissonProcess>(config.process).gamma : 0.0;
  const double dt = fixed ? std::get<FixedProcess>(config.process).dt : 0.0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  for (std::size_t p = begin; p < end; ++p) {
    RandomStream rng(config.seed, p);
    double delta = sample_one(config.dist, rng);
    CompensatedPhase phase;
    double t_last = 0.0;
    std::uint64_t n_events = 0;
    std::uint64_t fixed_index = 0;

    double next_event = kInf;
    if (poisson && gamma > 0.0) next_event = rng.next_exponential(gamma);
    if (fixed) next_event = dt;

    for (std::size_t k = 0; k < times.size(); ++k) {
      // Strictly-inside convention: a reset landing exactly on a grid time
      // has a zero-length interval and cannot change the phase there.
      while (next_event < times[k]) {
        phase.add(delta * (next_event - t_last));
        t_last = next_event;
        delta = sample_one(config.dist, rng);
        if (++n_events > kMaxCollisionsPerParticle)
          throw RateTooHighError(
              "simulate: a particle exceeded 1e9 collisions");
        if (poisson)
          next_event += rng.next_exponential(gamma);
        else
          next_event = dt * static_cast<double>(++fixed_index + 1);
      }
      const double phi = phase.sum + delta * (times[k] - t_last);
      const double c = std::cos(phi);
      const double s = std::sin(phi);
      sums.cos_sum[k] += c;
      sums.sin_sum[k] += s;
      sums.cos2_sum[k] += c * c;
      sums.sin2_sum[k] += s * s;
      sums.cossin_sum[k] += c * s;
    }
    sums.events += static_cast<double>(n_events);
  }
}

inline unsigned resolve_threads(std::size_t requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

} // namespace detail

// Ensemble-averaged coherence R(T_k) = |N^-1 sum_p e^(i phi_p(T_k))| with
// delta-method standard errors. Bit-reproducible for fixed (seed, N, config)
// independent of `threads` (0 = hardware default).
inline EnsembleResult simulate(const SimulationConfig& config,
                               std::size_t threads = 0) {
  detail::validate_simulation_config(config);
  const std::size_t n_times = config.times.size();
  const std::size_t n = config.ensemble_size;
  const std::size_t n_chunks =
      (n + detail::kChunkParticles - 1) / detail::kChunkParticles;

  std::vector<detail::ChunkSums> chunks(n_chunks,
                                        detail::ChunkSums(n_times));
  const unsigned workers = std::min<unsigned>(
      detail::resolve_threads(threads), static_cast<unsigned>(n_chunks));

  std::atomic<std::size_t> next_chunk{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto work = [&]() {
    try {
      for (;;) {
        const std::size_t c = next_chunk.fetch_add(1);
        if (c >= n_chunks) return;
        detail::accumulate_chunk(config, c, chunks[c]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Deterministic reduction in chunk order.
  detail::ChunkSums total(n_times);
  for (const auto& c : chunks) {
    for (std::size_t k = 0; k < n_times; ++k) {
      total.cos_sum[k] += c.cos_sum[k];
      total.sin_sum[k] += c.sin_sum[k];
      total.cos2_sum[k] += c.cos2_sum[k];
      total.sin2_sum[k] += c.sin2_sum[k];
      total.cossin_sum[k] += c.cossin_sum[k];
    }
    total.events += c.events;
  }

  EnsembleResult result;
  result.curve.times = config.times;
  result.curve.values.resize(n_times);
  result.stderr_values.resize(n_times);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n_times; ++k) {
    const double mc = total.cos_sum[k] / dn;
    const double ms = total.sin_sum[k] / dn;
    const double r = std::hypot(mc, ms);
    result.curve.values[k] = std::clamp(r, 0.0, 1.0);
    // Sample (co)variances of the means.
    const double vc = std::max(
        0.0, (total.cos2_sum[k] - dn * mc * mc) / (dn - 1.0) / dn);
    const double vs = std::max(
        0.0, (total.sin2_sum[k] - dn * ms * ms) / (dn - 1.0) / dn);
    const double cvs = (total.cossin_sum[k] - dn * mc * ms) / (dn - 1.0) / dn;
    double var_r;
    if (r > 1e-12) {
      var_r = (mc * mc * vc + ms * ms * vs + 2.0 * mc * ms * cvs) / (r * r);
    } else {
      var_r = vc + vs; // conservative near the noise floor
    }
    result.stderr_values[k] = std::sqrt(std::max(var_r, 0.0));
  }
  result.mean_collisions = total.events / dn;
  result.curve.meta = {"monte-carlo", describe(config.dist),
                       describe(config.process), config.seed, n};
  return result;
}

// R(T_ref) / R0(T_ref) with the Monte Carlo error propagated through the
// division by the (deterministic) quadrature value.
inline NormalizedCoherence simulate_normalized_coherence(
    const SimulationConfig& config, double reference_T,
    std::size_t threads = 0) {
  detail::validate_simulation_config(config);
  std::size_t index = config.times.size();
  for (std::size_t k = 0; k < config.times.size(); ++k) {
    const double t = config.times[k];
    if (std::abs(t - reference_T) <=
        1e-9 * std::max(1.0, std::abs(reference_T))) {
      index = k;
      break;
    }
  }
  if (index == config.times.size())
    throw ParameterError(
        "simulate_normalized_coherence: reference_T not on the time grid");
  const double r0 = char_magnitude(config.dist, config.times[index]);
  if (!(r0 > 1e-6))
    throw IllConditionedError(
        "simulate_normalized_coherence: reference coherence below 1e-6");
  const EnsembleResult ensemble = simulate(config, threads);
  return {ensemble.curve.values[index] / r0,
          ensemble.stderr_values[index] / r0, r0};
}

// Two-sample Kolmogorov-Smirnov statistic between the simulated phase
// phi(T) = sum_j dt_j delta_j and the scaled single draw
// (sum_j dt_j^alpha)^(1/alpha) * delta. Under the stability property the two
// distributions coincide.
inline double phase_distribution_check(const StableLaw& law,
                                       const CollisionSchedule& schedule,
                                       std::size_t n,
                                       std::uint64_t seed = 12345) {
  if (n < 10000)
    throw ParameterError("phase_distribution_check: need n >= 10000");
  const DetuningDistribution dist{law};
  const auto lengths = schedule.interval_lengths();
  double scale_sum = 0.0;
  for (const double dt : lengths) scale_sum += std::pow(dt, law.alpha);
  const double width = std::pow(scale_sum, 1.0 / law.alpha);

  std::vector<double> phases(n), scaled(n);
  for (std::size_t p = 0; p < n; ++p) {
    RandomStream rng(seed, p);
    double phi = 0.0;
    for (const double dt : lengths) phi += dt * sample_one(dist, rng);
    phases[p] = phi;
  }
  for (std::size_t p = 0; p < n; ++p) {
    RandomStream rng(seed, n + p);
    scaled[p] = width * sample_one(dist, rng);
  }
  return ks_statistic_two_sample(phases, scaled);
}

} // namespace dephase
