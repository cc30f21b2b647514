// dephase/analytic_core.hpp — closed-form and quadrature coherence: the
// fluctuation-free curve R0(T), the exact stable-law collision formula, the
// Zeno product identity, and the narrowing/broadening classification.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "errors.hpp"

namespace dephase {

// ---- collision schedules ----

// Deterministic partition 0 = t0 < t1 < ... < tn = T. Boundaries rather than
// intervals are stored so that the interval lengths sum to T exactly.
struct CollisionSchedule {
  std::vector<double> boundaries;

  explicit CollisionSchedule(std::vector<double> b) : boundaries(std::move(b)) {
    if (boundaries.size() < 2)
      throw ParameterError("CollisionSchedule: need at least two boundaries");
    if (boundaries.front() != 0.0)
      throw ParameterError("CollisionSchedule: first boundary must be 0");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
      if (!(boundaries[i] > boundaries[i - 1]))
        throw ParameterError(
            "CollisionSchedule: boundaries must be strictly increasing");
  }

  double total_time() const { return boundaries.back(); }
  std::size_t intervals() const { return boundaries.size() - 1; }
  double interval(std::size_t j) const {
    return boundaries[j + 1] - boundaries[j];
  }

  std::vector<double> interval_lengths() const {
    std::vector<double> dt(intervals());
    for (std::size_t j = 0; j < dt.size(); ++j) dt[j] = interval(j);
    return dt;
  }

  // tau_j = dt_j / T; sums to 1 up to rounding.
  std::vector<double> fractions() const {
    auto dt = interval_lengths();
    for (auto& x : dt) x /= total_time();
    return dt;
  }

  double max_fraction() const {
    double m = 0.0;
    for (std::size_t j = 0; j < intervals(); ++j)
      m = std::max(m, interval(j));
    return m / total_time();
  }

  static CollisionSchedule equal_intervals(std::size_t n, double total_time) {
    if (n < 1) throw ParameterError("equal_intervals: need n >= 1");
    if (!(total_time > 0.0))
      throw ParameterError("equal_intervals: total time must be positive");
    std::vector<double> b(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
      b[j] = total_time * static_cast<double>(j) / static_cast<double>(n);
    b.back() = total_time;
    return CollisionSchedule(std::move(b));
  }

  // Collisions at multiples of dt; the final partial interval is kept so the
  // boundaries always end exactly at total_time.
  static CollisionSchedule fixed_spacing(double dt, double total_time) {
    if (!(dt > 0.0)) throw ParameterError("fixed_spacing: dt must be positive");
    if (!(total_time > 0.0))
      throw ParameterError("fixed_spacing: total time must be positive");
    std::vector<double> b{0.0};
    for (double t = dt; t < total_time; t += dt) b.push_back(t);
    b.push_back(total_time);
    return CollisionSchedule(std::move(b));
  }
};

// ---- coherence curves ----

struct CurveMeta {
  std::string engine;       // quadrature | monte-carlo | laplace-inversion | ...
  std::string distribution; // describe(dist)
  std::string process;      // none | poisson(...) | fixed(...) | schedule(...)
  std::uint64_t seed = 0;   // 0 when not applicable
  std::size_t ensemble = 0; // 0 when not applicable
};

struct CoherenceCurve {
  std::vector<double> times;
  std::vector<double> values; // R(T), all in [0, 1], values[0] = 1 at T = 0
  CurveMeta meta;
};

inline void validate_time_grid(const std::vector<double>& times) {
  if (times.empty()) throw ParameterError("time grid: must be nonempty");
  if (times.front() < 0.0)
    throw ParameterError("time grid: times must be nonnegative");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ParameterError("time grid: times must be strictly increasing");
}

// 512 uniform points on [0, T_max] with R0(T_max) < 1e-3: closed form for
// stable laws, characteristic-function probing otherwise.
inline std::vector<double> default_time_grid(const DetuningDistribution& dist,
                                             std::size_t points = 512) {
  if (points < 2) throw ParameterError("default_time_grid: need >= 2 points");
  double t_max;
  if (const auto* stable = std::get_if<StableLaw>(&dist)) {
    t_max = std::pow(std::log(1000.0) / stable->scale_c, 1.0 / stable->alpha);
  } else {
    t_max = characteristic_scale(dist) * 0.25;
    int doublings = 0;
    while (char_magnitude(dist, t_max) >= 1e-3 && doublings++ < 60)
      t_max *= 2.0;
  }
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

// ---- operations ----

// R0(T) = |<e^(-i delta T)>| pointwise over the grid (Eqn: ensemble coherence
// without fluctuations equals the characteristic-function magnitude).
inline CoherenceCurve coherence_free(const DetuningDistribution& dist,
                                     const std::vector<double>& times) {
  validate_time_grid(times);
  CoherenceCurve curve;
  curve.times = times;
  curve.values.reserve(times.size());
  for (const double t : times)
    curve.values.push_back(std::clamp(char_magnitude(dist, t), 0.0, 1.0));
  curve.meta = {"quadrature", describe(dist), "none", 0, 0};
  return curve;
}

// Exact collision coherence for stable laws:
// R(T) = exp(-c * sum_j dt_j^alpha) = R0(T)^(sum_j tau_j^alpha).
inline double coherence_stable_with_collisions(const StableLaw& law,
                                               const CollisionSchedule& s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.intervals(); ++j)
    sum += std::pow(s.interval(j), law.alpha);
  return std::exp(-law.scale_c * sum);
}

// Zeno product R(T) = prod_l R0(dt_l); valid for any distribution, and equal
// to coherence_stable_with_collisions when the distribution is stable.
inline double zeno_product(const DetuningDistribution& dist,
                           const CollisionSchedule& s) {
  double product = 1.0;
  for (std::size_t j = 0; j < s.intervals(); ++j)
    product *= char_magnitude(dist, s.interval(j));
  return product;
}

enum class Regime { narrowing, invariant, broadening };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::narrowing: return "narrowing";
    case Regime::invariant: return "invariant";
    case Regime::broadening: return "broadening";
  }
  return "unknown";
}

// Frequent resets slow the decay for alpha > 1 and accelerate it for
// alpha < 1; the Cauchy point alpha = 1 is exactly invariant.
inline Regime classify_regime(double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw ParameterError("classify_regime: alpha must lie in (0, 2], got " +
                         std::to_string(alpha));
  if (alpha > 1.0) return Regime::narrowing;
  if (alpha < 1.0) return Regime::broadening;
  return Regime::invariant;
}

// Exponential decay rate for equally spaced collisions:
// R(T) = exp(-c t_coll^(alpha-1) T).
inline double fixed_interval_decay_rate(const StableLaw& law, double t_coll) {
  if (!(t_coll > 0.0))
    throw ParameterError("fixed_interval_decay_rate: t_coll must be positive");
  return law.scale_c * std::pow(t_coll, law.alpha - 1.0);
}

} // namespace dephase
