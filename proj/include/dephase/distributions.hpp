// dephase/distributions.hpp — detuning distribution families P0(delta)
//
// Three families: symmetric alpha-stable laws (parameterized by the
// characteristic-function coefficient c, |phi(t)| = exp(-c t^alpha)), the
// Student-t family (tail exponent r, scale delta0), and truncated variants of
// either (hard cutoff at |delta| = delta_c, renormalized). All objects are
// immutable after construction and safe to share across threads.
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace dephase {

inline constexpr double kPi = 3.14159265358979323846;

// Default absolute tolerance for characteristic-function quadrature.
inline constexpr double kCharTolerance = 1e-8;

// ---- families ----

struct StableLaw {
  double alpha;   // characteristic exponent, 0 < alpha <= 2
  double scale_c; // coefficient c in |phi(t)| = exp(-c t^alpha), time^-alpha

  StableLaw(double alpha_, double scale_c_) : alpha(alpha_), scale_c(scale_c_) {
    if (!(alpha > 0.0) || alpha > 2.0)
      throw ParameterError("StableLaw: alpha must lie in (0, 2], got " +
                           std::to_string(alpha));
    if (!(scale_c > 0.0))
      throw ParameterError("StableLaw: scale_c must be positive, got " +
                           std::to_string(scale_c));
  }

  // Width parameter: the draw is scale() times a standard stable variate.
  double scale() const { return std::pow(scale_c, 1.0 / alpha); }
};

struct StudentT {
  double r;      // shape parameter, > 0; tail index of the density is r
  double delta0; // scale, time^-1

  StudentT(double r_, double delta0_) : r(r_), delta0(delta0_) {
    if (!(r > 0.0))
      throw ParameterError("StudentT: r must be positive, got " +
                           std::to_string(r));
    if (!(delta0 > 0.0))
      throw ParameterError("StudentT: delta0 must be positive, got " +
                           std::to_string(delta0));
  }

  // N(r, delta0) = Gamma((r+1)/2) / (Gamma(r/2) * delta0 * sqrt(r pi))
  double normalization() const {
    return std::exp(std::lgamma(0.5 * (r + 1.0)) - std::lgamma(0.5 * r)) /
           (delta0 * std::sqrt(r * kPi));
  }

  double density_at(double delta) const {
    const double u = delta / delta0;
    return normalization() * std::pow(1.0 + u * u / r, -0.5 * (r + 1.0));
  }
};

using CoreDistribution = std::variant<StableLaw, StudentT>;

struct TruncatedDistribution {
  CoreDistribution inner;
  double delta_c; // cutoff: samples satisfy |delta| <= delta_c

  TruncatedDistribution(CoreDistribution inner_, double delta_c_)
      : inner(std::move(inner_)), delta_c(delta_c_) {
    if (!(delta_c > 0.0))
      throw ParameterError("TruncatedDistribution: delta_c must be positive, "
                           "got " +
                           std::to_string(delta_c));
  }
};

using DetuningDistribution =
    std::variant<StableLaw, StudentT, TruncatedDistribution>;

// ---- helpers ----

namespace detail {

// Standard symmetric stable variate (c = 1) by the Chambers-Mallows-Stuck
// transform; exact and rejection-free for all alpha in (0, 2].
inline double sample_standard_stable(double alpha, RandomStream& rng) {
  const double u = kPi * (rng.next_double() - 0.5); // uniform (-pi/2, pi/2)
  const double w = rng.next_exponential(1.0);
  if (alpha == 1.0) return std::tan(u);
  const double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
                   std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
  return x;
}

inline double sample_core(const CoreDistribution& dist, RandomStream& rng) {
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return stable->scale() * sample_standard_stable(stable->alpha, rng);
  const auto& t = std::get<StudentT>(dist);
  // normal / sqrt(chi^2_r / r), valid for non-integer r via gamma variates
  const double z = rng.next_gaussian();
  const double chi2 = 2.0 * rng.next_gamma(0.5 * t.r);
  return t.delta0 * z * std::sqrt(t.r / chi2);
}

inline double density_core(const CoreDistribution& dist, double delta) {
  if (const auto* t = std::get_if<StudentT>(&dist)) return t->density_at(delta);
  const auto& stable = std::get<StableLaw>(dist);
  if (stable.alpha == 2.0) {
    // exp(-c t^2) is a Gaussian characteristic function with variance 2c
    const double var = 2.0 * stable.scale_c;
    return std::exp(-0.5 * delta * delta / var) / std::sqrt(2.0 * kPi * var);
  }
  if (stable.alpha == 1.0) {
    // Cauchy with half-width c
    const double c = stable.scale_c;
    return c / (kPi * (c * c + delta * delta));
  }
  throw UnsupportedError(
      "density: stable laws have closed-form densities only for alpha in "
      "{1, 2}, got alpha = " +
      std::to_string(stable.alpha));
}

inline double scale_core(const CoreDistribution& dist) {
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return stable->scale();
  return std::get<StudentT>(dist).delta0;
}

// Probability mass of the inner density on [-delta_c, delta_c]; requires a
// closed-form inner density.
inline double truncation_mass(const TruncatedDistribution& dist) {
  auto g = [&](double d) { return 2.0 * density_core(dist.inner, d); };
  return integrate_halfline(g, 1e-10, std::min(scale_core(dist.inner),
                                               dist.delta_c),
                            dist.delta_c);
}

} // namespace detail

// ---- operations ----

// Typical width of the distribution: delta0 for Student-t, c^(1/alpha) for
// stable laws, the inner scale for truncated variants. Used for default
// grids and the spectral regularization epsilon.
inline double characteristic_scale(const DetuningDistribution& dist) {
  if (const auto* trunc = std::get_if<TruncatedDistribution>(&dist))
    return std::min(detail::scale_core(trunc->inner), trunc->delta_c);
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return stable->scale();
  return std::get<StudentT>(dist).delta0;
}

// One draw from the distribution. Truncated variants use rejection sampling;
// a long rejection streak (acceptance below ~1e-6) raises
// DegenerateTruncationError instead of looping forever.
inline double sample_one(const DetuningDistribution& dist, RandomStream& rng) {
  if (const auto* trunc = std::get_if<TruncatedDistribution>(&dist)) {
    const long max_rejections = 20000000L;
    for (long i = 0; i < max_rejections; ++i) {
      const double d = detail::sample_core(trunc->inner, rng);
      if (std::abs(d) <= trunc->delta_c) {
        assert(std::abs(d) <= trunc->delta_c);
        return d;
      }
    }
    throw DegenerateTruncationError(
        "sample: truncation acceptance probability below 1e-6 at delta_c = " +
        std::to_string(trunc->delta_c));
  }
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return stable->scale() * detail::sample_standard_stable(stable->alpha, rng);
  return detail::sample_core(std::get<StudentT>(dist), rng);
}

inline std::vector<double> sample(const DetuningDistribution& dist,
                                  RandomStream& rng, std::size_t n) {
  if (n < 1) throw ParameterError("sample: n must be at least 1");
  // Fail fast when the truncation keeps less than 1e-6 of the inner mass
  // (only checkable when the inner density has a closed form).
  if (const auto* trunc = std::get_if<TruncatedDistribution>(&dist)) {
    const bool has_density =
        std::holds_alternative<StudentT>(trunc->inner) ||
        std::get<StableLaw>(trunc->inner).alpha == 1.0 ||
        std::get<StableLaw>(trunc->inner).alpha == 2.0;
    if (has_density && detail::truncation_mass(*trunc) < 1e-6)
      throw DegenerateTruncationError(
          "sample: truncation acceptance probability below 1e-6 at delta_c "
          "= " +
          std::to_string(trunc->delta_c));
  }
  std::vector<double> out(n);
  for (auto& d : out) d = sample_one(dist, rng);
  return out;
}

// Probability density at `delta`. Stable laws admit closed forms only for
// alpha in {1, 2}; other alpha raise UnsupportedError.
inline double density(const DetuningDistribution& dist, double delta) {
  if (!std::isfinite(delta))
    throw ParameterError("density: delta must be finite");
  if (const auto* trunc = std::get_if<TruncatedDistribution>(&dist)) {
    if (std::abs(delta) > trunc->delta_c) return 0.0;
    return detail::density_core(trunc->inner, delta) /
           detail::truncation_mass(*trunc);
  }
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return detail::density_core(CoreDistribution{*stable}, delta);
  return std::get<StudentT>(dist).density_at(delta);
}

// |<e^(-i t delta)>|: closed form exp(-c t^alpha) for stable laws, adaptive
// cosine-transform quadrature (absolute tolerance `abs_tol`) otherwise.
inline double char_magnitude(const DetuningDistribution& dist, double t,
                             double abs_tol = kCharTolerance) {
  if (t < 0.0) throw ParameterError("char_magnitude: t must be nonnegative");
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return std::exp(-stable->scale_c * std::pow(t, stable->alpha));
  if (t == 0.0) return 1.0;
  if (const auto* trunc = std::get_if<TruncatedDistribution>(&dist)) {
    const double mass = detail::truncation_mass(*trunc);
    auto g = [&](double d) {
      return detail::density_core(trunc->inner, d) / mass;
    };
    const double scale = std::min(detail::scale_core(trunc->inner),
                                  trunc->delta_c);
    const double value =
        cosine_transform(g, t, abs_tol, scale, trunc->delta_c);
    return std::min(std::abs(value), 1.0);
  }
  const auto& st = std::get<StudentT>(dist);
  auto g = [&](double d) { return st.density_at(d); };
  const double value = cosine_transform(g, t, abs_tol, st.delta0);
  return std::min(std::abs(value), 1.0);
}

// Human-readable spec string, used in curve/spectrum metadata.
inline std::string describe(const DetuningDistribution& dist) {
  if (const auto* stable = std::get_if<StableLaw>(&dist))
    return "stable(alpha=" + std::to_string(stable->alpha) +
           ", c=" + std::to_string(stable->scale_c) + ")";
  if (const auto* st = std::get_if<StudentT>(&dist))
    return "student-t(r=" + std::to_string(st->r) +
           ", delta0=" + std::to_string(st->delta0) + ")";
  const auto& trunc = std::get<TruncatedDistribution>(dist);
  std::string inner =
      std::holds_alternative<StableLaw>(trunc.inner)
          ? describe(DetuningDistribution{std::get<StableLaw>(trunc.inner)})
          : describe(DetuningDistribution{std::get<StudentT>(trunc.inner)});
  return "truncated(" + inner + ", delta_c=" + std::to_string(trunc.delta_c) +
         ")";
}

} // namespace dephase
