// dephase/analysis.hpp — quantitative extraction from coherence curves and
// spectra: linewidths, exponential tail decay rates, the rate scaling law
// gamma(Gamma) = a * Gamma^(1 - alpha_bar) + b, and detection of the
// crossover rate where truncated heavy tails stop broadening.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "distributions.hpp"
#include "errors.hpp"
#include "fwhm.hpp"
#include "monte_carlo.hpp"
#include "poisson_spectrum.hpp"

namespace dephase {

// Result of fitting R(T) ~ amplitude * exp(-gamma * T) on a tail window.
struct DecayFit {
  double gamma = 0.0;        // fitted decay rate
  double gamma_stderr = 0.0; // least-squares standard error of gamma
  double amplitude = 0.0;    // fitted prefactor
  std::array<double, 2> fit_window{0.0, 0.0}; // [T_lo, T_hi] actually fitted
  double residual_rms = 0.0; // rms residual of log R over the window
  double r_squared = 0.0;    // weighted coefficient of determination
};

// Result of fitting gamma(Gamma) = a * Gamma^(1 - alpha_bar) + b.
struct ScalingFit {
  double a = 0.0;
  double alpha_bar = 0.0; // exponent, constrained to (0, 2]
  double b = 0.0;
  // Least-squares covariance in parameter order (a, alpha_bar, b); all zeros
  // when the normal matrix is singular at the optimum.
  std::array<std::array<double, 3>, 3> covariance{};
  double residual_rms = 0.0;
  bool converged = false;

  // Rate scale implied by the prefactor.
  double implied_gamma0() const { return std::pow(a, 1.0 / alpha_bar); }
};

struct CrossoverResult {
  double gamma_star = 0.0;      // rate at the normalized-coherence minimum
  double predicted_scale = 0.0; // (delta_c / delta0)^alpha / T, if supplied
};

// Full width at half maximum of a sampled spectrum: parabola-refined peak,
// linearly interpolated half-maximum crossings (same method the spectrum
// builder uses internally).
inline double fwhm(const Spectrum& spectrum) {
  return extract_fwhm(spectrum.omegas, spectrum.values);
}

// Weighted least-squares fit of log R vs T on the tail window
// [10 / gamma_fluct, last point above the noise floor R > 5 * stderr].
// Weights are the variance transform of the log, w = (R / stderr)^2
// (unit weights when no standard errors are available). Non-positive R
// values inside the window are dropped; losing more than half the window
// that way means the tail is noise.
inline DecayFit fit_exponential_tail(const EnsembleResult& result,
                                     double gamma_fluct) {
  if (!(gamma_fluct > 0.0) || !std::isfinite(gamma_fluct))
    throw ParameterError(
        "fit_exponential_tail: gamma_fluct must be positive and finite");
  const auto& times = result.curve.times;
  const auto& values = result.curve.values;
  const auto& errs = result.stderr_values;
  if (values.size() != times.size() || errs.size() != times.size())
    throw ParameterError("fit_exponential_tail: misaligned result arrays");

  const double t_start = 10.0 / gamma_fluct;
  std::size_t first = times.size();
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] > t_start) {
      first = k;
      break;
    }
  if (first == times.size())
    throw WindowError("fit_exponential_tail: no data beyond 10/gamma_fluct = " +
                      std::to_string(t_start));

  std::size_t last = times.size();
  for (std::size_t k = times.size(); k-- > first;)
    if (values[k] > 5.0 * errs[k]) {
      last = k;
      break;
    }
  if (last == times.size())
    throw WindowError(
        "fit_exponential_tail: no point above the noise floor (R > 5*stderr) "
        "beyond 10/gamma_fluct");

  std::vector<std::size_t> used;
  const std::size_t window = last - first + 1;
  for (std::size_t k = first; k <= last; ++k)
    if (values[k] > 0.0) used.push_back(k);
  if (2 * (window - used.size()) > window)
    throw NoiseFloorError(
        "fit_exponential_tail: more than half of the fit window is at or "
        "below zero");
  if (used.size() < 3)
    throw WindowError("fit_exponential_tail: need at least 3 usable points, "
                      "got " +
                      std::to_string(used.size()));

  const std::size_t n = used.size();
  std::vector<double> x(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = used[i];
    x[i] = times[k];
    y[i] = std::log(values[k]);
    const double rel = errs[k] > 0.0 ? values[k] / errs[k] : 1.0;
    w[i] = errs[k] > 0.0 ? rel * rel : 1.0;
  }

  double wsum = 0.0, xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += w[i];
    xbar += w[i] * x[i];
    ybar += w[i] * y[i];
  }
  xbar /= wsum;
  ybar /= wsum;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (y[i] - ybar);
  }
  if (!(sxx > 0.0))
    throw WindowError("fit_exponential_tail: degenerate time window");
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;

  DecayFit fit;
  fit.gamma = -slope;
  fit.amplitude = std::exp(intercept);
  fit.fit_window = {x.front(), x.back()};
  double ss_res = 0.0, ss_res_w = 0.0, ss_tot_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    const double dy = y[i] - ybar;
    ss_res += r * r;
    ss_res_w += w[i] * r * r;
    ss_tot_w += w[i] * dy * dy;
  }
  fit.residual_rms = std::sqrt(ss_res / static_cast<double>(n));
  fit.r_squared = ss_tot_w > 0.0 ? 1.0 - ss_res_w / ss_tot_w : 1.0;
  fit.gamma_stderr =
      std::sqrt(std::max(0.0, ss_res_w / static_cast<double>(n - 2)) / sxx);
  return fit;
}

namespace detail {

// Gaussian elimination with partial pivoting on a 3x4 augmented system.
inline bool solve3(std::array<std::array<double, 4>, 3> m,
                   std::array<double, 3>& out) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int rw = col + 1; rw < 3; ++rw)
      if (std::abs(m[rw][col]) > std::abs(m[piv][col])) piv = rw;
    if (!(std::abs(m[piv][col]) > 0.0)) return false;
    std::swap(m[col], m[piv]);
    for (int rw = col + 1; rw < 3; ++rw) {
      const double f = m[rw][col] / m[col][col];
      for (int cc = col; cc < 4; ++cc) m[rw][cc] -= f * m[col][cc];
    }
  }
  for (int rw = 2; rw >= 0; --rw) {
    double s = m[rw][3];
    for (int cc = rw + 1; cc < 3; ++cc) s -= m[rw][cc] * out[cc];
    out[rw] = s / m[rw][rw];
    if (!std::isfinite(out[rw])) return false;
  }
  return true;
}

inline bool invert3(const std::array<std::array<double, 3>, 3>& m,
                    std::array<std::array<double, 3>, 3>& inv) {
  const double a = m[0][0], b = m[0][1], c = m[0][2];
  const double d = m[1][0], e = m[1][1], f = m[1][2];
  const double g = m[2][0], h = m[2][1], i = m[2][2];
  const double ca = e * i - f * h;
  const double cb = -(d * i - f * g);
  const double cc = d * h - e * g;
  const double det = a * ca + b * cb + c * cc;
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
  inv = {{{ca / det, -(b * i - c * h) / det, (b * f - c * e) / det},
          {cb / det, (a * i - c * g) / det, -(a * f - c * d) / det},
          {cc / det, -(a * h - b * g) / det, (a * e - b * d) / det}}};
  return true;
}

struct ScalingCandidate {
  std::array<double, 3> theta{}; // (log a, alpha_bar, b)
  double ss = std::numeric_limits<double>::infinity();
  bool converged = false;
};

} // namespace detail

// Nonlinear least squares for gamma(Gamma) = a * Gamma^(1 - alpha_bar) + b.
// The Gamma-dependent term is handled in log space (a = exp(la) stays
// positive); a Levenberg-Marquardt ladder restarts from alpha_bar in
// {0.25, 0.5, ..., 2.0} with b seeded at min(gamma), and the best final
// residual wins. The model surface has shallow valleys, hence the restarts.
inline ScalingFit fit_scaling_law(
    const std::vector<std::pair<double, double>>& rates) {
  std::vector<double> bigG, smallg;
  for (const auto& [G, g] : rates) {
    if (!(G > 0.0) || !std::isfinite(G) || !std::isfinite(g))
      throw ParameterError(
          "fit_scaling_law: Gamma values must be positive and finite");
    bigG.push_back(G);
    smallg.push_back(g);
  }
  std::vector<double> sorted = bigG;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 4)
    throw ParameterError("fit_scaling_law: need at least 4 distinct Gamma "
                         "values, got " +
                         std::to_string(sorted.size()));
  if (sorted.back() / sorted.front() < 10.0)
    throw ParameterError(
        "fit_scaling_law: Gamma values must span at least one decade");

  const std::size_t n = bigG.size();
  std::vector<double> lng(n);
  for (std::size_t i = 0; i < n; ++i) lng[i] = std::log(bigG[i]);
  const double g_min = *std::min_element(smallg.begin(), smallg.end());
  const double g_mag =
      std::max(1e-300, std::abs(*std::max_element(
                           smallg.begin(), smallg.end(),
                           [](double u, double v) {
                             return std::abs(u) < std::abs(v);
                           })));

  const auto eval_ss = [&](const std::array<double, 3>& th) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double term = std::exp(th[0] + (1.0 - th[1]) * lng[i]);
      const double r = smallg[i] - term - th[2];
      ss += r * r;
    }
    return std::isfinite(ss) ? ss
                             : std::numeric_limits<double>::infinity();
  };

  const auto run_lm = [&](std::array<double, 3> th) {
    detail::ScalingCandidate cand;
    double ss = eval_ss(th);
    if (!std::isfinite(ss)) return cand;
    double lambda = 1e-3;
    bool converged = false;
    for (int it = 0; it < 200 && !converged; ++it) {
      double jtj[3][3] = {};
      double jtr[3] = {};
      for (std::size_t i = 0; i < n; ++i) {
        const double term = std::exp(th[0] + (1.0 - th[1]) * lng[i]);
        const double r = smallg[i] - term - th[2];
        const double j[3] = {term, -term * lng[i], 1.0};
        for (int u = 0; u < 3; ++u) {
          jtr[u] += j[u] * r;
          for (int v = u; v < 3; ++v) jtj[u][v] += j[u] * j[v];
        }
      }
      bool stepped = false;
      for (int inner = 0; inner < 40; ++inner) {
        std::array<std::array<double, 4>, 3> m{};
        for (int u = 0; u < 3; ++u) {
          for (int v = 0; v < 3; ++v)
            m[u][v] = jtj[std::min(u, v)][std::max(u, v)];
          m[u][u] += lambda * std::max(jtj[u][u], 1e-12);
          m[u][3] = jtr[u];
        }
        std::array<double, 3> delta{};
        if (!detail::solve3(m, delta)) {
          lambda *= 10.0;
          continue;
        }
        const std::array<double, 3> next = {th[0] + delta[0], th[1] + delta[1],
                                            th[2] + delta[2]};
        const double ss_next = eval_ss(next);
        if (ss_next <= ss) {
          double step = 0.0;
          for (int u = 0; u < 3; ++u)
            step = std::max(step,
                            std::abs(delta[u]) / (1.0 + std::abs(th[u])));
          const double drop = ss - ss_next;
          th = next;
          ss = ss_next;
          lambda = std::max(lambda / 3.0, 1e-14);
          if (step < 1e-12 || drop <= 1e-16 * (1.0 + ss)) converged = true;
          stepped = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) break; // damping exhausted without progress
    }
    cand.theta = th;
    cand.ss = ss;
    cand.converged = converged;
    return cand;
  };

  detail::ScalingCandidate best;
  detail::ScalingCandidate best_any; // diagnostics when everything fails
  for (double alpha0 = 0.25; alpha0 <= 2.0 + 1e-12; alpha0 += 0.25) {
    // Seed log a from the residual against the seeded offset.
    double la0 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      la0 += std::log(std::max(smallg[i] - g_min, 1e-8 * g_mag)) -
             (1.0 - alpha0) * lng[i];
    la0 /= static_cast<double>(n);
    const auto cand = run_lm({la0, alpha0, g_min});
    if (cand.ss < best_any.ss) best_any = cand;
    if (!cand.converged) continue;
    if (!(cand.theta[1] > 0.0) || cand.theta[1] > 2.05) continue;
    if (cand.ss < best.ss) best = cand;
  }
  if (!best.converged)
    throw FitError(
        "fit_scaling_law: no restart converged to an exponent in (0, 2]; "
        "best residual sum " +
        std::to_string(best_any.ss) + " at alpha_bar = " +
        std::to_string(best_any.theta[1]));

  ScalingFit fit;
  const double a = std::exp(best.theta[0]);
  fit.a = a;
  fit.alpha_bar = std::min(best.theta[1], 2.0);
  fit.b = best.theta[2];
  fit.converged = true;
  fit.residual_rms = std::sqrt(best.ss / static_cast<double>(n));

  // Covariance (a, alpha_bar, b): s^2 (J^T J)^-1 at the optimum in
  // (log a, alpha_bar, b) coordinates, then the log-a row/column scaled by
  // da/d(log a) = a.
  std::array<std::array<double, 3>, 3> jtj{};
  for (std::size_t i = 0; i < n; ++i) {
    const double term =
        std::exp(best.theta[0] + (1.0 - best.theta[1]) * lng[i]);
    const double j[3] = {term, -term * lng[i], 1.0};
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) jtj[u][v] += j[u] * j[v];
  }
  std::array<std::array<double, 3>, 3> inv{};
  if (static_cast<double>(n) > 3.0 && detail::invert3(jtj, inv)) {
    const double s2 = best.ss / static_cast<double>(n - 3);
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v)
        fit.covariance[u][v] =
            s2 * inv[u][v] * (u == 0 ? a : 1.0) * (v == 0 ? a : 1.0);
  }
  return fit;
}

// Crossover rate scale for a truncated distribution at observation time T:
// (delta_c / delta0)^alpha / T, with alpha the tail exponent of the inner
// law (capped at 2) and delta0 its width.
inline double crossover_scale(const TruncatedDistribution& dist, double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw ParameterError("crossover_scale: T must be positive and finite");
  double alpha = 2.0;
  double delta0 = 1.0;
  if (const auto* stable = std::get_if<StableLaw>(&dist.inner)) {
    alpha = stable->alpha;
    delta0 = stable->scale();
  } else {
    const auto& t = std::get<StudentT>(dist.inner);
    alpha = std::min(t.r, 2.0);
    delta0 = t.delta0;
  }
  return std::pow(dist.delta_c / delta0, alpha) / T;
}

// Locates the minimum of a (Gamma, normalized coherence) scan. The discrete
// minimum must be interior to the scanned range; the estimate is refined by
// a 3-point parabola in log Gamma, where the minima are broad.
inline CrossoverResult find_crossover(
    const std::vector<std::pair<double, double>>& points,
    double predicted_scale = std::numeric_limits<double>::quiet_NaN()) {
  if (points.size() < 5)
    throw ParameterError(
        "find_crossover: need at least 5 (Gamma, ratio) points");
  auto pts = points;
  std::sort(pts.begin(), pts.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].first > 0.0) || !std::isfinite(pts[i].second))
      throw ParameterError(
          "find_crossover: Gamma must be positive, ratios finite");
    if (i > 0 && !(pts[i].first > pts[i - 1].first))
      throw ParameterError("find_crossover: Gamma values must be distinct");
  }
  std::size_t lo = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second < pts[lo].second) lo = i;
  if (lo == 0 || lo + 1 == pts.size())
    throw ScanRangeError(
        "find_crossover: minimum sits on the scan boundary; widen the Gamma "
        "range");

  const double x0 = std::log(pts[lo - 1].first);
  const double x1 = std::log(pts[lo].first);
  const double x2 = std::log(pts[lo + 1].first);
  // The helper refines maxima; negate to refine a minimum.
  const auto [xv, yv] =
      detail::parabola_vertex(x0, -pts[lo - 1].second, x1, -pts[lo].second,
                              x2, -pts[lo + 1].second);
  (void)yv;
  CrossoverResult out;
  out.gamma_star = std::exp(std::clamp(xv, x0, x2));
  out.predicted_scale = predicted_scale;
  return out;
}

} // namespace dephase
