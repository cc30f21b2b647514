// dephase/stats.hpp — Kolmogorov-Smirnov statistics and critical values
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace dephase {

// One-sample KS statistic D_n = sup_x |ECDF(x) - CDF(x)|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) throw ParameterError("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

// Two-sample KS statistic: max ECDF gap over the merged sample.
inline double ks_statistic_two_sample(std::vector<double> a,
                                      std::vector<double> b) {
  if (a.empty() || b.empty())
    throw ParameterError("ks_statistic_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// Asymptotic critical value at significance `level` (e.g. 0.01 for the 99th
// percentile): D_crit = sqrt(-ln(level/2) / (2n)).
inline double ks_critical_value(double level, std::size_t n) {
  return std::sqrt(-0.5 * std::log(0.5 * level) / static_cast<double>(n));
}

inline double ks_critical_value_two_sample(double level, std::size_t n,
                                           std::size_t m) {
  const double scale =
      static_cast<double>(n + m) / (static_cast<double>(n) * m);
  return std::sqrt(-0.5 * std::log(0.5 * level) * scale);
}

} // namespace dephase
