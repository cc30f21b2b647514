// dephase/fwhm.hpp — full width at half maximum of a tabulated peak, shared
// by the spectrum builder and the analysis helpers.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace dephase {

namespace detail {

// Vertex of the parabola through three points (Newton form). Falls back to
// the middle point when the data is not locally concave.
inline std::pair<double, double> parabola_vertex(double x0, double y0,
                                                 double x1, double y1,
                                                 double x2, double y2) {
  const double c1 = (y1 - y0) / (x1 - x0);
  const double c2 = ((y2 - y1) / (x2 - x1) - c1) / (x2 - x0);
  if (!(c2 < 0.0)) return {x1, y1};
  const double xv = 0.5 * (x0 + x1 - c1 / c2);
  const double yv = y0 + c1 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
  return {xv, yv};
}

} // namespace detail

// Peak = grid maximum refined by a 3-point parabola; half-maximum crossings
// located by linear interpolation between the bracketing grid points.
inline double extract_fwhm(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 5)
    throw ParameterError("extract_fwhm: need >= 5 aligned points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(y[i]))
      throw NumericalError("extract_fwhm: non-finite value in peak data");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw ParameterError("extract_fwhm: abscissae must be increasing");
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[peak]) peak = i;
  if (peak == 0 || peak + 1 == y.size())
    throw GridError("extract_fwhm: peak lies on the grid boundary");

  const auto [xv, yv] =
      detail::parabola_vertex(x[peak - 1], y[peak - 1], x[peak], y[peak],
                              x[peak + 1], y[peak + 1]);
  (void)xv;
  const double half = 0.5 * yv;

  double left = 0.0;
  bool found_left = false;
  for (std::size_t i = peak; i-- > 0;) {
    if (y[i] <= half) {
      left = x[i] + (half - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]);
      found_left = true;
      break;
    }
  }
  if (!found_left)
    throw GridError("extract_fwhm: half maximum not bracketed on the left");

  double right = 0.0;
  bool found_right = false;
  for (std::size_t i = peak + 1; i < y.size(); ++i) {
    if (y[i] <= half) {
      right = x[i - 1] +
              (half - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
      found_right = true;
      break;
    }
  }
  if (!found_right)
    throw GridError("extract_fwhm: half maximum not bracketed on the right");

  return right - left;
}

} // namespace dephase
