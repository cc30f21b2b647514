// dephase/io.hpp — bit-stable file output: CSV with full round-trip
// precision (17 significant digits, '.' decimal, LF line endings) and JSON
// serialization of curves, spectra, and fit results.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "analytic_core.hpp"
#include "errors.hpp"
#include "monte_carlo.hpp"
#include "poisson_spectrum.hpp"

namespace dephase {

using ordered_json = nlohmann::ordered_json;

// Locale-independent decimal formatting with 17 significant digits — enough
// to reproduce any double exactly on read-back.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc())
    throw IoError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

// One CSV table: header row ("T,R,stderr", ...) plus numeric rows, LF
// endings, binary stream so the bytes are identical on every platform.
inline void write_csv(const std::filesystem::path& path,
                      const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  const std::size_t columns =
      1 + static_cast<std::size_t>(
              std::count(header.begin(), header.end(), ','));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open " + path.string());
  out << header << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns)
      throw IoError("write_csv: row width does not match header in " +
                    path.string());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path.string());
}

inline void write_json_file(const std::filesystem::path& path,
                            const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_json_file: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out)
    throw IoError("write_json_file: write failed for " + path.string());
}

inline ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_json_file: cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": not valid JSON (" +
                       std::string(e.what()) + ")"});
  }
}

inline ordered_json meta_to_json(const CurveMeta& meta) {
  return ordered_json{{"engine", meta.engine},
                      {"distribution", meta.distribution},
                      {"process", meta.process},
                      {"seed", meta.seed},
                      {"ensemble", meta.ensemble}};
}

inline ordered_json curve_to_json(const CoherenceCurve& curve) {
  return ordered_json{{"times", curve.times},
                      {"values", curve.values},
                      {"meta", meta_to_json(curve.meta)}};
}

inline ordered_json ensemble_to_json(const EnsembleResult& result) {
  auto j = curve_to_json(result.curve);
  j["stderr"] = result.stderr_values;
  j["mean_collisions"] = result.mean_collisions;
  return j;
}

inline ordered_json spectrum_to_json(const Spectrum& s) {
  return ordered_json{
      {"omegas", s.omegas}, {"values", s.values}, {"fwhm", s.fwhm}};
}

inline ordered_json decay_fit_to_json(const DecayFit& fit) {
  return ordered_json{{"gamma", fit.gamma},
                      {"gamma_stderr", fit.gamma_stderr},
                      {"amplitude", fit.amplitude},
                      {"fit_window", fit.fit_window},
                      {"residual_rms", fit.residual_rms},
                      {"r_squared", fit.r_squared}};
}

inline ordered_json scaling_fit_to_json(const ScalingFit& fit) {
  return ordered_json{{"a", fit.a},
                      {"alpha_bar", fit.alpha_bar},
                      {"b", fit.b},
                      {"implied_gamma0", fit.implied_gamma0()},
                      {"covariance", fit.covariance},
                      {"residual_rms", fit.residual_rms},
                      {"converged", fit.converged}};
}

} // namespace dephase
