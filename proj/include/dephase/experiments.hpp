// dephase/experiments.hpp — executes a resolved ExperimentConfig: runs the
// selected engine, writes the data files and a manifest.json that records
// the resolved configuration, engine version, and produced outputs. Feeding
// a manifest back into the CLI reproduces the run.
#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "analysis.hpp"
#include "analytic_core.hpp"
#include "config.hpp"
#include "io.hpp"
#include "monte_carlo.hpp"
#include "poisson_spectrum.hpp"
#include "version.hpp"

namespace dephase {

struct RunReport {
  ordered_json manifest;
  std::vector<std::string> outputs; // file names relative to the out dir
};

namespace detail {

inline bool want_csv(const std::string& format) { return format != "json"; }
inline bool want_json(const std::string& format) { return format != "csv"; }

// Compact numeric tag for file names ("0.5", "100", ...).
inline std::string numeric_tag(double v) { return format_double(v); }

inline std::vector<double> log_ladder(double lo, double hi,
                                      std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                        static_cast<double>(points - 1));
  return out;
}

inline void write_curve_files(const std::filesystem::path& dir,
                              const OutputSpec& output,
                              const CoherenceCurve& curve,
                              std::vector<std::string>& outputs) {
  if (want_csv(output.format)) {
    std::vector<std::vector<double>> rows;
    rows.reserve(curve.times.size());
    for (std::size_t k = 0; k < curve.times.size(); ++k)
      rows.push_back({curve.times[k], curve.values[k]});
    const std::string name = output.basename + ".csv";
    write_csv(dir / name, "T,R", rows);
    outputs.push_back(name);
  }
  if (want_json(output.format)) {
    const std::string name = output.basename + ".json";
    write_json_file(dir / name, curve_to_json(curve));
    outputs.push_back(name);
  }
}

inline void write_ensemble_files(const std::filesystem::path& dir,
                                 const OutputSpec& output,
                                 const EnsembleResult& result,
                                 std::vector<std::string>& outputs) {
  if (want_csv(output.format)) {
    std::vector<std::vector<double>> rows;
    rows.reserve(result.curve.times.size());
    for (std::size_t k = 0; k < result.curve.times.size(); ++k)
      rows.push_back({result.curve.times[k], result.curve.values[k],
                      result.stderr_values[k]});
    const std::string name = output.basename + ".csv";
    write_csv(dir / name, "T,R,stderr", rows);
    outputs.push_back(name);
  }
  if (want_json(output.format)) {
    const std::string name = output.basename + ".json";
    write_json_file(dir / name, ensemble_to_json(result));
    outputs.push_back(name);
  }
}

inline SimulationConfig make_simulation(const ExperimentConfig& config,
                                        DetuningDistribution dist,
                                        CollisionProcess process,
                                        std::vector<double> times,
                                        std::uint64_t seed) {
  SimulationConfig sim;
  sim.dist = std::move(dist);
  sim.process = std::move(process);
  sim.ensemble_size = config.ensemble_size;
  sim.times = std::move(times);
  sim.seed = seed;
  return sim;
}

inline void execute_coherence(const ExperimentConfig& config,
                              const std::filesystem::path& dir, int threads,
                              std::vector<std::string>& outputs,
                              ordered_json& results) {
  const DetuningDistribution dist = config.make_distribution();
  const std::vector<double> times = config.time_grid.resolve();
  results["engine"] = config.engine;
  if (config.engine == "quadrature") {
    write_curve_files(dir, config.output, coherence_free(dist, times),
                      outputs);
  } else if (config.engine == "laplace") {
    const double gamma =
        config.process.type == "poisson" ? config.process.gamma : 0.0;
    const LaplaceEvaluator evaluator(dist, gamma);
    write_curve_files(dir, config.output, invert_laplace(evaluator, times),
                      outputs);
  } else {
    const EnsembleResult result =
        simulate(make_simulation(config, dist, config.process.make(), times,
                                 config.seed),
                 threads);
    results["mean_collisions"] = result.mean_collisions;
    write_ensemble_files(dir, config.output, result, outputs);
  }
}

inline void execute_spectrum(const ExperimentConfig& config,
                             const std::filesystem::path& dir,
                             std::vector<std::string>& outputs,
                             ordered_json& results) {
  const DetuningDistribution dist = config.make_distribution();
  const double gamma =
      config.process.type == "poisson" ? config.process.gamma : 0.0;
  const Spectrum s =
      spectrum(dist, gamma, config.frequency_grid.resolve(dist));
  results["fwhm"] = s.fwhm;
  if (want_csv(config.output.format)) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.omegas.size());
    for (std::size_t i = 0; i < s.omegas.size(); ++i)
      rows.push_back({s.omegas[i], s.values[i]});
    const std::string name = config.output.basename + ".csv";
    write_csv(dir / name, "omega,S", rows);
    outputs.push_back(name);
  }
  if (want_json(config.output.format)) {
    const std::string name = config.output.basename + ".json";
    write_json_file(dir / name, spectrum_to_json(s));
    outputs.push_back(name);
  }
}

inline void execute_fwhm_sweep(const ExperimentConfig& config,
                               const std::filesystem::path& dir,
                               std::vector<std::string>& outputs,
                               ordered_json& results) {
  const DetuningDistribution dist = config.make_distribution();
  const std::vector<double> omegas = config.frequency_grid.resolve(dist);
  const Spectrum s0 = spectrum(dist, 0.0, omegas);
  std::vector<double> ratios;
  ratios.reserve(config.gamma_ladder.size());
  for (const double gamma : config.gamma_ladder)
    ratios.push_back(spectrum(dist, gamma, omegas).fwhm / s0.fwhm);
  results["fwhm_gamma0"] = s0.fwhm;
  if (want_csv(config.output.format)) {
    std::vector<std::vector<double>> rows;
    rows.reserve(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i)
      rows.push_back({config.gamma_ladder[i], ratios[i]});
    const std::string name = config.output.basename + ".csv";
    write_csv(dir / name, "Gamma,fwhm_ratio", rows);
    outputs.push_back(name);
  }
  if (want_json(config.output.format)) {
    ordered_json j;
    j["fwhm_gamma0"] = s0.fwhm;
    j["gammas"] = config.gamma_ladder;
    j["fwhm_ratio"] = ratios;
    const std::string name = config.output.basename + ".json";
    write_json_file(dir / name, j);
    outputs.push_back(name);
  }
}

inline void execute_decay_sweep(const ExperimentConfig& config,
                                const std::filesystem::path& dir, int threads,
                                std::vector<std::string>& outputs,
                                ordered_json& results) {
  const DetuningDistribution dist = config.make_distribution();
  std::vector<DecayFit> fits;
  fits.reserve(config.gamma_ladder.size());
  for (std::size_t i = 0; i < config.gamma_ladder.size(); ++i) {
    const double gamma = config.gamma_ladder[i];
    const EnsembleResult result = simulate(
        make_simulation(config, dist, PoissonProcess{gamma},
                        config.time_grid.resolve_for_rate(gamma),
                        config.seed + i),
        threads);
    fits.push_back(fit_exponential_tail(result, gamma));
  }
  if (want_csv(config.output.format)) {
    std::vector<std::vector<double>> rows;
    rows.reserve(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i)
      rows.push_back(
          {config.gamma_ladder[i], fits[i].gamma, fits[i].gamma_stderr});
    const std::string name = config.output.basename + ".csv";
    write_csv(dir / name, "Gamma,gamma_fit,gamma_stderr", rows);
    outputs.push_back(name);
  }
  if (want_json(config.output.format)) {
    ordered_json j;
    j["gammas"] = config.gamma_ladder;
    j["fits"] = ordered_json::array();
    for (const DecayFit& fit : fits) j["fits"].push_back(decay_fit_to_json(fit));
    const std::string name = config.output.basename + ".json";
    write_json_file(dir / name, j);
    outputs.push_back(name);
  }

  // Scaling-law fit over the measured rates, when the ladder can support it.
  std::vector<double> sorted = config.gamma_ladder;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const bool fittable =
      sorted.size() >= 4 && sorted.back() / sorted.front() >= 10.0;
  if (fittable) {
    std::vector<std::pair<double, double>> rates;
    rates.reserve(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i)
      rates.emplace_back(config.gamma_ladder[i], fits[i].gamma);
    try {
      const ScalingFit scaling = fit_scaling_law(rates);
      results["scaling_fit"] = scaling_fit_to_json(scaling);
      const std::string name = config.output.basename + "_scaling.json";
      write_json_file(dir / name, scaling_fit_to_json(scaling));
      outputs.push_back(name);
    } catch (const FitError& error) {
      results["scaling_fit_error"] = error.what();
    }
  }
}

inline void execute_cutoff_sweep(const ExperimentConfig& config,
                                 const std::filesystem::path& dir,
                                 int threads,
                                 std::vector<std::string>& outputs,
                                 ordered_json& results) {
  const CoreDistribution core = config.distribution.make_core(config.delta0);
  std::vector<double> cutoffs = config.delta_c_ladder;
  if (cutoffs.empty()) cutoffs.push_back(*config.distribution.delta_c);
  const double t_ref = config.reference_time;

  ordered_json crossovers = ordered_json::array();
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    const TruncatedDistribution trunc{core, cutoffs[i] * config.delta0};
    // The configured ladder belongs to the first cutoff; the crossover rate
    // scales in proportion to the cutoff, so rescale the ladder with it.
    const double rescale = cutoffs[i] / cutoffs.front();
    std::vector<std::pair<double, double>> points;
    std::vector<std::vector<double>> rows;
    points.reserve(config.gamma_ladder.size());
    for (std::size_t j = 0; j < config.gamma_ladder.size(); ++j) {
      const double gamma = config.gamma_ladder[j] * rescale;
      double ratio = 0.0, err = 0.0;
      if (config.engine == "monte-carlo") {
        const NormalizedCoherence nc = simulate_normalized_coherence(
            make_simulation(config, trunc, PoissonProcess{gamma},
                            {0.0, t_ref}, config.seed + 1000 * i + j),
            t_ref, threads);
        ratio = nc.value;
        err = nc.standard_error;
      } else {
        const LaplaceEvaluator evaluator(trunc, gamma);
        const double r_gamma = invert_laplace(evaluator, {t_ref}).values[0];
        ratio = r_gamma / char_magnitude(trunc, t_ref);
      }
      points.emplace_back(gamma, ratio);
      rows.push_back({gamma, ratio, err});
    }
    const std::string name = config.output.basename + "_dc" +
                             numeric_tag(cutoffs[i]) + ".csv";
    write_csv(dir / name, "Gamma,R_over_R0,stderr", rows);
    outputs.push_back(name);

    ordered_json entry;
    entry["delta_c"] = cutoffs[i];
    try {
      const CrossoverResult crossover =
          find_crossover(points, crossover_scale(trunc, t_ref));
      entry["gamma_star"] = crossover.gamma_star;
      entry["predicted_scale"] = crossover.predicted_scale;
    } catch (const ScanRangeError& error) {
      entry["error"] = error.what();
    } catch (const ParameterError& error) {
      entry["error"] = error.what();
    }
    crossovers.push_back(entry);
  }
  results["crossovers"] = crossovers;
  const std::string name = config.output.basename + "_crossover.json";
  write_json_file(dir / name, crossovers);
  outputs.push_back(name);
}

inline void execute_zeno_compare(const ExperimentConfig& config,
                                 const std::filesystem::path& dir,
                                 int threads,
                                 std::vector<std::string>& outputs,
                                 ordered_json& results) {
  const DetuningDistribution dist = config.make_distribution();
  const std::vector<double> times = config.time_grid.resolve();
  const double dt = config.process.dt;

  const CoherenceCurve free_curve = coherence_free(dist, times);
  const EnsembleResult mc = simulate(
      make_simulation(config, dist, FixedProcess{dt}, times, config.seed),
      threads);
  results["mean_collisions"] = mc.mean_collisions;

  std::vector<std::vector<double>> rows;
  rows.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double product =
        times[k] > 0.0
            ? zeno_product(dist, CollisionSchedule::fixed_spacing(dt, times[k]))
            : 1.0;
    rows.push_back({times[k], free_curve.values[k], product,
                    mc.curve.values[k], mc.stderr_values[k]});
  }
  const std::string name = config.output.basename + ".csv";
  write_csv(dir / name, "T,R_free,R_product,R_mc,stderr", rows);
  outputs.push_back(name);
  if (want_json(config.output.format)) {
    ordered_json j;
    j["times"] = times;
    j["R_free"] = free_curve.values;
    ordered_json product = ordered_json::array();
    for (const auto& row : rows) product.push_back(row[2]);
    j["R_product"] = product;
    j["monte_carlo"] = ensemble_to_json(mc);
    const std::string jname = config.output.basename + ".json";
    write_json_file(dir / jname, j);
    outputs.push_back(jname);
  }
}

inline void execute(const ExperimentConfig& config,
                    const std::filesystem::path& dir, int threads,
                    std::vector<std::string>& outputs,
                    ordered_json& results) {
  switch (config.kind) {
    case ExperimentKind::coherence:
      execute_coherence(config, dir, threads, outputs, results);
      break;
    case ExperimentKind::spectrum:
      execute_spectrum(config, dir, outputs, results);
      break;
    case ExperimentKind::fwhm_sweep:
      execute_fwhm_sweep(config, dir, outputs, results);
      break;
    case ExperimentKind::decay_sweep:
      execute_decay_sweep(config, dir, threads, outputs, results);
      break;
    case ExperimentKind::cutoff_sweep:
      execute_cutoff_sweep(config, dir, threads, outputs, results);
      break;
    case ExperimentKind::zeno_compare:
      execute_zeno_compare(config, dir, threads, outputs, results);
      break;
  }
}

inline void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
}

inline ordered_json engine_versions() {
  return ordered_json{{kEngineName, kEngineVersion}};
}

} // namespace detail

// Runs one experiment, writing its data files plus manifest.json into
// `out_dir`. The manifest embeds the resolved config. Returns the manifest
// and the list of data files written (manifest.json itself excluded).
inline RunReport run_experiment(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir,
                                int threads = 0) {
  const auto start = std::chrono::steady_clock::now();
  detail::ensure_out_dir(out_dir);
  std::vector<std::string> outputs;
  ordered_json results = ordered_json::object();
  detail::execute(config, out_dir, threads, outputs, results);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ordered_json manifest;
  manifest["config"] = to_json(config);
  if (config.monte_carlo()) manifest["seed"] = config.seed;
  manifest["engine_versions"] = detail::engine_versions();
  manifest["wall_time_seconds"] = elapsed;
  manifest["outputs"] = outputs;
  if (!results.empty()) manifest["results"] = results;
  write_json_file(out_dir / "manifest.json", manifest);
  return RunReport{std::move(manifest), std::move(outputs)};
}

// ---- presets ----
//
// Each preset expands to a list of ordinary experiment configs with distinct
// output basenames, so preset runs and config-file runs share one code path.

inline std::vector<ExperimentConfig> preset_configs(const std::string& name) {
  std::vector<ExperimentConfig> parts;
  const auto student = [](double r) {
    DistributionSpec d;
    d.family = "student-t";
    d.r = r;
    d.delta0 = 1.0;
    return d;
  };
  if (name == "fig1") {
    // Free vs reset-broadened/narrowed line shapes and the FWHM trend for a
    // heavy-tail (r = 0.5) and a light-tail (r = 1.5) ensemble.
    for (const double r : {0.5, 1.5}) {
      const std::string tag = detail::numeric_tag(r);
      for (const double gamma : {0.0, 10.0}) {
        ExperimentConfig part;
        part.kind = ExperimentKind::spectrum;
        part.distribution = student(r);
        if (gamma > 0.0) part.process = ProcessSpec{"poisson", gamma, 0.0};
        part.engine = "laplace";
        part.frequency_grid.form = FrequencyGridSpec::Form::half_width;
        part.frequency_grid.width = 40.0;
        part.frequency_grid.points = 1601;
        part.output.basename =
            "spectrum_r" + tag + "_gamma" + detail::numeric_tag(gamma);
        parts.push_back(part);
      }
      ExperimentConfig sweep;
      sweep.kind = ExperimentKind::fwhm_sweep;
      sweep.distribution = student(r);
      sweep.engine = "laplace";
      sweep.gamma_ladder = detail::log_ladder(0.1, 30.0, 10);
      sweep.frequency_grid.points = 1024; // FWHM ratios need no finer grid
      sweep.output.basename = "fwhm_sweep_r" + tag;
      parts.push_back(sweep);
    }
  } else if (name == "fig2") {
    // Free decay vs the independent-interval product vs direct simulation
    // under fixed-spacing resets.
    std::uint64_t seed = 2026;
    for (const double r : {0.5, 1.5}) {
      ExperimentConfig part;
      part.kind = ExperimentKind::zeno_compare;
      part.distribution = student(r);
      part.process = ProcessSpec{"fixed", 0.0, 0.25};
      part.engine = "monte-carlo";
      part.time_grid.form = TimeGridSpec::Form::linspace;
      part.time_grid.start = 0.0;
      part.time_grid.stop = 6.0;
      part.time_grid.points = 25;
      part.ensemble_size = 4000;
      part.seed = seed++;
      part.output.basename = "zeno_r" + detail::numeric_tag(r);
      parts.push_back(part);
    }
  } else if (name == "fig3") {
    // Measured decay rates against the reset rate for r = 0.5, the fitted
    // scaling law, and sample coherence curves. The ladder starts at
    // Gamma = 10 so every rung keeps data above the fit-window noise floor
    // at this ensemble size (the heavy tail drives the rate like
    // Gamma^(1/2), so R at the window opening falls like exp(-10/sqrt(G))).
    ExperimentConfig sweep;
    sweep.kind = ExperimentKind::decay_sweep;
    sweep.distribution = student(0.5);
    sweep.engine = "monte-carlo";
    sweep.gamma_ladder = {10.0, 30.0, 100.0, 300.0, 1000.0};
    sweep.time_grid.form = TimeGridSpec::Form::sweep;
    sweep.time_grid.points = 80;
    sweep.ensemble_size = 20000;
    sweep.seed = 31;
    sweep.output.basename = "decay_rates";
    parts.push_back(sweep);
    std::uint64_t seed = 131;
    for (const double gamma : {2.0, 10.0, 50.0}) {
      ExperimentConfig curve;
      curve.kind = ExperimentKind::coherence;
      curve.distribution = student(0.5);
      curve.process = ProcessSpec{"poisson", gamma, 0.0};
      curve.engine = "monte-carlo";
      curve.time_grid.form = TimeGridSpec::Form::linspace;
      curve.time_grid.start = 0.0;
      curve.time_grid.stop = 10.0 / gamma + 3.0;
      curve.time_grid.points = 80;
      curve.ensemble_size = 10000;
      curve.seed = seed++;
      curve.output.basename = "coherence_gamma" + detail::numeric_tag(gamma);
      parts.push_back(curve);
    }
  } else if (name == "fig4") {
    // Normalized coherence scans across the reset rate for three cutoffs;
    // the laplace engine resolves the shallow minima at large cutoffs.
    ExperimentConfig sweep;
    sweep.kind = ExperimentKind::cutoff_sweep;
    sweep.distribution = student(0.5);
    sweep.engine = "laplace";
    sweep.delta_c_ladder = {100.0, 1000.0, 10000.0};
    sweep.reference_time = 0.5;
    // Ladder for the first cutoff, centered on the measured crossover
    // location (which tracks 0.3 * delta_c); rescaled per cutoff.
    sweep.gamma_ladder = detail::log_ladder(0.3 * 100.0 * std::exp(-2.0),
                                            0.3 * 100.0 * std::exp(2.0), 9);
    sweep.output.basename = "cutoff_sweep";
    parts.push_back(sweep);
  } else {
    throw ConfigError({"preset: unknown name \"" + name +
                       "\" (expected fig1, fig2, fig3, or fig4)"});
  }
  return parts;
}

// Runs every part of a preset into one directory with a combined manifest
// ({"preset": name, ...}); re-feeding that manifest repeats the preset.
inline RunReport run_preset(const std::string& name,
                            const std::filesystem::path& out_dir,
                            int threads = 0) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ExperimentConfig> parts = preset_configs(name);
  detail::ensure_out_dir(out_dir);
  std::vector<std::string> outputs;
  ordered_json results = ordered_json::object();
  for (const ExperimentConfig& part : parts) {
    ordered_json part_results = ordered_json::object();
    detail::execute(part, out_dir, threads, outputs, part_results);
    if (!part_results.empty())
      results[part.output.basename] = part_results;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ordered_json manifest;
  manifest["preset"] = name;
  manifest["engine_versions"] = detail::engine_versions();
  manifest["wall_time_seconds"] = elapsed;
  manifest["outputs"] = outputs;
  if (!results.empty()) manifest["results"] = results;
  write_json_file(out_dir / "manifest.json", manifest);
  return RunReport{std::move(manifest), std::move(outputs)};
}

// Loads a config document for the CLI: a plain config object is returned
// as-is; a manifest produced by run_experiment or run_preset is unwrapped to
// the embedded config or to {"preset": name}.
inline ordered_json load_config_document(const std::filesystem::path& path) {
  ordered_json j = read_json_file(path);
  if (j.is_object() && j.contains("engine_versions")) {
    if (j.contains("config")) return j.at("config");
    if (j.contains("preset"))
      return ordered_json{{"preset", j.at("preset")}};
  }
  return j;
}

} // namespace dephase
