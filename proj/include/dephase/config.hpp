// dephase/config.hpp — experiment configuration: a nested key-value schema
// (JSON) parsed into a resolved ExperimentConfig with defaults filled in,
// unknown keys rejected, and validation errors aggregated with field paths.
//
// Units: the distribution block is expressed in units of the scale knob
// `delta0` (default 1), which multiplies the distribution width and cutoff.
// Times, rates, and frequencies are absolute (equal to delta0 units when the
// knob is 1, which is the convention used throughout the documentation).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "distributions.hpp"
#include "errors.hpp"
#include "monte_carlo.hpp"
#include "poisson_spectrum.hpp"

namespace dephase {

using ordered_json = nlohmann::ordered_json;

enum class ExperimentKind {
  coherence,
  spectrum,
  fwhm_sweep,
  decay_sweep,
  cutoff_sweep,
  zeno_compare,
};

inline std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::coherence: return "coherence";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::fwhm_sweep: return "fwhm-sweep";
    case ExperimentKind::decay_sweep: return "decay-sweep";
    case ExperimentKind::cutoff_sweep: return "cutoff-sweep";
    case ExperimentKind::zeno_compare: return "zeno-compare";
  }
  return "unknown";
}

// Distribution block in config units (before the delta0 knob is applied).
struct DistributionSpec {
  std::string family;        // "stable" or "student-t"
  double alpha = 0.0;        // stable: characteristic exponent
  double c = 1.0;            // stable: scale coefficient
  double r = 0.0;            // student-t: shape
  double delta0 = 1.0;       // student-t: width
  std::optional<double> delta_c; // optional cutoff -> truncated

  // Core law with the scale knob applied: widths are multiplied by `knob`
  // (for the stable family the scale coefficient picks up knob^alpha).
  CoreDistribution make_core(double knob) const {
    if (family == "stable")
      return StableLaw{alpha, c * std::pow(knob, alpha)};
    return StudentT{r, delta0 * knob};
  }

  // Effective distribution: core plus the (knob-scaled) cutoff if present.
  DetuningDistribution make(double knob) const {
    const CoreDistribution core = make_core(knob);
    if (delta_c)
      return TruncatedDistribution{core, *delta_c * knob};
    if (family == "stable") return std::get<StableLaw>(core);
    return std::get<StudentT>(core);
  }
};

struct ProcessSpec {
  std::string type = "none"; // "none", "poisson", "fixed"
  double gamma = 0.0;        // poisson rate
  double dt = 0.0;           // fixed spacing

  CollisionProcess make() const {
    if (type == "poisson") return PoissonProcess{gamma};
    if (type == "fixed") return FixedProcess{dt};
    return NoProcess{};
  }
};

struct TimeGridSpec {
  enum class Form { linspace, values, sweep } form = Form::linspace;
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
  double tail = 3.0; // sweep form: grid ends at 10/Gamma + tail
  std::vector<double> values;

  std::vector<double> resolve() const {
    if (form == Form::values) return values;
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
      out[i] = start + (stop - start) * static_cast<double>(i) /
                           static_cast<double>(points - 1);
    return out;
  }

  // Per-rate grid for decay sweeps: [0, 10/Gamma + tail] so the fit window
  // that opens at 10/Gamma is well populated.
  std::vector<double> resolve_for_rate(double gamma) const {
    std::vector<double> out(points);
    const double stop_at = 10.0 / gamma + tail;
    for (std::size_t i = 0; i < points; ++i)
      out[i] = stop_at * static_cast<double>(i) /
               static_cast<double>(points - 1);
    return out;
  }
};

struct FrequencyGridSpec {
  enum class Form { automatic, half_width, values } form = Form::automatic;
  double width = 20.0; // half-width of the symmetric grid
  std::size_t points = 2048;
  std::vector<double> values;

  std::vector<double> resolve(const DetuningDistribution& dist) const {
    if (form == Form::values) return values;
    if (form == Form::automatic) return default_frequency_grid(dist, points);
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
      out[i] = -width + 2.0 * width * static_cast<double>(i) /
                            static_cast<double>(points - 1);
    return out;
  }
};

struct OutputSpec {
  std::string basename; // file base name; kind-specific default
  std::string format = "csv"; // "csv", "json", or "both"
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::coherence;
  double delta0 = 1.0;
  DistributionSpec distribution;
  ProcessSpec process;
  std::string engine; // resolved: "quadrature", "laplace", or "monte-carlo"
  TimeGridSpec time_grid;
  FrequencyGridSpec frequency_grid;
  std::vector<double> gamma_ladder;
  std::vector<double> delta_c_ladder;
  double reference_time = 0.0;
  std::size_t ensemble_size = 10000;
  std::uint64_t seed = 0;
  OutputSpec output;

  DetuningDistribution make_distribution() const {
    return distribution.make(delta0);
  }
  bool monte_carlo() const { return engine == "monte-carlo"; }
};

namespace detail {

struct ConfigReader {
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& what) {
    issues.push_back(path + ": " + what);
  }

  void check_unknown(const ordered_json& obj, const std::string& prefix,
                     std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      (void)value;
      bool known = false;
      for (const char* a : allowed)
        if (key == a) {
          known = true;
          break;
        }
      if (!known)
        fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
  }

  const ordered_json* object_field(const ordered_json& obj,
                                   const std::string& path,
                                   const std::string& key, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing required object");
      return nullptr;
    }
    const auto& v = obj.at(key);
    if (!v.is_object()) {
      fail(join(path, key), "must be an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number_field(const ordered_json& obj,
                                     const std::string& path,
                                     const std::string& key, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing required number");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "must be a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(join(path, key), "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::string> string_field(const ordered_json& obj,
                                          const std::string& path,
                                          const std::string& key,
                                          bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing required string");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      fail(join(path, key), "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::uint64_t> uint_field(const ordered_json& obj,
                                          const std::string& path,
                                          const std::string& key,
                                          bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing required integer");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(join(path, key), "must be a non-negative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<std::vector<double>> array_field(const ordered_json& obj,
                                                 const std::string& path,
                                                 const std::string& key,
                                                 bool required) {
    if (!obj.contains(key)) {
      if (required) fail(join(path, key), "missing required array");
      return std::nullopt;
    }
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) {
      fail(join(path, key), "must be a nonempty array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& item : v) {
      if (!item.is_number() || !std::isfinite(item.get<double>())) {
        fail(join(path, key), "must contain only finite numbers");
        return std::nullopt;
      }
      out.push_back(item.get<double>());
    }
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

inline std::optional<ExperimentKind> parse_kind(const std::string& text) {
  if (text == "coherence") return ExperimentKind::coherence;
  if (text == "spectrum") return ExperimentKind::spectrum;
  if (text == "fwhm-sweep") return ExperimentKind::fwhm_sweep;
  if (text == "decay-sweep") return ExperimentKind::decay_sweep;
  if (text == "cutoff-sweep") return ExperimentKind::cutoff_sweep;
  if (text == "zeno-compare") return ExperimentKind::zeno_compare;
  return std::nullopt;
}

inline std::string default_basename(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::coherence: return "coherence";
    case ExperimentKind::spectrum: return "spectrum";
    case ExperimentKind::fwhm_sweep: return "fwhm_sweep";
    case ExperimentKind::decay_sweep: return "decay_rates";
    case ExperimentKind::cutoff_sweep: return "cutoff_sweep";
    case ExperimentKind::zeno_compare: return "zeno_compare";
  }
  return "output";
}

inline void parse_distribution(ConfigReader& r, const ordered_json& obj,
                               DistributionSpec& spec) {
  const auto family = r.string_field(obj, "distribution", "family", true);
  if (!family) {
    r.check_unknown(obj, "distribution",
                    {"family", "alpha", "c", "r", "delta0", "delta_c"});
    return;
  }
  spec.family = *family;
  if (spec.family == "stable") {
    r.check_unknown(obj, "distribution", {"family", "alpha", "c", "delta_c"});
    if (const auto alpha = r.number_field(obj, "distribution", "alpha", true)) {
      if (*alpha <= 0.0 || *alpha > 2.0)
        r.fail("distribution.alpha", "must lie in (0, 2], got " +
                                         std::to_string(*alpha));
      else
        spec.alpha = *alpha;
    }
    if (const auto c = r.number_field(obj, "distribution", "c", false)) {
      if (*c <= 0.0)
        r.fail("distribution.c", "must be positive");
      else
        spec.c = *c;
    }
  } else if (spec.family == "student-t") {
    r.check_unknown(obj, "distribution", {"family", "r", "delta0", "delta_c"});
    if (const auto rr = r.number_field(obj, "distribution", "r", true)) {
      if (*rr <= 0.0)
        r.fail("distribution.r", "must be positive");
      else
        spec.r = *rr;
    }
    if (const auto d0 = r.number_field(obj, "distribution", "delta0", false)) {
      if (*d0 <= 0.0)
        r.fail("distribution.delta0", "must be positive");
      else
        spec.delta0 = *d0;
    }
  } else {
    r.fail("distribution.family",
           "must be \"stable\" or \"student-t\", got \"" + spec.family +
               "\"");
    return;
  }
  if (obj.contains("delta_c")) {
    if (const auto dc = r.number_field(obj, "distribution", "delta_c", false)) {
      if (*dc <= 0.0)
        r.fail("distribution.delta_c", "must be positive");
      else
        spec.delta_c = *dc;
    }
  }
}

inline void parse_process(ConfigReader& r, const ordered_json& obj,
                          ProcessSpec& spec) {
  const auto type = r.string_field(obj, "process", "type", true);
  if (!type) {
    r.check_unknown(obj, "process", {"type", "gamma", "dt"});
    return;
  }
  spec.type = *type;
  if (spec.type == "none") {
    r.check_unknown(obj, "process", {"type"});
  } else if (spec.type == "poisson") {
    r.check_unknown(obj, "process", {"type", "gamma"});
    if (const auto g = r.number_field(obj, "process", "gamma", true)) {
      if (*g < 0.0)
        r.fail("process.gamma", "must be >= 0");
      else
        spec.gamma = *g;
    }
  } else if (spec.type == "fixed") {
    r.check_unknown(obj, "process", {"type", "dt"});
    if (const auto dt = r.number_field(obj, "process", "dt", true)) {
      if (*dt <= 0.0)
        r.fail("process.dt", "must be positive");
      else
        spec.dt = *dt;
    }
  } else {
    r.fail("process.type",
           "must be \"none\", \"poisson\", or \"fixed\", got \"" + spec.type +
               "\"");
  }
}

inline void parse_time_grid(ConfigReader& r, const ordered_json& obj,
                            TimeGridSpec& grid, bool sweep_form) {
  if (sweep_form) {
    r.check_unknown(obj, "time_grid", {"points", "tail"});
    grid.form = TimeGridSpec::Form::sweep;
    grid.points = 80;
    if (const auto p = r.uint_field(obj, "time_grid", "points", false)) {
      if (*p < 8)
        r.fail("time_grid.points", "need at least 8 points for a decay fit");
      else
        grid.points = static_cast<std::size_t>(*p);
    }
    if (const auto tail = r.number_field(obj, "time_grid", "tail", false)) {
      if (*tail <= 0.0)
        r.fail("time_grid.tail", "must be positive");
      else
        grid.tail = *tail;
    }
    return;
  }
  if (obj.contains("values")) {
    r.check_unknown(obj, "time_grid", {"values"});
    grid.form = TimeGridSpec::Form::values;
    if (const auto vals = r.array_field(obj, "time_grid", "values", true)) {
      grid.values = *vals;
      for (std::size_t i = 1; i < grid.values.size(); ++i)
        if (!(grid.values[i] > grid.values[i - 1])) {
          r.fail("time_grid.values", "must be strictly increasing");
          break;
        }
      if (!grid.values.empty() && grid.values.front() < 0.0)
        r.fail("time_grid.values", "must be nonnegative");
    }
    return;
  }
  r.check_unknown(obj, "time_grid", {"start", "stop", "points"});
  grid.form = TimeGridSpec::Form::linspace;
  if (const auto start = r.number_field(obj, "time_grid", "start", false)) {
    if (*start < 0.0)
      r.fail("time_grid.start", "must be nonnegative");
    else
      grid.start = *start;
  }
  const auto stop = r.number_field(obj, "time_grid", "stop", true);
  const auto points = r.uint_field(obj, "time_grid", "points", true);
  if (stop) {
    if (!(*stop > grid.start))
      r.fail("time_grid.stop", "must exceed time_grid.start");
    else
      grid.stop = *stop;
  }
  if (points) {
    if (*points < 2)
      r.fail("time_grid.points", "need at least 2 points");
    else
      grid.points = static_cast<std::size_t>(*points);
  }
}

inline void parse_frequency_grid(ConfigReader& r, const ordered_json& obj,
                                 FrequencyGridSpec& grid) {
  if (obj.contains("values")) {
    r.check_unknown(obj, "frequency_grid", {"values"});
    grid.form = FrequencyGridSpec::Form::values;
    if (const auto vals =
            r.array_field(obj, "frequency_grid", "values", true)) {
      grid.values = *vals;
      if (grid.values.size() < 5)
        r.fail("frequency_grid.values", "need at least 5 points");
    }
    return;
  }
  r.check_unknown(obj, "frequency_grid", {"half_width", "points"});
  if (obj.contains("half_width")) {
    grid.form = FrequencyGridSpec::Form::half_width;
    if (const auto hw =
            r.number_field(obj, "frequency_grid", "half_width", true)) {
      if (*hw <= 0.0)
        r.fail("frequency_grid.half_width", "must be positive");
      else
        grid.width = *hw;
    }
  } else {
    grid.form = FrequencyGridSpec::Form::automatic;
  }
  if (const auto p = r.uint_field(obj, "frequency_grid", "points", false)) {
    if (*p < 5)
      r.fail("frequency_grid.points", "need at least 5 points");
    else
      grid.points = static_cast<std::size_t>(*p);
  }
}

} // namespace detail

// Parses and validates a config document. All validation issues are
// aggregated into one ConfigError with field-addressed messages; on success
// every default is resolved.
inline ExperimentConfig parse_experiment_config(const ordered_json& root) {
  detail::ConfigReader r;
  if (!root.is_object())
    throw ConfigError({"config: must be a JSON object"});

  r.check_unknown(root, "",
                  {"experiment", "delta0", "distribution", "process",
                   "engine", "time_grid", "frequency_grid", "gamma_ladder",
                   "delta_c_ladder", "reference_time", "ensemble_size",
                   "seed", "output"});

  ExperimentConfig config;
  bool kind_known = false;
  if (const auto kind_text = r.string_field(root, "", "experiment", true)) {
    if (const auto kind = detail::parse_kind(*kind_text)) {
      config.kind = *kind;
      kind_known = true;
    } else {
      r.fail("experiment",
             "must be one of coherence, spectrum, fwhm-sweep, decay-sweep, "
             "cutoff-sweep, zeno-compare; got \"" +
                 *kind_text + "\"");
    }
  }

  if (const auto knob = r.number_field(root, "", "delta0", false)) {
    if (*knob <= 0.0)
      r.fail("delta0", "must be positive");
    else
      config.delta0 = *knob;
  }

  if (const auto* dist = r.object_field(root, "", "distribution", true))
    detail::parse_distribution(r, *dist, config.distribution);

  if (const auto* proc = r.object_field(root, "", "process", false))
    detail::parse_process(r, *proc, config.process);

  std::string engine = "auto";
  if (const auto e = r.string_field(root, "", "engine", false)) {
    if (*e == "auto" || *e == "quadrature" || *e == "laplace" ||
        *e == "monte-carlo")
      engine = *e;
    else
      r.fail("engine",
             "must be one of auto, quadrature, laplace, monte-carlo");
  }

  if (!kind_known) throw ConfigError(r.issues);
  const ExperimentKind kind = config.kind;

  // Resolve the engine per kind.
  switch (kind) {
    case ExperimentKind::coherence:
      if (engine == "auto")
        engine = config.process.type == "none"
                     ? "quadrature"
                     : (config.process.type == "poisson" ? "laplace"
                                                         : "monte-carlo");
      if (engine == "quadrature" && config.process.type != "none")
        r.fail("engine", "quadrature computes free coherence only; use "
                         "laplace or monte-carlo with a process");
      if (engine == "laplace" && config.process.type == "fixed")
        r.fail("engine",
               "the laplace engine supports poisson resets only; use "
               "monte-carlo for fixed spacing");
      break;
    case ExperimentKind::spectrum:
    case ExperimentKind::fwhm_sweep:
      if (engine != "auto" && engine != "laplace")
        r.fail("engine", "spectra are computed by the laplace engine");
      engine = "laplace";
      break;
    case ExperimentKind::cutoff_sweep:
      // Normalized coherence at one time can come from either engine;
      // laplace resolves minima far below the monte-carlo noise floor.
      if (engine == "auto") engine = "monte-carlo";
      if (engine != "monte-carlo" && engine != "laplace")
        r.fail("engine", "cutoff sweeps run on monte-carlo or laplace");
      break;
    default:
      if (engine != "auto" && engine != "monte-carlo")
        r.fail("engine", "sweep experiments run on the monte-carlo engine");
      engine = "monte-carlo";
      break;
  }
  config.engine = engine;

  // Kind-specific grids and parameters.
  const bool is_mc = engine == "monte-carlo";
  if (kind == ExperimentKind::coherence ||
      kind == ExperimentKind::zeno_compare) {
    if (const auto* grid = r.object_field(root, "", "time_grid", true)) {
      detail::parse_time_grid(r, *grid, config.time_grid, false);
      const auto times = config.time_grid.resolve();
      if (!times.empty()) {
        if (is_mc || kind == ExperimentKind::zeno_compare) {
          if (times.front() != 0.0)
            r.fail("time_grid", "monte-carlo grids must start at 0");
        } else if (engine == "laplace" && times.front() <= 0.0) {
          r.fail("time_grid",
                 "laplace-inversion grids must start above 0");
        }
      }
    }
  } else if (kind == ExperimentKind::decay_sweep) {
    if (const auto* grid = r.object_field(root, "", "time_grid", false)) {
      detail::parse_time_grid(r, *grid, config.time_grid, true);
    } else {
      config.time_grid.form = TimeGridSpec::Form::sweep;
      config.time_grid.points = 80;
    }
  }

  if (kind == ExperimentKind::spectrum ||
      kind == ExperimentKind::fwhm_sweep) {
    if (const auto* grid = r.object_field(root, "", "frequency_grid", false))
      detail::parse_frequency_grid(r, *grid, config.frequency_grid);
    if (kind == ExperimentKind::spectrum && config.process.type == "fixed")
      r.fail("process.type",
             "spectra support poisson resets only; got \"fixed\"");
  }

  if (kind == ExperimentKind::fwhm_sweep ||
      kind == ExperimentKind::decay_sweep ||
      kind == ExperimentKind::cutoff_sweep) {
    if (const auto ladder = r.array_field(root, "", "gamma_ladder", true)) {
      config.gamma_ladder = *ladder;
      const double floor = kind == ExperimentKind::fwhm_sweep ? 0.0 : 1e-300;
      for (const double g : config.gamma_ladder)
        if (g < floor || (kind != ExperimentKind::fwhm_sweep && g <= 0.0)) {
          r.fail("gamma_ladder",
                 kind == ExperimentKind::fwhm_sweep
                     ? "rates must be >= 0"
                     : "rates must be positive");
          break;
        }
    }
  }

  if (kind == ExperimentKind::cutoff_sweep) {
    if (const auto t = r.number_field(root, "", "reference_time", true)) {
      if (*t <= 0.0)
        r.fail("reference_time", "must be positive");
      else
        config.reference_time = *t;
    }
    if (root.contains("delta_c_ladder")) {
      if (const auto ladder =
              r.array_field(root, "", "delta_c_ladder", false)) {
        config.delta_c_ladder = *ladder;
        for (const double dc : config.delta_c_ladder)
          if (dc <= 0.0) {
            r.fail("delta_c_ladder", "cutoffs must be positive");
            break;
          }
      }
    }
    if (config.delta_c_ladder.empty() && !config.distribution.delta_c)
      r.fail("delta_c_ladder",
             "cutoff-sweep needs distribution.delta_c or a delta_c_ladder");
    if (!config.delta_c_ladder.empty() && config.distribution.delta_c)
      r.fail("delta_c_ladder",
             "give either distribution.delta_c or a ladder, not both");
  }

  if (kind == ExperimentKind::zeno_compare &&
      config.process.type != "fixed")
    r.fail("process.type", "zeno-compare requires fixed resets");

  if (is_mc) {
    if (const auto n = r.uint_field(root, "", "ensemble_size", false)) {
      if (*n < 2)
        r.fail("ensemble_size", "need at least 2 particles");
      else
        config.ensemble_size = static_cast<std::size_t>(*n);
    }
    if (const auto seed = r.uint_field(root, "", "seed", true))
      config.seed = *seed;
  }

  config.output.basename = detail::default_basename(kind);
  if (const auto* out = r.object_field(root, "", "output", false)) {
    r.check_unknown(*out, "output", {"basename", "format"});
    if (const auto base = r.string_field(*out, "output", "basename", false)) {
      if (base->empty() || base->find('/') != std::string::npos ||
          base->find('\\') != std::string::npos)
        r.fail("output.basename", "must be a plain file name");
      else
        config.output.basename = *base;
    }
    if (const auto fmt = r.string_field(*out, "output", "format", false)) {
      if (*fmt != "csv" && *fmt != "json" && *fmt != "both")
        r.fail("output.format", "must be csv, json, or both");
      else
        config.output.format = *fmt;
    }
  }

  if (!r.issues.empty()) throw ConfigError(r.issues);
  return config;
}

// Canonical echo of a resolved config: parsing it back yields the same
// configuration (doubles serialize with round-trip precision).
inline ordered_json to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["experiment"] = to_string(config.kind);
  j["delta0"] = config.delta0;
  ordered_json dist;
  dist["family"] = config.distribution.family;
  if (config.distribution.family == "stable") {
    dist["alpha"] = config.distribution.alpha;
    dist["c"] = config.distribution.c;
  } else {
    dist["r"] = config.distribution.r;
    dist["delta0"] = config.distribution.delta0;
  }
  if (config.distribution.delta_c) dist["delta_c"] = *config.distribution.delta_c;
  j["distribution"] = dist;

  ordered_json proc;
  proc["type"] = config.process.type;
  if (config.process.type == "poisson") proc["gamma"] = config.process.gamma;
  if (config.process.type == "fixed") proc["dt"] = config.process.dt;
  j["process"] = proc;
  j["engine"] = config.engine;

  const ExperimentKind kind = config.kind;
  if (kind == ExperimentKind::coherence ||
      kind == ExperimentKind::zeno_compare) {
    ordered_json grid;
    if (config.time_grid.form == TimeGridSpec::Form::values) {
      grid["values"] = config.time_grid.values;
    } else {
      grid["start"] = config.time_grid.start;
      grid["stop"] = config.time_grid.stop;
      grid["points"] = config.time_grid.points;
    }
    j["time_grid"] = grid;
  } else if (kind == ExperimentKind::decay_sweep) {
    j["time_grid"] = ordered_json{{"points", config.time_grid.points},
                                  {"tail", config.time_grid.tail}};
  }
  if (kind == ExperimentKind::spectrum ||
      kind == ExperimentKind::fwhm_sweep) {
    if (config.frequency_grid.form == FrequencyGridSpec::Form::values)
      j["frequency_grid"] =
          ordered_json{{"values", config.frequency_grid.values}};
    else if (config.frequency_grid.form ==
             FrequencyGridSpec::Form::half_width)
      j["frequency_grid"] =
          ordered_json{{"half_width", config.frequency_grid.width},
                       {"points", config.frequency_grid.points}};
    else
      // automatic: width derived from the distribution scale
      j["frequency_grid"] =
          ordered_json{{"points", config.frequency_grid.points}};
  }
  if (!config.gamma_ladder.empty()) j["gamma_ladder"] = config.gamma_ladder;
  if (!config.delta_c_ladder.empty())
    j["delta_c_ladder"] = config.delta_c_ladder;
  if (kind == ExperimentKind::cutoff_sweep)
    j["reference_time"] = config.reference_time;
  if (config.monte_carlo()) {
    j["ensemble_size"] = config.ensemble_size;
    j["seed"] = config.seed;
  }
  j["output"] = ordered_json{{"basename", config.output.basename},
                             {"format", config.output.format}};
  return j;
}

} // namespace dephase
