// dephase — command-line front end.
//
//   dephase run      --config cfg.json [--out DIR] [--seed N] [--threads N]
//   dephase validate --config cfg.json
//   dephase preset   <fig1|fig2|fig3|fig4> [--out DIR] [--threads N]
//   dephase version
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical-engine
// error, 4 I/O error, 1 unexpected failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <dephase/config.hpp>
#include <dephase/errors.hpp>
#include <dephase/experiments.hpp>
#include <dephase/version.hpp>

namespace {

int resolve_thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("DEPHASE_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 1)
      throw dephase::ConfigError(
          {"DEPHASE_THREADS: must be a positive integer, got \"" +
           std::string(env) + "\""});
    return static_cast<int>(parsed);
  }
  return 0; // engine picks hardware concurrency
}

// A document is a preset directive when it is exactly {"preset": "<name>"}.
std::string preset_name_of(const dephase::ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("preset")) return {};
  if (!doc.at("preset").is_string() || doc.size() != 1)
    throw dephase::ConfigError(
        {"preset: a preset document must be exactly {\"preset\": \"<name>\"}"});
  return doc.at("preset").get<std::string>();
}

void report(const dephase::RunReport& run, const std::string& out_dir) {
  for (const std::string& name : run.outputs)
    std::cout << "wrote " << out_dir << "/" << name << "\n";
  std::cout << "manifest " << out_dir << "/manifest.json\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(dephase::kEngineName) +
               " — coherence decay and line shapes of two-level ensembles "
               "with heavy-tailed detunings under random resets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_override = 0;
  int threads = 0;
  std::string preset_name;

  auto* run_cmd =
      app.add_subcommand("run", "run a config (or manifest) and write data");
  run_cmd->add_option("--config,-c", config_path, "JSON config or manifest")
      ->required();
  run_cmd->add_option("--out,-o", out_dir, "output directory (default .)");
  auto* seed_opt =
      run_cmd->add_option("--seed", seed_override, "override the config seed");
  run_cmd->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* validate_cmd = app.add_subcommand(
      "validate", "parse a config and print it with defaults resolved");
  validate_cmd->add_option("--config,-c", config_path, "JSON config file")
      ->required();

  auto* preset_cmd = app.add_subcommand(
      "preset", "run a built-in figure preset (fig1..fig4)");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd->add_option("--out,-o", out_dir, "output directory (default .)");
  preset_cmd->add_option("--threads", threads, "worker threads (0 = auto)");

  auto* version_cmd =
      app.add_subcommand("version", "print the engine name and version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e); // prints the usage message
    return 2;
  }

  try {
    if (version_cmd->parsed()) {
      std::cout << dephase::kEngineName << " " << dephase::kEngineVersion
                << "\n";
      return 0;
    }
    if (validate_cmd->parsed()) {
      const dephase::ordered_json doc =
          dephase::load_config_document(config_path);
      if (const std::string name = preset_name_of(doc); !name.empty()) {
        dephase::ordered_json parts = dephase::ordered_json::array();
        for (const auto& part : dephase::preset_configs(name))
          parts.push_back(dephase::to_json(part));
        std::cout << parts.dump(2) << "\n";
        return 0;
      }
      const dephase::ExperimentConfig config =
          dephase::parse_experiment_config(doc);
      std::cout << dephase::to_json(config).dump(2) << "\n";
      return 0;
    }
    const int workers = resolve_thread_count(threads);
    if (preset_cmd->parsed()) {
      report(dephase::run_preset(preset_name, out_dir, workers), out_dir);
      return 0;
    }
    // run
    const dephase::ordered_json doc =
        dephase::load_config_document(config_path);
    if (const std::string name = preset_name_of(doc); !name.empty()) {
      report(dephase::run_preset(name, out_dir, workers), out_dir);
      return 0;
    }
    dephase::ExperimentConfig config = dephase::parse_experiment_config(doc);
    if (seed_opt->count() > 0) config.seed = seed_override;
    report(dephase::run_experiment(config, out_dir, workers), out_dir);
    return 0;
  } catch (const dephase::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const dephase::ParameterError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  } catch (const dephase::NumericalError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  } catch (const dephase::IoError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 4;
  } catch (const std::exception& error) {
    std::cerr << "unexpected error: " << error.what() << "\n";
    return 1;
  }
}
