#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evapore/config.hpp"
#include "evapore/field.hpp"
#include "evapore/io.hpp"
#include "evapore/linear_solver.hpp"
#include "evapore/scenarios.hpp"

namespace fs = std::filesystem;
using namespace evapore;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3, kInvalidRun = 4 };

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"config: cannot read " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs (or only validates) one config and maps failures to exit codes.
// `subdir` (batch mode) nests the output below the chosen directory.
int run_one(const std::string& text, const std::string& scenario, const std::string& out_dir, bool check,
            const std::string& subdir = "") {
  try {
    RunConfig cfg = parse_config(text, scenario);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (!subdir.empty()) cfg.out = (fs::path(cfg.out) / subdir).string();
    if (check) {
      std::cout << config_echo(cfg);
      return kOk;
    }
    const Manifest m = run_scenario(cfg);
    std::cout << m.scenario << ": wrote " << m.files.size() << " files to " << cfg.out << "\n";
    for (const auto& f : m.files) std::cout << "  " << f.sha256.substr(0, 16) << "  " << f.path << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    if (!e.history().empty()) std::cerr << "  last relative residual " << e.history().back() << "\n";
    return kSolver;
  } catch (const InvalidRunError& e) {
    std::cerr << "invalid run: " << e.what() << "\n";
    return kInvalidRun;
  } catch (const FieldError& e) {
    std::cerr << "invalid run: " << e.what() << "\n";
    return kInvalidRun;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string scenarios;
  for (const auto& s : scenario_names()) scenarios += "  " + s + "\n";
  CLI::App app{"Pore-to-Darcy evaporation phase-field toolkit.\n\nScenarios:\n" + scenarios};
  std::string config_path, scenario, out_dir, batch_dir;
  bool check = false, schema = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "scenario name (overrides the config)");
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--batch", batch_dir, "run every *.json config in this directory")->check(CLI::ExistingDirectory);
  app.add_flag("--check", check, "validate the config and print the effective config");
  app.add_flag("--schema", schema, "print the JSON Schema of the config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  if (schema) {
    std::cout << config_schema();
    return kOk;
  }

  if (!batch_dir.empty()) {
    if (!config_path.empty()) {
      std::cerr << "--batch and --config are exclusive\n";
      return kConfig;
    }
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(batch_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") configs.push_back(e.path());
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
      std::cerr << "no *.json configs in " << batch_dir << "\n";
      return kConfig;
    }
    int worst = kOk;
    for (const auto& c : configs) {
      std::string text;
      try {
        text = read_file(c);
      } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        worst = std::max(worst, static_cast<int>(kConfig));
        continue;
      }
      // Each config writes to its own subdirectory, so outputs never collide.
      std::cout << "[" << c.filename().string() << "]\n";
      worst = std::max(worst, run_one(text, scenario, out_dir, check, c.stem().string()));
    }
    return worst;
  }

  if (config_path.empty() && scenario.empty()) {
    std::cerr << "need --config, --scenario or --batch\n\n" << app.help();
    return kConfig;
  }
  std::string text = "{}";
  if (!config_path.empty()) {
    try {
      text = read_file(config_path);
    } catch (const ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kConfig;
    }
  }
  return run_one(text, scenario, out_dir, check);
}
