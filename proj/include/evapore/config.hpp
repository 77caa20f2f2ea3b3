#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evapore/constitutive.hpp"
#include "evapore/grid.hpp"

namespace evapore {

/// Every problem found while reading a config, one "path: message" entry each.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Initial liquid distribution on the micro geometry.
struct InitialPhase {
  /// "disk", "slab" or "uniform".
  std::string shape = "disk";
  Eigen::Vector3d center = Eigen::Vector3d(0.5, 0.5, 0.5);
  double radius = 0.25;
  double half_width = 0.25;
  int axis = 0;
  /// phi for "uniform".
  double value = 0.0;
  /// Relative amplitude of a seeded random perturbation of the disk radius.
  double noise = 0.0;
};

struct RunConfig {
  std::string scenario;
  std::string out = "out";
  std::uint64_t seed = 1;
  GeometrySpec geometry;
  ModelParams params;
  std::optional<ScaleSet> scales;
  InitialPhase initial;

  /// Explicit step; 0 picks dt_fraction * allen_cahn_dt_max.
  double dt = 0.0;
  double dt_fraction = 0.5;
  double t_end = 0.05;
  int steps = 100;
  /// Snapshot every this many steps (0: first and last only).
  int snapshot_every = 0;
  bool velocity = false;
  bool frozen_chi = false;
  double epsilon = 0.0;
  double refresh_threshold = 1e-3;
  double chi0 = 0.5;
  double T0 = 1.0;

  /// Grid study list: cells per lambda (relax-profile) or macro resolutions (darcy-sim).
  std::vector<int> resolutions;
  double R0 = 0.3;
  double chi_far = 0.0;
  int samples = 20;
  bool richardson = false;
  int macro_resolution = 2;
  /// Vapor fraction in the undersaturated half of the macro domain (two-scale).
  double chi_dry = 0.2;
  int seeds = 5;
};

/// The scenario names accepted by run_scenario.
const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

/// Defaults of a scenario (throws ConfigError for unknown names).
RunConfig scenario_defaults(const std::string& name);

/// Strict JSON parse: the scenario's defaults overlaid with the given values.
/// `scenario_override` replaces the "scenario" entry. All violations are
/// collected before throwing ConfigError; unknown keys are violations.
RunConfig parse_config(const std::string& text, const std::string& scenario_override = "");

/// Cross-field checks on an assembled config (empty when valid).
std::vector<std::string> config_violations(const RunConfig& cfg);

/// Effective config as JSON text; parse_config of the result reproduces `cfg`.
std::string config_echo(const RunConfig& cfg);

/// JSON Schema (draft 2020-12) of the config file, generated from the same
/// key table parse_config reads. Cross-field rules are checked in code only.
std::string config_schema();

/// Step actually used by phase-field runs.
double effective_dt(const RunConfig& cfg);

}  // namespace evapore
