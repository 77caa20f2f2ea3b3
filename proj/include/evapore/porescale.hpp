#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evapore/constitutive.hpp"
#include "evapore/field.hpp"
#include "evapore/phasefield.hpp"
#include "evapore/stokes.hpp"

namespace evapore {

/// Pore-scale state. `T` lives on the whole cell: pore cells hold the fluid
/// temperature, solid cells the solid temperature T_S.
struct PoreState {
  ScalarField phi;
  ScalarField chi;
  ScalarField T;
  FaceField v;
  ScalarField p;
  double t = 0.0;

  /// Largest correction applied when clipping chi back into [0, 1] in gas-bearing cells.
  double chi_clip = 0.0;
  /// Pore cells where the vapor fraction is undefined (nearly pure liquid) in the last vapor step.
  Index chi_undefined_cells = 0;

  GeometryPtr geom() const { return phi.geom; }
  /// Temperature restricted to the solid (zero in pore cells).
  Eigen::VectorXd solid_temperature() const;
};

/// Build a state with v = 0, p = 0 on the geometry of `phi`.
PoreState make_pore_state(const ScalarField& phi, double chi, double T);

struct EnergyBreakdown {
  double kinetic = 0.0;
  double well = 0.0;
  double gradient = 0.0;
  /// Fluid internal energy over P.
  double internal = 0.0;
  /// Solid internal energy over S.
  double solid = 0.0;
  double density_energy = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy_functional(const PoreState& s, const ModelParams& p);

/// Gas fraction floor used in the vapor accumulation and diffusion coefficients.
inline constexpr double kGasFloor = 1e-6;
/// Cells with phi above this are treated as liquid where chi is undefined.
inline constexpr double kLiquidThreshold = 0.99;

/// Implicit vapor step; `next` carries phi at the new level, `prev` the old phi and chi.
void vapor_step(const PoreState& prev, PoreState& next, double dt, const ModelParams& p);

/// Volume sum of (rho_new - rho_old)/dt + div(rho v) over P.
double mixture_mass_audit(const PoreState& old_state, const PoreState& new_state, double dt, const ModelParams& p);

/// Implicit conjugate heat step over Y. `heat_source` (per cell, may be null) is
/// an optional volumetric source used by verification runs.
void energy_step(const PoreState& prev, PoreState& next, double dt, const ModelParams& p,
                 const Eigen::VectorXd* heat_source = nullptr);

struct StokesDiagnostics {
  Eigen::Vector3d projected_force = Eigen::Vector3d::Zero();
  double projected_source = 0.0;
  double relative_residual = 0.0;
};

/// Quasi-static momentum: updates next.v and next.p. The mass source is
/// -(rho(next.phi) - rho(prev.phi))/dt (pass dt <= 0 for a zero source).
StokesDiagnostics stokes_quasistatic(const PoreState& prev, PoreState& next, double dt, const ModelParams& p);

struct PoreRunConfig {
  ModelParams params;
  double dt = 0.0;
  int steps = 0;
  /// Keep a snapshot every this many steps (0: first and last only).
  int snapshot_every = 0;
  bool velocity = false;
  /// Hold chi fixed (decoupled mode for front-speed checks).
  bool frozen_chi = false;
  /// Run the heat step before the vapor step.
  bool energy_before_vapor = false;
  AllenCahnOptions allen_cahn;
};

struct PoreTrajectory {
  std::vector<PoreState> snapshots;
  std::vector<double> times;
  std::vector<EnergyBreakdown> energy;
  std::vector<double> liquid_volume;
  std::vector<double> mean_chi;
  std::vector<double> mass_residual;
  /// Steps with E(t_{n+1}) > E(t_n) + 1e-8 |E(t_0)|.
  int monotonicity_violations = 0;
  double max_overshoot = 0.0;
  Index max_chi_undefined_cells = 0;
  PoreState final_state;
};

/// Splitting phi -> chi -> T -> (v) for `steps` steps.
PoreTrajectory pore_simulate(const PoreState& initial, const PoreRunConfig& cfg);

}  // namespace evapore
