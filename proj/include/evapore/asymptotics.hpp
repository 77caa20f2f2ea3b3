#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "evapore/constitutive.hpp"
#include "evapore/field.hpp"
#include "evapore/porescale.hpp"

namespace evapore {

/// Points of the level set phi = 1/2 with normals n = -grad phi / |grad phi|
/// (into the gas) and curvature div n interpolated from the cell values.
struct InterfaceTrace {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;
  std::vector<double> curvature;
  /// False where |grad phi| <= 0.1 max |grad phi|; curvature is NaN there.
  std::vector<bool> curvature_valid;
  /// Enclosed liquid measure (length, area or volume).
  double liquid_measure = 0.0;

  bool empty() const { return points.empty(); }
  /// Mean of the valid curvature samples (NaN when there are none).
  double mean_curvature() const;
};

/// Level-set extraction by linear interpolation between neighbouring cell
/// centres. In 2D the contour is polygonized by marching squares and the
/// liquid area is the shoelace sum over segments oriented with liquid on the
/// left; in 1D and 3D it is a line scan along axis 0. Edges that wrap around
/// the periodic boundary or touch solid are skipped.
InterfaceTrace extract_interface(const ScalarField& phi);

struct RelaxProfileResult {
  int cells = 0;
  double lambda = 0.0;
  double linf_error = 0.0;
  /// Discrete int (d phi / dz)^2 dz in inner units over one interface.
  double gradient_integral = 0.0;
  int steps = 0;
  Eigen::VectorXd x, relaxed, exact;
};

/// Relaxes a sharp liquid slab on a 1D periodic line with f = 0 until the
/// update stalls and compares with the closed-form profile.
RelaxProfileResult relax_profile_experiment(const ModelParams& p, int cells_per_lambda);

struct ShrinkDiskResult {
  double measured_rate = 0.0;
  double predicted_rate = 0.0;
  double relative_error = 0.0;
  std::vector<double> times, areas, mean_curvature;
  /// Richardson value 2 rate(dt/2) - rate(dt) and its error (NaN unless requested).
  double extrapolated_rate = std::numeric_limits<double>::quiet_NaN();
  double extrapolated_error = std::numeric_limits<double>::quiet_NaN();
};

/// Disk of radius R0 at the cell centre, chi = chi_sat, v = 0, run with
/// allen_cahn_step until the area has dropped by 25%. The least-squares slope
/// of area over time is compared with -4 pi gamma / (nu (rho_l + rho_g)).
/// Throws InvalidRunError if the disk vanishes or comes within 3 lambda of
/// the cell boundary. The explicit double-well term makes the front speed
/// first order in dt (about 14% slow at dt_max), hence the small default step;
/// `richardson` repeats the run at dt/2 and extrapolates the rate to dt -> 0.
ShrinkDiskResult shrink_disk_experiment(const ModelParams& p, double R0, int resolution, double dt_fraction = 0.1,
                                        bool richardson = false);

struct PlanarEvaporationConfig {
  ModelParams params;
  double chi_far = 0.0;
  int resolution = 400;
  /// Hold chi fixed at chi_far everywhere (decoupled mode).
  bool frozen_chi = true;
  /// Displacement target; the run ends at 0.1 / |predicted speed| or t_end, whichever is first.
  double t_end = 0.05;
  int samples = 20;
  /// Time step as a fraction of allen_cahn_dt_max.
  double dt_fraction = 0.1;
};

struct PlanarEvaporationResult {
  std::vector<double> times, positions;
  /// Front speed (centered differences between samples), positive when the liquid grows.
  std::vector<double> measured_speed, predicted_speed, relative_error;
  double mean_measured = 0.0, mean_predicted = 0.0;
  std::vector<PoreState> snapshots;
};

/// Liquid slab on a 1D line (interfaces at 0.25 and 0.75); tracks the front at
/// 0.75 with liquid on its low side. The prediction is 2 f(chi_i) / (rho_l + rho_g)
/// with chi_i sampled one lambda into the gas.
PlanarEvaporationResult planar_evaporation_experiment(const PlanarEvaporationConfig& cfg);

/// Residuals of the front balances [[F]] = v_n [[q]] (gas side minus liquid
/// side) for the conserved densities q of the model and their fluxes F. With
/// pure phases on both sides these are the sharp mass, vapor and heat
/// transmission conditions.
struct JumpAuditSample {
  double t = 0.0;
  double front_speed = 0.0;
  /// q = rho, F = rho v.
  double phase_mass = 0.0;
  /// q = rho_l phi + rho_g (1 - phi) chi, F = q v - D rho_g (1 - phi) d_n chi.
  double water_mass = 0.0;
  /// q = rho c T, F = q v - k d_n T.
  double heat_flux = 0.0;
  /// Largest |v.n| sampled at the one-sided points.
  double velocity_terms = 0.0;
};

struct JumpAuditReport {
  std::vector<JumpAuditSample> samples;
  /// Mean of each normalized residual over the second half of the samples,
  /// after the start-up layer (no vapor gradient yet at t = 0) has formed.
  double phase_mass = 0.0, water_mass = 0.0, heat_flux = 0.0;
  /// Max over all samples.
  double velocity_terms = 0.0;
};

/// One-sided limits at x_front -/+ 3 lambda along the planar front of a 1D
/// trajectory; each residual is divided by the largest term in its balance,
/// but never by less than 1e-9 R (and is 0 when every term is below 1e-14). The front speed comes from
/// centered differences of the front positions.
JumpAuditReport jump_condition_audit(const std::vector<PoreState>& snapshots, const ModelParams& p);

/// Front position of a 1D field: the first down-crossing of phi = 1/2 after
/// the first up-crossing (the 0.75 front of a centred slab).
double planar_front_position(const ScalarField& phi);

}  // namespace evapore
