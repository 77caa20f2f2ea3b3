#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evapore/constitutive.hpp"
#include "evapore/field.hpp"
#include "evapore/homogenize.hpp"

namespace evapore {

/// Per macro cell quantities derived from the micro state (all per unit cell volume).
struct MacroCoefficients {
  /// Liquid fraction int_P phi0.
  Eigen::VectorXd liquid;
  /// Vapor capacity rho_g int_P (1 - phi0)_+, floored at 1e-6 rho_g |P|.
  Eigen::VectorXd gas_capacity;
  /// Total heat capacity int_P rho c + |S| rho_S c_pS.
  Eigen::VectorXd heat_capacity;
  /// Fluid part int_P rho c.
  Eigen::VectorXd fluid_heat_capacity;
  Eigen::VectorXd porosity;
};

/// Coefficients of one cell state (phi0 on the pore of its micro geometry).
void micro_coefficients(const ScalarField& phi0, const ModelParams& p, MacroCoefficients& out, Index cell);

struct DarcyState {
  /// Macro grid: a solid-free periodic cell, one macro cell per grid cell.
  GeometryPtr grid;
  MacroCoefficients coeff;
  Eigen::VectorXd rho_bar;
  Eigen::VectorXd chi;
  Eigen::VectorXd T;
  Eigen::VectorXd p;
  /// Averaged velocity per macro cell (cells x d).
  Eigen::MatrixXd v;
  std::vector<Eigen::MatrixXd> D, K, A;
  std::vector<Eigen::VectorXd> G;
  double t = 0.0;

  Index size() const { return rho_bar.size(); }
  /// Macro integral of the vapor density gas_capacity * chi.
  double vapor_mass() const;
};

/// Solid-free periodic macro grid of n cells per axis on the unit domain (any n >= 1).
GeometryPtr make_macro_grid(int dim, int n);

/// Uniform state with the same tensors and coefficients in every macro cell.
DarcyState uniform_darcy_state(GeometryPtr grid, const MacroCoefficients& one_cell, const Eigen::MatrixXd& D,
                               const Eigen::MatrixXd& K, const Eigen::MatrixXd& A, const Eigen::VectorXd& G,
                               double rho_bar, double chi, double T);

/// Single-cell coefficient set with the given values.
MacroCoefficients constant_coefficients(double liquid, double gas_capacity, double heat_capacity,
                                        double fluid_heat_capacity, double porosity);

struct DarcySources {
  /// Volumetric sources evaluated at the new time level (may be empty).
  std::function<double(const Eigen::Vector3d&, double)> vapor, heat;
};

/// Leading-order step: rho_bar fixed; implicit conservative updates
///   (m chi)^{n+1} - (m chi)^n + rho_l (liquid^{n+1} - liquid^n) = dt div(D grad chi^{n+1}) + dt s_v
///   (C T)^{n+1} - (C T)^n = dt div(A grad T^{n+1}) + dt s_T.
/// `next` carries the coefficients at the new level (defaults to the old ones).
DarcyState darcy_step_leading(const DarcyState& s, double dt, const ModelParams& p,
                              const MacroCoefficients* next = nullptr, const DarcySources* src = nullptr);

/// Adds eps-weighted upwind convective fluxes with the current s.v to the
/// mass, vapor and energy balances (separable closure of averaged products).
DarcyState darcy_step_first_order(const DarcyState& s, double dt, double eps, const ModelParams& p,
                                  const MacroCoefficients* next = nullptr, const DarcySources* src = nullptr);

/// eps div(q v) per macro cell for the transported densities rho_bar, total water and fluid heat.
struct ConvectiveTerms {
  Eigen::VectorXd mass, water, heat;
};
ConvectiveTerms convective_terms(const DarcyState& s, double eps, const ModelParams& p);

/// vbar = -K grad p - G with the centered periodic pressure gradient.
Eigen::MatrixXd darcy_velocity(const DarcyState& s);

/// Pressure compatible with a steady rho_bar: div(rho_bar K grad p) = -div(rho_bar G), zero mean.
Eigen::VectorXd solve_macro_pressure(const DarcyState& s);

/// Manufactured-solution study for the leading-order vapor equation in 1D:
/// chi = exp(-t) cos(2 pi x), D = dbar, unit capacity, dt = h^2 / 4, final time 0.1.
struct MmsStudy {
  std::vector<int> resolutions;
  std::vector<double> l2_errors;
  std::vector<double> orders;
};
MmsStudy darcy_mms_study(const std::vector<int>& resolutions, double dbar = 0.1);

struct TwoScaleConfig {
  ModelParams params;
  GeometryPtr macro_grid;
  GeometryPtr micro_geometry;
  /// Initial phi0 on the micro geometry for the macro cell centred at x.
  std::function<ScalarField(const Eigen::Vector3d&)> initial_phi;
  std::function<double(const Eigen::Vector3d&)> initial_chi;
  double T0 = 1.0;
  double dt = 0.0;
  int steps = 0;
  double epsilon = 0.0;
  /// Tensors are recomputed (and counted in tensor_refreshes) when the L1 change of phi0 since the last refresh exceeds this.
  double refresh_threshold = 1e-3;
};

struct TwoScaleTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> liquid, chi, T, rho_bar;
  /// Macro vapor mass and cumulative liquid-to-vapor exchange -rho_l (liquid - liquid_0), per recorded time.
  std::vector<double> vapor_mass, exchange;
  /// |change in vapor - exchange| / |exchange| over the run (0 when nothing evaporated).
  double audit_error = 0.0;
  int tensor_refreshes = 0;
  /// The averaged-product closure used by the eps terms.
  std::string closure = "separable";
  DarcyState final_state;
  std::vector<ScalarField> final_phi;
};

TwoScaleTrajectory two_scale_run(const TwoScaleConfig& cfg);

}  // namespace evapore
