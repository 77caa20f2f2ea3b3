#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "evapore/constitutive.hpp"
#include "evapore/field.hpp"
#include "evapore/linear_solver.hpp"

namespace evapore {

struct PhaseFieldState {
  ScalarField phi;
  double t = 0.0;
  /// max(phi - 1, -phi, 0) over the pore cells after the last step.
  double overshoot = 0.0;
  int last_iterations = 0;
};

struct AllenCahnOptions {
  double rel_tol = 1e-11;
  double max_overshoot = 0.1;
  /// See LinearSystem::order_independent.
  bool order_independent = false;
};

/// Largest dt accepted by allen_cahn_step: 0.4 lambda^2 nu min(rho) / gamma.
double allen_cahn_dt_max(const ModelParams& p);

/// Warning text when lambda/h < 4 (empty otherwise).
std::string resolution_warning(const ModelParams& p, const UnitCell& g);

/// Signed overshoot measure max(phi - 1, -phi, 0) over the pore.
double phase_overshoot(const ScalarField& phi);

/// One semi-implicit step of
///   rho(phi) (d_t phi + div(phi v)) = (gamma/nu)(lap phi - P'(phi)/lambda^2) + sqrt2/lambda phi(1-phi) f(chi)
/// with the Laplacian implicit, everything else explicit and rho lagged.
/// `v` holds face velocities (nullptr for v = 0). When `T` is given the
/// saturation law is evaluated at the local temperature.
PhaseFieldState allen_cahn_step(const PhaseFieldState& state, const FaceField* v, const ScalarField& chi, double dt,
                                const ModelParams& p, const AllenCahnOptions& opt = {},
                                const ScalarField* T = nullptr);

/// Reaction source sqrt2/lambda phi(1-phi) f(chi) per pore cell.
Eigen::VectorXd reaction_source(const ScalarField& phi, const ScalarField& chi, const ModelParams& p,
                                const ScalarField* T = nullptr);

/// Closed-form equilibrium profile 1/2 (1 - tanh(s / (sqrt2 lambda))) of a signed distance s (liquid at s < 0).
template <typename Scalar>
Scalar equilibrium_value(Scalar s, Scalar lambda) {
  return Scalar(0.5) * (Scalar(1) - std::tanh(s / (std::sqrt(Scalar(2)) * lambda)));
}

/// Planar profile along `axis` with the interface at x0 and liquid on the low side.
ScalarField equilibrium_profile(GeometryPtr g, double lambda, double x0, int axis = 0);

/// Liquid slab |x_axis - center| < half_width with two tanh interfaces (periodic images included).
ScalarField slab_profile(GeometryPtr g, double lambda, double center, double half_width, int axis = 0);

/// Liquid disk/sphere of radius R at `center`.
ScalarField disk_profile(GeometryPtr g, double lambda, const Eigen::Vector3d& center, double R);

/// Midpoint sum of (d phi / dz)^2 dz in inner units z = x / lambda along a
/// single interface. Both end values must sit in the wells (within 1e-3).
double gradient_energy_integral(const Eigen::VectorXd& values, double h, double lambda);
double gradient_energy_integral(const ScalarField& phi1d, double lambda);

}  // namespace evapore
