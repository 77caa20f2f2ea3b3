#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace evapore {

/// Physical and phase-field constants. Defaults are a nondimensional set in
/// the diffusion-dominated regime.
struct ModelParams {
  double rho_l = 1.0, rho_g = 1.0;
  double mu_l = 1.0, mu_g = 1.0;
  double xi_l = 0.0, xi_g = 0.0;
  double k_l = 1.0, k_g = 1.0, k_S = 1.0;
  double c_l = 1.0, c_g = 1.0, c_pS = 1.0;
  double D_gv = 1.0;
  double sigma = 1.0;
  double lambda = 0.05;
  double gamma = 1.0;
  double nu = 1.0;
  double R = 1.0;
  double chi_sat = 0.5;
  double rho_S = 1.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();

  /// Optional temperature-dependent saturation law; chi_sat is used when empty.
  std::function<double(double)> chi_sat_law;

  double saturation(double T) const { return chi_sat_law ? chi_sat_law(T) : chi_sat; }

  /// Every violated invariant, one message per field (empty when valid).
  std::vector<std::string> violations() const;
  /// Throws std::invalid_argument listing all violations.
  void validate() const;
};

/// Double-well potential P = phi^2 (1-phi)^2 and its derivative.
template <typename Scalar>
std::pair<Scalar, Scalar> double_well(Scalar phi) {
  const Scalar q = phi * (Scalar(1) - phi);
  return {q * q, Scalar(2) * q * (Scalar(1) - Scalar(2) * phi)};
}

template <typename Scalar>
Scalar double_well_second(Scalar phi) {
  return Scalar(2) - Scalar(12) * phi + Scalar(12) * phi * phi;
}

/// Evaporation rate f = R ((chi/chi_sat)^2 - 1); negative (undersaturated gas) drives evaporation.
template <typename Scalar>
Scalar evaporation_rate(Scalar chi, const ModelParams& p, double chi_sat) {
  const Scalar r = chi / Scalar(chi_sat);
  return Scalar(p.R) * (r * r - Scalar(1));
}

template <typename Scalar>
Scalar evaporation_rate(Scalar chi, const ModelParams& p) {
  return evaporation_rate(chi, p, p.chi_sat);
}

template <typename Scalar>
Scalar clamp_unit(Scalar phi) {
  return std::clamp(phi, Scalar(0), Scalar(1));
}

template <typename Scalar>
struct MixtureProperties {
  Scalar rho, mu, xi, k, c;
  /// How far the argument lay outside [0, 1] before clamping.
  Scalar overshoot;
};

/// Linear mixture rules evaluated at phi clamped to [0, 1].
template <typename Scalar>
MixtureProperties<Scalar> mixture(Scalar phi, const ModelParams& p) {
  const Scalar s = clamp_unit(phi);
  auto lerp = [s](double liquid, double gas) { return s * Scalar(liquid) + (Scalar(1) - s) * Scalar(gas); };
  return {lerp(p.rho_l, p.rho_g), lerp(p.mu_l, p.mu_g), lerp(p.xi_l, p.xi_g), lerp(p.k_l, p.k_g),
          lerp(p.c_l, p.c_g), std::abs(phi - s)};
}

template <typename Scalar>
Scalar mixture_density(Scalar phi, const ModelParams& p) {
  const Scalar s = clamp_unit(phi);
  return s * Scalar(p.rho_l) + (Scalar(1) - s) * Scalar(p.rho_g);
}

/// Mixture internal energy per unit mass with linear calorific EOS u_a = c_a T.
template <typename Scalar>
Scalar internal_energy(Scalar phi, Scalar T, const ModelParams& p) {
  const Scalar s = clamp_unit(phi);
  return (s * Scalar(p.c_l) + (Scalar(1) - s) * Scalar(p.c_g)) * T;
}

template <typename Scalar>
Scalar enthalpy(Scalar phi, Scalar T, Scalar pressure, Scalar rho, const ModelParams& p) {
  return internal_energy(phi, T, p) + pressure / rho;
}

/// Density energy rho F = -sqrt2 nu f(chi) (phi^2/2 - phi^3/3), normalized by F(0) = 0.
template <typename Scalar>
Scalar density_energy(Scalar phi, Scalar f, const ModelParams& p) {
  return -std::sqrt(Scalar(2)) * Scalar(p.nu) * f * (phi * phi / Scalar(2) - phi * phi * phi / Scalar(3));
}

/// Reference scales for the nondimensional audit.
struct ScaleSet {
  double t_ref = 1, L = 1, l = 0.1, rho_ref = 1, V_ref = 1, p_ref = 1, mu_ref = 1, xi_ref = 1, D_ref = 1,
         lambda_ref = 1, sigma_ref = 1, g_ref = 1, gamma_ref = 1, nu_ref = 1, u_ref = 1, k_ref = 1, T_ref = 1,
         c_ref = 1, R_ref = 1;
  double epsilon() const { return l / L; }
  std::vector<std::string> violations() const;
};

struct DimensionlessNumber {
  std::string name;
  double value = 0.0;
  int target_order = 0;
  /// value / eps^target_order; passes inside [0.1, 10].
  double ratio = 0.0;
  bool pass = false;
};

struct DimensionlessReport {
  double epsilon = 0.0;
  std::vector<DimensionlessNumber> numbers;
  bool all_pass() const {
    return std::all_of(numbers.begin(), numbers.end(), [](const auto& n) { return n.pass; });
  }
  const DimensionlessNumber& at(const std::string& name) const;
};

DimensionlessReport dimensionless_audit(const ScaleSet& scales);

/// Scales that place every number exactly on its target order.
ScaleSet regime_scales(double epsilon);

}  // namespace evapore
