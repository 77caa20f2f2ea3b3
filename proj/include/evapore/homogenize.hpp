#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "evapore/constitutive.hpp"
#include "evapore/field.hpp"
#include "evapore/stokes.hpp"

namespace evapore {

/// Discrete series-parallel bounds on a directional effective coefficient.
/// `lower` restricts the flux to straight lines along the direction, `upper`
/// restricts the potential to vary only along it; both are exact for
/// laminates and imply the Wiener (harmonic / arithmetic mean) bounds.
struct DirectionalBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Solution of -div(c (e_j + grad corr_j)) = 0 for each direction j, with
/// the region fixed by the coefficient's boundary type (pore only, or the
/// whole cell for Periodic).
struct ScalarCellResult {
  std::vector<ScalarField> correctors;
  Eigen::MatrixXd tensor;
  /// max |T - T^T| / max |T| before symmetrization.
  double asymmetry = 0.0;
  std::vector<double> residuals;
  std::vector<DirectionalBounds> bounds;
  bool bounds_ok = true;
};

ScalarCellResult scalar_cell_problem(const ScalarField& coeff);

/// Vapor diffusion: coefficient D rho (1 - phi0)_+ over the pore, floored at 1e-6 max.
ScalarCellResult cell_diffusion(const ScalarField& phi0, double rho_g0, double D_gv);

/// Conduction over the whole cell with k0 in the pore and kS in the solid.
ScalarCellResult cell_conduction(const ScalarField& k0, double kS);

struct FlowCellResult {
  std::vector<FaceField> velocity;
  std::vector<ScalarField> pressure;
  Eigen::MatrixXd tensor;
  double asymmetry = 0.0;
  std::vector<double> residuals;
};

/// Permeability correctors w^j and K_ij = int_P w_i^j. Needs solid for no-slip.
FlowCellResult cell_permeability(const ScalarField& mu0, const ScalarField& xi0, const ScalarField& rho0);

struct ForcingCellResult {
  FaceField velocity;
  ScalarField pressure;
  Eigen::VectorXd G;
  double residual = 0.0;
};

/// Drift corrector w0 driven by rho0 g and the capillary stress of phi0;
/// `drho_dt` (may be empty) is the compressibility source.
ForcingCellResult cell_forcing(const ScalarField& phi0, const ModelParams& p,
                               const Eigen::VectorXd& drho_dt = Eigen::VectorXd());

struct EffectiveTensors {
  Eigen::MatrixXd D, K, A;
  Eigen::VectorXd G;
  std::string geometry_hash;
  std::map<std::string, double> residuals;
  double K_asymmetry = 0.0;
};

/// Flow correctors kept for reconstructing the micro velocity -w0 - sum_j w^j d_j p0.
struct FlowCorrectors {
  FaceField w0;
  std::vector<FaceField> w;
};

/// All four cell problems for a cell state phi0 (liquid indicator on the pore).
EffectiveTensors effective_tensors(const ScalarField& phi0, const ModelParams& p, FlowCorrectors* flow = nullptr);

/// Plain-text tensor listing with a geometry hash header.
std::string format_tensors(const EffectiveTensors& t);

/// Integral of face values along `axis` (sum of face values times the cell volume).
double face_integral(const FaceField& F, int axis);

}  // namespace evapore
