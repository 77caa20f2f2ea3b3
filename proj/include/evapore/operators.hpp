#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "evapore/field.hpp"

namespace evapore {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Harmonic mean of two nonnegative coefficients (zero if either is zero).
template <typename Scalar>
Scalar harmonic_mean(Scalar a, Scalar b) {
  const Scalar s = a + b;
  return s > Scalar(0) ? Scalar(2) * a * b / s : Scalar(0);
}

/// Central-difference gradient. Solid neighbours of a pore cell act as mirror
/// ghosts (zero normal gradient) or reflected ghosts (fixed value); solid cells get 0.
VectorField gradient(const ScalarField& f);

/// Central-difference divergence of a cell vector field; the exact negative
/// adjoint of `gradient` for zero-gradient fields.
ScalarField divergence(const VectorField& F);

/// Divergence of staggered normal components (exact telescoping).
ScalarField divergence(const FaceField& F, Boundary bc = Boundary::ZeroGradientAtSolid);

/// Harmonic-mean face coefficients of a cell coefficient; faces leaving the
/// field's region carry 0. Throws naming the first nonpositive active cell.
FaceField face_coefficients(const ScalarField& coeff, Boundary bc);

/// Conservative flux-form div(coeff grad f).
ScalarField laplacian(const ScalarField& f, const ScalarField& coeff);

/// Midpoint-rule integral over a region.
double integrate(const ScalarField& f, Region region);
double integrate(const Eigen::VectorXd& values, const UnitCell& g, Region region);

/// Ratio of the largest jump across the periodic seam to the largest interior
/// jump; values far above 1 flag a non-periodic input.
double periodicity_residual(const ScalarField& f);

/// Index map between cells and unknowns of a region.
struct ActiveSet {
  std::vector<Index> cells;
  std::vector<Index> unknown;  // per cell, -1 if inactive
  Index size() const { return static_cast<Index>(cells.size()); }
};
ActiveSet active_set(const UnitCell& g, Region region);

/// Matrix of -div(k grad .) on the active set from face coefficients (zero
/// coefficient faces are closed), scaled by 1/h^2.
SparseMatrix assemble_diffusion(const UnitCell& g, const FaceField& faces, const ActiveSet& set);

}  // namespace evapore
