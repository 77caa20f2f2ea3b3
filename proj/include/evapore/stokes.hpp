#pragma once

#include <array>
#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "evapore/field.hpp"
#include "evapore/operators.hpp"

namespace evapore {

/// Staggered (MAC) discretization of the compressible Stokes saddle point
///
///   -div(mu (grad v + grad v^T) + xi (div v) I) + grad p = f   in P
///   div(rho v) = s                                            in P
///   v = 0 on solid faces, periodic on the cell boundary, mean(p) = 0.
///
/// A face carries an unknown iff both adjacent cells are pore. Without any
/// solid the velocity means are pinned to zero and the mean force is reported.
class StokesOperator {
 public:
  StokesOperator(GeometryPtr geom, const Eigen::VectorXd& mu, const Eigen::VectorXd& xi, const Eigen::VectorXd& rho);

  struct Solution {
    FaceField velocity;
    ScalarField pressure;
    /// Mean body force removed when no solid anchors the flow (zero otherwise).
    Eigen::Vector3d projected_force = Eigen::Vector3d::Zero();
    /// Mean mass source removed for compatibility with periodicity.
    double projected_source = 0.0;
    double relative_residual = 0.0;
  };

  /// `force` is a cell-centred body force; `source` (may be empty) is s.
  Solution solve(const VectorField& force, const Eigen::VectorXd& source = Eigen::VectorXd()) const;

  /// Same, with the body force given directly on faces.
  Solution solve_faces(const FaceField& face_force, const Eigen::VectorXd& source = Eigen::VectorXd()) const;

  Index velocity_unknowns() const { return nu_; }
  const GeometryPtr& geometry() const { return geom_; }

 private:
  GeometryPtr geom_;
  std::array<std::vector<Index>, 3> face_unknown_;  // per axis, per cell: unknown index or -1
  std::vector<Index> pressure_unknown_;
  Index nu_ = 0;
  Index np_ = 0;
  Index total_ = 0;
  bool anchored_ = true;
  Index pressure_pin_ = -1;
  std::array<Index, 3> velocity_pin_{};
  std::array<Eigen::VectorXd, 3> null_modes_;
  Eigen::SparseMatrix<double> matrix_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Cell-centred velocity from face components (average of the two faces).
VectorField face_to_cell(const FaceField& F);

/// Cell-centred divergence of the capillary stress lambda*sigma grad(phi) x grad(phi).
VectorField capillary_force(const ScalarField& phi, double lambda, double sigma);

}  // namespace evapore
