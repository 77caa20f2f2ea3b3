#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "evapore/grid.hpp"

namespace evapore {

/// Boundary treatment of a cell field.
///
/// Periodic fields live on the whole cell Y and ignore the solid mask. The two
/// solid variants live on the pore region P and see the solid through mirror
/// (zero normal gradient) or reflected (fixed value) ghost cells.
enum class Boundary { Periodic, ZeroGradientAtSolid, FixedValueAtSolid };

enum class Region { Pore, Solid, Whole };

/// Thrown when fields on different grids are combined or values are invalid.
class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A run that cannot continue meaningfully (overshoot, interface leaving the
/// domain, disk vanished). Reported with its own exit status by the CLI.
class InvalidRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PointFunction = std::function<double(const Eigen::Vector3d&)>;

struct ScalarField {
  GeometryPtr geom;
  Eigen::VectorXd values;
  Boundary bc = Boundary::ZeroGradientAtSolid;
  /// Wall value for FixedValueAtSolid.
  double solid_value = 0.0;
  std::string units;

  ScalarField() = default;
  ScalarField(GeometryPtr g, double value, Boundary b = Boundary::ZeroGradientAtSolid)
      : geom(std::move(g)), values(Eigen::VectorXd::Constant(geom->num_cells(), value)), bc(b) {}
  ScalarField(GeometryPtr g, Eigen::VectorXd v, Boundary b = Boundary::ZeroGradientAtSolid)
      : geom(std::move(g)), values(std::move(v)), bc(b) {
    if (values.size() != geom->num_cells()) throw FieldError("value array length does not match cell count");
  }

  /// Sample `fn` at cell centres (unused coordinates are zero).
  static ScalarField sample(GeometryPtr g, const PointFunction& fn, Boundary b = Boundary::ZeroGradientAtSolid);

  double operator[](Index c) const { return values[c]; }
  double& operator[](Index c) { return values[c]; }
  Index size() const { return values.size(); }
  bool on_whole_cell() const { return bc == Boundary::Periodic; }
  bool all_finite() const { return values.allFinite(); }
};

/// One d-vector per cell, stored as a (cells x d) matrix.
struct VectorField {
  GeometryPtr geom;
  Eigen::MatrixXd values;
  Boundary bc = Boundary::ZeroGradientAtSolid;

  VectorField() = default;
  explicit VectorField(GeometryPtr g, Boundary b = Boundary::ZeroGradientAtSolid)
      : geom(std::move(g)), values(Eigen::MatrixXd::Zero(geom->num_cells(), geom->dim())), bc(b) {}
};

/// Staggered normal components: normal[a][c] lives on the face between cell c
/// and its periodic neighbour at +1 along axis a.
struct FaceField {
  GeometryPtr geom;
  std::array<Eigen::VectorXd, 3> normal;

  FaceField() = default;
  explicit FaceField(GeometryPtr g) : geom(std::move(g)) {
    for (int a = 0; a < geom->dim(); ++a) normal[static_cast<std::size_t>(a)] = Eigen::VectorXd::Zero(geom->num_cells());
  }
  double& operator()(int axis, Index c) { return normal[static_cast<std::size_t>(axis)][c]; }
  double operator()(int axis, Index c) const { return normal[static_cast<std::size_t>(axis)][c]; }
};

/// Cell-centre position (unused coordinates are zero).
Eigen::Vector3d cell_center(const UnitCell& g, Index c);

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

/// Cells belonging to a region; a Periodic field is active everywhere.
bool in_region(const UnitCell& g, Index c, Region r);

}  // namespace evapore
