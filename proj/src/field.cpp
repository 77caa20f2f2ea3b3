#include "evapore/field.hpp"

namespace evapore {

ScalarField ScalarField::sample(GeometryPtr g, const PointFunction& fn, Boundary b) {
  Eigen::VectorXd v(g->num_cells());
  for (Index c = 0; c < g->num_cells(); ++c) v[c] = fn(cell_center(*g, c));
  return ScalarField(std::move(g), std::move(v), b);
}

Eigen::Vector3d cell_center(const UnitCell& g, Index c) {
  const auto ijk = g.coords(c);
  const double h = g.cell_size();
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int a = 0; a < g.dim(); ++a) x[a] = (ijk[static_cast<std::size_t>(a)] + 0.5) * h;
  return x;
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!a.geom || !b.geom || !(a.geom == b.geom || a.geom->same_grid(*b.geom))) {
    throw FieldError(std::string(what) + ": fields live on different grids");
  }
}

bool in_region(const UnitCell& g, Index c, Region r) {
  switch (r) {
    case Region::Pore: return g.is_pore(c);
    case Region::Solid: return g.is_solid(c);
    case Region::Whole: return true;
  }
  return false;
}

}  // namespace evapore
