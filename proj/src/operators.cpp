#include "evapore/operators.hpp"

#include <cmath>
#include <sstream>

namespace evapore {

namespace {

bool active(const UnitCell& g, Index c, Boundary bc) { return bc == Boundary::Periodic || g.is_pore(c); }

// Ghost value seen from active cell c when its neighbour m is outside the field's region.
double ghost(const ScalarField& f, Index c, Index m) {
  if (active(*f.geom, m, f.bc)) return f.values[m];
  if (f.bc == Boundary::FixedValueAtSolid) return 2.0 * f.solid_value - f.values[c];
  return f.values[c];
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  const UnitCell& g = *f.geom;
  VectorField out(f.geom, f.bc);
  const double inv2h = 0.5 / g.cell_size();
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!active(g, c, f.bc)) continue;
    for (int a = 0; a < g.dim(); ++a) {
      const double up = ghost(f, c, g.neighbor(c, a, 1));
      const double dn = ghost(f, c, g.neighbor(c, a, -1));
      out.values(c, a) = (up - dn) * inv2h;
    }
  }
  return out;
}

ScalarField divergence(const VectorField& F) {
  const UnitCell& g = *F.geom;
  ScalarField out(F.geom, 0.0, F.bc);
  const double inv2h = 0.5 / g.cell_size();
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!active(g, c, F.bc)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Index up = g.neighbor(c, a, 1);
      const Index dn = g.neighbor(c, a, -1);
      // Antisymmetric ghost: the reflected normal component changes sign at a wall.
      const double fu = active(g, up, F.bc) ? F.values(up, a) : -F.values(c, a);
      const double fd = active(g, dn, F.bc) ? F.values(dn, a) : -F.values(c, a);
      s += (fu - fd) * inv2h;
    }
    out.values[c] = s;
  }
  return out;
}

ScalarField divergence(const FaceField& F, Boundary bc) {
  const UnitCell& g = *F.geom;
  ScalarField out(F.geom, 0.0, bc);
  const double invh = 1.0 / g.cell_size();
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!active(g, c, bc)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += (F(a, c) - F(a, g.neighbor(c, a, -1))) * invh;
    out.values[c] = s;
  }
  return out;
}

FaceField face_coefficients(const ScalarField& coeff, Boundary bc) {
  const UnitCell& g = *coeff.geom;
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!active(g, c, bc)) continue;
    if (!(coeff.values[c] > 0.0) || !std::isfinite(coeff.values[c])) {
      const auto ijk = g.coords(c);
      std::ostringstream msg;
      msg << "nonpositive coefficient " << coeff.values[c] << " at cell " << c << " (" << ijk[0] << "," << ijk[1]
          << "," << ijk[2] << ")";
      throw FieldError(msg.str());
    }
  }
  FaceField faces(coeff.geom);
  for (Index c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < g.dim(); ++a) {
      const Index m = g.neighbor(c, a, 1);
      if (active(g, c, bc) && active(g, m, bc)) faces(a, c) = harmonic_mean(coeff.values[c], coeff.values[m]);
    }
  }
  return faces;
}

ScalarField laplacian(const ScalarField& f, const ScalarField& coeff) {
  require_same_grid(f, coeff, "laplacian");
  const UnitCell& g = *f.geom;
  const FaceField k = face_coefficients(coeff, f.bc);
  const double invh2 = 1.0 / (g.cell_size() * g.cell_size());
  ScalarField out(f.geom, 0.0, f.bc);
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!active(g, c, f.bc)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Index up = g.neighbor(c, a, 1);
      const Index dn = g.neighbor(c, a, -1);
      s += k(a, c) * (f.values[up] - f.values[c]);
      s -= k(a, dn) * (f.values[c] - f.values[dn]);
      if (f.bc == Boundary::FixedValueAtSolid) {
        // Wall flux through the half cell next to a fixed-value solid.
        if (!active(g, up, f.bc)) s += 2.0 * coeff.values[c] * (f.solid_value - f.values[c]);
        if (!active(g, dn, f.bc)) s += 2.0 * coeff.values[c] * (f.solid_value - f.values[c]);
      }
    }
    out.values[c] = s * invh2;
  }
  return out;
}

double integrate(const Eigen::VectorXd& values, const UnitCell& g, Region region) {
  double s = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (in_region(g, c, region)) s += values[c];
  }
  return s * g.cell_volume();
}

double integrate(const ScalarField& f, Region region) { return integrate(f.values, *f.geom, region); }

double periodicity_residual(const ScalarField& f) {
  const UnitCell& g = *f.geom;
  const int n = g.resolution();
  double seam = 0.0, interior = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    const auto ijk = g.coords(c);
    for (int a = 0; a < g.dim(); ++a) {
      const Index m = g.neighbor(c, a, 1);
      if (!active(g, c, f.bc) || !active(g, m, f.bc)) continue;
      const double jump = std::abs(f.values[m] - f.values[c]);
      if (ijk[static_cast<std::size_t>(a)] == n - 1) {
        seam = std::max(seam, jump);
      } else {
        interior = std::max(interior, jump);
      }
    }
  }
  if (interior == 0.0) return seam == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return seam / interior;
}

ActiveSet active_set(const UnitCell& g, Region region) {
  ActiveSet set;
  set.unknown.assign(static_cast<std::size_t>(g.num_cells()), -1);
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!in_region(g, c, region)) continue;
    set.unknown[static_cast<std::size_t>(c)] = set.size();
    set.cells.push_back(c);
  }
  return set;
}

SparseMatrix assemble_diffusion(const UnitCell& g, const FaceField& faces, const ActiveSet& set) {
  const double invh2 = 1.0 / (g.cell_size() * g.cell_size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(set.size()) * static_cast<std::size_t>(2 * g.dim() + 1));
  for (Index row = 0; row < set.size(); ++row) {
    const Index c = set.cells[static_cast<std::size_t>(row)];
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      for (int s : {1, -1}) {
        const Index m = g.neighbor(c, a, s);
        const double k = s > 0 ? faces(a, c) : faces(a, m);
        const Index col = set.unknown[static_cast<std::size_t>(m)];
        if (k == 0.0 || col < 0) continue;
        diag += k * invh2;
        trip.emplace_back(row, col, -k * invh2);
      }
    }
    trip.emplace_back(row, row, diag);
  }
  SparseMatrix A(set.size(), set.size());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace evapore
