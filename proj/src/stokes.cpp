#include "evapore/stokes.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/LU>

#include "evapore/linear_solver.hpp"

namespace evapore {

namespace {

using Term = std::pair<Index, double>;
using LinComb = std::vector<Term>;

void add_scaled(LinComb& dst, const LinComb& src, double s) {
  for (const auto& [k, v] : src) dst.emplace_back(k, v * s);
}

}  // namespace

StokesOperator::StokesOperator(GeometryPtr geom, const Eigen::VectorXd& mu, const Eigen::VectorXd& xi,
                               const Eigen::VectorXd& rho)
    : geom_(std::move(geom)) {
  const UnitCell& g = *geom_;
  const int d = g.dim();
  if (d < 2) throw std::invalid_argument("Stokes solves need dim >= 2");
  if (g.pore_count() == 0) throw std::invalid_argument("Stokes solve on an all-solid geometry");
  anchored_ = g.has_solid();
  const double h = g.cell_size();
  const Index n = g.num_cells();

  for (int a = 0; a < d; ++a) {
    auto& fu = face_unknown_[static_cast<std::size_t>(a)];
    fu.assign(static_cast<std::size_t>(n), -1);
    for (Index c = 0; c < n; ++c) {
      if (g.is_pore(c) && g.is_pore(g.neighbor(c, a, 1))) fu[static_cast<std::size_t>(c)] = nu_++;
    }
  }
  pressure_unknown_.assign(static_cast<std::size_t>(n), -1);
  for (Index c = 0; c < n; ++c) {
    if (g.is_pore(c)) pressure_unknown_[static_cast<std::size_t>(c)] = nu_ + np_++;
  }
  total_ = nu_ + np_;
  // The operator has constant pressure (and, without solid, d velocity-like
  // modes) in its null space. One redundant row per mode is replaced by a pin
  // so the sparse factorization stays free of dense constraint rows.
  pressure_pin_ = -1;
  for (Index c = 0; c < n && pressure_pin_ < 0; ++c) pressure_pin_ = pressure_unknown_[static_cast<std::size_t>(c)];
  velocity_pin_.fill(-1);
  if (!anchored_) {
    for (int a = 0; a < d; ++a) velocity_pin_[static_cast<std::size_t>(a)] = face_unknown_[static_cast<std::size_t>(a)][0];
  }
  auto pinned = [&](Index row) {
    if (row == pressure_pin_) return true;
    return std::find(velocity_pin_.begin(), velocity_pin_.end(), row) != velocity_pin_.end();
  };

  auto fidx = [&](int a, Index c) { return face_unknown_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]; };
  auto pore = [&](Index c) { return g.is_pore(c); };

  // Normal stress sigma_aa at a pore cell as a combination of face unknowns.
  auto normal_stress = [&](Index c, int a) {
    LinComb s;
    for (int b = 0; b < d; ++b) {
      const double w = (b == a ? 2.0 * mu[c] : 0.0) + xi[c];
      if (w == 0.0) continue;
      const Index up = fidx(b, c);
      const Index dn = fidx(b, g.neighbor(c, b, -1));
      if (up >= 0) s.emplace_back(up, w / h);
      if (dn >= 0) s.emplace_back(dn, -w / h);
    }
    return s;
  };

  // d u_a / d x_b across the edge between face (c,a) and face (c+e_b,a).
  auto cross_derivative = [&](Index c, int a, int b) {
    LinComb s;
    const Index c1 = g.neighbor(c, b, 1);
    const Index f0 = fidx(a, c);
    const Index f1 = fidx(a, c1);
    if (f0 >= 0 && f1 >= 0) {
      s.emplace_back(f1, 1.0 / h);
      s.emplace_back(f0, -1.0 / h);
    } else if (f0 >= 0) {
      // Face (c1,a) is on or inside the wall: zero there, or mirrored when the wall lies midway.
      const bool inside = !pore(c1) && !pore(g.neighbor(c1, a, 1));
      s.emplace_back(f0, inside ? -2.0 / h : -1.0 / h);
    } else if (f1 >= 0) {
      const bool inside = !pore(c) && !pore(g.neighbor(c, a, 1));
      s.emplace_back(f1, inside ? 2.0 / h : 1.0 / h);
    }
    return s;
  };

  // Viscosity on the edge at c + (e_a + e_b)/2: harmonic mean over its pore cells.
  auto edge_mu = [&](Index c, int a, int b) {
    const Index cells[4] = {c, g.neighbor(c, a, 1), g.neighbor(c, b, 1), g.neighbor(g.neighbor(c, a, 1), b, 1)};
    double inv = 0.0;
    int count = 0;
    for (Index k : cells) {
      if (!pore(k)) continue;
      inv += 1.0 / mu[k];
      ++count;
    }
    return count > 0 ? count / inv : 0.0;
  };

  // Shear stress on the edge at c + (e_a + e_b)/2.
  auto shear_stress = [&](Index c, int a, int b) {
    LinComb s;
    const double m = edge_mu(c, a, b);
    if (m == 0.0) return s;
    add_scaled(s, cross_derivative(c, a, b), m);
    add_scaled(s, cross_derivative(c, b, a), m);
    return s;
  };

  std::vector<Eigen::Triplet<double>> trip;
  for (int a = 0; a < d; ++a) {
    for (Index c = 0; c < n; ++c) {
      const Index row = fidx(a, c);
      if (row < 0) continue;
      if (pinned(row)) {
        trip.emplace_back(row, row, 1.0);
        continue;
      }
      const Index cp = g.neighbor(c, a, 1);
      LinComb r;
      add_scaled(r, normal_stress(cp, a), -1.0 / h);
      add_scaled(r, normal_stress(c, a), 1.0 / h);
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        add_scaled(r, shear_stress(c, a, b), -1.0 / h);
        add_scaled(r, shear_stress(g.neighbor(c, b, -1), a, b), 1.0 / h);
      }
      for (const auto& [k, v] : r) trip.emplace_back(row, k, v);
      trip.emplace_back(row, pressure_unknown_[static_cast<std::size_t>(cp)], 1.0 / h);
      trip.emplace_back(row, pressure_unknown_[static_cast<std::size_t>(c)], -1.0 / h);
    }
  }
  for (Index c = 0; c < n; ++c) {
    const Index row = pressure_unknown_[static_cast<std::size_t>(c)];
    if (row < 0) continue;
    if (row == pressure_pin_) {
      trip.emplace_back(row, row, 1.0);
      continue;
    }
    for (int a = 0; a < d; ++a) {
      const Index dn = g.neighbor(c, a, -1);
      const Index fu = fidx(a, c);
      const Index fd = fidx(a, dn);
      if (fu >= 0) trip.emplace_back(row, fu, 0.5 * (rho[c] + rho[g.neighbor(c, a, 1)]) / h);
      if (fd >= 0) trip.emplace_back(row, fd, -0.5 * (rho[c] + rho[dn]) / h);
    }
  }
  matrix_.resize(total_, total_);
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->compute(matrix_);
  if (lu_->info() != Eigen::Success) throw SolverError("Stokes factorization failed: " + lu_->lastErrorMessage(), {});

  // Null modes selected by unit velocity pins, used to return the zero-mean velocity.
  if (!anchored_) {
    for (int a = 0; a < d; ++a) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(total_);
      e[velocity_pin_[static_cast<std::size_t>(a)]] = 1.0;
      null_modes_[static_cast<std::size_t>(a)] = lu_->solve(e);
    }
  }
}

StokesOperator::Solution StokesOperator::solve(const VectorField& force, const Eigen::VectorXd& source) const {
  const UnitCell& g = *geom_;
  FaceField ff(geom_);
  for (int a = 0; a < g.dim(); ++a) {
    for (Index c = 0; c < g.num_cells(); ++c) {
      ff(a, c) = 0.5 * (force.values(c, a) + force.values(g.neighbor(c, a, 1), a));
    }
  }
  return solve_faces(ff, source);
}

StokesOperator::Solution StokesOperator::solve_faces(const FaceField& face_force, const Eigen::VectorXd& source) const {
  const UnitCell& g = *geom_;
  const int d = g.dim();
  Solution sol;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(total_);
  for (int a = 0; a < d; ++a) {
    for (Index c = 0; c < g.num_cells(); ++c) {
      const Index k = face_unknown_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
      if (k >= 0) b[k] = face_force(a, c);
    }
  }
  if (source.size() == g.num_cells()) {
    for (Index c = 0; c < g.num_cells(); ++c) {
      const Index k = pressure_unknown_[static_cast<std::size_t>(c)];
      if (k >= 0) b[k] = source[c];
    }
  }
  // Periodicity makes the continuity rows sum to zero, so only a mean-free source is admissible.
  sol.projected_source = b.segment(nu_, np_).mean();
  b.segment(nu_, np_).array() -= sol.projected_source;
  if (!anchored_) {
    // Without solid the momentum rows of each axis also sum to zero: remove the mean force.
    for (int a = 0; a < d; ++a) {
      double sum = 0.0;
      Index count = 0;
      for (Index c = 0; c < g.num_cells(); ++c) {
        const Index k = face_unknown_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
        if (k < 0) continue;
        sum += b[k];
        ++count;
      }
      sol.projected_force[a] = sum / static_cast<double>(count);
      for (Index c = 0; c < g.num_cells(); ++c) {
        const Index k = face_unknown_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
        if (k >= 0) b[k] -= sol.projected_force[a];
      }
    }
  }
  const Eigen::VectorXd full_rhs = b;
  for (Index pin : velocity_pin_) {
    if (pin >= 0) b[pin] = 0.0;
  }
  b[pressure_pin_] = 0.0;

  Eigen::VectorXd x = lu_->solve(b);
  if (lu_->info() != Eigen::Success || !x.allFinite()) throw SolverError("Stokes back-substitution failed", {});
  if (!anchored_) {
    Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int a = 0; a < d; ++a) {
      const auto& fu = face_unknown_[static_cast<std::size_t>(a)];
      const double count = static_cast<double>(fu.size());
      for (Index k : fu) mean[a] += x[k] / count;
      for (int m = 0; m < d; ++m) {
        M(a, m) = 0.0;
        for (Index k : fu) M(a, m) += null_modes_[static_cast<std::size_t>(m)][k] / count;
      }
    }
    const Eigen::VectorXd alpha = M.topLeftCorner(d, d).partialPivLu().solve(mean.head(d));
    for (int m = 0; m < d; ++m) x -= alpha[m] * null_modes_[static_cast<std::size_t>(m)];
  }
  const double p_mean = x.segment(nu_, np_).mean();
  x.segment(nu_, np_).array() -= p_mean;

  const double bn = full_rhs.norm();
  // Pinned rows stand in for redundant equations and are left out of the residual.
  Eigen::VectorXd r = matrix_ * x - full_rhs;
  for (Index pin : velocity_pin_) {
    if (pin >= 0) r[pin] = 0.0;
  }
  r[pressure_pin_] = 0.0;
  sol.relative_residual = bn > 0.0 ? r.norm() / bn : r.norm();
  sol.velocity = FaceField(geom_);
  for (int a = 0; a < d; ++a) {
    for (Index c = 0; c < g.num_cells(); ++c) {
      const Index k = face_unknown_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
      if (k >= 0) sol.velocity(a, c) = x[k];
    }
  }
  sol.pressure = ScalarField(geom_, 0.0, Boundary::ZeroGradientAtSolid);
  for (Index c = 0; c < g.num_cells(); ++c) {
    const Index k = pressure_unknown_[static_cast<std::size_t>(c)];
    if (k >= 0) sol.pressure.values[c] = x[k];
  }
  return sol;
}

VectorField face_to_cell(const FaceField& F) {
  const UnitCell& g = *F.geom;
  VectorField out(F.geom);
  for (Index c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < g.dim(); ++a) out.values(c, a) = 0.5 * (F(a, c) + F(a, g.neighbor(c, a, -1)));
  }
  return out;
}

VectorField capillary_force(const ScalarField& phi, double lambda, double sigma) {
  const UnitCell& g = *phi.geom;
  const int d = g.dim();
  const VectorField grad = gradient(phi);
  VectorField out(phi.geom, phi.bc);
  // Row a of the stress, T_ab = lambda sigma d_a phi d_b phi, differentiated as a vector field.
  for (int a = 0; a < d; ++a) {
    VectorField row(phi.geom, phi.bc);
    for (Index c = 0; c < g.num_cells(); ++c) {
      for (int b = 0; b < d; ++b) row.values(c, b) = lambda * sigma * grad.values(c, a) * grad.values(c, b);
    }
    out.values.col(a) = divergence(row).values;
  }
  return out;
}

}  // namespace evapore
