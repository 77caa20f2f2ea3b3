#include "evapore/homogenize.hpp"

#include <iomanip>
#include <sstream>

#include "evapore/linear_solver.hpp"
#include "evapore/operators.hpp"

namespace evapore {

namespace {

constexpr double kCellTol = 1e-11;

double asymmetry_of(const Eigen::MatrixXd& T) {
  const double scale = T.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (T - T.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
}

DirectionalBounds directional_bounds(const UnitCell& g, const FaceField& faces, int j) {
  const double h = g.cell_size();
  const double cross = g.cell_volume() / h;
  DirectionalBounds b;
  // Lines along j: uniform flux through a chain of face resistances.
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.coords(c)[static_cast<std::size_t>(j)] != 0) continue;
    double resistance = 0.0;
    bool open = true;
    Index k = c;
    for (int s = 0; s < g.resolution(); ++s, k = g.neighbor(k, j, 1)) {
      const double cf = faces(j, k);
      if (cf <= 0.0) {
        open = false;
        break;
      }
      resistance += h / cf;
    }
    if (open) b.lower += cross / resistance;
  }
  // Layers normal to j: potential drops only between layers.
  double inv_sum = 0.0;
  bool blocked = false;
  std::vector<double> layer(static_cast<std::size_t>(g.resolution()), 0.0);
  for (Index c = 0; c < g.num_cells(); ++c) {
    layer[static_cast<std::size_t>(g.coords(c)[static_cast<std::size_t>(j)])] += faces(j, c) * cross / h;
  }
  for (double L : layer) {
    if (L <= 0.0) blocked = true;
    else inv_sum += 1.0 / L;
  }
  b.upper = blocked ? 0.0 : 1.0 / inv_sum;
  return b;
}

Eigen::MatrixXd flow_tensor(const std::vector<FaceField>& w, int d) {
  Eigen::MatrixXd K(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) K(i, j) = face_integral(w[static_cast<std::size_t>(j)], i);
  }
  return K;
}

void require_anchor(const UnitCell& g, const char* what) {
  if (!g.has_solid()) {
    throw std::invalid_argument(std::string(what) +
                                ": the cell has no solid, so the no-slip anchor is missing and the problem is singular");
  }
}

FlowCellResult permeability_with(const StokesOperator& op) {
  const UnitCell& g = *op.geometry();
  const int d = g.dim();
  FlowCellResult out;
  for (int j = 0; j < d; ++j) {
    FaceField force(op.geometry());
    force.normal[static_cast<std::size_t>(j)].setOnes();
    auto sol = op.solve_faces(force);
    sol.pressure.values *= -1.0;
    out.velocity.push_back(std::move(sol.velocity));
    out.pressure.push_back(std::move(sol.pressure));
    out.residuals.push_back(sol.relative_residual);
  }
  out.tensor = flow_tensor(out.velocity, d);
  out.asymmetry = asymmetry_of(out.tensor);
  return out;
}

ForcingCellResult forcing_with(const StokesOperator& op, const ScalarField& phi0, const ModelParams& p,
                               const Eigen::VectorXd& drho_dt) {
  const UnitCell& g = *op.geometry();
  const int d = g.dim();
  VectorField force = capillary_force(phi0, p.lambda, p.sigma);
  for (Index c = 0; c < g.num_cells(); ++c) {
    const double rho = mixture_density(phi0[c], p);
    for (int a = 0; a < d; ++a) force.values(c, a) -= rho * p.g[a];
  }
  auto sol = op.solve(force, drho_dt);
  ForcingCellResult out;
  out.G.resize(d);
  for (int i = 0; i < d; ++i) out.G[i] = face_integral(sol.velocity, i);
  out.velocity = std::move(sol.velocity);
  out.pressure = std::move(sol.pressure);
  out.pressure.values *= -1.0;
  out.residual = sol.relative_residual;
  return out;
}

StokesOperator flow_operator(const ScalarField& phi0, const ModelParams& p) {
  const Index n = phi0.size();
  Eigen::VectorXd mu(n), xi(n), rho(n);
  for (Index c = 0; c < n; ++c) {
    const auto m = mixture(phi0[c], p);
    mu[c] = m.mu;
    xi[c] = m.xi;
    rho[c] = m.rho;
  }
  return StokesOperator(phi0.geom, mu, xi, rho);
}

}  // namespace

double face_integral(const FaceField& F, int axis) {
  return F.normal[static_cast<std::size_t>(axis)].sum() * F.geom->cell_volume();
}

ScalarCellResult scalar_cell_problem(const ScalarField& coeff) {
  const UnitCell& g = *coeff.geom;
  const int d = g.dim();
  const double h = g.cell_size();
  const Region region = coeff.on_whole_cell() ? Region::Whole : Region::Pore;
  const FaceField faces = face_coefficients(coeff, coeff.bc);
  const ActiveSet set = active_set(g, region);

  LinearSystem sys;
  sys.A = assemble_diffusion(g, faces, set);
  sys.null_space = NullSpace::Constants;
  sys.dim = d;

  ScalarCellResult out;
  out.tensor = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    sys.rhs.resize(set.size());
    for (Index row = 0; row < set.size(); ++row) {
      const Index c = set.cells[static_cast<std::size_t>(row)];
      sys.rhs[row] = (faces(j, c) - faces(j, g.neighbor(c, j, -1))) / h;
    }
    const SolveReport rep = solve_linear(sys, kCellTol);
    ScalarField corr(coeff.geom, 0.0, coeff.bc);
    for (Index row = 0; row < set.size(); ++row) corr[set.cells[static_cast<std::size_t>(row)]] = rep.x[row];
    // Face fluxes c_f (e_j + grad corr) summed over the faces of each axis.
    for (Index c = 0; c < g.num_cells(); ++c) {
      for (int i = 0; i < d; ++i) {
        const double cf = faces(i, c);
        if (cf == 0.0) continue;
        const double grad = (corr[g.neighbor(c, i, 1)] - corr[c]) / h;
        out.tensor(i, j) += cf * ((i == j ? 1.0 : 0.0) + grad) * g.cell_volume();
      }
    }
    out.correctors.push_back(std::move(corr));
    out.residuals.push_back(rep.relative_residual);
  }
  out.asymmetry = asymmetry_of(out.tensor);
  out.tensor = 0.5 * (out.tensor + out.tensor.transpose()).eval();
  for (int j = 0; j < d; ++j) {
    const DirectionalBounds b = directional_bounds(g, faces, j);
    const double v = out.tensor(j, j);
    const double slack = 1e-8 * std::max(1.0, std::abs(v));
    out.bounds_ok = out.bounds_ok && v >= b.lower - slack && v <= b.upper + slack;
    out.bounds.push_back(b);
  }
  return out;
}

ScalarCellResult cell_diffusion(const ScalarField& phi0, double rho_g0, double D_gv) {
  const UnitCell& g = *phi0.geom;
  Eigen::VectorXd c(g.num_cells());
  double top = 0.0;
  for (Index k = 0; k < g.num_cells(); ++k) {
    c[k] = g.is_pore(k) ? D_gv * rho_g0 * std::max(1.0 - phi0[k], 0.0) : 0.0;
    top = std::max(top, c[k]);
  }
  if (!(top > 0.0)) {
    throw FieldError("cell_diffusion: degenerate cell, the gas coefficient vanishes everywhere (all-liquid pore)");
  }
  c = c.cwiseMax(1e-6 * top);
  return scalar_cell_problem(ScalarField(phi0.geom, c, Boundary::ZeroGradientAtSolid));
}

ScalarCellResult cell_conduction(const ScalarField& k0, double kS) {
  const UnitCell& g = *k0.geom;
  if (!(kS > 0.0)) throw std::invalid_argument("cell_conduction: k_S must be positive");
  Eigen::VectorXd k(g.num_cells());
  for (Index c = 0; c < g.num_cells(); ++c) k[c] = g.is_solid(c) ? kS : k0[c];
  return scalar_cell_problem(ScalarField(k0.geom, k, Boundary::Periodic));
}

FlowCellResult cell_permeability(const ScalarField& mu0, const ScalarField& xi0, const ScalarField& rho0) {
  require_anchor(*mu0.geom, "cell_permeability");
  return permeability_with(StokesOperator(mu0.geom, mu0.values, xi0.values, rho0.values));
}

ForcingCellResult cell_forcing(const ScalarField& phi0, const ModelParams& p, const Eigen::VectorXd& drho_dt) {
  require_anchor(*phi0.geom, "cell_forcing");
  return forcing_with(flow_operator(phi0, p), phi0, p, drho_dt);
}

EffectiveTensors effective_tensors(const ScalarField& phi0, const ModelParams& p, FlowCorrectors* flow) {
  const UnitCell& g = *phi0.geom;
  require_anchor(g, "effective_tensors");
  EffectiveTensors t;
  t.geometry_hash = g.hash();

  const auto diff = cell_diffusion(phi0, p.rho_g, p.D_gv);
  t.D = diff.tensor;
  t.residuals["diffusion"] = *std::max_element(diff.residuals.begin(), diff.residuals.end());

  const StokesOperator op = flow_operator(phi0, p);
  const auto perm = permeability_with(op);
  t.K = perm.tensor;
  t.K_asymmetry = perm.asymmetry;
  t.residuals["permeability"] = *std::max_element(perm.residuals.begin(), perm.residuals.end());
  const auto forcing = forcing_with(op, phi0, p, Eigen::VectorXd());
  t.G = forcing.G;
  t.residuals["forcing"] = forcing.residual;
  if (flow) {
    flow->w0 = forcing.velocity;
    flow->w = perm.velocity;
  }

  Eigen::VectorXd k(g.num_cells());
  for (Index c = 0; c < g.num_cells(); ++c) k[c] = mixture(phi0[c], p).k;
  const auto cond = cell_conduction(ScalarField(phi0.geom, k), p.k_S);
  t.A = cond.tensor;
  t.residuals["conduction"] = *std::max_element(cond.residuals.begin(), cond.residuals.end());
  return t;
}

std::string format_tensors(const EffectiveTensors& t) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "# geometry " << t.geometry_hash << "\n";
  auto matrix = [&](const char* name, const Eigen::MatrixXd& M) {
    out << "# " << name << " " << M.rows() << "x" << M.cols() << "\n";
    for (Index i = 0; i < M.rows(); ++i) {
      for (Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << M(i, j);
      out << "\n";
    }
  };
  matrix("D", t.D);
  matrix("K", t.K);
  matrix("G", t.G);
  matrix("A", t.A);
  for (const auto& [name, r] : t.residuals) out << "# residual " << name << " " << r << "\n";
  out << "# K_asymmetry " << t.K_asymmetry << "\n";
  return out.str();
}

}  // namespace evapore
