#include "evapore/phasefield.hpp"

#include <numbers>
#include <sstream>

#include "evapore/operators.hpp"

namespace evapore {

double allen_cahn_dt_max(const ModelParams& p) {
  return 0.4 * p.lambda * p.lambda * p.nu * std::min(p.rho_l, p.rho_g) / p.gamma;
}

std::string resolution_warning(const ModelParams& p, const UnitCell& g) {
  const double ratio = p.lambda / g.cell_size();
  if (ratio >= 4.0) return {};
  std::ostringstream msg;
  msg << "lambda/h = " << ratio << " is below 4; the diffuse interface is under-resolved (8 or more recommended)";
  return msg.str();
}

double phase_overshoot(const ScalarField& phi) {
  const UnitCell& g = *phi.geom;
  double o = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (!phi.on_whole_cell() && g.is_solid(c)) continue;
    o = std::max({o, phi[c] - 1.0, -phi[c]});
  }
  return o;
}

Eigen::VectorXd reaction_source(const ScalarField& phi, const ScalarField& chi, const ModelParams& p,
                                const ScalarField* T) {
  const UnitCell& g = *phi.geom;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(g.num_cells());
  const double pre = std::numbers::sqrt2 / p.lambda;
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.is_solid(c)) continue;
    const double sat = T ? p.saturation((*T)[c]) : p.chi_sat;
    s[c] = pre * phi[c] * (1.0 - phi[c]) * evaporation_rate(chi[c], p, sat);
  }
  return s;
}

PhaseFieldState allen_cahn_step(const PhaseFieldState& state, const FaceField* v, const ScalarField& chi, double dt,
                                const ModelParams& p, const AllenCahnOptions& opt, const ScalarField* T) {
  const ScalarField& phi = state.phi;
  require_same_grid(phi, chi, "allen_cahn_step");
  const UnitCell& g = *phi.geom;
  if (!(dt > 0.0)) throw std::invalid_argument("allen_cahn_step: dt must be positive");
  const double dt_max = allen_cahn_dt_max(p);
  if (dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "allen_cahn_step: dt = " << dt << " exceeds the stability bound dt_max = 0.4 lambda^2 nu min(rho)/gamma = "
        << dt_max;
    throw std::invalid_argument(msg.str());
  }

  const ActiveSet set = active_set(g, Region::Pore);
  const FaceField unit = face_coefficients(ScalarField(phi.geom, 1.0), Boundary::ZeroGradientAtSolid);
  const double mobility = p.gamma / p.nu;
  SparseMatrix A = assemble_diffusion(g, unit, set) * mobility;

  const Eigen::VectorXd reaction = reaction_source(phi, chi, p, T);
  const double inv_lambda2 = 1.0 / (p.lambda * p.lambda);
  const double h = g.cell_size();

  Eigen::VectorXd rhs(set.size()), guess(set.size());
  for (Index row = 0; row < set.size(); ++row) {
    const Index c = set.cells[static_cast<std::size_t>(row)];
    const double rho = mixture_density(phi[c], p);
    double adv = 0.0;
    if (v) {
      for (int a = 0; a < g.dim(); ++a) {
        const Index up = g.neighbor(c, a, 1);
        const Index dn = g.neighbor(c, a, -1);
        if (g.is_pore(up)) {
          const double u = (*v)(a, c);
          adv += u * (u > 0.0 ? phi[c] : phi[up]);
        }
        if (g.is_pore(dn)) {
          const double u = (*v)(a, dn);
          adv -= u * (u > 0.0 ? phi[dn] : phi[c]);
        }
      }
      adv /= h;
    }
    rhs[row] = rho / dt * phi[c] - rho * adv - mobility * inv_lambda2 * double_well(phi[c]).second + reaction[c];
    guess[row] = phi[c];
    A.coeffRef(row, row) += rho / dt;
  }

  LinearSystem sys;
  sys.A = std::move(A);
  sys.rhs = std::move(rhs);
  sys.dim = g.dim();
  sys.order_independent = opt.order_independent;
  const SolveReport rep = solve_linear(sys, opt.rel_tol, &guess);

  PhaseFieldState next;
  next.phi = phi;
  for (Index row = 0; row < set.size(); ++row) next.phi[set.cells[static_cast<std::size_t>(row)]] = rep.x[row];
  next.t = state.t + dt;
  next.overshoot = phase_overshoot(next.phi);
  next.last_iterations = rep.iterations;
  if (!next.phi.all_finite()) throw InvalidRunError("allen_cahn_step produced non-finite values");
  if (next.overshoot > opt.max_overshoot) {
    std::ostringstream msg;
    msg << "phase-field overshoot " << next.overshoot << " exceeds " << opt.max_overshoot << " at t = " << next.t;
    throw InvalidRunError(msg.str());
  }
  return next;
}

ScalarField equilibrium_profile(GeometryPtr g, double lambda, double x0, int axis) {
  return ScalarField::sample(
      std::move(g), [=](const Eigen::Vector3d& x) { return equilibrium_value(x[axis] - x0, lambda); });
}

ScalarField slab_profile(GeometryPtr g, double lambda, double center, double half_width, int axis) {
  return ScalarField::sample(std::move(g), [=](const Eigen::Vector3d& x) {
    double d = std::abs(x[axis] - center);
    d = std::min(d, 1.0 - d);
    return equilibrium_value(d - half_width, lambda);
  });
}

ScalarField disk_profile(GeometryPtr g, double lambda, const Eigen::Vector3d& center, double R) {
  const int dim = g->dim();
  return ScalarField::sample(std::move(g), [=](const Eigen::Vector3d& x) {
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      double d = std::abs(x[a] - center[a]);
      d = std::min(d, 1.0 - d);
      r2 += d * d;
    }
    return equilibrium_value(std::sqrt(r2) - R, lambda);
  });
}

double gradient_energy_integral(const Eigen::VectorXd& values, double h, double lambda) {
  const Index n = values.size();
  if (n < 2) throw std::invalid_argument("gradient_energy_integral: need at least two samples");
  auto in_well = [](double v) { return std::abs(v) <= 1e-3 || std::abs(v - 1.0) <= 1e-3; };
  const bool flat = (values.array() == values[0]).all();
  if (!flat && (!in_well(values[0]) || !in_well(values[n - 1]))) {
    throw InvalidRunError("gradient_energy_integral: the interface touches the domain boundary");
  }
  // In inner units d phi/dz = lambda d phi/dx and dz = dx / lambda.
  double s = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    const double dphi = (values[i + 1] - values[i]) / h;
    s += lambda * dphi * dphi * h;
  }
  return s;
}

double gradient_energy_integral(const ScalarField& phi1d, double lambda) {
  if (phi1d.geom->dim() != 1) throw std::invalid_argument("gradient_energy_integral expects a 1D field");
  return gradient_energy_integral(phi1d.values, phi1d.geom->cell_size(), lambda);
}

}  // namespace evapore
