#include "evapore/porescale.hpp"

#include <numbers>
#include <sstream>

#include "evapore/linear_solver.hpp"
#include "evapore/operators.hpp"

namespace evapore {

namespace {

constexpr double kSolveTol = 1e-11;

// Upwind divergence of (q v) over the pore from face velocities; faces touching solid carry nothing.
Eigen::VectorXd upwind_divergence(const UnitCell& g, const Eigen::VectorXd& q, const FaceField& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.num_cells());
  const double invh = 1.0 / g.cell_size();
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.is_solid(c)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const Index up = g.neighbor(c, a, 1);
      const Index dn = g.neighbor(c, a, -1);
      if (g.is_pore(up)) {
        const double u = v(a, c);
        s += u * (u > 0.0 ? q[c] : q[up]);
      }
      if (g.is_pore(dn)) {
        const double u = v(a, dn);
        s -= u * (u > 0.0 ? q[dn] : q[c]);
      }
    }
    out[c] = s * invh;
  }
  return out;
}

bool has_velocity(const FaceField& v) {
  for (const auto& n : v.normal) {
    if (n.size() > 0 && n.cwiseAbs().maxCoeff() > 0.0) return true;
  }
  return false;
}

Eigen::VectorXd mixture_density_field(const ScalarField& phi, const ModelParams& p) {
  Eigen::VectorXd rho(phi.size());
  for (Index c = 0; c < phi.size(); ++c) rho[c] = mixture_density(phi[c], p);
  return rho;
}

}  // namespace

Eigen::VectorXd PoreState::solid_temperature() const {
  const UnitCell& g = *phi.geom;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.num_cells());
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.is_solid(c)) out[c] = T[c];
  }
  return out;
}

PoreState make_pore_state(const ScalarField& phi, double chi, double T) {
  PoreState s;
  s.phi = phi;
  s.phi.bc = Boundary::ZeroGradientAtSolid;
  s.chi = ScalarField(phi.geom, chi);
  s.T = ScalarField(phi.geom, T, Boundary::Periodic);
  s.v = FaceField(phi.geom);
  s.p = ScalarField(phi.geom, 0.0);
  return s;
}

EnergyBreakdown energy_functional(const PoreState& s, const ModelParams& p) {
  const UnitCell& g = *s.phi.geom;
  const double vol = g.cell_volume();
  const double h = g.cell_size();
  EnergyBreakdown e;
  const VectorField vc = face_to_cell(s.v);
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.is_solid(c)) {
      e.solid += p.rho_S * p.c_pS * s.T[c] * vol;
      continue;
    }
    const double phi = s.phi[c];
    const double rho = mixture_density(phi, p);
    e.kinetic += 0.5 * rho * vc.values.row(c).squaredNorm() * vol;
    e.well += p.gamma / p.lambda * double_well(phi).first * vol;
    e.internal += rho * internal_energy(phi, s.T[c], p) * vol;
    const double f = evaporation_rate(s.chi[c], p, p.saturation(s.T[c]));
    e.density_energy += density_energy(phi, f, p) * vol;
    for (int a = 0; a < g.dim(); ++a) {
      const Index up = g.neighbor(c, a, 1);
      if (g.is_solid(up)) continue;
      const double d = (s.phi[up] - phi) / h;
      e.gradient += 0.5 * p.gamma * p.lambda * d * d * vol;
    }
  }
  e.total = e.kinetic + e.well + e.gradient + e.internal + e.solid + e.density_energy;
  return e;
}

void vapor_step(const PoreState& prev, PoreState& next, double dt, const ModelParams& p) {
  const UnitCell& g = *next.phi.geom;
  const ActiveSet set = active_set(g, Region::Pore);

  Eigen::VectorXd diff(g.num_cells());
  for (Index c = 0; c < g.num_cells(); ++c) {
    diff[c] = p.D_gv * p.rho_g * std::max(1.0 - next.phi[c], kGasFloor);
  }
  const FaceField faces = face_coefficients(ScalarField(next.phi.geom, diff), Boundary::ZeroGradientAtSolid);
  SparseMatrix A = assemble_diffusion(g, faces, set) * dt;

  Eigen::VectorXd adv = Eigen::VectorXd::Zero(g.num_cells());
  if (has_velocity(prev.v)) {
    Eigen::VectorXd water(g.num_cells());
    for (Index c = 0; c < g.num_cells(); ++c) {
      water[c] = prev.phi[c] * p.rho_l + (1.0 - prev.phi[c]) * p.rho_g * prev.chi[c];
    }
    adv = upwind_divergence(g, water, prev.v);
  }

  Eigen::VectorXd rhs(set.size()), guess(set.size());
  for (Index row = 0; row < set.size(); ++row) {
    const Index c = set.cells[static_cast<std::size_t>(row)];
    const double gas_old = std::max(1.0 - prev.phi[c], kGasFloor);
    const double gas_new = std::max(1.0 - next.phi[c], kGasFloor);
    A.coeffRef(row, row) += p.rho_g * gas_new;
    rhs[row] = p.rho_g * gas_old * prev.chi[c] - p.rho_l * (next.phi[c] - prev.phi[c]) - dt * adv[c];
    guess[row] = prev.chi[c];
  }
  LinearSystem sys;
  sys.A = std::move(A);
  sys.rhs = std::move(rhs);
  sys.dim = g.dim();
  const SolveReport rep = solve_linear(sys, kSolveTol, &guess);

  next.chi = prev.chi;
  next.chi_clip = 0.0;
  next.chi_undefined_cells = 0;
  for (Index row = 0; row < set.size(); ++row) {
    const Index c = set.cells[static_cast<std::size_t>(row)];
    double chi = rep.x[row];
    if (next.phi[c] >= kLiquidThreshold) {
      ++next.chi_undefined_cells;
    } else if (chi < -1e-8 || chi > 1.0 + 1e-8 || !std::isfinite(chi)) {
      const auto ijk = g.coords(c);
      std::ostringstream msg;
      msg << "vapor fraction " << chi << " left [0, 1] at cell (" << ijk[0] << "," << ijk[1] << "," << ijk[2]
          << "), phi = " << next.phi[c] << ", t = " << prev.t + dt;
      throw InvalidRunError(msg.str());
    } else {
      next.chi_clip = std::max(next.chi_clip, std::max(-chi, chi - 1.0));
    }
    next.chi[c] = std::clamp(chi, 0.0, 1.0);
  }
}

double mixture_mass_audit(const PoreState& old_state, const PoreState& new_state, double dt, const ModelParams& p) {
  const UnitCell& g = *new_state.phi.geom;
  const Eigen::VectorXd rho_old = mixture_density_field(old_state.phi, p);
  const Eigen::VectorXd rho_new = mixture_density_field(new_state.phi, p);
  Eigen::VectorXd r = (rho_new - rho_old) / dt;
  if (has_velocity(new_state.v)) r += upwind_divergence(g, rho_new, new_state.v);
  return integrate(r, g, Region::Pore);
}

void energy_step(const PoreState& prev, PoreState& next, double dt, const ModelParams& p,
                 const Eigen::VectorXd* heat_source) {
  const UnitCell& g = *next.phi.geom;
  const Index n = g.num_cells();
  const ActiveSet set = active_set(g, Region::Whole);

  Eigen::VectorXd k(n), cap_old(n), cap_new(n);
  for (Index c = 0; c < n; ++c) {
    if (g.is_solid(c)) {
      k[c] = p.k_S;
      cap_old[c] = cap_new[c] = p.rho_S * p.c_pS;
    } else {
      const auto mo = mixture(prev.phi[c], p);
      const auto mn = mixture(next.phi[c], p);
      k[c] = mn.k;
      cap_old[c] = mo.rho * mo.c;
      cap_new[c] = mn.rho * mn.c;
    }
  }
  // Harmonic face conductivity enforces temperature and flux continuity at the pore-solid faces.
  const FaceField faces = face_coefficients(ScalarField(next.phi.geom, k, Boundary::Periodic), Boundary::Periodic);
  SparseMatrix A = assemble_diffusion(g, faces, set);

  Eigen::VectorXd explicit_terms = Eigen::VectorXd::Zero(n);
  if (has_velocity(next.v)) {
    // Convective enthalpy flux rho h v with rho h = rho c T + p, plus pressure work,
    // viscous dissipation and capillary work evaluated at cell centres.
    Eigen::VectorXd rho_h(n);
    for (Index c = 0; c < n; ++c) rho_h[c] = g.is_solid(c) ? 0.0 : cap_old[c] * prev.T[c] + next.p[c];
    explicit_terms -= upwind_divergence(g, rho_h, next.v);
    const VectorField vc = face_to_cell(next.v);
    const VectorField gp = gradient(next.p);
    const VectorField cap = capillary_force(next.phi, p.lambda, p.sigma);
    std::vector<VectorField> grad_v;
    for (int a = 0; a < g.dim(); ++a) {
      grad_v.push_back(gradient(ScalarField(next.phi.geom, Eigen::VectorXd(vc.values.col(a)))));
    }
    for (Index c = 0; c < n; ++c) {
      if (g.is_solid(c)) continue;
      const auto m = mixture(next.phi[c], p);
      double div = 0.0;
      for (int a = 0; a < g.dim(); ++a) div += grad_v[static_cast<std::size_t>(a)].values(c, a);
      double dissipation = m.xi * div * div;
      for (int a = 0; a < g.dim(); ++a) {
        for (int b = 0; b < g.dim(); ++b) {
          const double dab = grad_v[static_cast<std::size_t>(a)].values(c, b);
          const double dba = grad_v[static_cast<std::size_t>(b)].values(c, a);
          dissipation += m.mu * (dab + dba) * dab;
        }
      }
      explicit_terms[c] += vc.values.row(c).dot(gp.values.row(c)) + dissipation + vc.values.row(c).dot(cap.values.row(c));
    }
  }
  if (heat_source) explicit_terms += *heat_source;

  Eigen::VectorXd rhs(n);
  for (Index c = 0; c < n; ++c) {
    A.coeffRef(c, c) += cap_new[c] / dt;
    rhs[c] = cap_old[c] * prev.T[c] / dt + explicit_terms[c];
  }
  LinearSystem sys;
  sys.A = std::move(A);
  sys.rhs = std::move(rhs);
  sys.dim = g.dim();
  const SolveReport rep = solve_linear(sys, kSolveTol, &prev.T.values);
  next.T = ScalarField(next.phi.geom, rep.x, Boundary::Periodic);
  if ((next.T.values.array() <= 0.0).any()) throw InvalidRunError("temperature became nonpositive");
}

StokesDiagnostics stokes_quasistatic(const PoreState& prev, PoreState& next, double dt, const ModelParams& p) {
  const UnitCell& g = *next.phi.geom;
  const Index n = g.num_cells();
  Eigen::VectorXd mu(n), xi(n), rho(n), source = Eigen::VectorXd::Zero(n);
  for (Index c = 0; c < n; ++c) {
    const auto m = mixture(next.phi[c], p);
    mu[c] = m.mu;
    xi[c] = m.xi;
    rho[c] = m.rho;
    if (dt > 0.0 && g.is_pore(c)) source[c] = -(m.rho - mixture_density(prev.phi[c], p)) / dt;
  }
  VectorField force = capillary_force(next.phi, p.lambda, p.sigma);
  force.values *= -1.0;
  for (Index c = 0; c < n; ++c) {
    for (int a = 0; a < g.dim(); ++a) force.values(c, a) += rho[c] * p.g[a];
  }
  const StokesOperator op(next.phi.geom, mu, xi, rho);
  const auto sol = op.solve(force, source);
  next.v = sol.velocity;
  next.p = sol.pressure;
  return {sol.projected_force, sol.projected_source, sol.relative_residual};
}

PoreTrajectory pore_simulate(const PoreState& initial, const PoreRunConfig& cfg) {
  cfg.params.validate();
  if (!(cfg.dt > 0.0) || cfg.steps < 0) throw std::invalid_argument("pore_simulate: need dt > 0 and steps >= 0");
  const ModelParams& p = cfg.params;
  PoreTrajectory traj;
  PoreState state = initial;
  if (!cfg.velocity) state.v = FaceField(state.phi.geom);

  auto record = [&](const PoreState& s) {
    traj.times.push_back(s.t);
    traj.energy.push_back(energy_functional(s, p));
    traj.liquid_volume.push_back(integrate(s.phi, Region::Pore));
    const UnitCell& g = *s.phi.geom;
    double gas = 0.0, vapor = 0.0;
    for (Index c = 0; c < g.num_cells(); ++c) {
      if (g.is_solid(c)) continue;
      gas += 1.0 - s.phi[c];
      vapor += (1.0 - s.phi[c]) * s.chi[c];
    }
    traj.mean_chi.push_back(gas > 0.0 ? vapor / gas : 0.0);
  };
  record(state);
  traj.snapshots.push_back(state);
  const double tol_e = 1e-8 * std::abs(traj.energy.front().total);

  for (int step = 1; step <= cfg.steps; ++step) {
    const PoreState prev = state;
    PoreState next = prev;
    PhaseFieldState ac{prev.phi, prev.t};
    ac = allen_cahn_step(ac, cfg.velocity ? &prev.v : nullptr, prev.chi, cfg.dt, p, cfg.allen_cahn, &prev.T);
    next.phi = ac.phi;
    traj.max_overshoot = std::max(traj.max_overshoot, ac.overshoot);

    if (cfg.energy_before_vapor) {
      energy_step(prev, next, cfg.dt, p);
      if (!cfg.frozen_chi) vapor_step(prev, next, cfg.dt, p);
    } else {
      if (!cfg.frozen_chi) vapor_step(prev, next, cfg.dt, p);
      energy_step(prev, next, cfg.dt, p);
    }
    if (cfg.velocity) stokes_quasistatic(prev, next, cfg.dt, p);
    next.t = prev.t + cfg.dt;
    traj.max_chi_undefined_cells = std::max(traj.max_chi_undefined_cells, next.chi_undefined_cells);
    traj.mass_residual.push_back(mixture_mass_audit(prev, next, cfg.dt, p));

    record(next);
    const double e_prev = traj.energy[traj.energy.size() - 2].total;
    if (!cfg.velocity && traj.energy.back().total > e_prev + tol_e) ++traj.monotonicity_violations;
    state = std::move(next);
    if (step == cfg.steps || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0)) {
      traj.snapshots.push_back(state);
    }
  }
  traj.final_state = state;
  return traj;
}

}  // namespace evapore
