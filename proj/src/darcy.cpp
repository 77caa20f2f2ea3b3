#include "evapore/darcy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "evapore/linear_solver.hpp"
#include "evapore/operators.hpp"
#include "evapore/phasefield.hpp"

namespace evapore {

namespace {

constexpr double kMacroTol = 1e-12;
constexpr double kPressureFloor = 1e-8;

bool has_cross_terms(const std::vector<Eigen::MatrixXd>& T) {
  for (const auto& M : T) {
    for (Index i = 0; i < M.rows(); ++i) {
      for (Index j = 0; j < M.cols(); ++j) {
        if (i != j && M(i, j) != 0.0) return true;
      }
    }
  }
  return false;
}

// Matrix of -div(T grad .) on the macro grid. Normal face coefficients are
// harmonic means of the cell diagonals; cross terms use arithmetic means and
// the face average of the centered tangential differences.
SparseMatrix tensor_diffusion(const UnitCell& g, const std::vector<Eigen::MatrixXd>& T) {
  const int d = g.dim();
  const double h = g.cell_size();
  std::vector<Eigen::Triplet<double>> trip;
  for (Index c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < d; ++a) {
      const Index up = g.neighbor(c, a, 1);
      // Flux F = sum_k w_k x_k through the face (c, up); it adds F/h to row c and -F/h to row up.
      std::vector<std::pair<Index, double>> w;
      const double dn = harmonic_mean(T[static_cast<std::size_t>(c)](a, a), T[static_cast<std::size_t>(up)](a, a));
      w.emplace_back(up, -dn / h);
      w.emplace_back(c, dn / h);
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        const double dab = 0.5 * (T[static_cast<std::size_t>(c)](a, b) + T[static_cast<std::size_t>(up)](a, b));
        if (dab == 0.0) continue;
        const double q = dab / (4.0 * h);
        w.emplace_back(g.neighbor(c, b, 1), -q);
        w.emplace_back(g.neighbor(c, b, -1), q);
        w.emplace_back(g.neighbor(up, b, 1), -q);
        w.emplace_back(g.neighbor(up, b, -1), q);
      }
      for (const auto& [k, v] : w) {
        trip.emplace_back(c, k, v / h);
        trip.emplace_back(up, k, -v / h);
      }
    }
  }
  SparseMatrix A(g.num_cells(), g.num_cells());
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

// div(q v) with face velocities averaged from the cell values and upwind q.
Eigen::VectorXd upwind_divergence(const UnitCell& g, const Eigen::VectorXd& q, const Eigen::MatrixXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.num_cells());
  const double invh = 1.0 / g.cell_size();
  for (Index c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < g.dim(); ++a) {
      const Index up = g.neighbor(c, a, 1);
      const double u = 0.5 * (v(c, a) + v(up, a));
      const double flux = u * (u > 0.0 ? q[c] : q[up]) * invh;
      out[c] += flux;
      out[up] -= flux;
    }
  }
  return out;
}

Eigen::VectorXd implicit_update(const UnitCell& g, const std::vector<Eigen::MatrixXd>& T, const Eigen::VectorXd& cap_new,
                                const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess, double dt) {
  LinearSystem sys;
  sys.A = tensor_diffusion(g, T);
  for (Index c = 0; c < g.num_cells(); ++c) sys.A.coeffRef(c, c) += cap_new[c] / dt;
  sys.symmetric = !has_cross_terms(T);
  sys.rhs = rhs;
  sys.dim = g.dim();
  return solve_linear(sys, kMacroTol, &guess).x;
}

DarcyState macro_step(const DarcyState& s, double dt, double eps, const ModelParams& p, const MacroCoefficients* next,
                      const DarcySources* src) {
  const UnitCell& g = *s.grid;
  const Index n = s.size();
  if (!(dt > 0.0)) throw std::invalid_argument("darcy step: dt must be positive");
  if (static_cast<Index>(s.D.size()) != n || static_cast<Index>(s.A.size()) != n) {
    throw std::invalid_argument("darcy step: effective tensors missing for some macro cells");
  }
  const MacroCoefficients& nc = next ? *next : s.coeff;
  DarcyState out = s;
  out.coeff = nc;
  out.t = s.t + dt;

  Eigen::VectorXd vap = (s.coeff.gas_capacity.cwiseProduct(s.chi) - p.rho_l * (nc.liquid - s.coeff.liquid)) / dt;
  Eigen::VectorXd heat = s.coeff.heat_capacity.cwiseProduct(s.T) / dt;
  if (src && (src->vapor || src->heat)) {
    for (Index c = 0; c < n; ++c) {
      const Eigen::Vector3d x = cell_center(g, c);
      if (src->vapor) vap[c] += src->vapor(x, out.t);
      if (src->heat) heat[c] += src->heat(x, out.t);
    }
  }
  if (eps != 0.0) {
    const ConvectiveTerms conv = convective_terms(s, eps, p);
    out.rho_bar -= dt * conv.mass;
    vap -= conv.water;
    heat -= conv.heat;
  }
  out.chi = implicit_update(g, s.D, nc.gas_capacity, vap, s.chi, dt);
  out.T = implicit_update(g, s.A, nc.heat_capacity, heat, s.T, dt);
  if ((out.T.array() <= 0.0).any()) throw InvalidRunError("macro temperature became nonpositive");
  return out;
}

}  // namespace

void micro_coefficients(const ScalarField& phi0, const ModelParams& p, MacroCoefficients& out, Index cell) {
  const UnitCell& g = *phi0.geom;
  const double vol = g.cell_volume();
  double liquid = 0.0, gas = 0.0, fluid_heat = 0.0;
  for (Index c = 0; c < g.num_cells(); ++c) {
    if (g.is_solid(c)) continue;
    const auto m = mixture(phi0[c], p);
    liquid += phi0[c] * vol;
    gas += std::max(1.0 - phi0[c], 0.0) * vol;
    fluid_heat += m.rho * m.c * vol;
  }
  const double porosity = g.porosity();
  out.liquid[cell] = liquid;
  out.gas_capacity[cell] = p.rho_g * std::max(gas, 1e-6 * porosity);
  out.fluid_heat_capacity[cell] = fluid_heat;
  out.heat_capacity[cell] = fluid_heat + (1.0 - porosity) * p.rho_S * p.c_pS;
  out.porosity[cell] = porosity;
}

GeometryPtr make_macro_grid(int dim, int n) {
  if (dim < 1 || dim > 3 || n < 1) throw std::invalid_argument("make_macro_grid: need 1 <= dim <= 3 and n >= 1");
  Index cells = 1;
  for (int a = 0; a < dim; ++a) cells *= n;
  return std::make_shared<const UnitCell>(dim, n, std::vector<std::uint8_t>(static_cast<std::size_t>(cells), 0));
}

double DarcyState::vapor_mass() const {
  return coeff.gas_capacity.dot(chi) * grid->cell_volume();
}

MacroCoefficients constant_coefficients(double liquid, double gas_capacity, double heat_capacity,
                                        double fluid_heat_capacity, double porosity) {
  MacroCoefficients m;
  m.liquid = Eigen::VectorXd::Constant(1, liquid);
  m.gas_capacity = Eigen::VectorXd::Constant(1, gas_capacity);
  m.heat_capacity = Eigen::VectorXd::Constant(1, heat_capacity);
  m.fluid_heat_capacity = Eigen::VectorXd::Constant(1, fluid_heat_capacity);
  m.porosity = Eigen::VectorXd::Constant(1, porosity);
  return m;
}

DarcyState uniform_darcy_state(GeometryPtr grid, const MacroCoefficients& one_cell, const Eigen::MatrixXd& D,
                               const Eigen::MatrixXd& K, const Eigen::MatrixXd& A, const Eigen::VectorXd& G,
                               double rho_bar, double chi, double T) {
  if (grid->has_solid()) throw std::invalid_argument("the macro grid must be solid-free");
  const Index n = grid->num_cells();
  const int d = grid->dim();
  DarcyState s;
  s.grid = std::move(grid);
  auto spread = [n](const Eigen::VectorXd& v) { return Eigen::VectorXd::Constant(n, v[0]); };
  s.coeff.liquid = spread(one_cell.liquid);
  s.coeff.gas_capacity = spread(one_cell.gas_capacity);
  s.coeff.heat_capacity = spread(one_cell.heat_capacity);
  s.coeff.fluid_heat_capacity = spread(one_cell.fluid_heat_capacity);
  s.coeff.porosity = spread(one_cell.porosity);
  s.rho_bar = Eigen::VectorXd::Constant(n, rho_bar);
  s.chi = Eigen::VectorXd::Constant(n, chi);
  s.T = Eigen::VectorXd::Constant(n, T);
  s.p = Eigen::VectorXd::Zero(n);
  s.v = Eigen::MatrixXd::Zero(n, d);
  s.D.assign(static_cast<std::size_t>(n), D);
  s.K.assign(static_cast<std::size_t>(n), K);
  s.A.assign(static_cast<std::size_t>(n), A);
  s.G.assign(static_cast<std::size_t>(n), G);
  return s;
}

DarcyState darcy_step_leading(const DarcyState& s, double dt, const ModelParams& p, const MacroCoefficients* next,
                              const DarcySources* src) {
  return macro_step(s, dt, 0.0, p, next, src);
}

DarcyState darcy_step_first_order(const DarcyState& s, double dt, double eps, const ModelParams& p,
                                  const MacroCoefficients* next, const DarcySources* src) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw std::invalid_argument("darcy_step_first_order: eps must lie in [0, 0.5]");
  return macro_step(s, dt, eps, p, next, src);
}

ConvectiveTerms convective_terms(const DarcyState& s, double eps, const ModelParams& p) {
  const UnitCell& g = *s.grid;
  // Separable closure: the average of a product is the intrinsic average of the density times vbar.
  const Eigen::VectorXd inv_por = s.coeff.porosity.cwiseInverse();
  const Eigen::VectorXd water = p.rho_l * s.coeff.liquid + s.coeff.gas_capacity.cwiseProduct(s.chi);
  ConvectiveTerms t;
  t.mass = eps * upwind_divergence(g, s.rho_bar.cwiseProduct(inv_por), s.v);
  t.water = eps * upwind_divergence(g, water.cwiseProduct(inv_por), s.v);
  t.heat = eps * upwind_divergence(g, s.coeff.fluid_heat_capacity.cwiseProduct(s.T).cwiseProduct(inv_por), s.v);
  return t;
}

Eigen::MatrixXd darcy_velocity(const DarcyState& s) {
  const UnitCell& g = *s.grid;
  const int d = g.dim();
  const double h = g.cell_size();
  Eigen::MatrixXd v(s.size(), d);
  for (Index c = 0; c < s.size(); ++c) {
    Eigen::VectorXd grad(d);
    for (int a = 0; a < d; ++a) grad[a] = (s.p[g.neighbor(c, a, 1)] - s.p[g.neighbor(c, a, -1)]) / (2.0 * h);
    v.row(c) = (-s.K[static_cast<std::size_t>(c)] * grad - s.G[static_cast<std::size_t>(c)]).transpose();
  }
  return v;
}

Eigen::VectorXd solve_macro_pressure(const DarcyState& s) {
  const UnitCell& g = *s.grid;
  const Index n = s.size();
  const int d = g.dim();
  double scale = 0.0;
  for (Index c = 0; c < n; ++c) {
    scale = std::max(scale, s.rho_bar[c] * s.K[static_cast<std::size_t>(c)].cwiseAbs().maxCoeff());
  }
  if (!(scale > 0.0)) return Eigen::VectorXd::Zero(n);
  // Entries at round-off level are cleared and the diagonal is floored, so a
  // channel (K singular across the flow) still has only constants in the null space.
  std::vector<Eigen::MatrixXd> rk(static_cast<std::size_t>(n));
  for (Index c = 0; c < n; ++c) {
    Eigen::MatrixXd M = s.rho_bar[c] * s.K[static_cast<std::size_t>(c)];
    M = M.unaryExpr([scale](double x) { return std::abs(x) <= kPressureFloor * scale ? 0.0 : x; });
    for (int a = 0; a < d; ++a) M(a, a) = std::max(M(a, a), kPressureFloor * scale);
    rk[static_cast<std::size_t>(c)] = M;
  }
  // Face fluxes of rho_bar G; each cell takes the difference of its own faces so a uniform field gives exactly zero.
  const double h = g.cell_size();
  auto face_flux = [&](Index c, int a) {
    const Index up = g.neighbor(c, a, 1);
    return 0.5 * (s.rho_bar[c] * s.G[static_cast<std::size_t>(c)][a] + s.rho_bar[up] * s.G[static_cast<std::size_t>(up)][a]);
  };
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Index c = 0; c < n; ++c) {
    for (int a = 0; a < d; ++a) rhs[c] += (face_flux(c, a) - face_flux(g.neighbor(c, a, -1), a)) / h;
  }
  LinearSystem sys;
  sys.A = tensor_diffusion(g, rk);
  sys.rhs = rhs;
  sys.symmetric = !has_cross_terms(rk);
  sys.null_space = NullSpace::Constants;
  sys.dim = d;
  return solve_linear(sys, kMacroTol).x;
}

MmsStudy darcy_mms_study(const std::vector<int>& resolutions, double dbar) {
  using std::numbers::pi;
  MmsStudy study;
  const double t_end = 0.1;
  ModelParams p;
  for (int n : resolutions) {
    GeometrySpec spec;
    spec.dim = 1;
    spec.resolution = n;
    auto grid = build_geometry(spec);
    const double h = grid->cell_size();
    const int steps = static_cast<int>(std::ceil(t_end / (0.25 * h * h)));
    const double dt = t_end / steps;
    DarcyState s = uniform_darcy_state(grid, constant_coefficients(0.0, 1.0, 1.0, 1.0, 1.0),
                                       Eigen::MatrixXd::Constant(1, 1, dbar), Eigen::MatrixXd::Zero(1, 1),
                                       Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), 1.0, 0.0, 1.0);
    for (Index c = 0; c < s.size(); ++c) s.chi[c] = std::cos(2 * pi * grid->center(c, 0));
    DarcySources src;
    src.vapor = [dbar](const Eigen::Vector3d& x, double t) {
      return (4 * pi * pi * dbar - 1.0) * std::exp(-t) * std::cos(2 * pi * x[0]);
    };
    for (int k = 0; k < steps; ++k) s = darcy_step_leading(s, dt, p, nullptr, &src);
    double err = 0.0;
    for (Index c = 0; c < s.size(); ++c) {
      const double e = s.chi[c] - std::exp(-s.t) * std::cos(2 * pi * grid->center(c, 0));
      err += e * e * h;
    }
    study.resolutions.push_back(n);
    study.l2_errors.push_back(std::sqrt(err));
  }
  for (std::size_t k = 1; k < study.l2_errors.size(); ++k) {
    const double ratio = static_cast<double>(study.resolutions[k]) / study.resolutions[k - 1];
    study.orders.push_back(std::log(study.l2_errors[k - 1] / study.l2_errors[k]) / std::log(ratio));
  }
  return study;
}

TwoScaleTrajectory two_scale_run(const TwoScaleConfig& cfg) {
  const ModelParams& p = cfg.params;
  p.validate();
  if (!cfg.macro_grid || !cfg.micro_geometry) throw std::invalid_argument("two_scale_run: grids are required");
  if (cfg.macro_grid->has_solid()) throw std::invalid_argument("two_scale_run: the macro grid must be solid-free");
  if (!(cfg.dt > 0.0) || cfg.steps < 0) throw std::invalid_argument("two_scale_run: need dt > 0 and steps >= 0");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 0.5)) throw std::invalid_argument("two_scale_run: eps must lie in [0, 0.5]");
  const UnitCell& macro = *cfg.macro_grid;
  const Index n = macro.num_cells();
  const int d = macro.dim();
  if (cfg.micro_geometry->dim() != d) {
    throw std::invalid_argument("two_scale_run: macro and micro grids must have the same dimension");
  }

  auto fail = [](Index cell, const std::exception& e) -> std::string {
    std::ostringstream msg;
    msg << "macro cell " << cell << ": " << e.what();
    return msg.str();
  };
  // Run a per-cell action and name the macro cell on failure, keeping the error category.
  auto guarded = [&](Index cell, auto&& action) {
    try {
      action();
    } catch (const InvalidRunError& e) {
      throw InvalidRunError(fail(cell, e));
    } catch (const SolverError& e) {
      throw SolverError(fail(cell, e), e.history());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fail(cell, e));
    } catch (const std::exception& e) {
      throw std::runtime_error(fail(cell, e));
    }
  };

  DarcyState s;
  s.grid = cfg.macro_grid;
  auto sized = [n] { return Eigen::VectorXd::Zero(n).eval(); };
  s.coeff = {sized(), sized(), sized(), sized(), sized()};
  s.rho_bar = sized();
  s.chi = sized();
  s.T = Eigen::VectorXd::Constant(n, cfg.T0);
  s.p = sized();
  s.v = Eigen::MatrixXd::Zero(n, d);
  s.D.resize(static_cast<std::size_t>(n));
  s.K.resize(static_cast<std::size_t>(n));
  s.A.resize(static_cast<std::size_t>(n));
  s.G.resize(static_cast<std::size_t>(n));

  std::vector<ScalarField> phi(static_cast<std::size_t>(n)), phi_ref(static_cast<std::size_t>(n));
  std::vector<FlowCorrectors> flow(static_cast<std::size_t>(n));
  TwoScaleTrajectory traj;

  auto refresh = [&](Index c) {
    const auto k = static_cast<std::size_t>(c);
    const EffectiveTensors t = effective_tensors(phi[k], p, &flow[k]);
    s.D[k] = t.D;
    s.K[k] = t.K;
    s.A[k] = t.A;
    s.G[k] = t.G;
    phi_ref[k] = phi[k];
  };

  for (Index c = 0; c < n; ++c) {
    const auto k = static_cast<std::size_t>(c);
    guarded(c, [&] {
      const Eigen::Vector3d x = cell_center(macro, c);
      phi[k] = cfg.initial_phi(x);
      if (!phi[k].geom->same_grid(*cfg.micro_geometry)) {
        throw std::invalid_argument("initial phi0 is not on the micro geometry");
      }
      s.chi[c] = cfg.initial_chi(x);
      micro_coefficients(phi[k], p, s.coeff, c);
      double rho = 0.0;
      const UnitCell& g = *phi[k].geom;
      for (Index m = 0; m < g.num_cells(); ++m) {
        if (g.is_pore(m)) rho += mixture_density(phi[k][m], p) * g.cell_volume();
      }
      s.rho_bar[c] = rho;
      refresh(c);
    });
  }

  const double liquid0 = s.coeff.liquid.sum() * macro.cell_volume();
  auto record = [&] {
    traj.times.push_back(s.t);
    traj.liquid.push_back(s.coeff.liquid);
    traj.chi.push_back(s.chi);
    traj.T.push_back(s.T);
    traj.rho_bar.push_back(s.rho_bar);
    traj.vapor_mass.push_back(s.vapor_mass());
    traj.exchange.push_back(-p.rho_l * (s.coeff.liquid.sum() * macro.cell_volume() - liquid0));
  };
  record();

  const double dt_micro_max = allen_cahn_dt_max(p);
  const int substeps = std::max(1, static_cast<int>(std::ceil(cfg.dt / dt_micro_max * (1.0 - 1e-12))));
  const double dt_micro = cfg.dt / substeps;
  const double h_macro = macro.cell_size();

  for (int step = 0; step < cfg.steps; ++step) {
    MacroCoefficients next = s.coeff;
    for (Index c = 0; c < n; ++c) {
      const auto k = static_cast<std::size_t>(c);
      guarded(c, [&] {
        // Micro velocity -w0 - sum_j w^j d_j p0; p0 only exists once the O(eps) Darcy law is active.
        FaceField v = flow[k].w0;
        for (auto& comp : v.normal) comp *= -1.0;
        if (cfg.epsilon > 0.0) {
          for (int j = 0; j < d; ++j) {
            const double dp = (s.p[macro.neighbor(c, j, 1)] - s.p[macro.neighbor(c, j, -1)]) / (2.0 * h_macro);
            for (int a = 0; a < v.geom->dim(); ++a) {
              v.normal[static_cast<std::size_t>(a)] -= dp * flow[k].w[static_cast<std::size_t>(j)].normal[static_cast<std::size_t>(a)];
            }
          }
        }
        const ScalarField chi(phi[k].geom, s.chi[c]);
        PhaseFieldState st{phi[k], s.t};
        for (int m = 0; m < substeps; ++m) st = allen_cahn_step(st, &v, chi, dt_micro, p);
        phi[k] = st.phi;
        micro_coefficients(phi[k], p, next, c);
        const double change = (phi[k].values - phi_ref[k].values).cwiseAbs().sum() * phi[k].geom->cell_volume();
        if (change > cfg.refresh_threshold) {
          refresh(c);
          ++traj.tensor_refreshes;
        }
      });
    }
    if (cfg.epsilon > 0.0) {
      s.p = solve_macro_pressure(s);
      s.v = darcy_velocity(s);
      s = darcy_step_first_order(s, cfg.dt, cfg.epsilon, p, &next);
    } else {
      s = darcy_step_leading(s, cfg.dt, p, &next);
    }
    record();
  }

  const double dv = traj.vapor_mass.back() - traj.vapor_mass.front();
  const double ex = traj.exchange.back();
  traj.audit_error = std::abs(ex) > 1e-14 ? std::abs(dv - ex) / std::abs(ex) : std::abs(dv);
  traj.final_state = s;
  traj.final_phi = phi;
  return traj;
}

}  // namespace evapore
