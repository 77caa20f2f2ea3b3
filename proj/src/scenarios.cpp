#include "evapore/scenarios.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "evapore/asymptotics.hpp"
#include "evapore/darcy.hpp"
#include "evapore/hash.hpp"
#include "evapore/homogenize.hpp"
#include "evapore/io.hpp"
#include "evapore/linear_solver.hpp"
#include "evapore/phasefield.hpp"
#include "evapore/porescale.hpp"
#include "evapore/stokes.hpp"

namespace evapore {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using std::numbers::pi;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Writes files under the output directory and records them in the manifest.
class Output {
 public:
  Output(fs::path dir, std::string scenario) : dir_(std::move(dir)) { manifest_.scenario = std::move(scenario); }

  void csv(const std::string& name, const Table& t) {
    write_csv(t, dir_ / name);
    record(name);
  }
  void vtk(const std::string& name, const std::vector<NamedField>& fields) {
    write_vtk(fields, dir_ / name);
    record(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text(dir_ / name, body);
    record(name);
  }
  void summary(const json& j) { text("summary.json", j.dump(2) + "\n"); }

  Manifest finish() {
    write_text(dir_ / "manifest.json", manifest_.to_json());
    return manifest_;
  }

 private:
  void record(const std::string& name) {
    const fs::path p = dir_ / name;
    manifest_.files.push_back({name, sha256_file(p), fs::file_size(p)});
  }

  fs::path dir_;
  Manifest manifest_;
};

std::string format_matrix(const std::string& name, const Eigen::MatrixXd& M) {
  std::ostringstream out;
  out << "# " << name << " " << M.rows() << "x" << M.cols() << "\n";
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << format_double(M(i, j));
    out << "\n";
  }
  return out.str();
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(r);
  }
  return rows;
}

json head(const RunConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  return j;
}

// Periodic minimum-image offset from `centre`.
Eigen::Vector3d offset(const Eigen::Vector3d& x, const Eigen::Vector3d& centre, int dim) {
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  for (int a = 0; a < dim; ++a) {
    double s = x[a] - centre[a];
    d[a] = s - std::round(s);
  }
  return d;
}

// Disk with a random three-lobed radius perturbation of relative size up to `noise`.
ScalarField perturbed_disk(GeometryPtr g, double lambda, const Eigen::Vector3d& centre, double R, double noise,
                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = noise * u(rng), phase = 2 * pi * u(rng);
  const int dim = g->dim();
  return ScalarField::sample(g, [=](const Eigen::Vector3d& x) {
    const Eigen::Vector3d d = offset(x, centre, dim);
    const double theta = dim >= 2 ? std::atan2(d[1], d[0]) : 0.0;
    return equilibrium_value(d.norm() - R * (1.0 + a * std::cos(3 * theta + phase)), lambda);
  });
}

ScalarField initial_phase(const RunConfig& cfg, GeometryPtr g, std::mt19937_64& rng) {
  const InitialPhase& i = cfg.initial;
  const double lambda = cfg.params.lambda;
  if (i.shape == "uniform") return ScalarField(g, i.value);
  if (i.shape == "slab") return slab_profile(g, lambda, i.center[i.axis], i.half_width, i.axis);
  if (i.noise > 0.0) return perturbed_disk(g, lambda, i.center, i.radius, i.noise, rng);
  return disk_profile(g, lambda, i.center, i.radius);
}

Table energy_table(const PoreTrajectory& traj) {
  Table t;
  t.header = {"t",        "total",          "kinetic",       "well",     "gradient",     "internal",
              "solid",    "density_energy", "liquid_volume", "mean_chi", "mass_residual"};
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& e = traj.energy[k];
    t.add({traj.times[k], e.total, e.kinetic, e.well, e.gradient, e.internal, e.solid, e.density_energy,
           traj.liquid_volume[k], traj.mean_chi[k], k == 0 ? 0.0 : traj.mass_residual[k - 1]});
  }
  t.footer = {{"monotonicity_violations", traj.monotonicity_violations},
              {"max_overshoot", traj.max_overshoot},
              {"max_chi_undefined_cells", static_cast<double>(traj.max_chi_undefined_cells)}};
  return t;
}

std::vector<NamedField> pore_fields(const PoreState& s) {
  return {{"phi", s.phi}, {"chi", s.chi}, {"T", s.T}, {"p", s.p}, {"velocity", face_to_cell(s.v)}};
}

std::string indexed(const std::string& stem, std::size_t k, const std::string& ext) {
  std::ostringstream name;
  name << stem << std::setw(3) << std::setfill('0') << k << ext;
  return name.str();
}

void relax_profile(const RunConfig& cfg, Output& out) {
  json s = head(cfg);
  json cpl = json::array(), linf = json::array(), integral = json::array(), cells = json::array();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (int r : cfg.resolutions) {
    const auto res = relax_profile_experiment(cfg.params, r);
    Table t;
    t.header = {"x", "relaxed", "exact", "error"};
    for (Index c = 0; c < res.x.size(); ++c) {
      t.add({res.x[c], res.relaxed[c], res.exact[c], res.relaxed[c] - res.exact[c]});
    }
    t.footer = {{"linf_error", res.linf_error},
                {"gradient_integral", res.gradient_integral},
                {"cells", res.cells},
                {"steps", res.steps}};
    out.csv("profile_cpl" + std::to_string(r) + ".csv", t);
    decreasing = decreasing && res.linf_error < prev;
    prev = res.linf_error;
    cpl.push_back(r);
    cells.push_back(res.cells);
    linf.push_back(res.linf_error);
    integral.push_back(res.gradient_integral);
  }
  s["cells_per_lambda"] = cpl;
  s["cells"] = cells;
  s["linf_error"] = linf;
  s["gradient_integral"] = integral;
  s["gradient_integral_exact"] = std::numbers::sqrt2 / 6;
  s["error_decreases"] = decreasing;
  out.summary(s);
}

void shrink_disk(const RunConfig& cfg, Output& out) {
  const auto res = shrink_disk_experiment(cfg.params, cfg.R0, cfg.geometry.resolution, cfg.dt_fraction, cfg.richardson);
  Table t;
  t.header = {"t", "area", "mean_curvature"};
  for (std::size_t k = 0; k < res.times.size(); ++k) t.add({res.times[k], res.areas[k], res.mean_curvature[k]});
  t.footer = {{"measured_rate", res.measured_rate},
              {"predicted_rate", res.predicted_rate},
              {"relative_error", res.relative_error}};
  if (cfg.richardson) {
    t.footer.emplace_back("extrapolated_rate", res.extrapolated_rate);
    t.footer.emplace_back("extrapolated_error", res.extrapolated_error);
  }
  out.csv("area.csv", t);
  json s = head(cfg);
  for (const auto& [k, v] : t.footer) s[k] = v;
  out.summary(s);
}

void planar_evap(const RunConfig& cfg, Output& out) {
  PlanarEvaporationConfig pc;
  pc.params = cfg.params;
  pc.chi_far = cfg.chi_far;
  pc.resolution = cfg.geometry.resolution;
  pc.frozen_chi = cfg.frozen_chi;
  pc.t_end = cfg.t_end;
  pc.samples = cfg.samples;
  pc.dt_fraction = cfg.dt_fraction;
  const auto res = planar_evaporation_experiment(pc);
  Table t;
  t.header = {"t", "position", "measured_speed", "predicted_speed", "relative_error"};
  double worst = 0.0;
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    t.add({res.times[k], res.positions[k], res.measured_speed[k], res.predicted_speed[k], res.relative_error[k]});
    worst = std::max(worst, res.relative_error[k]);
  }
  t.footer = {{"mean_measured", res.mean_measured}, {"mean_predicted", res.mean_predicted}, {"max_relative_error", worst}};
  out.csv("front.csv", t);

  const auto audit = jump_condition_audit(res.snapshots, cfg.params);
  Table a;
  a.header = {"t", "front_speed", "phase_mass", "water_mass", "heat_flux", "velocity_terms"};
  for (const auto& r : audit.samples) {
    a.add({r.t, r.front_speed, r.phase_mass, r.water_mass, r.heat_flux, r.velocity_terms});
  }
  a.footer = {{"phase_mass", audit.phase_mass},
              {"water_mass", audit.water_mass},
              {"heat_flux", audit.heat_flux},
              {"velocity_terms", audit.velocity_terms}};
  out.csv("jump_audit.csv", a);
  out.vtk("final.vtk", pore_fields(res.snapshots.back()));

  json s = head(cfg);
  for (const auto& [k, v] : t.footer) s[k] = v;
  json j;
  for (const auto& [k, v] : a.footer) j[k] = v;
  // With frozen vapor the water balance is not enforced, so its residual is not a limit check.
  s["frozen_chi"] = cfg.frozen_chi;
  s["jump_residuals"] = j;
  out.summary(s);
}

void pore_sim(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  PoreRunConfig run;
  run.params = cfg.params;
  run.dt = effective_dt(cfg);
  run.steps = cfg.steps;
  run.snapshot_every = cfg.snapshot_every;
  run.velocity = cfg.velocity;
  run.frozen_chi = cfg.frozen_chi;
  const auto traj = pore_simulate(make_pore_state(initial_phase(cfg, g, rng), cfg.chi0, cfg.T0), run);
  const Table t = energy_table(traj);
  out.csv("energy.csv", t);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) out.vtk(indexed("snapshot_", k, ".vtk"), pore_fields(traj.snapshots[k]));
  json s = head(cfg);
  s["dt"] = run.dt;
  s["steps"] = run.steps;
  for (const auto& [k, v] : t.footer) s[k] = v;
  s["liquid_volume_initial"] = traj.liquid_volume.front();
  s["liquid_volume_final"] = traj.liquid_volume.back();
  s["warning"] = resolution_warning(cfg.params, *g);
  out.summary(s);
}

void energy_audit(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg.geometry);
  PoreRunConfig run;
  run.params = cfg.params;
  run.dt = effective_dt(cfg);
  run.steps = cfg.steps;
  json per_seed = json::array();
  int total = 0;
  for (int k = 0; k < cfg.seeds; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Random centre, radius, lobe perturbation and temperature wave per seed.
    Eigen::Vector3d centre = cfg.initial.center;
    for (int a = 0; a < g->dim(); ++a) centre[a] += 0.2 * (2.0 * u(rng) - 1.0);
    const double R = cfg.initial.radius * (0.75 + 0.5 * u(rng));
    const double amp = 0.1 * u(rng), phase = 2 * pi * u(rng);
    PoreState st = make_pore_state(perturbed_disk(g, cfg.params.lambda, centre, R, cfg.initial.noise, rng), cfg.chi0,
                                   cfg.T0);
    st.T = ScalarField::sample(
        g, [&](const Eigen::Vector3d& x) { return cfg.T0 * (1.0 + amp * std::sin(2 * pi * x[0] + phase)); },
        Boundary::Periodic);
    const auto traj = pore_simulate(st, run);
    out.csv("energy_seed" + std::to_string(seed) + ".csv", energy_table(traj));
    total += traj.monotonicity_violations;
    per_seed.push_back({{"seed", seed},
                        {"violations", traj.monotonicity_violations},
                        {"E0", traj.energy.front().total},
                        {"E_final", traj.energy.back().total}});
  }
  json s = head(cfg);
  s["dt"] = run.dt;
  s["steps"] = run.steps;
  s["tolerance"] = "1e-8 |E0| per step";
  s["runs"] = per_seed;
  s["violations"] = total;
  out.summary(s);
}

ScalarField property_field(const ScalarField& phi0, const ModelParams& p, double MixtureProperties<double>::*member) {
  ScalarField f(phi0.geom, 0.0);
  for (Index c = 0; c < phi0.size(); ++c) f[c] = mixture(phi0[c], p).*member;
  return f;
}

json scalar_cell_summary(const RunConfig& cfg, const ScalarCellResult& r) {
  json s = head(cfg);
  s["tensor"] = matrix_json(r.tensor);
  s["asymmetry"] = r.asymmetry;
  s["residuals"] = r.residuals;
  json b = json::array();
  for (const auto& x : r.bounds) b.push_back({{"lower", x.lower}, {"upper", x.upper}});
  s["bounds"] = b;
  s["bounds_ok"] = r.bounds_ok;
  return s;
}

std::vector<NamedField> corrector_fields(const std::vector<ScalarField>& corr) {
  std::vector<NamedField> f;
  for (std::size_t j = 0; j < corr.size(); ++j) f.push_back({"corrector_" + std::to_string(j), corr[j]});
  return f;
}

void cell_scalar(const RunConfig& cfg, Output& out, bool conduction) {
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  const ScalarField phi0 = initial_phase(cfg, g, rng);
  const ScalarCellResult r = conduction
                                 ? cell_conduction(property_field(phi0, cfg.params, &MixtureProperties<double>::k),
                                                   cfg.params.k_S)
                                 : cell_diffusion(phi0, cfg.params.rho_g, cfg.params.D_gv);
  out.text(conduction ? "A_matrix.txt" : "D_matrix.txt", format_matrix(conduction ? "A" : "D", r.tensor));
  out.vtk("correctors.vtk", corrector_fields(r.correctors));
  out.summary(scalar_cell_summary(cfg, r));
}

void cell_permeability_run(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  const ScalarField phi0 = initial_phase(cfg, g, rng);
  const auto& p = cfg.params;
  const auto r = cell_permeability(property_field(phi0, p, &MixtureProperties<double>::mu),
                                   property_field(phi0, p, &MixtureProperties<double>::xi),
                                   property_field(phi0, p, &MixtureProperties<double>::rho));
  out.text("K_matrix.txt", format_matrix("K", r.tensor));
  std::vector<NamedField> f;
  for (std::size_t j = 0; j < r.velocity.size(); ++j) {
    f.push_back({"w_" + std::to_string(j), face_to_cell(r.velocity[j])});
    f.push_back({"pi_" + std::to_string(j), r.pressure[j]});
  }
  out.vtk("correctors.vtk", f);
  json s = head(cfg);
  s["tensor"] = matrix_json(r.tensor);
  s["asymmetry"] = r.asymmetry;
  s["residuals"] = r.residuals;
  out.summary(s);
}

void cell_forcing_run(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  const auto r = cell_forcing(initial_phase(cfg, g, rng), cfg.params);
  out.text("G_vector.txt", format_matrix("G", r.G));
  out.vtk("drift.vtk", {{"w0", face_to_cell(r.velocity)}, {"pi0", r.pressure}});
  json s = head(cfg);
  s["G"] = matrix_json(r.G);
  s["residual"] = r.residual;
  out.summary(s);
}

std::vector<NamedField> macro_fields(const DarcyState& s) {
  auto field = [&](const Eigen::VectorXd& v) { return ScalarField(s.grid, v, Boundary::Periodic); };
  VectorField vel(s.grid, Boundary::Periodic);
  vel.values = s.v;
  return {{"chi", field(s.chi)}, {"T", field(s.T)}, {"rho_bar", field(s.rho_bar)},
          {"liquid", field(s.coeff.liquid)}, {"p", field(s.p)}, {"velocity", vel}};
}

void darcy_sim(const RunConfig& cfg, Output& out) {
  const auto& p = cfg.params;
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  const ScalarField phi0 = initial_phase(cfg, g, rng);
  const EffectiveTensors eff = effective_tensors(phi0, p);
  out.text("tensors.txt", format_tensors(eff));

  MacroCoefficients one = constant_coefficients(0, 0, 0, 0, 0);
  micro_coefficients(phi0, p, one, 0);
  double rho = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) {
    if (g->is_pore(c)) rho += mixture_density(phi0[c], p) * g->cell_volume();
  }
  DarcyState s = uniform_darcy_state(make_macro_grid(g->dim(), cfg.macro_resolution), one, eff.D, eff.K, eff.A,
                                     eff.G, rho, cfg.chi0, cfg.T0);
  // Vapor wave along axis 0 within the admissible range.
  const double amp = 0.5 * std::min(cfg.chi0, 1.0 - cfg.chi0);
  for (Index c = 0; c < s.size(); ++c) s.chi[c] += amp * std::cos(2 * pi * s.grid->center(c, 0));
  if (cfg.epsilon > 0.0) {
    s.p = solve_macro_pressure(s);
    s.v = darcy_velocity(s);
  }

  Table t;
  t.header = {"t", "vapor_mass", "chi_min", "chi_max", "T_mean"};
  auto record = [&] { t.add({s.t, s.vapor_mass(), s.chi.minCoeff(), s.chi.maxCoeff(), s.T.mean()}); };
  record();
  std::size_t snap = 0;
  out.vtk(indexed("macro_", snap++, ".vtk"), macro_fields(s));
  const double m0 = s.vapor_mass();
  for (int k = 1; k <= cfg.steps; ++k) {
    s = cfg.epsilon > 0.0 ? darcy_step_first_order(s, cfg.dt, cfg.epsilon, p) : darcy_step_leading(s, cfg.dt, p);
    record();
    if (k == cfg.steps || (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0)) {
      out.vtk(indexed("macro_", snap++, ".vtk"), macro_fields(s));
    }
  }
  t.footer = {{"vapor_mass_drift", std::abs(s.vapor_mass() - m0) / std::max(std::abs(m0), 1e-300)}};
  out.csv("macro.csv", t);

  json s_json = head(cfg);
  s_json["epsilon"] = cfg.epsilon;
  s_json["vapor_mass_drift"] = t.footer.front().second;
  if (!cfg.resolutions.empty()) {
    const MmsStudy mms = darcy_mms_study(cfg.resolutions);
    Table m;
    m.header = {"resolution", "l2_error", "order"};
    for (std::size_t k = 0; k < mms.resolutions.size(); ++k) {
      m.add({static_cast<double>(mms.resolutions[k]), mms.l2_errors[k], k == 0 ? kNaN : mms.orders[k - 1]});
    }
    out.csv("mms.csv", m);
    s_json["mms_orders"] = mms.orders;
    s_json["mms_min_order"] = mms.orders.empty() ? kNaN : *std::min_element(mms.orders.begin(), mms.orders.end());
  }
  out.summary(s_json);
}

void two_scale(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg.geometry);
  std::mt19937_64 rng(cfg.seed);
  const ScalarField phi0 = initial_phase(cfg, g, rng);
  TwoScaleConfig tc;
  tc.params = cfg.params;
  tc.macro_grid = make_macro_grid(g->dim(), cfg.macro_resolution);
  tc.micro_geometry = g;
  tc.initial_phi = [&](const Eigen::Vector3d&) { return phi0; };
  tc.initial_chi = [&](const Eigen::Vector3d& x) { return x[0] < 0.5 ? cfg.chi_dry : cfg.chi0; };
  tc.T0 = cfg.T0;
  tc.dt = cfg.dt;
  tc.steps = cfg.steps;
  tc.epsilon = cfg.epsilon;
  tc.refresh_threshold = cfg.refresh_threshold;
  const auto tr = two_scale_run(tc);
  Table t;
  t.header = {"t", "vapor_mass", "exchange", "liquid_mean", "chi_mean", "T_mean"};
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    t.add({tr.times[k], tr.vapor_mass[k], tr.exchange[k], tr.liquid[k].mean(), tr.chi[k].mean(), tr.T[k].mean()});
  }
  t.footer = {{"audit_error", tr.audit_error}, {"tensor_refreshes", tr.tensor_refreshes}};
  out.csv("trajectory.csv", t);
  out.vtk("final_macro.vtk", macro_fields(tr.final_state));
  json s = head(cfg);
  s["audit_error"] = tr.audit_error;
  s["tensor_refreshes"] = tr.tensor_refreshes;
  s["closure"] = tr.closure;
  out.summary(s);
}

void dimensionless(const RunConfig& cfg, Output& out) {
  const ScaleSet scales = cfg.scales ? *cfg.scales : regime_scales(cfg.epsilon);
  const auto rep = dimensionless_audit(scales);
  json s = head(cfg);
  s["epsilon"] = rep.epsilon;
  json nums = json::array();
  for (const auto& n : rep.numbers) {
    nums.push_back({{"name", n.name},
                    {"value", n.value},
                    {"target_order", n.target_order},
                    {"ratio", n.ratio},
                    {"pass", n.pass}});
  }
  s["numbers"] = nums;
  s["all_pass"] = rep.all_pass();
  out.summary(s);
}

void dispatch(const RunConfig& cfg, Output& out) {
  const std::string& n = cfg.scenario;
  if (n == "relax-profile") relax_profile(cfg, out);
  else if (n == "shrink-disk") shrink_disk(cfg, out);
  else if (n == "planar-evap") planar_evap(cfg, out);
  else if (n == "pore-sim") pore_sim(cfg, out);
  else if (n == "energy-audit") energy_audit(cfg, out);
  else if (n == "cell-diffusion") cell_scalar(cfg, out, false);
  else if (n == "cell-conduction") cell_scalar(cfg, out, true);
  else if (n == "cell-permeability") cell_permeability_run(cfg, out);
  else if (n == "cell-forcing") cell_forcing_run(cfg, out);
  else if (n == "darcy-sim") darcy_sim(cfg, out);
  else if (n == "two-scale") two_scale(cfg, out);
  else if (n == "dimensionless-audit") dimensionless(cfg, out);
  else scenario_defaults(n);  // throws the usage error
}

}  // namespace

const ManifestEntry* Manifest::find(const std::string& path) const {
  for (const auto& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

std::string Manifest::to_json() const {
  json j;
  j["scenario"] = scenario;
  json list = json::array();
  for (const auto& f : files) list.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = list;
  return j.dump(2) + "\n";
}

Manifest run_scenario(const RunConfig& cfg) {
  const std::string ctx = cfg.scenario + ": ";
  try {
    if (const auto v = config_violations(cfg); !v.empty()) throw ConfigError(v);
    Output out(cfg.out, cfg.scenario);
    out.text("config.json", config_echo(cfg));
    dispatch(cfg, out);
    return out.finish();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidRunError& e) {
    throw InvalidRunError(ctx + e.what());
  } catch (const SolverError& e) {
    throw SolverError(ctx + e.what(), e.history());
  } catch (const GeometryError& e) {
    throw GeometryError(ctx + e.what());
  } catch (const FieldError& e) {
    throw FieldError(ctx + e.what());
  } catch (const IoError& e) {
    throw IoError(ctx + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(ctx + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(ctx + e.what());
  }
}

}  // namespace evapore
