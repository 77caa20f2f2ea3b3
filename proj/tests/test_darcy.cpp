#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "evapore/darcy.hpp"
#include "evapore/phasefield.hpp"

using namespace evapore;
using std::numbers::pi;

namespace {

GeometryPtr macro_grid(int dim, int n) { return make_macro_grid(dim, n); }

DarcyState plain_state(int dim, int n, const Eigen::MatrixXd& D, double m = 1.0) {
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(dim, dim);
  return uniform_darcy_state(macro_grid(dim, n), constant_coefficients(0.2, m, 2.0, 1.5, 0.6), D, Z,
                             Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim), 1.0, 0.4, 1.0);
}

// Amplitude of the mode cos(2 pi k.x) in chi.
double mode_amplitude(const DarcyState& s, const Eigen::Vector2d& k) {
  double num = 0.0, den = 0.0;
  for (Index c = 0; c < s.size(); ++c) {
    const Eigen::Vector3d x = cell_center(*s.grid, c);
    const double w = std::cos(2 * pi * (k[0] * x[0] + k[1] * x[1]));
    num += w * s.chi[c];
    den += w * w;
  }
  return num / den;
}

double decay_rate(DarcyState s, const Eigen::Vector2d& k, double dt, int steps) {
  ModelParams p;
  for (Index c = 0; c < s.size(); ++c) {
    const Eigen::Vector3d x = cell_center(*s.grid, c);
    s.chi[c] = std::cos(2 * pi * (k[0] * x[0] + k[1] * x[1]));
  }
  const double a0 = mode_amplitude(s, k);
  for (int i = 0; i < steps; ++i) s = darcy_step_leading(s, dt, p);
  return -std::log(mode_amplitude(s, k) / a0) / (dt * steps);
}

ModelParams micro_params() {
  ModelParams p;
  p.lambda = 0.06;
  p.chi_sat = 0.5;
  return p;
}

GeometryPtr micro_disk(int n) {
  GeometrySpec s;
  s.kind = GeometryKind::CenteredDisk;
  s.resolution = n;
  s.radius = 0.2;
  return build_geometry(s);
}

}  // namespace

TEST_CASE("uniform macro state is stationary") {
  auto s = plain_state(2, 8, Eigen::MatrixXd::Identity(2, 2));
  ModelParams p;
  auto next = darcy_step_leading(s, 0.1, p);
  CHECK((next.chi.array() - 0.4).abs().maxCoeff() <= 1e-14);
  CHECK((next.T.array() - 1.0).abs().maxCoeff() <= 1e-14);
  CHECK(next.t == doctest::Approx(0.1));
}

TEST_CASE("Fourier modes decay at the tensor rate") {
  const double m = 2.0;
  auto iso = plain_state(2, 32, 0.05 * Eigen::MatrixXd::Identity(2, 2), m);
  const double expect = 0.05 * 4 * pi * pi / m;
  CHECK(decay_rate(iso, {1, 0}, 0.01, 50) == doctest::Approx(expect).epsilon(0.05));

  Eigen::MatrixXd D(2, 2);
  D << 0.05, 0.015, 0.015, 0.04;
  auto aniso = plain_state(2, 32, D, m);
  const double diag = 4 * pi * pi * (D(0, 0) + 2 * D(0, 1) + D(1, 1)) / m;
  const double anti = 4 * pi * pi * (D(0, 0) - 2 * D(0, 1) + D(1, 1)) / m;
  CHECK(decay_rate(aniso, {1, 1}, 0.005, 50) == doctest::Approx(diag).epsilon(0.05));
  CHECK(decay_rate(aniso, {1, -1}, 0.005, 50) == doctest::Approx(anti).epsilon(0.05));
}

TEST_CASE("manufactured solution converges at second order") {
  auto study = darcy_mms_study({16, 32, 64});
  REQUIRE(study.orders.size() == 2);
  for (double o : study.orders) CHECK(o >= 1.9);
  CHECK(study.l2_errors[2] < study.l2_errors[0]);
}

TEST_CASE("Darcy velocity examples") {
  auto s = plain_state(2, 8, Eigen::MatrixXd::Identity(2, 2));
  CHECK(darcy_velocity(s).cwiseAbs().maxCoeff() == 0.0);

  const double k = 0.7;
  s.K.assign(static_cast<std::size_t>(s.size()), k * Eigen::MatrixXd::Identity(2, 2));
  for (Index c = 0; c < s.size(); ++c) s.p[c] = cell_center(*s.grid, c)[0];
  const Eigen::MatrixXd v = darcy_velocity(s);
  for (Index c = 0; c < s.size(); ++c) {
    const int i = s.grid->coords(c)[0];
    if (i == 0 || i == s.grid->resolution() - 1) continue;  // the periodic wrap breaks the linear ramp
    CHECK(v(c, 0) == doctest::Approx(-k));
    CHECK(std::abs(v(c, 1)) <= 1e-14);
  }
}

TEST_CASE("channel drift composes with the pressure solve") {
  GeometrySpec spec;
  spec.kind = GeometryKind::Channel;
  spec.resolution = 48;
  spec.width = 0.5;
  ModelParams p;
  p.lambda = 0.05;
  p.g = Eigen::Vector3d(2.0, 0.0, 0.0);
  auto cell = build_geometry(spec);
  auto t = effective_tensors(ScalarField(cell, 0.0), p);
  const double mu = p.mu_g;
  const double k11 = 0.125 / (12 * mu);
  CHECK(t.G[0] == doctest::Approx(-p.rho_g * p.g[0] * k11).epsilon(0.02));

  auto s = uniform_darcy_state(macro_grid(2, 6), constant_coefficients(0.0, 1.0, 1.0, 1.0, cell->porosity()), t.D, t.K,
                               t.A, t.G, p.rho_g, 0.5, 1.0);
  s.p = solve_macro_pressure(s);
  CHECK(s.p.cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd v = darcy_velocity(s);
  for (Index c = 0; c < s.size(); ++c) CHECK(v(c, 0) == doctest::Approx(-t.G[0]).epsilon(1e-12));
}

TEST_CASE("first-order step at eps = 0 is the leading step") {
  auto s = plain_state(2, 8, 0.1 * Eigen::MatrixXd::Identity(2, 2));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.2, 0.6);
  for (Index c = 0; c < s.size(); ++c) {
    s.chi[c] = u(rng);
    s.T[c] = 1.0 + u(rng);
    s.v(c, 0) = u(rng);
  }
  ModelParams p;
  auto a = darcy_step_leading(s, 0.05, p);
  auto b = darcy_step_first_order(s, 0.05, 0.0, p);
  CHECK(a.chi == b.chi);
  CHECK(a.T == b.T);
  CHECK(a.rho_bar == b.rho_bar);
}

TEST_CASE("convective terms are linear in eps") {
  auto s = plain_state(2, 8, 0.1 * Eigen::MatrixXd::Identity(2, 2));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Index c = 0; c < s.size(); ++c) {
    s.rho_bar[c] = 1.0 + 0.5 * u(rng);
    s.chi[c] = 0.5 + 0.3 * u(rng);
    s.v(c, 0) = u(rng);
    s.v(c, 1) = u(rng);
  }
  ModelParams p;
  auto full = convective_terms(s, 0.2, p);
  auto half = convective_terms(s, 0.1, p);
  CHECK(full.mass == 2.0 * half.mass);
  CHECK(full.water == 2.0 * half.water);
  CHECK(full.heat == 2.0 * half.heat);
  CHECK(full.mass.cwiseAbs().maxCoeff() > 0.0);
  // Upwind fluxes telescope: the total is conserved.
  CHECK(std::abs(full.mass.sum()) <= 1e-12 * full.mass.cwiseAbs().sum());
}

TEST_CASE("a density bump travels with eps times the Darcy velocity") {
  const int n = 128;
  auto s = plain_state(1, n, Eigen::MatrixXd::Constant(1, 1, 1e-3));
  s.coeff.porosity.setOnes();
  const double V = 1.0, eps = 0.1, dt = 0.02;
  const int steps = 100;
  auto centroid = [&](const Eigen::VectorXd& r) {
    double num = 0.0, den = 0.0;
    for (Index c = 0; c < n; ++c) {
      const double w = r[c] - 1.0;
      num += w * s.grid->center(c, 0);
      den += w;
    }
    return num / den;
  };
  for (Index c = 0; c < n; ++c) {
    const double x = s.grid->center(c, 0);
    s.rho_bar[c] = 1.0 + std::exp(-std::pow((x - 0.3) / 0.05, 2));
    s.v(c, 0) = V;
  }
  const double x0 = centroid(s.rho_bar);
  ModelParams p;
  for (int i = 0; i < steps; ++i) s = darcy_step_first_order(s, dt, eps, p);
  CHECK(std::abs(centroid(s.rho_bar) - (x0 + eps * V * dt * steps)) <= 1.0 / n);
}

TEST_CASE("mixture density is frozen at leading order") {
  auto s = plain_state(2, 8, 0.1 * Eigen::MatrixXd::Identity(2, 2));
  for (Index c = 0; c < s.size(); ++c) {
    s.rho_bar[c] = 1.0 + 0.1 * c;
    s.v(c, 0) = 1.0;
  }
  ModelParams p;
  auto next = darcy_step_leading(s, 0.1, p);
  CHECK(next.rho_bar == s.rho_bar);
}

TEST_CASE("implicit macro diffusion obeys the maximum principle") {
  auto s = plain_state(2, 16, Eigen::Vector2d(0.3, 0.05).asDiagonal());
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.2, 0.7);
  for (Index c = 0; c < s.size(); ++c) s.chi[c] = u(rng);
  const double lo = s.chi.minCoeff(), hi = s.chi.maxCoeff();
  ModelParams p;
  for (int i = 0; i < 20; ++i) {
    s = darcy_step_leading(s, 0.5, p);
    CHECK(s.chi.minCoeff() >= lo - 1e-12);
    CHECK(s.chi.maxCoeff() <= hi + 1e-12);
  }
}

TEST_CASE("two-scale run with dry cells at saturation stays put") {
  TwoScaleConfig cfg;
  cfg.params = micro_params();
  cfg.macro_grid = macro_grid(2, 2);
  cfg.micro_geometry = micro_disk(24);
  cfg.initial_phi = [&](const Eigen::Vector3d&) { return ScalarField(cfg.micro_geometry, 0.0); };
  cfg.initial_chi = [&](const Eigen::Vector3d&) { return cfg.params.chi_sat; };
  cfg.dt = 0.01;
  cfg.steps = 50;
  auto tr = two_scale_run(cfg);
  CHECK(tr.times.size() == 51);
  CHECK(tr.tensor_refreshes == 0);
  CHECK((tr.chi.back().array() - cfg.params.chi_sat).abs().maxCoeff() <= 1e-12);
  CHECK(tr.liquid.back().cwiseAbs().maxCoeff() == 0.0);
  CHECK(tr.audit_error <= 1e-12);
}

TEST_CASE("undersaturated cells evaporate and the exchange audit closes") {
  TwoScaleConfig cfg;
  cfg.params = micro_params();
  cfg.macro_grid = macro_grid(2, 2);
  cfg.micro_geometry = micro_disk(32);
  cfg.initial_phi = [&](const Eigen::Vector3d&) {
    return disk_profile(cfg.micro_geometry, cfg.params.lambda, Eigen::Vector3d::Zero(), 0.22);
  };
  cfg.initial_chi = [](const Eigen::Vector3d& x) { return x[0] < 0.5 ? 0.2 : 0.3; };
  cfg.dt = 0.02;
  cfg.steps = 6;
  auto tr = two_scale_run(cfg);
  for (std::size_t k = 1; k < tr.liquid.size(); ++k) {
    for (Index c = 0; c < tr.liquid[k].size(); ++c) CHECK(tr.liquid[k][c] < tr.liquid[k - 1][c]);
  }
  CHECK(tr.exchange.back() > 0.0);
  CHECK(tr.audit_error <= 0.05);
  CHECK(tr.tensor_refreshes > 0);
  CHECK(tr.closure == "separable");

  cfg.refresh_threshold = std::numeric_limits<double>::infinity();
  cfg.steps = 2;
  CHECK(two_scale_run(cfg).tensor_refreshes == 0);
}

TEST_CASE("two-scale run rejects mismatched grids") {
  TwoScaleConfig cfg;
  cfg.params = micro_params();
  cfg.macro_grid = macro_grid(1, 4);
  cfg.micro_geometry = micro_disk(16);
  cfg.initial_phi = [&](const Eigen::Vector3d&) { return ScalarField(cfg.micro_geometry, 0.0); };
  cfg.initial_chi = [](const Eigen::Vector3d&) { return 0.5; };
  cfg.dt = 0.01;
  cfg.steps = 1;
  CHECK_THROWS_AS(two_scale_run(cfg), std::invalid_argument);
}
