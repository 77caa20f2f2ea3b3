#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "evapore/constitutive.hpp"
#include "evapore/phasefield.hpp"

using namespace evapore;

namespace {

GeometryPtr line(int n) {
  GeometrySpec s;
  s.dim = 1;
  s.resolution = n;
  return build_geometry(s);
}

GeometryPtr square(int n) {
  GeometrySpec s;
  s.dim = 2;
  s.resolution = n;
  return build_geometry(s);
}

ModelParams unit_params(double lambda) {
  ModelParams p;
  p.lambda = lambda;
  return p;
}

}  // namespace

TEST_CASE("constant wells are fixed points for any vapor state") {
  auto g = square(16);
  auto p = unit_params(0.1);
  const double dt = allen_cahn_dt_max(p);
  for (double chi : {0.0, 0.3, 1.0}) {
    for (double value : {0.0, 1.0}) {
      PhaseFieldState s{ScalarField(g, value), 0.0};
      for (int k = 0; k < 5; ++k) s = allen_cahn_step(s, nullptr, ScalarField(g, chi), dt, p);
      CHECK((s.phi.values.array() == value).all());
    }
  }
}

TEST_CASE("dt above the stability bound is refused") {
  auto g = line(32);
  auto p = unit_params(0.1);
  PhaseFieldState s{ScalarField(g, 0.5), 0.0};
  try {
    allen_cahn_step(s, nullptr, ScalarField(g, p.chi_sat), 2.0 * allen_cahn_dt_max(p), p);
    FAIL("expected refusal");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("dt_max") != std::string::npos);
  }
}

TEST_CASE("equilibrium_profile examples") {
  const double lambda = 0.05;
  CHECK(equilibrium_value(0.0, lambda) == 0.5);
  CHECK(equilibrium_value(-20 * lambda, lambda) == doctest::Approx(1.0));
  CHECK(equilibrium_value(20 * lambda, lambda) == doctest::Approx(0.0));
  const double quarter = std::numbers::sqrt2 * lambda * std::atanh(0.5);
  CHECK(equilibrium_value(quarter, lambda) == doctest::Approx(0.25).epsilon(1e-14));
  auto g = line(64);
  auto f = equilibrium_profile(g, lambda, 0.5);
  for (Index c = 1; c < g->num_cells(); ++c) CHECK(f[c] < f[c - 1]);
}

TEST_CASE("gradient_energy_integral examples") {
  const double lambda = 1.0 / 64;
  auto g = line(1024);  // lambda / h = 16
  auto f = equilibrium_profile(g, lambda, 0.5);
  CHECK(std::abs(gradient_energy_integral(f, lambda) - std::numbers::sqrt2 / 6) <= 1e-3);
  CHECK(gradient_energy_integral(ScalarField(g, 0.3), lambda) == 0.0);
  auto wide = equilibrium_profile(g, 2 * lambda, 0.5);
  CHECK(std::abs(gradient_energy_integral(wide, lambda) - std::numbers::sqrt2 / 12) <= 1e-3);
  auto edge = equilibrium_profile(g, lambda, 0.01);
  CHECK_THROWS_AS(gradient_energy_integral(edge, lambda), InvalidRunError);
}

TEST_CASE("relaxed step data matches the equilibrium profile") {
  const int n = 400;
  const double lambda = 8.0 / n;
  auto g = line(n);
  auto p = unit_params(lambda);
  Eigen::VectorXd step(n);
  for (int i = 0; i < n; ++i) step[i] = (i >= n / 4 && i < 3 * n / 4) ? 1.0 : 0.0;
  PhaseFieldState s{ScalarField(g, step), 0.0};
  const double dt = allen_cahn_dt_max(p);
  ScalarField chi(g, p.chi_sat);
  for (int k = 0; k < 20000; ++k) {
    auto next = allen_cahn_step(s, nullptr, chi, dt, p);
    const double change = (next.phi.values - s.phi.values).cwiseAbs().maxCoeff();
    s = std::move(next);
    if (change < 1e-13) break;
  }
  auto exact = slab_profile(g, lambda, 0.5, 0.25);
  CHECK((s.phi.values - exact.values).cwiseAbs().maxCoeff() <= 1e-2);
}

TEST_CASE("phi = 1/2 is an unstable steady state") {
  auto g = line(32);
  auto p = unit_params(0.1);
  const double dt = allen_cahn_dt_max(p);
  ScalarField chi(g, p.chi_sat);
  PhaseFieldState s{ScalarField(g, 0.5), 0.0};
  auto still = allen_cahn_step(s, nullptr, chi, dt, p);
  CHECK((still.phi.values.array() == 0.5).all());
  s.phi.values.array() += 1e-3;
  double dev = 1e-3;
  for (int k = 0; k < 10; ++k) {
    s = allen_cahn_step(s, nullptr, chi, dt, p);
    const double now = (s.phi.values.array() - 0.5).abs().minCoeff();
    CHECK(now > dev);
    dev = now;
  }
}

TEST_CASE("overshoot decays without reaction") {
  auto g = square(32);
  auto p = unit_params(0.1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.02, 1.02);
  Eigen::VectorXd v(g->num_cells());
  for (Index c = 0; c < v.size(); ++c) v[c] = u(rng);
  PhaseFieldState s{ScalarField(g, v), 0.0};
  ScalarField chi(g, p.chi_sat);
  double prev = phase_overshoot(s.phi);
  CHECK(prev > 0.0);
  for (int k = 0; k < 20; ++k) {
    s = allen_cahn_step(s, nullptr, chi, allen_cahn_dt_max(p), p);
    CHECK(s.overshoot <= prev);
    prev = s.overshoot;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("shifting the initial data by one cell shifts the solution exactly") {
  const int n = 24;
  auto g = square(n);
  auto p = unit_params(0.08);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd a(g->num_cells()), b(g->num_cells());
  for (Index c = 0; c < a.size(); ++c) a[c] = u(rng);
  for (Index c = 0; c < a.size(); ++c) b[g->neighbor(c, 0, 1)] = a[c];
  AllenCahnOptions opt;
  opt.order_independent = true;
  ScalarField chi(g, 0.2);
  PhaseFieldState sa{ScalarField(g, a), 0.0}, sb{ScalarField(g, b), 0.0};
  for (int k = 0; k < 5; ++k) {
    sa = allen_cahn_step(sa, nullptr, chi, allen_cahn_dt_max(p), p, opt);
    sb = allen_cahn_step(sb, nullptr, chi, allen_cahn_dt_max(p), p, opt);
  }
  bool exact = true;
  for (Index c = 0; c < a.size(); ++c) exact = exact && sb.phi[g->neighbor(c, 0, 1)] == sa.phi[c];
  CHECK(exact);
}

TEST_CASE("large overshoot aborts the run") {
  auto g = line(32);
  auto p = unit_params(0.1);
  PhaseFieldState s{ScalarField(g, 1.3), 0.0};
  CHECK_THROWS_AS(allen_cahn_step(s, nullptr, ScalarField(g, p.chi_sat), 0.01 * allen_cahn_dt_max(p), p),
                  InvalidRunError);
}

TEST_CASE("upwind advection conserves the phase integral") {
  auto g = square(32);
  auto p = unit_params(0.08);
  auto phi = disk_profile(g, p.lambda, Eigen::Vector3d(0.5, 0.5, 0), 0.25);
  FaceField v(g);
  v.normal[0].setConstant(0.3);
  // The upwind fluxes telescope over the periodic cell, so advection leaves the phase integral unchanged.
  PhaseFieldState s0{phi, 0.0};
  const double dt = allen_cahn_dt_max(p);
  ScalarField chi(g, p.chi_sat);
  auto with = allen_cahn_step(s0, &v, chi, dt, p);
  auto without = allen_cahn_step(s0, nullptr, chi, dt, p);
  CHECK(std::abs(with.phi.values.sum() - without.phi.values.sum()) < 1e-9 * without.phi.values.sum());
}
