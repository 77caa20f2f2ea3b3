#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "evapore/grid.hpp"
#include "evapore/linear_solver.hpp"
#include "evapore/operators.hpp"
#include "evapore/stokes.hpp"

using namespace evapore;
using std::numbers::pi;

namespace {

GeometryPtr open_cell(int dim, int n) {
  GeometrySpec s;
  s.kind = GeometryKind::NoSolid;
  s.dim = dim;
  s.resolution = n;
  return build_geometry(s);
}

double sin_error(int n) {
  auto g = open_cell(2, n);
  auto f = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return std::sin(2 * pi * x[0]); }, Boundary::Periodic);
  auto grad = gradient(f);
  double err = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) {
    err = std::max(err, std::abs(grad.values(c, 0) - 2 * pi * std::cos(2 * pi * cell_center(*g, c)[0])));
  }
  return err;
}

double div_grad_error(int n) {
  auto g = open_cell(2, n);
  auto f = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return std::sin(2 * pi * x[0]); }, Boundary::Periodic);
  auto lap = divergence(gradient(f));
  double err = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) {
    err = std::max(err, std::abs(lap[c] + 4 * pi * pi * f[c]));
  }
  return err;
}

double flux_laplacian_error(int n) {
  auto g = open_cell(2, n);
  auto f = ScalarField::sample(
      g, [](const Eigen::Vector3d& x) { return std::sin(2 * pi * x[0]) * std::cos(2 * pi * x[1]); },
      Boundary::Periodic);
  auto lap = laplacian(f, ScalarField(g, 1.0, Boundary::Periodic));
  double err = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) err = std::max(err, std::abs(lap[c] + 8 * pi * pi * f[c]));
  return err;
}

}  // namespace

TEST_CASE("build_geometry examples") {
  auto open = open_cell(2, 32);
  CHECK(open->porosity() == 1.0);
  CHECK(open->interface_faces().empty());

  GeometrySpec disk;
  disk.kind = GeometryKind::CenteredDisk;
  disk.radius = 0.25;
  disk.resolution = 64;
  auto g = build_geometry(disk);
  CHECK(std::abs(g->porosity() - (1.0 - pi * 0.0625)) <= 0.01);

  GeometrySpec stripes;
  stripes.kind = GeometryKind::Stripes;
  stripes.solid_fraction = 0.5;
  stripes.resolution = 32;
  auto s = build_geometry(stripes);
  CHECK(s->porosity() == 0.5);
}

TEST_CASE("interface faces separate pore from solid") {
  GeometrySpec disk;
  disk.kind = GeometryKind::CenteredDisk;
  disk.resolution = 32;
  auto g = build_geometry(disk);
  CHECK_FALSE(g->interface_faces().empty());
  for (const auto& f : g->interface_faces()) {
    CHECK(g->is_pore(f.pore_cell));
    CHECK(g->is_solid(f.solid_cell));
    CHECK(g->neighbor(f.pore_cell, f.axis, f.side) == f.solid_cell);
  }
}

TEST_CASE("disconnected pore space is rejected with the component count") {
  // Two parallel solid rows leave two separate pore slabs.
  std::vector<std::uint8_t> mask(64, 0);
  for (int i = 0; i < 8; ++i) {
    mask[static_cast<std::size_t>(i + 8 * 0)] = 1;
    mask[static_cast<std::size_t>(i + 8 * 4)] = 1;
  }
  try {
    UnitCell cell(2, 8, mask);
    FAIL("expected a geometry error");
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find("2 components") != std::string::npos);
  }
  GeometrySpec small;
  small.resolution = 4;
  CHECK_THROWS_AS(build_geometry(small), GeometryError);
}

TEST_CASE("raster import accepts 0/255 only") {
  std::string ok = "P2\n# comment\n8 8\n255\n";
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) ok += (r == 3 && c == 3) ? "0 " : "255 ";
    ok += "\n";
  }
  auto g = parse_pgm_geometry(ok);
  CHECK(g->solid_count() == 1);
  CHECK(g->is_solid(g->index({3, 4, 0})));
  std::string bad = ok;
  bad.replace(bad.find("255 "), 3, "128");
  CHECK_THROWS_AS(parse_pgm_geometry(bad), GeometryError);
}

TEST_CASE("gradient examples") {
  auto g = open_cell(2, 16);
  auto grad = gradient(ScalarField(g, 3.5, Boundary::Periodic));
  CHECK(grad.values.cwiseAbs().maxCoeff() == 0.0);

  const double e1 = sin_error(16), e2 = sin_error(32), e3 = sin_error(64);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));

  auto linear = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return x[0]; }, Boundary::Periodic);
  CHECK(periodicity_residual(linear) > 10.0);
  auto smooth = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return std::sin(2 * pi * x[0]); },
                                    Boundary::Periodic);
  CHECK(periodicity_residual(smooth) < 2.0);
}

TEST_CASE("divergence and laplacian examples") {
  const double e1 = div_grad_error(16), e2 = div_grad_error(32), e3 = div_grad_error(64);
  CHECK(e1 / e2 > 3.7);
  CHECK(e2 / e3 > 3.7);
  const double order = std::log2(flux_laplacian_error(16) / flux_laplacian_error(128)) / 3.0;
  CHECK(order >= 1.9);

  auto g = open_cell(2, 16);
  auto lap = laplacian(ScalarField(g, 2.0, Boundary::Periodic), ScalarField(g, 1.0, Boundary::Periodic));
  CHECK(lap.values.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(laplacian(ScalarField(g, 2.0, Boundary::Periodic), ScalarField(g, 0.0, Boundary::Periodic)),
                  FieldError);
}

TEST_CASE("conservativity of the flux laplacian") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (auto bc : {Boundary::Periodic, Boundary::ZeroGradientAtSolid}) {
    GeometrySpec disk;
    disk.kind = bc == Boundary::Periodic ? GeometryKind::NoSolid : GeometryKind::CenteredDisk;
    disk.resolution = 24;
    auto g = build_geometry(disk);
    Eigen::VectorXd f(g->num_cells()), k(g->num_cells());
    for (Index c = 0; c < g->num_cells(); ++c) {
      f[c] = u(rng);
      k[c] = u(rng);
    }
    ScalarField F(g, f, bc), K(g, k, bc);
    const double total = integrate(laplacian(F, K), bc == Boundary::Periodic ? Region::Whole : Region::Pore);
    CHECK(std::abs(total) <= 1e-12 * f.norm());
  }
}

TEST_CASE("divergence is the negative adjoint of gradient") {
  GeometrySpec disk;
  disk.kind = GeometryKind::CenteredDisk;
  disk.resolution = 20;
  auto g = build_geometry(disk);
  std::mt19937 rng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField f(g, 0.0);
    VectorField F(g);
    for (Index c = 0; c < g->num_cells(); ++c) {
      if (g->is_solid(c)) continue;
      f[c] = n01(rng);
      for (int a = 0; a < 2; ++a) F.values(c, a) = n01(rng);
    }
    const double lhs = integrate((divergence(F).values.array() * f.values.array()).matrix(), *g, Region::Pore);
    const double rhs = integrate((gradient(f).values.array() * F.values.array()).rowwise().sum().matrix(), *g,
                                 Region::Pore);
    CHECK(std::abs(lhs + rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1.0));
  }
}

TEST_CASE("integrate examples") {
  auto g = open_cell(2, 16);
  CHECK(integrate(ScalarField(g, 1.0), Region::Whole) == 1.0);
  GeometrySpec stripes;
  stripes.kind = GeometryKind::Stripes;
  stripes.resolution = 32;
  auto s = build_geometry(stripes);
  CHECK(integrate(ScalarField(s, 1.0), Region::Pore) == 0.5);
}

TEST_CASE("solve_linear examples") {
  const Index n = 10;
  LinearSystem id;
  id.A.resize(n, n);
  id.A.setIdentity();
  id.rhs = Eigen::VectorXd::LinSpaced(n, 1.0, 3.0);
  auto rep = solve_linear(id, 1e-12);
  CHECK((rep.x - id.rhs).cwiseAbs().maxCoeff() == 0.0);

  auto g = open_cell(2, 32);
  auto set = active_set(*g, Region::Whole);
  LinearSystem poisson;
  poisson.A = assemble_diffusion(*g, face_coefficients(ScalarField(g, 1.0, Boundary::Periodic), Boundary::Periodic), set);
  poisson.null_space = NullSpace::Constants;
  poisson.dim = 2;
  poisson.rhs = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return std::sin(2 * pi * x[0]); }).values;
  // A is -laplacian, so the solution is sin / (4 pi^2).
  auto sol = solve_linear(poisson, 1e-10);
  double err = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) {
    err = std::max(err, std::abs(sol.x[c] - poisson.rhs[c] / (4 * pi * pi)));
  }
  CHECK(err < 5e-4);
  CHECK(std::abs(sol.x.mean()) < 1e-14);
  CHECK(sol.iterations > 0);
  CHECK(sol.history.size() == static_cast<std::size_t>(sol.iterations) + 1);

  poisson.rhs.setConstant(4.0);
  auto zero = solve_linear(poisson, 1e-10);
  CHECK(zero.x.cwiseAbs().maxCoeff() == 0.0);

  LinearSystem wrong = poisson;
  wrong.A.coeffRef(0, 0) += 1.0;
  CHECK_THROWS_AS(solve_linear(wrong, 1e-10), std::invalid_argument);
}

TEST_CASE("non-convergence raises with residual history") {
  // Indefinite diagonal defeats both CG and the smoother.
  const Index n = 8;
  LinearSystem sys;
  sys.A.resize(n, n);
  for (Index i = 0; i < n; ++i) sys.A.insert(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
  for (Index i = 0; i + 1 < n; ++i) {
    sys.A.insert(i, i + 1) = 3.0;
    sys.A.insert(i + 1, i) = 3.0;
  }
  sys.rhs = Eigen::VectorXd::Ones(n);
  try {
    solve_linear(sys, 1e-12);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK_FALSE(e.history().empty());
  }
}

TEST_CASE("operators are deterministic") {
  auto g = open_cell(2, 24);
  auto f = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return std::exp(std::sin(2 * pi * x[0]) * x[1]); },
                               Boundary::Periodic);
  auto k = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return 1.0 + x[0]; }, Boundary::Periodic);
  auto a = laplacian(f, k);
  auto b = laplacian(f, k);
  CHECK(a.values == b.values);
}

TEST_CASE("Stokes channel reproduces plane Poiseuille flux") {
  GeometrySpec ch;
  ch.kind = GeometryKind::Channel;
  ch.dim = 2;
  ch.resolution = 32;
  ch.width = 0.5;
  ch.axis = 0;
  auto g = build_geometry(ch);
  const double mu = 2.0;
  Eigen::VectorXd m = Eigen::VectorXd::Constant(g->num_cells(), mu);
  StokesOperator op(g, m, Eigen::VectorXd::Zero(g->num_cells()), Eigen::VectorXd::Ones(g->num_cells()));
  VectorField f(g);
  f.values.col(0).setOnes();
  auto sol = op.solve(f);
  double flux = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) flux += sol.velocity(0, c);
  flux *= g->cell_volume();
  CHECK(flux == doctest::Approx(0.125 / (12 * mu)).epsilon(0.02));
  CHECK(sol.relative_residual < 1e-10);
  double vmax = 0.0;
  for (Index c = 0; c < g->num_cells(); ++c) vmax = std::max(vmax, std::abs(sol.velocity(1, c)));
  CHECK(vmax < 1e-12);
}

TEST_CASE("Stokes without solid projects a uniform force") {
  auto g = open_cell(2, 16);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(g->num_cells());
  StokesOperator op(g, one, Eigen::VectorXd::Zero(g->num_cells()), one);
  VectorField f(g);
  f.values.col(1).setConstant(-9.81);
  auto sol = op.solve(f);
  CHECK(sol.velocity.normal[0].cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sol.velocity.normal[1].cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sol.projected_force[1] == doctest::Approx(-9.81));
  CHECK(sol.pressure.values.cwiseAbs().maxCoeff() < 1e-10);
}
