#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "evapore/homogenize.hpp"
#include "evapore/operators.hpp"
#include "evapore/phasefield.hpp"

using namespace evapore;
using std::numbers::pi;

namespace {

GeometryPtr geometry(GeometryKind kind, int n, int axis = 0) {
  GeometrySpec s;
  s.kind = kind;
  s.dim = 2;
  s.resolution = n;
  s.axis = axis;
  s.radius = 0.25;
  s.width = 0.5;
  return build_geometry(s);
}

// Solid square around the cell corner, symmetric under the four-fold rotations about the centre.
GeometryPtr corner_block(int n, int half) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n * n), 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool near_i = i < half || i >= n - half;
      const bool near_j = j < half || j >= n - half;
      mask[static_cast<std::size_t>(j * n + i)] = near_i && near_j ? 1 : 0;
    }
  }
  return std::make_shared<const UnitCell>(2, n, mask);
}

double harmonic2(double a, double b) { return 2 * a * b / (a + b); }

ScalarField uniform_mu(GeometryPtr g, double v) { return ScalarField(std::move(g), v); }

}  // namespace

TEST_CASE("uniform diffusion coefficient needs no correction") {
  auto g = geometry(GeometryKind::NoSolid, 16);
  auto res = cell_diffusion(ScalarField(g, 0.3), 2.0, 1.5);
  const double c = 1.5 * 2.0 * 0.7;
  CHECK((res.tensor - c * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12 * c);
  for (const auto& k : res.correctors) CHECK(k.values.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(res.bounds_ok);
}

TEST_CASE("laminate diffusion gives harmonic and arithmetic means") {
  auto g = geometry(GeometryKind::NoSolid, 32);
  auto phi = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return x[0] < 0.5 ? 0.0 : 0.75; });
  auto res = cell_diffusion(phi, 1.0, 1.0);
  const double c1 = 1.0, c2 = 0.25;
  CHECK(res.tensor(0, 0) == doctest::Approx(harmonic2(c1, c2)).epsilon(0.01));
  CHECK(res.tensor(1, 1) == doctest::Approx(0.5 * (c1 + c2)).epsilon(0.01));
  CHECK(std::abs(res.tensor(0, 1)) <= 1e-10);
  CHECK(res.bounds_ok);
}

TEST_CASE("diffusion around a centred disk is isotropic and bounded") {
  auto g = geometry(GeometryKind::CenteredDisk, 64);
  auto res = cell_diffusion(ScalarField(g, 0.0), 1.0, 1.0);
  const double d11 = res.tensor(0, 0), d22 = res.tensor(1, 1);
  CHECK(std::abs(d11 - d22) <= 0.01 * d11);
  CHECK(d11 < 1.0 - pi * 0.25 * 0.25);
  CHECK(d11 > res.bounds[0].lower);
  CHECK(res.bounds[0].lower > 0.0);
  CHECK(res.bounds_ok);
  CHECK(res.asymmetry <= 1e-8);
  for (const auto& k : res.correctors) {
    CHECK(std::abs(integrate(k, Region::Pore)) <= 1e-10 * k.values.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("scaling the coefficient scales the tensor and keeps the correctors") {
  auto g = geometry(GeometryKind::CenteredDisk, 32);
  auto phi = ScalarField::sample(g, [](const Eigen::Vector3d& x) { return 0.3 * std::sin(2 * pi * x[1]) + 0.3; });
  auto a = cell_diffusion(phi, 1.0, 1.0);
  auto b = cell_diffusion(phi, 1.0, 7.5);
  CHECK((b.tensor - 7.5 * a.tensor).cwiseAbs().maxCoeff() <= 1e-9 * b.tensor.cwiseAbs().maxCoeff());
  for (int j = 0; j < 2; ++j) {
    CHECK((b.correctors[j].values - a.correctors[j].values).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("all-liquid cell is a degenerate diffusion problem") {
  auto g = geometry(GeometryKind::CenteredDisk, 16);
  CHECK_THROWS_AS(cell_diffusion(ScalarField(g, 1.0), 1.0, 1.0), FieldError);
}

TEST_CASE("conduction examples") {
  auto disk = geometry(GeometryKind::CenteredDisk, 32);
  auto uniform = cell_conduction(ScalarField(disk, 2.0), 2.0);
  CHECK((uniform.tensor - 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

  GeometrySpec s;
  s.kind = GeometryKind::Stripes;
  s.resolution = 32;
  s.axis = 0;
  s.solid_fraction = 0.5;
  auto stripes = build_geometry(s);
  const double k0 = 1.0, kS = 6.0;
  auto lam = cell_conduction(ScalarField(stripes, k0), kS);
  CHECK(lam.tensor(0, 0) == doctest::Approx(harmonic2(k0, kS)).epsilon(0.01));
  CHECK(lam.tensor(1, 1) == doctest::Approx(0.5 * (k0 + kS)).epsilon(0.01));
  CHECK(lam.bounds_ok);
}

TEST_CASE("an insulating inclusion reproduces the pore-only problem") {
  auto g = geometry(GeometryKind::CenteredDisk, 48);
  auto cond = cell_conduction(ScalarField(g, 1.0), 1e-6);
  auto diff = cell_diffusion(ScalarField(g, 0.0), 1.0, 1.0);
  CHECK(cond.tensor(0, 0) == doctest::Approx(diff.tensor(0, 0)).epsilon(0.01));
  CHECK(cond.tensor(1, 1) == doctest::Approx(diff.tensor(1, 1)).epsilon(0.01));
}

TEST_CASE("channel permeability follows Poiseuille") {
  auto g = geometry(GeometryKind::Channel, 64, 0);
  const double mu = 2.0;
  auto res = cell_permeability(uniform_mu(g, mu), ScalarField(g, 0.0), ScalarField(g, 1.0));
  const double w = 0.5;
  CHECK(res.tensor(0, 0) == doctest::Approx(w * w * w / (12 * mu)).epsilon(0.02));
  CHECK(std::abs(res.tensor(1, 1)) <= 1e-8 * res.tensor(0, 0));
  CHECK(std::abs(res.tensor(0, 1)) <= 1e-8 * res.tensor(0, 0));

  auto r = geometry(GeometryKind::Channel, 64, 1);
  auto rot = cell_permeability(uniform_mu(r, mu), ScalarField(r, 0.0), ScalarField(r, 1.0));
  CHECK(rot.tensor(1, 1) == doctest::Approx(res.tensor(0, 0)).epsilon(1e-10));
  CHECK(std::abs(rot.tensor(0, 0)) <= 1e-8 * rot.tensor(1, 1));
}

TEST_CASE("disk permeability is isotropic and positive definite") {
  auto g = geometry(GeometryKind::CenteredDisk, 48);
  auto res = cell_permeability(uniform_mu(g, 1.0), ScalarField(g, 0.0), ScalarField(g, 1.0));
  CHECK(std::abs(res.tensor(0, 0) - res.tensor(1, 1)) <= 0.01 * res.tensor(0, 0));
  CHECK(res.asymmetry <= 0.02);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (res.tensor + res.tensor.transpose()));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("flow cell problems refuse a cell without solid") {
  auto g = geometry(GeometryKind::NoSolid, 16);
  try {
    cell_permeability(uniform_mu(g, 1.0), ScalarField(g, 0.0), ScalarField(g, 1.0));
    FAIL("expected refusal");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("no-slip") != std::string::npos);
  }
}

TEST_CASE("forcing examples") {
  ModelParams p;
  p.lambda = 0.05;
  auto channel = geometry(GeometryKind::Channel, 64, 0);
  auto rest = cell_forcing(ScalarField(channel, 0.0), p);
  CHECK(rest.G.cwiseAbs().maxCoeff() <= 1e-14);

  p.g = Eigen::Vector3d(3.0, 0.0, 0.0);
  p.rho_g = 1.5;
  auto drift = cell_forcing(ScalarField(channel, 0.0), p);
  auto perm = cell_permeability(uniform_mu(channel, 1.0), ScalarField(channel, 0.0), ScalarField(channel, 1.5));
  // Body force enters with the sign of the drift relation vbar = -K grad p - G.
  CHECK(drift.G[0] == doctest::Approx(-p.rho_g * p.g[0] * perm.tensor(0, 0)).epsilon(0.02));
  CHECK(std::abs(drift.G[1]) <= 1e-8 * std::abs(drift.G[0]));

  ModelParams q;
  q.lambda = 0.04;
  q.sigma = 1.0;
  auto block = corner_block(64, 6);
  auto droplet = disk_profile(block, q.lambda, Eigen::Vector3d(0.5, 0.5, 0), 0.2);
  auto capillary = cell_forcing(droplet, q);
  auto k = cell_permeability(uniform_mu(block, 1.0), ScalarField(block, 0.0), ScalarField(block, 1.0));
  CHECK(capillary.G.cwiseAbs().maxCoeff() <= 1e-3 * q.sigma * k.tensor(0, 0));
}

TEST_CASE("effective tensors bundle and text listing") {
  ModelParams p;
  p.lambda = 0.05;
  p.k_S = 3.0;
  auto g = geometry(GeometryKind::CenteredDisk, 32);
  auto t = effective_tensors(ScalarField(g, 0.0), p);
  CHECK(t.geometry_hash == g->hash());
  CHECK(t.D.rows() == 2);
  CHECK(t.K(0, 0) > 0.0);
  CHECK(t.A(0, 0) > t.D(0, 0));
  for (const auto& [name, r] : t.residuals) {
    INFO(name);
    CHECK(r <= 1e-9);
  }
  const std::string text = format_tensors(t);
  CHECK(text.rfind("# geometry " + g->hash(), 0) == 0);
  CHECK(text.find("# K 2x2") != std::string::npos);
}

TEST_CASE("diffuse disk diffusion converges under grid refinement") {
  std::vector<double> d;
  for (int n : {16, 32, 64, 128}) {
    auto g = geometry(GeometryKind::NoSolid, n);
    auto phi = disk_profile(g, 0.05, Eigen::Vector3d(0.5, 0.5, 0), 0.25);
    phi.values *= 0.8;
    d.push_back(cell_diffusion(phi, 1.0, 1.0).tensor(0, 0));
  }
  CHECK(std::log2(std::abs(d[0] - d[1]) / std::abs(d[1] - d[2])) >= 1.0);
  CHECK(std::log2(std::abs(d[1] - d[2]) / std::abs(d[2] - d[3])) >= 1.0);
}
