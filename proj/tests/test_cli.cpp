#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "evapore/config.hpp"
#include "evapore/hash.hpp"
#include "evapore/io.hpp"
#include "evapore/scenarios.hpp"

using namespace evapore;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EVAPORE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

GeometryPtr grid(int dim, int n) {
  GeometrySpec s;
  s.dim = dim;
  s.resolution = n;
  return build_geometry(s);
}

}  // namespace

TEST_CASE("minimal config fills defaults and its echo reproduces it") {
  const RunConfig cfg = parse_config(R"({"scenario": "pore-sim"})");
  CHECK(cfg.scenario == "pore-sim");
  CHECK(cfg.steps == 100);
  CHECK(cfg.params.R == 1.0);
  const std::string echo = config_echo(cfg);
  const RunConfig again = parse_config(echo);
  CHECK(config_echo(again) == echo);
  CHECK(again.geometry.kind == cfg.geometry.kind);
  CHECK(again.initial.shape == cfg.initial.shape);
}

TEST_CASE("echo keeps optional scales and exact doubles") {
  RunConfig cfg = parse_config(R"({"scenario": "dimensionless-audit", "scales": {"l": 0.1234567890123456789}})");
  REQUIRE(cfg.scales.has_value());
  const RunConfig again = parse_config(config_echo(cfg));
  REQUIRE(again.scales.has_value());
  CHECK(again.scales->l == cfg.scales->l);
  CHECK_FALSE(parse_config(R"({"scenario": "dimensionless-audit"})").scales.has_value());
}

TEST_CASE("schema covers every key of the echo") {
  const auto schema = nlohmann::json::parse(config_schema());
  const auto echo = nlohmann::json::parse(config_echo(parse_config(R"({"scenario": "dimensionless-audit", "scales": {}})")));
  const auto& props = schema["properties"];
  for (const auto& [key, value] : echo.items()) {
    REQUIRE(props.contains(key));
    if (!value.is_object()) continue;
    for (const auto& [inner, unused] : value.items()) CHECK(props[key]["properties"].contains(inner));
  }
  CHECK(schema["properties"]["scenario"]["enum"].size() == scenario_names().size());
}

TEST_CASE("under-resolved interface names the lambda_over_h guard") {
  auto v = violations_of(R"({"scenario": "pore-sim", "geometry": {"resolution": 40}, "params": {"lambda": 0.05}})");
  REQUIRE(v.size() == 1);
  CHECK(v[0].rfind("lambda_over_h", 0) == 0);
  CHECK(mentions(violations_of(R"({"scenario": "relax-profile", "study": {"resolutions": [2, 8]}})"),
                 "lambda_over_h"));
}

TEST_CASE("negative rate constant is a positivity violation") {
  auto v = violations_of(R"({"scenario": "pore-sim", "params": {"R": -1}})");
  REQUIRE(v.size() == 1);
  CHECK(v[0].rfind("params.R", 0) == 0);
  CHECK(v[0].find("positive") != std::string::npos);
}

TEST_CASE("every violation is reported with its path") {
  auto v = violations_of(R"({
    "scenario": "pore-sim", "colour": 1,
    "params": {"R": -1, "bogus": 2},
    "run": {"steps": 1.5, "dt": 1.0},
    "geometry": {"kind": "hexagon"}
  })");
  CHECK(mentions(v, "colour: unknown key"));
  CHECK(mentions(v, "params.bogus: unknown key"));
  CHECK(mentions(v, "params.R"));
  CHECK(mentions(v, "run.steps: expected an integer"));
  CHECK(mentions(v, "geometry.kind: unknown kind"));
  CHECK(v.size() >= 5);
  CHECK(mentions(violations_of(R"({"scenario": "pore-sim", "run": {"dt": 1.0}})"), "stability bound"));
  CHECK(mentions(violations_of("{not json"), "not valid JSON"));
}

TEST_CASE("unknown scenario lists the valid names") {
  auto v = violations_of(R"({"scenario": "warp-drive"})");
  REQUIRE(v.size() == 1);
  for (const auto& name : scenario_names()) CHECK(v[0].find(name) != std::string::npos);
  CHECK(parse_config(R"({"scenario": "warp-drive"})", "shrink-disk").scenario == "shrink-disk");
}

TEST_CASE("VTK writer: constant 4x4 field") {
  const fs::path dir = scratch("vtk");
  ScalarField f(grid(2, 8), 0.25);
  GeometryPtr g4 = std::make_shared<const UnitCell>(2, 4, std::vector<std::uint8_t>(16, 0));
  ScalarField c(g4, 0.25);
  VectorField v(g4);
  v.values.col(0).setConstant(1.0);
  write_vtk({{"level", c}, {"flow", v}}, dir / "c.vtk");
  std::istringstream text(slurp(dir / "c.vtk"));
  std::string line;
  int dims = 0, values = 0, vectors = 0;
  bool in_scalars = false, in_vectors = false;
  while (std::getline(text, line)) {
    if (line == "DIMENSIONS 4 4 1") ++dims;
    if (line == "SCALARS level double 1") in_scalars = true;
    if (line == "VECTORS flow double") {
      in_scalars = false;
      in_vectors = true;
      continue;
    }
    if (in_scalars && line == "0.25") ++values;
    if (in_vectors && line == "1 0 0") ++vectors;
  }
  CHECK(dims == 1);
  CHECK(values == 16);
  CHECK(vectors == 16);
  CHECK_THROWS_AS(write_vtk({{"a", c}, {"b", f}}, dir / "bad.vtk"), FieldError);
}

TEST_CASE("CSV round trip is bitwise") {
  const fs::path dir = scratch("csv");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Table t;
  t.header = {"a", "b", "c"};
  for (int k = 0; k < 200; ++k) t.add({u(rng), std::ldexp(u(rng), static_cast<int>(rng() % 600) - 300), 1.0 / 3.0});
  t.add({0.0, -0.0, 5e-324});
  t.footer = {{"slope", 0.1 + 0.2}};
  write_csv(t, dir / "t.csv");
  const Table back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  bool same = true;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) same = same && std::memcmp(&back.rows[i][j], &t.rows[i][j], sizeof(double)) == 0;
  }
  CHECK(same);
  REQUIRE(back.footer.size() == 1);
  CHECK(back.footer[0].second == 0.1 + 0.2);
  CHECK_THROWS_AS(write_csv(t, "/proc/no/such/dir/t.csv"), IoError);
}

TEST_CASE("relax-profile manifest: profiles, summary and reproducible hashes") {
  RunConfig cfg = parse_config(R"({"scenario": "relax-profile"})");
  cfg.out = scratch("relax").string();
  const Manifest m = run_scenario(cfg);
  REQUIRE(m.find("profile_cpl8.csv"));
  REQUIRE(m.find("profile_cpl16.csv"));
  REQUIRE(m.find("summary.json"));
  REQUIRE(m.find("config.json"));
  CHECK(slurp(fs::path(cfg.out) / "summary.json").find("\"linf_error\"") != std::string::npos);
  for (const auto& f : m.files) CHECK(sha256_file(fs::path(cfg.out) / f.path) == f.sha256);
  CHECK(fs::exists(fs::path(cfg.out) / "manifest.json"));

  const std::string first = m.to_json();
  fs::remove_all(cfg.out);
  CHECK(run_scenario(cfg).to_json() == first);
}

TEST_CASE("cell-conduction on stripes writes the A matrix") {
  RunConfig cfg = parse_config(R"({"scenario": "cell-conduction", "geometry": {"kind": "stripes"}})");
  cfg.out = scratch("conduction").string();
  const Manifest m = run_scenario(cfg);
  REQUIRE(m.find("A_matrix.txt"));
  const std::string a = slurp(fs::path(cfg.out) / "A_matrix.txt");
  CHECK(a.rfind("# A 2x2", 0) == 0);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir);
  CHECK(run_cli("--scenario dimensionless-audit --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(run_cli("--scenario warp-drive") == 2);
  {
    std::ofstream(dir / "bad.json") << R"({"scenario": "pore-sim", "params": {"R": -1}})";
  }
  CHECK(run_cli("--config " + (dir / "bad.json").string() + " --check") == 2);
  {
    // Disk too close to the cell boundary: the run itself is invalid.
    std::ofstream(dir / "edge.json") << R"({"scenario": "shrink-disk", "geometry": {"resolution": 80},
                                             "params": {"lambda": 0.05}, "study": {"R0": 0.45}})";
  }
  CHECK(run_cli("--config " + (dir / "edge.json").string() + " --out " + (dir / "edge").string()) == 4);
  CHECK(run_cli("--config " + (dir / "edge.json").string() + " --check") == 0);
}
