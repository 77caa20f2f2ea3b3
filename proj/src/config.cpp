#include "evapore/config.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "evapore/phasefield.hpp"

namespace evapore {

namespace {

using json = nlohmann::ordered_json;

// One config entry bound to the member it fills.
using Target = std::variant<double*, int*, bool*, std::string*, std::uint64_t*, Eigen::Vector3d*, std::vector<int>*,
                            std::filesystem::path*>;

struct Entry {
  const char* key;
  Target target;
};

struct Section {
  const char* name;
  std::vector<Entry> entries;
};

std::vector<Section> sections(RunConfig& c, ScaleSet& sc, std::string& geometry_kind) {
  ModelParams& p = c.params;
  GeometrySpec& g = c.geometry;
  InitialPhase& i = c.initial;
  return {
      {"", {{"scenario", &c.scenario}, {"out", &c.out}, {"seed", &c.seed}}},
      {"geometry",
       {{"kind", &geometry_kind},
        {"dim", &g.dim},
        {"resolution", &g.resolution},
        {"radius", &g.radius},
        {"axis", &g.axis},
        {"solid_fraction", &g.solid_fraction},
        {"width", &g.width},
        {"raster_path", &g.raster_path}}},
      {"params", {{"rho_l", &p.rho_l}, {"rho_g", &p.rho_g}, {"mu_l", &p.mu_l},     {"mu_g", &p.mu_g},
                  {"xi_l", &p.xi_l},   {"xi_g", &p.xi_g},   {"k_l", &p.k_l},       {"k_g", &p.k_g},
                  {"k_S", &p.k_S},     {"c_l", &p.c_l},     {"c_g", &p.c_g},       {"c_pS", &p.c_pS},
                  {"D_gv", &p.D_gv},   {"sigma", &p.sigma}, {"lambda", &p.lambda}, {"gamma", &p.gamma},
                  {"nu", &p.nu},       {"R", &p.R},         {"chi_sat", &p.chi_sat}, {"rho_S", &p.rho_S},
                  {"g", &p.g}}},
      {"scales", {{"t_ref", &sc.t_ref},   {"L", &sc.L},           {"l", &sc.l},
                  {"rho_ref", &sc.rho_ref}, {"V_ref", &sc.V_ref}, {"p_ref", &sc.p_ref},
                  {"mu_ref", &sc.mu_ref}, {"xi_ref", &sc.xi_ref}, {"D_ref", &sc.D_ref},
                  {"lambda_ref", &sc.lambda_ref}, {"sigma_ref", &sc.sigma_ref}, {"g_ref", &sc.g_ref},
                  {"gamma_ref", &sc.gamma_ref}, {"nu_ref", &sc.nu_ref}, {"u_ref", &sc.u_ref},
                  {"k_ref", &sc.k_ref},   {"T_ref", &sc.T_ref},   {"c_ref", &sc.c_ref},
                  {"R_ref", &sc.R_ref}}},
      {"initial",
       {{"shape", &i.shape},
        {"center", &i.center},
        {"radius", &i.radius},
        {"half_width", &i.half_width},
        {"axis", &i.axis},
        {"value", &i.value},
        {"noise", &i.noise}}},
      {"run",
       {{"dt", &c.dt},
        {"dt_fraction", &c.dt_fraction},
        {"t_end", &c.t_end},
        {"steps", &c.steps},
        {"snapshot_every", &c.snapshot_every},
        {"velocity", &c.velocity},
        {"frozen_chi", &c.frozen_chi},
        {"epsilon", &c.epsilon},
        {"refresh_threshold", &c.refresh_threshold},
        {"chi0", &c.chi0},
        {"T0", &c.T0}}},
      {"study",
       {{"resolutions", &c.resolutions},
        {"R0", &c.R0},
        {"chi_far", &c.chi_far},
        {"samples", &c.samples},
        {"richardson", &c.richardson},
        {"macro_resolution", &c.macro_resolution},
        {"chi_dry", &c.chi_dry},
        {"seeds", &c.seeds}}},
  };
}

std::string join_path(const char* section, const char* key) {
  return *section ? std::string(section) + "." + key : std::string(key);
}

bool is_int(const json& v) { return v.is_number_integer(); }

// Stores `v` into the target or records a type violation.
void assign(const json& v, Target target, const std::string& path, std::vector<std::string>& errs) {
  auto bad = [&](const char* what) { errs.push_back(path + ": expected " + what); };
  std::visit(
      [&](auto* t) {
        using T = std::remove_pointer_t<decltype(t)>;
        if constexpr (std::is_same_v<T, double>) {
          if (v.is_number()) *t = v.get<double>();
          else bad("a number");
        } else if constexpr (std::is_same_v<T, int>) {
          if (is_int(v) && v.get<std::int64_t>() >= INT32_MIN && v.get<std::int64_t>() <= INT32_MAX) *t = v.get<int>();
          else bad("an integer");
        } else if constexpr (std::is_same_v<T, bool>) {
          if (v.is_boolean()) *t = v.get<bool>();
          else bad("true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (v.is_string()) *t = v.get<std::string>();
          else bad("a string");
        } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
          if (v.is_string()) *t = v.get<std::string>();
          else bad("a string");
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (v.is_number_unsigned()) *t = v.get<std::uint64_t>();
          else bad("a nonnegative integer");
        } else if constexpr (std::is_same_v<T, Eigen::Vector3d>) {
          if (!v.is_array() || v.size() > 3 || v.empty()) return bad("an array of 1 to 3 numbers");
          Eigen::Vector3d x = Eigen::Vector3d::Zero();
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (!v[k].is_number()) return bad("an array of 1 to 3 numbers");
            x[static_cast<Index>(k)] = v[k].get<double>();
          }
          *t = x;
        } else {
          if (!v.is_array()) return bad("an array of integers");
          std::vector<int> x;
          for (const auto& e : v) {
            if (!is_int(e)) return bad("an array of integers");
            x.push_back(e.get<int>());
          }
          *t = x;
        }
      },
      target);
}

json to_json(Target target) {
  return std::visit(
      [](auto* t) -> json {
        using T = std::remove_pointer_t<decltype(t)>;
        if constexpr (std::is_same_v<T, Eigen::Vector3d>) return json::array({(*t)[0], (*t)[1], (*t)[2]});
        else if constexpr (std::is_same_v<T, std::filesystem::path>) return t->string();
        else return *t;
      },
      target);
}

bool evolves_phase(const std::string& s) {
  return s == "relax-profile" || s == "shrink-disk" || s == "planar-evap" || s == "pore-sim" ||
         s == "energy-audit" || s == "two-scale";
}

bool needs_solid(const std::string& s) {
  return s == "cell-permeability" || s == "cell-forcing" || s == "darcy-sim" || s == "two-scale";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "relax-profile",     "shrink-disk",  "planar-evap",   "pore-sim",        "cell-diffusion", "cell-permeability",
      "cell-forcing",      "cell-conduction", "darcy-sim", "two-scale",       "energy-audit",   "dimensionless-audit"};
  return names;
}

bool is_scenario(const std::string& name) {
  const auto& n = scenario_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

RunConfig scenario_defaults(const std::string& name) {
  if (!is_scenario(name)) {
    std::string list;
    for (const auto& s : scenario_names()) list += (list.empty() ? "" : ", ") + s;
    throw ConfigError({"scenario: unknown scenario '" + name + "'; valid scenarios: " + list});
  }
  RunConfig c;
  c.scenario = name;
  c.geometry.resolution = 32;
  c.initial.shape = "uniform";
  auto disk_cell = [&](int n) {
    c.geometry.kind = GeometryKind::CenteredDisk;
    c.geometry.resolution = n;
    c.geometry.radius = 0.25;
  };
  if (name == "relax-profile") {
    c.params.lambda = 0.02;
    c.geometry.dim = 1;
    c.geometry.resolution = 400;
    c.resolutions = {8, 16};
  } else if (name == "shrink-disk") {
    c.params.lambda = 0.0375;
    c.geometry.resolution = 160;
    c.dt_fraction = 0.1;
    c.R0 = 0.3;
  } else if (name == "planar-evap") {
    c.params.lambda = 0.02;
    c.geometry.dim = 1;
    c.geometry.resolution = 400;
    c.dt_fraction = 0.1;
    c.frozen_chi = true;
    c.chi_far = 0.0;
  } else if (name == "pore-sim") {
    // Liquid plug in a channel: its flat fronts meet the walls at a right
    // angle, so only evaporation moves them.
    c.geometry.kind = GeometryKind::Channel;
    c.geometry.resolution = 80;
    c.initial.shape = "slab";
    c.initial.half_width = 0.25;
    c.chi0 = 0.3;
    c.steps = 100;
    c.snapshot_every = 50;
  } else if (name == "energy-audit") {
    c.params.lambda = 0.1;
    c.geometry.resolution = 40;
    c.initial.shape = "disk";
    c.initial.radius = 0.2;
    c.initial.noise = 0.25;
    c.dt_fraction = 1.0;
    c.steps = 200;
  } else if (name == "cell-conduction") {
    c.geometry.kind = GeometryKind::Stripes;
    c.params.k_S = 4.0;
  } else if (name == "cell-diffusion" || name == "cell-permeability") {
    disk_cell(32);
  } else if (name == "cell-forcing") {
    disk_cell(32);
    c.params.g = Eigen::Vector3d(0.0, -1.0, 0.0);
  } else if (name == "darcy-sim") {
    disk_cell(32);
    c.resolutions = {16, 32, 64};
    c.macro_resolution = 32;
    c.dt = 1e-3;
    c.steps = 50;
    c.snapshot_every = 10;
  } else if (name == "two-scale") {
    c.geometry.kind = GeometryKind::Channel;
    c.geometry.resolution = 50;
    c.params.lambda = 0.08;
    c.initial.shape = "slab";
    c.initial.half_width = 0.25;
    c.macro_resolution = 2;
    c.dt = 0.02;
    c.steps = 6;
    c.chi0 = 0.3;
    c.chi_dry = 0.2;
  } else if (name == "dimensionless-audit") {
    c.epsilon = 0.1;
  }
  return c;
}

double effective_dt(const RunConfig& cfg) {
  return cfg.dt > 0.0 ? cfg.dt : cfg.dt_fraction * allen_cahn_dt_max(cfg.params);
}

std::vector<std::string> config_violations(const RunConfig& c) {
  std::vector<std::string> errs;
  auto add = [&](const std::string& path, const std::string& msg) { errs.push_back(path + ": " + msg); };
  for (const auto& v : c.params.violations()) errs.push_back("params." + v);
  if (c.scales) {
    for (const auto& v : c.scales->violations()) errs.push_back("scales." + v);
  }
  const auto& s = c.scenario;
  const GeometrySpec& g = c.geometry;
  if (g.dim < 1 || g.dim > 3) add("geometry.dim", "must be 1, 2 or 3");
  if (g.resolution < 8) add("geometry.resolution", "must be at least 8");

  if (!(c.dt >= 0.0)) add("run.dt", "must be nonnegative (0 selects dt_fraction of the stability bound)");
  if (!(c.dt_fraction > 0.0 && c.dt_fraction <= 1.0)) add("run.dt_fraction", "must lie in (0, 1]");
  if (!(c.t_end > 0.0)) add("run.t_end", "must be positive");
  if (c.steps < 0) add("run.steps", "must be nonnegative");
  if (c.snapshot_every < 0) add("run.snapshot_every", "must be nonnegative");
  if (!(c.epsilon >= 0.0 && c.epsilon <= 0.5)) add("run.epsilon", "must lie in [0, 0.5]");
  if (!(c.refresh_threshold > 0.0)) add("run.refresh_threshold", "must be positive");
  if (!(c.chi0 >= 0.0 && c.chi0 <= 1.0)) add("run.chi0", "must lie in [0, 1]");
  if (!(c.T0 > 0.0)) add("run.T0", "must be positive");
  if (!(c.R0 > 0.0 && c.R0 < 0.5)) add("study.R0", "must lie in (0, 0.5)");
  if (!(c.chi_far >= 0.0 && c.chi_far <= 1.0)) add("study.chi_far", "must lie in [0, 1]");
  if (!(c.chi_dry >= 0.0 && c.chi_dry <= 1.0)) add("study.chi_dry", "must lie in [0, 1]");
  if (c.samples < 2) add("study.samples", "must be at least 2");
  if (c.macro_resolution < 1) add("study.macro_resolution", "must be at least 1");
  if (c.seeds < 1) add("study.seeds", "must be at least 1");

  const InitialPhase& i = c.initial;
  if (i.shape != "disk" && i.shape != "slab" && i.shape != "uniform") {
    add("initial.shape", "must be one of disk, slab, uniform");
  }
  if (!(i.radius > 0.0)) add("initial.radius", "must be positive");
  if (!(i.half_width > 0.0 && i.half_width <= 0.5)) add("initial.half_width", "must lie in (0, 0.5]");
  if (i.axis < 0 || i.axis >= std::max(g.dim, 1)) add("initial.axis", "must name an axis of the geometry");
  if (!(i.value >= 0.0 && i.value <= 1.0)) add("initial.value", "must lie in [0, 1]");
  if (!(i.noise >= 0.0 && i.noise < 1.0)) add("initial.noise", "must lie in [0, 1)");

  if (errs.empty() && s != "relax-profile" && s != "dimensionless-audit") {
    try {
      build_geometry(g);
    } catch (const GeometryError& e) {
      add("geometry", e.what());
    }
  }
  if (needs_solid(s) && g.kind == GeometryKind::NoSolid) {
    add("geometry.kind", s + " needs a solid inclusion to anchor the flow problem");
  }
  if (s == "planar-evap" && (g.dim != 1 || g.kind != GeometryKind::NoSolid)) {
    add("geometry", "planar-evap runs on a solid-free 1D line");
  }

  // Interface resolution guard: fewer than 4 cells per lambda is refused.
  const double kMinCellsPerLambda = 4.0;
  if (c.params.lambda > 0.0) {
    if (s == "relax-profile") {
      if (c.resolutions.empty()) add("study.resolutions", "needs at least one cells-per-lambda value");
      for (std::size_t k = 0; k < c.resolutions.size(); ++k) {
        if (c.resolutions[k] < kMinCellsPerLambda) {
          add("lambda_over_h", "study.resolutions[" + std::to_string(k) + "] = " +
                                   std::to_string(c.resolutions[k]) + " cells per lambda is below 4");
        }
      }
    } else if (evolves_phase(s)) {
      const double ratio = c.params.lambda * g.resolution;
      if (ratio < kMinCellsPerLambda * (1.0 - 1e-12)) {
        std::ostringstream m;
        m << "lambda/h = " << ratio << " is below 4; raise geometry.resolution or params.lambda";
        add("lambda_over_h", m.str());
      }
    }
    if (evolves_phase(s) && s != "relax-profile" && c.params.violations().empty()) {
      const double bound = allen_cahn_dt_max(c.params);
      if (c.dt > bound && s != "two-scale") {
        std::ostringstream m;
        m << "dt = " << c.dt << " exceeds the stability bound " << bound;
        add("run.dt", m.str());
      }
    }
  }
  if (s == "shrink-disk" && c.params.lambda > c.R0 / 8.0) add("params.lambda", "must not exceed R0/8 for shrink-disk");
  if (s == "darcy-sim") {
    if (!(c.dt > 0.0)) add("run.dt", "darcy-sim needs an explicit positive dt");
    for (std::size_t k = 0; k < c.resolutions.size(); ++k) {
      if (c.resolutions[k] < 4) add("study.resolutions[" + std::to_string(k) + "]", "must be at least 4");
    }
    if (c.geometry.dim != 2 && c.geometry.dim != 3) add("geometry.dim", "darcy-sim needs a 2D or 3D cell");
  }
  if (s == "two-scale" && !(c.dt > 0.0)) add("run.dt", "two-scale needs an explicit positive dt");
  if (s == "dimensionless-audit" && !c.scales && !(c.epsilon > 0.0)) {
    add("run.epsilon", "must be positive when no scales are given");
  }
  return errs;
}

RunConfig parse_config(const std::string& text, const std::string& scenario_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: not valid JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw ConfigError({"config: top level must be an object"});

  std::string name = scenario_override;
  if (name.empty()) {
    if (!doc.contains("scenario")) throw ConfigError({"scenario: missing"});
    if (!doc["scenario"].is_string()) throw ConfigError({"scenario: expected a string"});
    name = doc["scenario"].get<std::string>();
  }
  RunConfig cfg = scenario_defaults(name);
  ScaleSet scales;
  std::string kind = geometry_kind_name(cfg.geometry.kind);
  std::vector<std::string> errs;
  const auto secs = sections(cfg, scales, kind);

  std::set<std::string> section_names;
  for (const auto& sec : secs) section_names.insert(sec.name);
  for (const auto& sec : secs) {
    const json* obj = &doc;
    if (*sec.name) {
      if (!doc.contains(sec.name)) continue;
      obj = &doc[sec.name];
      if (!obj->is_object()) {
        errs.push_back(std::string(sec.name) + ": expected an object");
        continue;
      }
    }
    std::set<std::string> known;
    for (const auto& e : sec.entries) {
      known.insert(e.key);
      if (obj->contains(e.key)) assign((*obj)[e.key], e.target, join_path(sec.name, e.key), errs);
    }
    for (const auto& [key, value] : obj->items()) {
      if (known.count(key)) continue;
      if (!*sec.name && section_names.count(key)) continue;
      errs.push_back(join_path(sec.name, key.c_str()) + ": unknown key");
    }
  }
  cfg.scenario = name;
  if (doc.contains("scales") && doc["scales"].is_object()) cfg.scales = scales;
  try {
    cfg.geometry.kind = geometry_kind_from_name(kind);
  } catch (const GeometryError&) {
    errs.push_back("geometry.kind: unknown kind '" + kind + "'");
  }
  for (auto& v : config_violations(cfg)) errs.push_back(std::move(v));
  if (!errs.empty()) throw ConfigError(errs);
  return cfg;
}

std::string config_schema() {
  RunConfig c;
  ScaleSet scales;
  std::string kind;
  json schema;
  schema["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  schema["title"] = "evapore run configuration";
  schema["type"] = "object";
  schema["required"] = json::array({"scenario"});
  schema["additionalProperties"] = false;
  json& top = schema["properties"];
  for (const auto& sec : sections(c, scales, kind)) {
    json* props = &top;
    if (*sec.name) {
      json& obj = top[sec.name];
      obj["type"] = "object";
      obj["additionalProperties"] = false;
      props = &obj["properties"];
    }
    for (const auto& e : sec.entries) {
      json t = std::visit(
          [](auto* target) -> json {
            using T = std::remove_pointer_t<decltype(target)>;
            if constexpr (std::is_same_v<T, double>) return {{"type", "number"}};
            else if constexpr (std::is_same_v<T, int>) return {{"type", "integer"}};
            else if constexpr (std::is_same_v<T, bool>) return {{"type", "boolean"}};
            else if constexpr (std::is_same_v<T, std::uint64_t>) return {{"type", "integer"}, {"minimum", 0}};
            else if constexpr (std::is_same_v<T, Eigen::Vector3d>) {
              return {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 1}, {"maxItems", 3}};
            } else if constexpr (std::is_same_v<T, std::vector<int>>) {
              return {{"type", "array"}, {"items", {{"type", "integer"}}}};
            } else {
              return {{"type", "string"}};
            }
          },
          e.target);
      (*props)[e.key] = t;
    }
  }
  top["scenario"]["enum"] = scenario_names();
  json kinds = json::array();
  for (auto k : {GeometryKind::NoSolid, GeometryKind::CenteredDisk, GeometryKind::Stripes, GeometryKind::Channel,
                 GeometryKind::Raster}) {
    kinds.push_back(geometry_kind_name(k));
  }
  top["geometry"]["properties"]["kind"]["enum"] = kinds;
  top["initial"]["properties"]["shape"]["enum"] = json::array({"disk", "slab", "uniform"});
  return schema.dump(2) + "\n";
}

std::string config_echo(const RunConfig& cfg) {
  RunConfig c = cfg;
  ScaleSet scales = c.scales.value_or(ScaleSet{});
  std::string kind = geometry_kind_name(c.geometry.kind);
  json doc = json::object();
  for (const auto& sec : sections(c, scales, kind)) {
    if (std::string(sec.name) == "scales" && !c.scales) continue;
    json& obj = *sec.name ? doc[sec.name] : doc;
    for (const auto& e : sec.entries) obj[e.key] = to_json(e.target);
  }
  return doc.dump(2) + "\n";
}

}  // namespace evapore
