#include "evapore/constitutive.hpp"

#include <sstream>
#include <stdexcept>

namespace evapore {

namespace {

void require_positive(std::vector<std::string>& out, const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << ": must be strictly positive, got " << v;
    out.push_back(msg.str());
  }
}

}  // namespace

std::vector<std::string> ModelParams::violations() const {
  std::vector<std::string> out;
  require_positive(out, "rho_l", rho_l);
  require_positive(out, "rho_g", rho_g);
  require_positive(out, "mu_l", mu_l);
  require_positive(out, "mu_g", mu_g);
  require_positive(out, "k_l", k_l);
  require_positive(out, "k_g", k_g);
  require_positive(out, "k_S", k_S);
  require_positive(out, "c_l", c_l);
  require_positive(out, "c_g", c_g);
  require_positive(out, "c_pS", c_pS);
  require_positive(out, "D_gv", D_gv);
  require_positive(out, "sigma", sigma);
  require_positive(out, "lambda", lambda);
  require_positive(out, "gamma", gamma);
  require_positive(out, "nu", nu);
  require_positive(out, "R", R);
  require_positive(out, "rho_S", rho_S);
  if (!(xi_l >= 0.0)) out.push_back("xi_l: must be nonnegative");
  if (!(xi_g >= 0.0)) out.push_back("xi_g: must be nonnegative");
  if (!(chi_sat > 0.0 && chi_sat <= 1.0)) out.push_back("chi_sat: must lie in (0, 1]");
  // Equal phase densities are allowed: the curvature-flow experiments use them.
  if (rho_l > 0.0 && rho_g > 0.0 && rho_l < rho_g) out.push_back("rho_l: must not be smaller than rho_g");
  if (!g.allFinite()) out.push_back("g: must be finite");
  return out;
}

void ModelParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid model parameters:";
  for (const auto& s : v) msg += "\n  " + s;
  throw std::invalid_argument(msg);
}

std::vector<std::string> ScaleSet::violations() const {
  std::vector<std::string> out;
  const std::pair<const char*, double> all[] = {
      {"t_ref", t_ref},         {"L", L},           {"l", l},               {"rho_ref", rho_ref},
      {"V_ref", V_ref},         {"p_ref", p_ref},   {"mu_ref", mu_ref},     {"xi_ref", xi_ref},
      {"D_ref", D_ref},         {"lambda_ref", lambda_ref}, {"sigma_ref", sigma_ref}, {"g_ref", g_ref},
      {"gamma_ref", gamma_ref}, {"nu_ref", nu_ref}, {"u_ref", u_ref},       {"k_ref", k_ref},
      {"T_ref", T_ref},         {"c_ref", c_ref},   {"R_ref", R_ref}};
  for (const auto& [name, v] : all) require_positive(out, name, v);
  if (L > 0.0 && l > 0.0 && !(epsilon() > 0.0 && epsilon() < 1.0)) out.push_back("l: epsilon = l/L must lie in (0, 1)");
  return out;
}

const DimensionlessNumber& DimensionlessReport::at(const std::string& name) const {
  for (const auto& n : numbers) {
    if (n.name == name) return n;
  }
  throw std::out_of_range("no dimensionless number named " + name);
}

DimensionlessReport dimensionless_audit(const ScaleSet& s) {
  DimensionlessReport rep;
  rep.epsilon = s.epsilon();
  auto add = [&](const char* name, double value, int order) {
    DimensionlessNumber n;
    n.name = name;
    n.value = value;
    n.target_order = order;
    n.ratio = value / std::pow(rep.epsilon, order);
    n.pass = n.ratio >= 0.1 && n.ratio <= 10.0;
    rep.numbers.push_back(n);
  };
  add("Re", s.rho_ref * s.V_ref * s.L / s.mu_ref, 0);
  add("Eu", s.p_ref / (s.rho_ref * s.V_ref * s.V_ref), -2);
  add("Pe", s.L * s.V_ref / s.D_ref, 1);
  add("Da", s.R_ref / (s.rho_ref * s.V_ref), 0);
  add("Ch", s.lambda_ref / s.L, 1);
  add("Pr", s.u_ref * s.mu_ref / (s.k_ref * s.T_ref), 0);
  add("Sc", s.mu_ref / (s.rho_ref * s.D_ref), 0);
  add("Fr", s.V_ref / std::sqrt(s.g_ref * s.L), 1);
  add("Ca", s.mu_ref * s.V_ref / s.sigma_ref, 2);
  add("xi_over_mu", s.xi_ref / s.mu_ref, 0);
  add("gamma_over_nu_mu", s.gamma_ref / (s.nu_ref * s.mu_ref), 1);
  return rep;
}

ScaleSet regime_scales(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  // Sc = Pe / Re, so Re ~ 1, Pe ~ eps and Sc ~ 1 cannot all hold exactly.
  // Re is set to sqrt(eps), which puts Re and Sc symmetrically inside the band.
  ScaleSet s;
  s.L = 1.0;
  s.l = epsilon;
  s.rho_ref = 1.0;
  s.mu_ref = 1.0;
  s.V_ref = std::sqrt(epsilon);
  s.D_ref = s.L * s.V_ref / epsilon;
  s.t_ref = s.L * s.L / s.D_ref;
  s.p_ref = s.rho_ref * s.V_ref * s.V_ref / (epsilon * epsilon);
  s.R_ref = s.rho_ref * s.V_ref;
  s.lambda_ref = epsilon * s.L;
  s.u_ref = 1.0;
  s.T_ref = 1.0;
  s.k_ref = s.u_ref * s.mu_ref / s.T_ref;
  s.c_ref = 1.0;
  s.g_ref = s.V_ref * s.V_ref / (epsilon * epsilon * s.L);
  s.sigma_ref = s.mu_ref * s.V_ref / (epsilon * epsilon);
  s.xi_ref = s.mu_ref;
  s.nu_ref = 1.0;
  s.gamma_ref = epsilon * s.nu_ref * s.mu_ref;
  return s;
}

}  // namespace evapore
