#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vemsad/bench/convergence.hpp"
#include "vemsad/bench/lithiation.hpp"
#include "vemsad/bench/robustness.hpp"

namespace vemsad::bench {

/// Flat `key = value` file. '#' starts a comment; lists are comma separated.
class Config {
 public:
  static Config parse(std::istream& is, const std::string& origin = "<config>") {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCategory::Config, origin + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
      if (key.empty()) throw Error(ErrorCategory::Config, origin + ":" + std::to_string(lineno) + ": empty key");
      if (c.values_.count(key))
        throw Error(ErrorCategory::Config, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      c.values_[key] = val;
    }
    return c;
  }
  static Config load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCategory::Io, "cannot read config '" + path.string() + "'");
    return parse(is, path.string());
  }
  static Config from_string(const std::string& s) {
    std::istringstream is(s);
    return parse(is);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get(const std::string& key, double fallback) const {
    return has(key) ? to_double(key, get(key, std::string())) : (used_.insert(key), fallback);
  }
  int get(const std::string& key, int fallback) const {
    if (!has(key)) return used_.insert(key), fallback;
    double v = to_double(key, get(key, std::string()));
    if (v != static_cast<int>(v)) throw Error(ErrorCategory::Config, "'" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  bool get(const std::string& key, bool fallback) const {
    if (!has(key)) return used_.insert(key), fallback;
    std::string v = get(key, std::string());
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorCategory::Config, "'" + key + "' must be true or false");
  }
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return used_.insert(key), fallback;
    std::vector<double> out;
    std::stringstream ss(get(key, std::string()));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw Error(ErrorCategory::Config, "'" + key + "' is an empty list");
    return out;
  }

  /// Keys present in the file that nothing asked for: almost always typos.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }
  void reject_unused() const {
    auto u = unused();
    if (u.empty()) return;
    std::string msg = "unknown config keys:";
    for (const auto& k : u) msg += " " + k;
    throw Error(ErrorCategory::Config, msg);
  }

 private:
  static std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  static double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw Error(ErrorCategory::Config, "'" + key + "' = '" + s + "' is not a number");
    return v;
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

inline constitutive::DiffusionLaw diffusion_law_from(const Config& c, const constitutive::DiffusionLaw& fallback) {
  std::string type = c.get("law.diffusion.type", std::string());
  constitutive::DiffusionLaw law = fallback;
  if (type == "exponential") law = constitutive::ExponentialLaw{};
  else if (type == "quadratic") law = constitutive::QuadraticLaw{};
  else if (type == "polynomial") law = constitutive::PolynomialLaw{};
  else if (!type.empty()) throw Error(ErrorCategory::Config, "unknown law.diffusion.type '" + type + "'");
  std::visit(
      [&](auto& l) {
        l.m0 = c.get("law.diffusion.m0", l.m0);
        l.m1 = c.get("law.diffusion.m1", l.m1);
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, constitutive::PolynomialLaw>)
          l.m2 = c.get("law.diffusion.m2", l.m2);
      },
      law);
  constitutive::validate(law);
  return law;
}

inline constitutive::ActiveStressLaw active_law_from(const Config& c, const constitutive::ActiveStressLaw& fallback) {
  std::string type = c.get("law.active.type", std::string());
  constitutive::ActiveStressLaw law = fallback;
  if (type == "hill") law = constitutive::HillLaw{};
  else if (type == "linear") law = constitutive::LinearLaw{};
  else if (!type.empty()) throw Error(ErrorCategory::Config, "unknown law.active.type '" + type + "'");
  if (auto* h = std::get_if<constitutive::HillLaw>(&law)) {
    h->K0 = c.get("law.active.K0", h->K0);
    h->K1 = c.get("law.active.K1", h->K1);
    h->n = c.get("law.active.n", h->n);
  } else {
    auto& l = std::get<constitutive::LinearLaw>(law);
    l.K0 = c.get("law.active.K0", l.K0);
  }
  constitutive::validate(law);
  return law;
}

inline solver::PicardOptions picard_from(const Config& c, solver::PicardOptions p = {}) {
  p.tol = c.get("picard.tol", p.tol);
  p.max_iter = c.get("picard.max_iter", p.max_iter);
  p.initial_concentration = c.get("picard.initial", p.initial_concentration);
  p.relative = c.get("picard.relative", p.relative);
  return p;
}

/// The manufactured case named by `case` with parameter and law overrides.
/// Leaving params.M_bound unset re-estimates it when anything changed.
inline ManufacturedCase case_from(const Config& c) {
  std::string name = c.get("case", std::string("smooth"));
  ManufacturedCase mc;
  if (name == "smooth") mc = smooth_case();
  else if (name == "polynomial") mc = polynomial_case();
  else throw Error(ErrorCategory::Config, "unknown case '" + name + "'");
  bool changed = false;
  for (const char* k : {"params.lambda", "params.mu", "law.diffusion.type", "law.diffusion.m0", "law.diffusion.m1",
                        "law.diffusion.m2", "law.active.type", "law.active.K0", "law.active.K1", "law.active.n"})
    changed = changed || c.has(k);
  mc.params.lambda = c.get("params.lambda", mc.params.lambda);
  mc.params.mu = c.get("params.mu", mc.params.mu);
  mc.params.theta = c.get("params.theta", mc.params.theta);
  mc.diffusion_law = diffusion_law_from(c, mc.diffusion_law);
  mc.active_law = active_law_from(c, mc.active_law);
  if (c.has("params.M_bound")) mc.params.M_bound = c.get("params.M_bound", mc.params.M_bound);
  else if (changed) mc.params.M_bound = mc.estimate_bound(c.get("params.bound_grid", 200));
  mc.params.validate();
  return mc;
}

inline ConvergenceConfig convergence_from(const Config& c) {
  ConvergenceConfig cc;
  cc.family = parse_family(c.get("mesh.family", to_string(cc.family)));
  std::vector<double> def(cc.levels.begin(), cc.levels.end());
  cc.levels.clear();
  for (double v : c.get_list("mesh.n", def)) {
    if (v < 1 || v != static_cast<int>(v)) throw Error(ErrorCategory::Config, "mesh.n entries must be positive integers");
    cc.levels.push_back(static_cast<int>(v));
  }
  cc.seed = static_cast<std::uint64_t>(c.get("mesh.seed", 1));
  cc.k1 = c.get("degrees.k1", cc.k1);
  cc.k2 = c.get("degrees.k2", cc.k2);
  if (cc.k1 < 2) throw Error(ErrorCategory::Config, "degrees.k1 must be >= 2");
  if (cc.k2 < 0) throw Error(ErrorCategory::Config, "degrees.k2 must be >= 0");
  cc.quad_degree = c.get("quadrature.degree", cc.quad_degree);
  cc.picard = picard_from(c, cc.picard);
  return cc;
}

inline RobustnessConfig robustness_from(const Config& c) {
  RobustnessConfig rc;
  rc.convergence = convergence_from(c);
  rc.lambdas = c.get_list("robustness.lambda", rc.lambdas);
  rc.mus = c.get_list("robustness.mu", rc.mus);
  rc.thetas = c.get_list("robustness.theta", rc.thetas);
  rc.bound_grid = c.get("robustness.bound_grid", rc.bound_grid);
  return rc;
}

inline LithiationConfig lithiation_from(const Config& c) {
  LithiationConfig lc;
  lc.annulus.rho_i = c.get("lithiation.rho_i", lc.annulus.rho_i);
  lc.annulus.rho_o = c.get("lithiation.rho_o", lc.annulus.rho_o);
  lc.annulus.n_seeds = c.get("mesh.seeds", lc.annulus.n_seeds);
  lc.annulus.rng_seed = static_cast<std::uint64_t>(c.get("mesh.seed", 1));
  lc.annulus.lloyd_iterations = c.get("mesh.lloyd", lc.annulus.lloyd_iterations);
  lc.youngs = c.get("params.E", lc.youngs);
  lc.poisson = c.get("params.nu", lc.poisson);
  lc.theta = c.get("params.theta", lc.theta);
  lc.M_bound = c.get("params.M_bound", lc.M_bound);
  lc.m0 = c.get("law.diffusion.m0", lc.m0);
  lc.m1_coupled = c.get("law.diffusion.m1", lc.m1_coupled);
  lc.molar_volume = c.get("lithiation.molar_volume", lc.molar_volume);
  lc.phi_max = c.get("lithiation.phi_max", lc.phi_max);
  lc.traction = c.get("lithiation.traction", lc.traction);
  lc.samples = c.get("lithiation.samples", lc.samples);
  lc.ray_angle = c.get("lithiation.ray_angle", lc.ray_angle);
  lc.k1 = c.get("degrees.k1", lc.k1);
  lc.k2 = c.get("degrees.k2", lc.k2);
  lc.picard = picard_from(c, lc.picard);
  return lc;
}

}  // namespace vemsad::bench
