#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vemsad/bench/convergence.hpp"

namespace vemsad::bench {

struct RobustnessConfig {
  std::vector<double> lambdas{1.0, 1e4, 1e8};
  std::vector<double> mus{1.0, 1e2, 1e4};
  std::vector<double> thetas{1e-6, 1e-3, 1.0};
  ConvergenceConfig convergence;  // family, levels, degrees
  int bound_grid = 200;           // M bound is re-estimated for each variant
};

/// One parameter variant: a full table, or the error that stopped it.
struct RobustnessVariant {
  std::string param;
  double value = 0.0;
  double M_bound = 0.0;
  std::vector<ConvergenceRow> rows;
  std::optional<std::string> failure;
  std::optional<ErrorCategory> failure_category;

  double last_rate() const { return rows.size() > 1 ? rows.back().rate : std::nan(""); }
};

inline RobustnessVariant run_variant(ManufacturedCase c, const std::string& param, double value,
                                     const RobustnessConfig& cfg) {
  RobustnessVariant v;
  v.param = param;
  v.value = value;
  if (param == "lambda") c.params.lambda = value;
  else if (param == "mu") c.params.mu = value;
  else if (param == "theta") c.params.theta = value;
  else throw Error(ErrorCategory::Config, "unknown robustness parameter '" + param + "'");
  try {
    c.params.M_bound = c.estimate_bound(cfg.bound_grid);
    v.M_bound = c.params.M_bound;
    v.rows = run_convergence(c, cfg.convergence);
  } catch (const Error& e) {
    v.failure = e.what();
    v.failure_category = e.category();
  }
  return v;
}

/// Varies lambda, mu and theta one at a time around the base case.
inline std::vector<RobustnessVariant> run_robustness(const ManufacturedCase& base, const RobustnessConfig& cfg) {
  std::vector<RobustnessVariant> out;
  for (double x : cfg.lambdas) out.push_back(run_variant(base, "lambda", x, cfg));
  for (double x : cfg.mus) out.push_back(run_variant(base, "mu", x, cfg));
  for (double x : cfg.thetas) out.push_back(run_variant(base, "theta", x, cfg));
  return out;
}

/// Largest deviation of any observed rate from `nominal`; infinite if a variant failed.
inline double worst_rate_deviation(const std::vector<RobustnessVariant>& vs, double nominal) {
  double worst = 0.0;
  for (const auto& v : vs) {
    if (v.failure) return std::numeric_limits<double>::infinity();
    for (const auto& r : v.rows)
      if (std::isfinite(r.rate)) worst = std::max(worst, std::abs(r.rate - nominal));
  }
  return worst;
}

inline void write_robustness_csv(std::ostream& os, const std::vector<RobustnessVariant>& vs) {
  os << "param,value,M_bound,mesh,level,h,dof,e_star,rate,iters,status\n";
  for (const auto& v : vs) {
    if (v.failure) {
      os << v.param << ',' << std::setprecision(6) << v.value << ",,,,,,,,,\"" << to_string(*v.failure_category)
         << ": " << *v.failure << "\"\n";
      continue;
    }
    for (const auto& r : v.rows) {
      os << v.param << ',' << std::setprecision(6) << v.value << ',' << v.M_bound << ',' << r.mesh << ','
         << r.level << ',' << std::setprecision(10) << r.h << ',' << r.dof << ',' << std::setprecision(6)
         << std::scientific << r.e_star << std::defaultfloat << ',';
      if (std::isfinite(r.rate)) os << std::fixed << std::setprecision(4) << r.rate << std::defaultfloat;
      os << ',' << r.iters << ",ok\n";
    }
  }
}

}  // namespace vemsad::bench
