#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vemsad/vemsad.hpp"

using namespace vemsad;
using namespace vemsad::bench;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  Config load() const {
    Config c = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCategory::Config, "--set expects key=value, got '" + kv + "'");
      c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return c;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "key = value run file")->check(CLI::ExistingFile);
  app->add_option("-s,--set", c.overrides, "override a config key, key=value (repeatable)");
}

void warn(const constitutive::PhysicalParams& p) {
  for (const auto& w : p.warnings()) std::cerr << "warning: " << w << '\n';
}

// stdout when the key is unset
void emit(const Config& c, const std::string& key, const std::string& text) {
  std::string path = c.get(key, std::string());
  if (path.empty()) std::cout << text;
  else {
    write_text(path, text);
    std::cerr << "wrote " << path << '\n';
  }
}

int cmd_solve(const Common& common) {
  Config c = common.load();
  ManufacturedCase mc = case_from(c);
  ConvergenceConfig cc = convergence_from(c);
  std::string mesh_file = c.get("mesh.file", std::string());
  std::string vtk = c.get("output.vtk", std::string());
  c.reject_unused();
  warn(mc.params);

  mesh::PolygonalMesh m = mesh_file.empty() ? make_family_mesh(cc.family, cc.levels.front(), mc.domain, cc.seed)
                                            : mesh::load_mesh(mesh_file);
  auto d = solver::Discretization::build(m, cc.k1, cc.k2, cc.quad_degree);
  auto map = solver::GlobalDoFMap::build(d);
  auto prob = mc.problem();
  auto s = solver::picard_iterate(d, map, prob, cc.picard);
  auto err = compute_total_error(d, map, s, mc);
  std::cout << std::setprecision(6) << "case " << mc.name << "\nelements " << m.num_elements() << "\nh " << m.h()
            << "\ndof " << map.total() << "\npicard_iterations " << s.iterations << "\nsweeps " << s.sweeps
            << "\nmax_linear_residual " << s.max_residual << std::scientific << "\ne_star " << err.total()
            << "\ne_u " << std::sqrt(err.displacement) << "\ne_p " << std::sqrt(err.pressure) << "\ne_zeta "
            << std::sqrt(err.flux) << "\ne_phi " << std::sqrt(err.concentration) << '\n';
  if (!vtk.empty()) {
    if (std::filesystem::path(vtk).has_parent_path())
      std::filesystem::create_directories(std::filesystem::path(vtk).parent_path());
    export_vtk(d, map, s, vtk);
    std::cerr << "wrote " << vtk << '\n';
  }
  return 0;
}

int cmd_convergence(const Common& common) {
  Config c = common.load();
  ManufacturedCase mc = case_from(c);
  ConvergenceConfig cc = convergence_from(c);
  std::string comp = c.get("output.components", std::string());
  c.get("output.csv", std::string());
  c.reject_unused();
  warn(mc.params);
  auto rows = run_convergence(mc, cc);
  std::ostringstream os;
  write_csv(os, rows);
  emit(c, "output.csv", os.str());
  if (!comp.empty()) {
    std::ostringstream cs;
    write_components_csv(cs, rows);
    write_text(comp, cs.str());
  }
  return 0;
}

int cmd_robustness(const Common& common) {
  Config c = common.load();
  ManufacturedCase mc = case_from(c);
  RobustnessConfig rc = robustness_from(c);
  double nominal = c.get("robustness.nominal_rate", static_cast<double>(std::min(rc.convergence.k1, rc.convergence.k2 + 1)));
  c.get("output.csv", std::string());
  c.reject_unused();
  auto vs = run_robustness(mc, rc);
  std::ostringstream os;
  write_robustness_csv(os, vs);
  emit(c, "output.csv", os.str());
  for (const auto& v : vs) {
    if (v.failure) std::cerr << "variant " << v.param << "=" << v.value << " failed: " << *v.failure << '\n';
    else warn({.lambda = v.param == "lambda" ? v.value : mc.params.lambda, .mu = v.param == "mu" ? v.value : mc.params.mu,
               .theta = v.param == "theta" ? v.value : mc.params.theta, .M_bound = v.M_bound});
  }
  std::vector<RobustnessVariant> ok;
  for (const auto& v : vs)
    if (!v.failure) ok.push_back(v);
  std::cerr << "worst rate deviation from " << nominal << " over " << ok.size() << " completed variants: "
            << worst_rate_deviation(ok, nominal) << "; failed variants: " << vs.size() - ok.size() << '\n';
  return 0;
}

int cmd_lithiation(const Common& common) {
  Config c = common.load();
  LithiationConfig lc = lithiation_from(c);
  std::string dir = c.get("output.dir", std::string());
  c.get("output.csv", std::string());
  c.reject_unused();
  warn({.lambda = lc.lambda(), .mu = lc.mu(), .theta = lc.theta, .M_bound = lc.M_bound});
  auto r = run_lithiation(lc, dir);
  std::ostringstream os;
  write_profile_csv(os, r);
  emit(c, "output.csv", os.str());
  const auto& dec = r.run(0.0, 0.0);
  std::cerr << std::setprecision(4) << "coupled vs decoupled concentration gap (relative): "
            << max_relative_gap(r.run(lc.m1_coupled, 0.0).concentration, dec.concentration)
            << "\nloaded vs free pressure gap: " << max_abs_gap(r.run(0.0, lc.traction).pressure, dec.pressure)
            << "\nouter boundary concentration error (relative): " << r.boundary_concentration_error << '\n';
  for (const auto& run : r.runs) std::cerr << run.label << ": " << run.solution.iterations << " picard iterations\n";
  return 0;
}

struct MeshArgs {
  std::string family = "square";
  int n = 8;
  std::uint64_t seed = 1;
  int lloyd = -1;
  double perturbation = -1.0;
  double rho_i = 1.0, rho_o = 5.0;
  std::string out;
};

int cmd_mesh_generate(const MeshArgs& a) {
  mesh::PolygonalMesh m = [&] {
    if (a.family == "annulus")
      return mesh::generate_annulus_mesh(
          {.rho_i = a.rho_i, .rho_o = a.rho_o, .n_seeds = a.n, .rng_seed = a.seed, .lloyd_iterations = a.lloyd < 0 ? 10 : a.lloyd});
    MeshFamily f = parse_family(a.family);
    if ((f == MeshFamily::Voronoi || f == MeshFamily::PerturbedVoronoi) && (a.lloyd >= 0 || a.perturbation >= 0.0))
      return mesh::generate_voronoi_mesh({.n_seeds = a.n * a.n,
                                          .rng_seed = a.seed,
                                          .lloyd_iterations = a.lloyd < 0 ? 20 : a.lloyd,
                                          .perturbation = a.perturbation < 0.0 ? 0.0 : a.perturbation});
    return make_family_mesh(f, a.n, {}, a.seed);
  }();
  auto reg = mesh::validate_regularity(m, 0.01);
  if (!reg.flagged.empty()) std::cerr << "warning: " << reg.flagged.size() << " elements flagged by the regularity check\n";
  if (a.out.empty()) std::cout << mesh::to_json(m).dump(1) << '\n';
  else mesh::save_mesh(m, a.out);
  std::cerr << m.num_vertices() << " vertices, " << m.num_edges() << " edges, " << m.num_elements()
            << " elements, h = " << m.h() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vem-sad: virtual element solver for coupled stress-assisted diffusion"};
  app.require_subcommand(1);
  Common common;
  int (*chosen)(const Common&) = nullptr;

  auto* solve = app.add_subcommand("solve", "solve the manufactured problem on one mesh and report e*");
  add_common(solve, common);
  solve->callback([&] { chosen = cmd_solve; });
  auto* conv = app.add_subcommand("convergence", "error and rate table over mesh.n");
  add_common(conv, common);
  conv->callback([&] { chosen = cmd_convergence; });
  auto* rob = app.add_subcommand("robustness", "convergence tables while varying lambda, mu, theta");
  add_common(rob, common);
  rob->callback([&] { chosen = cmd_robustness; });
  auto* lith = app.add_subcommand("lithiation", "perforated anode particle, coupled and decoupled");
  add_common(lith, common);
  lith->callback([&] { chosen = cmd_lithiation; });

  MeshArgs margs;
  bool mesh_gen = false;
  auto* meshcmd = app.add_subcommand("mesh", "mesh utilities");
  meshcmd->require_subcommand(1);
  auto* gen = meshcmd->add_subcommand("generate", "write a mesh as JSON");
  gen->add_option("-f,--family", margs.family, "square|crossed|nonconvex|voronoi|perturbed-voronoi|annulus");
  gen->add_option("-n", margs.n, "refinement level (seeds for annulus)")->check(CLI::PositiveNumber);
  gen->add_option("--seed", margs.seed);
  gen->add_option("--lloyd", margs.lloyd);
  gen->add_option("--perturbation", margs.perturbation);
  gen->add_option("--rho-i", margs.rho_i);
  gen->add_option("--rho-o", margs.rho_o);
  gen->add_option("-o,--output", margs.out);
  gen->callback([&] { mesh_gen = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    if (rc != 0) std::cerr << "error[config]: command line\n";
    return rc == 0 ? 0 : exit_code(ErrorCategory::Config);
  }
  try {
    if (mesh_gen) return cmd_mesh_generate(margs);
    return chosen ? chosen(common) : 1;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}
