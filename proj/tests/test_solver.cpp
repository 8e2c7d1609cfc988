#include <gtest/gtest.h>

#include <random>

#include "vemsad/mesh/generators.hpp"
#include "vemsad/solver/picard.hpp"

using namespace vemsad;
using namespace vemsad::solver;
using constitutive::PhysicalParams;

namespace {

std::vector<mesh::PolygonalMesh> patch_meshes() {
  std::vector<mesh::PolygonalMesh> out;
  out.push_back(mesh::generate_square_mesh(3));
  out.push_back(mesh::generate_crossed_mesh(2));
  out.push_back(mesh::generate_nonconvex_mesh(3));
  out.push_back(mesh::generate_voronoi_mesh({.n_seeds = 20, .rng_seed = 3, .lloyd_iterations = 2}));
  return out;
}

double max_rel_asym(const SparseMatrix& S) {
  SparseMatrix T = S.transpose();
  SparseMatrix D = S - T;
  double a = 0.0, s = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) a = std::max(a, std::abs(it.value()));
  for (int k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it) s = std::max(s, std::abs(it.value()));
  return a / s;
}

// Quadratic displacement with linear pressure; mu, lambda, constant active stress.
struct ElasticPatch {
  double mu = 1.0, lambda = 10.0, ell = 1.0;
  Point u(const Point& x) const {
    return {x.x() * x.x() + x.x() * x.y() - x.y() * x.y(), 2 * x.x() * x.y() + x.y() * x.y() - x.x()};
  }
  double p(const Point& x) const { return -lambda * (4 * x.x() + 3 * x.y()) + ell; }
  Tensor sigma(const Point& x) const {
    return {2 * mu * (2 * x.x() + x.y()) - p(x), mu * (x.x() - 1), 2 * mu * (2 * x.x() + 2 * x.y()) - p(x)};
  }
  Point f() const { return {-(4 * mu + 4 * lambda), -(5 * mu + 3 * lambda)}; }
  ElasticityData data() const {
    ElasticityData d;
    Point fv = f();
    d.body_force = [fv](const Point&) { return fv; };
    d.displacement = [this](const Point& x) { return u(x); };
    d.traction = [this](const Point& x, const Point& n) {
      Tensor s = sigma(x);
      return Point(s.xx * n.x() + s.xy * n.y(), s.xy * n.x() + s.yy * n.y());
    };
    return d;
  }
};

}  // namespace

TEST(Solver, DofMapCountsMatchFormulae) {
  auto m = mesh::generate_square_mesh(8);
  for (int k2 : {0, 1}) {
    auto d = Discretization::build(m, 2, k2);
    auto map = GlobalDoFMap::build(d);
    const int NE = 64, Ne = 144, Nv = 81;
    EXPECT_EQ(map.total_elasticity(), 2 * Nv + 2 * Ne + 2 * NE + 3 * NE);
    EXPECT_EQ(map.total(), k2 == 0 ? 978 : 1442);
  }
  // every global index is used, and sharing is consistent
  auto v = mesh::generate_voronoi_mesh({.n_seeds = 15, .rng_seed = 2});
  auto d = Discretization::build(v, 3, 1);
  auto map = GlobalDoFMap::build(d);
  std::vector<int> hits(map.n_u, 0), fl(map.n_flux, 0);
  for (std::size_t e = 0; e < v.num_elements(); ++e) {
    for (int i : map.u[e].index) hits[i]++;
    for (int i : map.flux[e].index) fl[i]++;
  }
  for (int h : hits) EXPECT_GE(h, 1);
  for (int h : fl) EXPECT_GE(h, 1);
}

TEST(Solver, SharedTracesAgree) {
  // Interpolating a global field element by element and gathering the
  // global vector must give the same local DoFs on both sides of an edge.
  auto m = mesh::generate_voronoi_mesh({.n_seeds = 12, .rng_seed = 5});
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  auto zeta = [](const Point& x) { return Point(1 + x.x() * x.y(), std::sin(x.x()) - x.y()); };
  Eigen::VectorXd g = Eigen::VectorXd::Constant(map.n_flux, std::nan(""));
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    Eigen::VectorXd loc = d.transport[e].interpolate(zeta);
    for (int i = 0; i < loc.size(); ++i) {
      int gi = map.flux[e].index[i];
      double v = map.flux[e].sign[i] * loc(i);
      if (std::isnan(g(gi))) g(gi) = v;
      else EXPECT_NEAR(g(gi), v, 1e-13);
    }
  }
  auto u = [](const Point& x) { return Point(x.x() * x.x(), std::cos(x.y())); };
  Eigen::VectorXd gu = Eigen::VectorXd::Constant(map.n_u, std::nan(""));
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    Eigen::VectorXd loc = d.elastic[e].interpolate(u, [](const Point& x) { return 2 * x.x() - std::sin(x.y()); });
    for (int i = 0; i < loc.size(); ++i) {
      int gi = map.u[e].index[i];
      if (std::isnan(gu(gi))) gu(gi) = loc(i);
      else EXPECT_NEAR(gu(gi), loc(i), 1e-14);
    }
  }
}

TEST(Solver, IdentitySystemReturnsRhs) {
  SaddleSystem s;
  s.A = SparseMatrix(3, 3);
  s.A.setIdentity();
  s.B = SparseMatrix(3, 1);
  s.C = SparseMatrix(1, 1);
  s.C.insert(0, 0) = 1.0;
  s.c = -1.0;  // -c C = +I
  s.F = Eigen::Vector3d(1, 2, 3);
  s.G = Eigen::VectorXd::Constant(1, 4.0);
  auto r = solve_saddle(s);
  EXPECT_EQ(r.primal, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(r.dual(0), 4.0);
}

TEST(Solver, DenseOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 120, m = 40;
    Eigen::MatrixXd R(n, n), Bd(n, m), Rc(m, m);
    for (int i = 0; i < n * n; ++i) R.data()[i] = nd(rng);
    for (int i = 0; i < n * m; ++i) Bd.data()[i] = (nd(rng) > 1.0) ? nd(rng) : 0.0;
    for (int i = 0; i < m * m; ++i) Rc.data()[i] = nd(rng);
    Eigen::MatrixXd Ad = R * R.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Cd = Rc * Rc.transpose() + Eigen::MatrixXd::Identity(m, m);
    SaddleSystem s;
    s.A = Ad.sparseView();
    s.B = Bd.sparseView();
    s.C = Cd.sparseView();
    s.c = 0.1;
    s.F = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return nd(rng); });
    s.G = Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return nd(rng); });
    for (int i = 0; i < n; i += 7) {
      s.fixed.push_back(i);
      s.fixed_values.push_back(nd(rng));
    }
    // Oracle: replace constrained rows by identity rows, dense LU.
    Eigen::MatrixXd K(n + m, n + m);
    K << Ad, Bd, Bd.transpose(), -s.c * Cd;
    Eigen::VectorXd rhs(n + m);
    rhs << s.F, s.G;
    for (std::size_t k = 0; k < s.fixed.size(); ++k) {
      K.row(s.fixed[k]).setZero();
      K(s.fixed[k], s.fixed[k]) = 1.0;
      rhs(s.fixed[k]) = s.fixed_values[k];
    }
    Eigen::VectorXd x = K.partialPivLu().solve(rhs);
    auto r = solve_saddle(s);
    EXPECT_LT((r.primal - x.head(n)).cwiseAbs().maxCoeff(), 1e-10 * x.cwiseAbs().maxCoeff());
    EXPECT_LT((r.dual - x.tail(m)).cwiseAbs().maxCoeff(), 1e-10 * x.cwiseAbs().maxCoeff());
    EXPECT_LT(r.relative_residual, 1e-10);
  }
}

TEST(Solver, SingularSystemIsDiagnosed) {
  // Pure traction and theta = 0 style singularity: zero matrix.
  SaddleSystem s;
  s.A = SparseMatrix(2, 2);
  s.B = SparseMatrix(2, 1);
  s.C = SparseMatrix(1, 1);
  s.F = Eigen::Vector2d(1, 0);
  s.G = Eigen::VectorXd::Zero(1);
  try {
    solve_saddle(s);
    FAIL() << "expected a solver error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Solver);
  }
}

TEST(Solver, ElasticityZeroDataGivesZero) {
  auto m = mesh::generate_square_mesh(3);
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  PhysicalParams params;
  auto sys = assemble_elasticity(d, map, params, constitutive::LinearLaw{0.0}, Eigen::VectorXd(), {});
  auto r = solve_saddle(sys);
  EXPECT_EQ(r.primal.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.dual.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solver, AssembledSystemsAreSymmetric) {
  for (const auto& m : patch_meshes()) {
    auto d = Discretization::build(m, 2, 1);
    auto map = GlobalDoFMap::build(d);
    PhysicalParams params;
    ElasticPatch ep;
    auto es = assemble_elasticity(d, map, params, constitutive::HillLaw{}, Eigen::VectorXd::Ones(map.n_phi), ep.data());
    EXPECT_LT(max_rel_asym(es.constrained().first), 1e-14);
    auto stress = [](int, const Point& x) { return Tensor{x.x(), 0.1 * x.y(), -x.y()}; };
    auto ds = assemble_diffusion(d, map, params, constitutive::ExponentialLaw{0.1, 0.5}, stress, {});
    EXPECT_LT(max_rel_asym(ds.constrained().first), 1e-14);
  }
}

TEST(Solver, ElasticityPatchTest) {
  for (int k1 : {2, 3}) {
    for (const auto& m : patch_meshes()) {
      ElasticPatch ep;
      auto d = Discretization::build(m, k1, 0);
      auto map = GlobalDoFMap::build(d);
      PhysicalParams params{.lambda = ep.lambda, .mu = ep.mu};
      // Hill law with phi = 0 gives the constant K0 = ell.
      auto sys = assemble_elasticity(d, map, params, constitutive::HillLaw{ep.ell, 1.0, 2.0},
                                     Eigen::VectorXd::Zero(map.n_phi), ep.data());
      auto r = solve_saddle(sys);
      for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto& el = d.elastic[e];
        Eigen::VectorXd c = el.pi_eps() * gather(map.u[e], r.primal);
        Eigen::VectorXd pc = gather(map.p[e], r.dual);
        for (const Point& x : {el.geometry().centroid, el.geometry().vertices[0]}) {
          EXPECT_NEAR((el.eval_poly(c, x) - ep.u(x)).norm(), 0.0, 1e-9);
          EXPECT_NEAR(el.pressure_basis().value(pc, x), ep.p(x), 1e-9 * ep.lambda);
        }
      }
    }
  }
}

TEST(Solver, DiffusionPatchTest) {
  // zeta = K^{-1} grad phi with a constant inverse tensor K.
  const Tensor K{2.0, 0.3, 1.0};
  const Tensor Minv = K.inverse();
  for (int k2 : {1, 2}) {
    for (const auto& m : patch_meshes()) {
      auto d = Discretization::build(m, 2, k2);
      auto map = GlobalDoFMap::build(d);
      PhysicalParams params;
      params.theta = 0.5;
      auto phi = [k2](const Point& x) {
        return 1 + 2 * x.x() - x.y() + (k2 > 1 ? x.x() * x.x() - 3 * x.x() * x.y() : 0.0);
      };
      auto grad = [k2](const Point& x) {
        return Point(2 + (k2 > 1 ? 2 * x.x() - 3 * x.y() : 0.0), -1 + (k2 > 1 ? -3 * x.x() : 0.0));
      };
      auto zeta = [&](const Point& x) {
        Point g = grad(x);
        return Point(Minv.xx * g.x() + Minv.xy * g.y(), Minv.xy * g.x() + Minv.yy * g.y());
      };
      const double lap = k2 > 1 ? (Minv.xx * 2 + Minv.xy * (-3) + Minv.xy * (-3)) : 0.0;
      DiffusionData data;
      data.source = [&](const Point& x) { return params.theta * phi(x) - lap; };
      data.concentration = phi;
      data.normal_flux = [&](const Point& x, const Point& n) { return zeta(x).dot(n); };
      CoefficientSamples samples(m.num_elements());
      for (std::size_t e = 0; e < m.num_elements(); ++e) samples[e].assign(d.transport[e].quadrature().size(), K);
      auto sys = assemble_diffusion(d, map, params, samples, data);
      auto r = solve_saddle(sys);
      for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto& el = d.transport[e];
        Eigen::VectorXd c = el.pi0() * gather(map.flux[e], r.primal);
        Eigen::VectorXd pc = gather(map.phi[e], r.dual);
        for (const Point& x : {el.geometry().centroid, el.geometry().vertices[1]}) {
          EXPECT_NEAR((el.eval_poly(c, x) - zeta(x)).norm(), 0.0, 1e-9);
          EXPECT_NEAR(el.basis().value(pc, x), phi(x), 1e-9);
        }
      }
      EXPECT_LT(mass_balance_residual(sys, r.primal, r.dual).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Solver, DiffusionZeroDataGivesZero) {
  auto m = mesh::generate_crossed_mesh(2);
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  PhysicalParams params;
  params.theta = 0.0;  // still solvable: the concentration-given part is nonempty
  auto r = solve_saddle(assemble_diffusion(d, map, params, identity_samples(d), {}));
  EXPECT_EQ(r.primal.cwiseAbs().maxCoeff(), 0.0);
  auto sys = assemble_diffusion(d, map, params, identity_samples(d),
                                {.source = [](const Point& x) { return x.x(); }});
  auto r2 = solve_saddle(sys);
  EXPECT_GT(r2.dual.norm(), 0.0);
  EXPECT_LT(r2.relative_residual, 1e-10);
}

TEST(Solver, WeightedNorms) {
  auto m = mesh::generate_square_mesh(2);
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  PhysicalParams params{.lambda = 1e3, .mu = 1.0, .theta = 0.25, .M_bound = 4.0};
  Eigen::VectorXd zero;
  auto K = identity_samples(d);
  auto z = discrete_norms(d, map, params, Eigen::VectorXd::Zero(map.n_u), Eigen::VectorXd::Zero(map.n_p),
                          Eigen::VectorXd::Zero(map.n_flux), Eigen::VectorXd::Zero(map.n_phi), K);
  EXPECT_EQ(z.total(), 0.0);
  auto one = discrete_norms(d, map, params, zero, zero, zero, constant_concentration(d, map, 1.0), K);
  EXPECT_NEAR(one.concentration, 0.5, 1e-14);
  // homogeneity in mu
  Eigen::VectorXd u(map.n_u);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    Eigen::VectorXd loc = d.elastic[e].interpolate([](const Point& x) { return Point(x.x() * x.y(), x.x()); },
                                                   [](const Point& x) { return x.y(); });
    for (int i = 0; i < loc.size(); ++i) u(map.u[e].index[i]) = loc(i);
  }
  double a = discrete_norms(d, map, params, u, zero, zero, zero, K).displacement;
  params.mu *= 2;
  double b = discrete_norms(d, map, params, u, zero, zero, zero, K).displacement;
  EXPECT_NEAR(b, 2 * a, 1e-13 * a);
  // eps(u) = [[y, (1+x)/2], [(1+x)/2, 0]]: 2 mu int (y^2 + (1+x)^2/2) with mu = 1
  EXPECT_NEAR(a, 2.0 * (1.0 / 3.0 + 0.5 * 7.0 / 3.0), 1e-12);
}

TEST(Solver, PicardDecoupledConvergesInTwoSweeps) {
  auto m = mesh::generate_square_mesh(3);
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  ElasticPatch ep;
  CoupledProblem prob;
  prob.params = {.lambda = ep.lambda, .mu = ep.mu, .theta = 1e-3, .M_bound = 10.0};
  prob.diffusion_law = constitutive::ExponentialLaw{0.1, 0.0};
  prob.active_law = constitutive::LinearLaw{0.0};
  ep.ell = 0.0;
  prob.elasticity = ep.data();
  prob.diffusion.source = [](const Point& x) { return 1.0 + x.x(); };
  prob.diffusion.concentration = [](const Point& x) { return x.y(); };
  auto s = picard_iterate(d, map, prob);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(s.sweeps, 2);
  EXPECT_LE(s.iterations, 1);
  EXPECT_LT(s.max_residual, 1e-10);
}

TEST(Solver, PicardCoupledPatch) {
  // Constant coefficients, polynomial fields: the coupled loop is exact.
  auto m = mesh::generate_voronoi_mesh({.n_seeds = 16, .rng_seed = 9, .lloyd_iterations = 3});
  auto d = Discretization::build(m, 2, 1);
  auto map = GlobalDoFMap::build(d);
  ElasticPatch ep;
  CoupledProblem prob;
  prob.params = {.lambda = ep.lambda, .mu = ep.mu, .theta = 0.1, .M_bound = 10.0};
  prob.diffusion_law = constitutive::ExponentialLaw{0.5, 0.0};
  prob.active_law = constitutive::HillLaw{2.0, 1.0, 0.0};  // phi^0/(1+phi^0) = 1/2
  ep.ell = 2.5;
  prob.elasticity = ep.data();
  auto phi = [](const Point& x) { return 3 - x.x() + 2 * x.y(); };
  prob.diffusion.source = [&](const Point& x) { return 0.1 * phi(x); };
  prob.diffusion.concentration = phi;
  prob.diffusion.normal_flux = [](const Point&, const Point& n) { return 0.5 * (-n.x() + 2 * n.y()); };
  auto s = picard_iterate(d, map, prob);
  EXPECT_TRUE(s.converged);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    Point x = m.geometry(static_cast<int>(e)).centroid;
    EXPECT_NEAR((d.elastic[e].eval_poly(s.projected_displacement(d, map, static_cast<int>(e)), x) - ep.u(x)).norm(),
                0.0, 1e-9);
    EXPECT_NEAR(d.transport[e].basis().value(gather(map.phi[e], s.phi), x), phi(x), 1e-9);
    Point z = d.transport[e].eval_poly(s.projected_flux(d, map, static_cast<int>(e)), x);
    EXPECT_NEAR((z - Point(-0.5, 1.0)).norm(), 0.0, 1e-9);
  }
}

TEST(Solver, PicardStoppingIsMonotoneInTolerance) {
  auto m = mesh::generate_square_mesh(4);
  auto d = Discretization::build(m, 2, 0);
  auto map = GlobalDoFMap::build(d);
  CoupledProblem prob;
  prob.params = {.lambda = 10.0, .mu = 1.0, .theta = 0.1, .M_bound = 10.0};
  prob.diffusion_law = constitutive::ExponentialLaw{1.0, 0.05};
  prob.elasticity.body_force = [](const Point& x) { return Point(1.0, x.x()); };
  prob.diffusion.source = [](const Point& x) { return 1.0 + x.y(); };
  prob.diffusion.concentration = [](const Point& x) { return x.x(); };
  int prev = 0;
  for (double tol : {1e-2, 5e-3, 1e-4, 1e-6, 1e-8, 1e-10}) {
    PicardOptions opt;
    opt.tol = tol;
    auto s = picard_iterate(d, map, prob, opt);
    EXPECT_GE(s.iterations, prev);
    prev = s.iterations;
    for (std::size_t i = 1; i < s.history.size(); ++i) EXPECT_LT(s.history[i], s.history[i - 1]);
  }
  PicardOptions opt;
  opt.max_iter = 2;
  opt.tol = 1e-14;
  EXPECT_THROW(picard_iterate(d, map, prob, opt), Error);
  opt.throw_on_failure = false;
  auto s = picard_iterate(d, map, prob, opt);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.history.size(), 1u);
}
