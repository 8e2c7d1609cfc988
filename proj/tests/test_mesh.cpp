#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "vemsad/mesh/generators.hpp"
#include "vemsad/mesh/io.hpp"
#include "vemsad/mesh/polygonal_mesh.hpp"

using namespace vemsad;
using namespace vemsad::mesh;

namespace {

// Brute-force edge census straight from the element loops.
struct Census {
  std::size_t edges = 0, interior = 0, boundary = 0, bad = 0;
};

Census census(const PolygonalMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& e : m.elements())
    for (std::size_t i = 0; i < e.vertices.size(); ++i) {
      int a = e.vertices[i], b = e.vertices[(i + 1) % e.vertices.size()];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  Census c;
  for (const auto& [k, n] : count) {
    ++c.edges;
    if (n == 1) ++c.boundary;
    else if (n == 2) ++c.interior;
    else ++c.bad;
  }
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vemsad_" + name);
}

void expect_same_mesh(const PolygonalMesh& a, const PolygonalMesh& b) {
  ASSERT_EQ(a.num_vertices(), b.num_vertices());
  for (std::size_t i = 0; i < a.num_vertices(); ++i) {
    EXPECT_EQ(a.vertices()[i].x(), b.vertices()[i].x());
    EXPECT_EQ(a.vertices()[i].y(), b.vertices()[i].y());
  }
  ASSERT_EQ(a.num_elements(), b.num_elements());
  for (std::size_t e = 0; e < a.num_elements(); ++e) EXPECT_EQ(a.elements()[e].vertices, b.elements()[e].vertices);
  ASSERT_EQ(a.num_edges(), b.num_edges());
  for (std::size_t e = 0; e < a.num_edges(); ++e) {
    EXPECT_EQ(a.edges()[e].vertices, b.edges()[e].vertices);
    EXPECT_EQ(a.edges()[e].tag, b.edges()[e].tag);
  }
}

}  // namespace

TEST(SquareMesh, SingleElementGeometry) {
  auto m = generate_square_mesh(1);
  ASSERT_EQ(m.num_elements(), 1u);
  const auto& g = m.geometry(0);
  EXPECT_DOUBLE_EQ(g.area, 1.0);
  EXPECT_NEAR(g.centroid.x(), 0.5, 1e-15);
  EXPECT_NEAR(g.centroid.y(), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(m.h(), std::sqrt(2.0));
}

TEST(SquareMesh, CountsMatchClosedFormAndCensus) {
  for (int n : {1, 2, 3, 8, 12}) {
    auto m = generate_square_mesh(n);
    EXPECT_EQ(m.num_elements(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(m.num_vertices(), static_cast<std::size_t>((n + 1) * (n + 1)));
    EXPECT_EQ(m.num_edges(), static_cast<std::size_t>(2 * n * (n + 1)));
    auto c = census(m);
    EXPECT_EQ(c.edges, m.num_edges());
    EXPECT_EQ(c.boundary, m.count_boundary_edges());
    EXPECT_EQ(c.bad, 0u);
  }
  auto m8 = generate_square_mesh(8);
  EXPECT_EQ(m8.num_elements(), 64u);
  EXPECT_EQ(m8.num_edges(), 144u);
  EXPECT_EQ(m8.num_vertices(), 81u);
  auto c2 = census(generate_square_mesh(2));
  EXPECT_EQ(c2.interior, 4u);
  EXPECT_EQ(c2.boundary, 8u);
}

TEST(CrossedMesh, Counts) {
  auto m1 = generate_crossed_mesh(1);
  EXPECT_EQ(m1.num_elements(), 4u);
  EXPECT_EQ(m1.num_vertices(), 5u);
  EXPECT_EQ(m1.num_edges(), 8u);
  EXPECT_EQ(census(m1).edges, 8u);
  auto m8 = generate_crossed_mesh(8);
  EXPECT_EQ(m8.num_elements(), 256u);
  EXPECT_EQ(m8.num_edges(), 400u);
  EXPECT_EQ(m8.num_vertices(), 145u);
  for (int n : {1, 3, 7}) {
    auto m = generate_crossed_mesh(n);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
    EXPECT_EQ(census(m).bad, 0u);
  }
}

TEST(NonconvexMesh, CountsAndNonConvexity) {
  for (int n : {2, 4, 8}) {
    auto m = generate_nonconvex_mesh(n);
    EXPECT_EQ(m.num_elements(), static_cast<std::size_t>(n * n));
    EXPECT_EQ(m.num_edges(), static_cast<std::size_t>(2 * n * (n + 1) + 2 * n * (n - 1)));
    EXPECT_EQ(m.num_vertices(), static_cast<std::size_t>((n + 1) * (n + 1) + 2 * n * (n - 1)));
    EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
  }
  auto m = generate_nonconvex_mesh(4);
  int nonconvex = 0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) nonconvex += !is_convex(m.geometry(static_cast<int>(e)));
  EXPECT_GT(nonconvex, 0);
}

TEST(BoundaryTags, RectangleDefaultPartition) {
  auto m = generate_square_mesh(4);
  int d = 0, n = 0;
  for (const auto& e : m.edges()) {
    if (!e.is_boundary()) {
      EXPECT_FALSE(e.tag.has_value());
      continue;
    }
    ASSERT_TRUE(e.tag.has_value());
    Point mid = 0.5 * (m.vertex(e.vertices[0]) + m.vertex(e.vertices[1]));
    bool on_d = mid.x() < 1e-12 || mid.y() < 1e-12;
    EXPECT_EQ(*e.tag, on_d ? BoundaryTag::Dirichlet : BoundaryTag::Neumann);
    (*e.tag == BoundaryTag::Dirichlet ? d : n)++;
  }
  EXPECT_EQ(d, 8);
  EXPECT_EQ(n, 8);
}

TEST(Orientation, EdgeNormalIsOutwardForFirstElement) {
  auto m = generate_crossed_mesh(3);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    const auto& el = m.element(static_cast<int>(e));
    const auto& g = m.geometry(static_cast<int>(e));
    for (std::size_t i = 0; i < el.edges.size(); ++i) {
      Point n = m.edge_normal(el.edges[i]);
      EXPECT_NEAR((el.edge_sign[i] * n - g.outward_normal(i)).norm(), 0.0, 1e-14);
    }
  }
}

TEST(VoronoiMesh, SingleSeedIsTheDomain) {
  auto m = generate_voronoi_mesh({.n_seeds = 1, .rng_seed = 3});
  ASSERT_EQ(m.num_elements(), 1u);
  EXPECT_NEAR(m.geometry(0).area, 1.0, 1e-14);
  EXPECT_EQ(m.num_vertices(), 4u);
}

TEST(VoronoiMesh, DeterministicAndPartitioning) {
  VoronoiOptions opt{.n_seeds = 100, .rng_seed = 42, .lloyd_iterations = 2, .perturbation = 0.0};
  auto a = generate_voronoi_mesh(opt);
  auto b = generate_voronoi_mesh(opt);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.num_elements(), 100u);
  EXPECT_NEAR(a.total_area(), 1.0, 1e-10);
  EXPECT_EQ(census(a).bad, 0u);
  // Euler characteristic of a disk.
  EXPECT_EQ(static_cast<long>(a.num_vertices()) - static_cast<long>(a.num_edges()) +
                static_cast<long>(a.num_elements()),
            1);
}

TEST(VoronoiMesh, PerturbedStaysValid) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto m = generate_voronoi_mesh({.n_seeds = 80, .rng_seed = seed, .lloyd_iterations = 3, .perturbation = 0.3});
    EXPECT_NEAR(m.total_area(), 1.0, 1e-10);
    auto ref = generate_voronoi_mesh({.n_seeds = 80, .rng_seed = seed, .lloyd_iterations = 3, .perturbation = 0.0});
    double moved = 0.0;
    for (std::size_t i = 0; i < m.num_vertices(); ++i) moved = std::max(moved, (m.vertices()[i] - ref.vertices()[i]).norm());
    EXPECT_GT(moved, 0.0);
  }
}

TEST(VoronoiMesh, RejectsBadPerturbation) {
  EXPECT_THROW(generate_voronoi_mesh({.n_seeds = 10, .rng_seed = 1, .lloyd_iterations = 0, .perturbation = 0.5}),
               Error);
}

TEST(AnnulusMesh, AreaAndTags) {
  auto m = generate_annulus_mesh({.rho_i = 1.0, .rho_o = 5.0, .n_seeds = 600, .rng_seed = 7, .lloyd_iterations = 10});
  const double exact = std::numbers::pi * (25.0 - 1.0);
  EXPECT_NEAR(exact, 75.398, 1e-3);
  EXPECT_NEAR(m.total_area(), exact, 0.01 * exact);
  int inner = 0, outer = 0;
  for (const auto& e : m.edges()) {
    if (!e.is_boundary()) continue;
    ASSERT_TRUE(e.tag.has_value());
    Point mid = 0.5 * (m.vertex(e.vertices[0]) + m.vertex(e.vertices[1]));
    if (*e.tag == BoundaryTag::Inner) {
      ++inner;
      EXPECT_LT(mid.norm(), 1.05);
    } else {
      EXPECT_EQ(*e.tag, BoundaryTag::Outer);
      ++outer;
      EXPECT_GT(mid.norm(), 4.9);
    }
  }
  EXPECT_GT(inner, 3);
  EXPECT_GT(outer, inner);
  EXPECT_EQ(census(m).bad, 0u);
}

TEST(MeshIo, RoundTrip) {
  auto m = generate_square_mesh(2);
  auto path = temp_file("square2.json");
  save_mesh(m, path);
  auto back = load_mesh(path);
  expect_same_mesh(m, back);
  auto v = generate_voronoi_mesh({.n_seeds = 30, .rng_seed = 5, .lloyd_iterations = 1, .perturbation = 0.2});
  save_mesh(v, path);
  expect_same_mesh(v, load_mesh(path));
  std::filesystem::remove(path);
}

TEST(MeshIo, RejectsEdgeSharedByThreeElements) {
  nlohmann::json j = {{"vertices", {{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {1.5, 0.8}}},
                      {"elements", {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}},
                      {"boundary", nlohmann::json::array()}};
  try {
    from_json(j);
    FAIL() << "expected a conformity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Mesh);
  }
}

TEST(MeshIo, ReorientsClockwiseLoops) {
  nlohmann::json j = {{"vertices", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}},
                      {"elements", {{0, 3, 2, 1}}},
                      {"boundary",
                       {{{"edge", {0, 1}}, {"tag", "D"}},
                        {{"edge", {1, 2}}, {"tag", "N"}},
                        {{"edge", {2, 3}}, {"tag", "N"}},
                        {{"edge", {3, 0}}, {"tag", "D"}}}}};
  auto m = from_json(j);
  EXPECT_TRUE(m.reoriented());
  EXPECT_GT(signed_area(m.geometry(0).vertices), 0.0);
  EXPECT_FALSE(generate_square_mesh(1).reoriented());
}

TEST(MeshIo, RejectsUntaggedBoundaryAndMalformed) {
  nlohmann::json j = {{"vertices", {{0, 0}, {1, 0}, {0, 1}}},
                      {"elements", {{0, 1, 2}}},
                      {"boundary", {{{"edge", {0, 1}}, {"tag", "D"}}}}};
  EXPECT_THROW(from_json(j), Error);
  nlohmann::json bad = {{"vertices", {{0, 0, 1}}}, {"elements", {{0}}}};
  EXPECT_THROW(from_json(bad), Error);
  auto path = temp_file("garbage.json");
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(load_mesh(path), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(load_mesh(temp_file("does_not_exist.json")), Error);
}

TEST(Regularity, SquareEquilateralAndLShape) {
  auto sq = generate_square_mesh(1);
  auto r = validate_regularity(sq, 0.1);
  EXPECT_NEAR(r.edge_ratio[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(r.flagged.empty());

  nlohmann::json tri = {{"vertices", {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}}},
                        {"elements", {{0, 1, 2}}},
                        {"boundary",
                         {{{"edge", {0, 1}}, {"tag", "D"}},
                          {{"edge", {1, 2}}, {"tag", "N"}},
                          {{"edge", {2, 0}}, {"tag", "N"}}}}};
  auto rt = validate_regularity(from_json(tri), 0.1);
  EXPECT_NEAR(rt.edge_ratio[0], 1.0, 1e-15);

  // Thin L whose centroid falls outside the polygon's kernel.
  std::vector<Point> pts{{0, 0}, {4, 0}, {4, 0.2}, {0.2, 0.2}, {0.2, 4}, {0, 4}};
  auto g = make_geometry(pts);
  EXPECT_FALSE(sees_all_edges(g, g.centroid));
  auto lm = PolygonalMesh::build(pts, {{0, 1, 2, 3, 4, 5}}, {}, uniform_tagger(BoundaryTag::Dirichlet));
  auto rl = validate_regularity(lm, 0.01);
  ASSERT_EQ(rl.flagged.size(), 1u);
  EXPECT_FALSE(rl.centroid_visible[0]);
}
