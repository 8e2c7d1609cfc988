#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_map>
#include <vector>

#include "vemsad/mesh/polygonal_mesh.hpp"

namespace vemsad::mesh {

struct Rectangle {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double diameter() const { return std::hypot(width(), height()); }
};

/// Default partition for rectangles: edges on x = x0 or y = y0 are
/// Dirichlet, the rest Neumann.
inline PolygonalMesh::Tagger rectangle_tagger(const Rectangle& dom) {
  const double tol = 1e-9 * dom.diameter();
  return [dom, tol](const Point& a, const Point& b) {
    bool left = std::abs(a.x() - dom.x0) < tol && std::abs(b.x() - dom.x0) < tol;
    bool bottom = std::abs(a.y() - dom.y0) < tol && std::abs(b.y() - dom.y0) < tol;
    return (left || bottom) ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
  };
}

inline PolygonalMesh::Tagger uniform_tagger(BoundaryTag tag) {
  return [tag](const Point&, const Point&) { return tag; };
}

namespace detail {

inline void require_positive(int n, const char* what) {
  if (n < 1) throw Error(ErrorCategory::Mesh, std::string(what) + " must be >= 1");
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline PolygonalMesh generate_square_mesh(int n, const Rectangle& dom = {},
                                          const PolygonalMesh::Tagger& tagger = {}) {
  detail::require_positive(n, "n");
  std::vector<Point> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      v.emplace_back(dom.x0 + dom.width() * i / n, dom.y0 + dom.height() * j / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> el;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) el.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  return PolygonalMesh::build(std::move(v), std::move(el), {}, tagger ? tagger : rectangle_tagger(dom));
}

inline PolygonalMesh generate_crossed_mesh(int n, const Rectangle& dom = {},
                                           const PolygonalMesh::Tagger& tagger = {}) {
  detail::require_positive(n, "n");
  std::vector<Point> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      v.emplace_back(dom.x0 + dom.width() * i / n, dom.y0 + dom.height() * j / n);
  const int corner_count = static_cast<int>(v.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      v.emplace_back(dom.x0 + dom.width() * (i + 0.5) / n, dom.y0 + dom.height() * (j + 0.5) / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> el;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int c = corner_count + j * n + i;
      int a = id(i, j), b = id(i + 1, j), d = id(i + 1, j + 1), e = id(i, j + 1);
      el.push_back({a, b, c});
      el.push_back({b, d, c});
      el.push_back({d, e, c});
      el.push_back({e, a, c});
    }
  return PolygonalMesh::build(std::move(v), std::move(el), {}, tagger ? tagger : rectangle_tagger(dom));
}

/// n x n grid whose interior edges get a midpoint vertex pushed off the edge
/// by `offset` times the cell size, alternating direction with the cell
/// parity; elements become non-convex polygons with up to 8 vertices.
inline PolygonalMesh generate_nonconvex_mesh(int n, const Rectangle& dom = {}, double offset = 0.2,
                                             const PolygonalMesh::Tagger& tagger = {}) {
  detail::require_positive(n, "n");
  if (!(offset >= 0.0 && offset < 0.5)) throw Error(ErrorCategory::Mesh, "offset must lie in [0, 0.5)");
  const double hx = dom.width() / n, hy = dom.height() / n;
  std::vector<Point> v;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(dom.x0 + hx * i, dom.y0 + hy * j);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  // Horizontal interior edge (i,j)-(i+1,j), 0 < j < n; vertical (i,j)-(i,j+1), 0 < i < n.
  std::vector<int> hmid((n + 1) * n, -1), vmid((n + 1) * n, -1);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double s = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      hmid[j * n + i] = static_cast<int>(v.size());
      v.emplace_back(dom.x0 + hx * (i + 0.5), dom.y0 + hy * j + s * offset * hy);
    }
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = ((i + j) % 2 == 0) ? -1.0 : 1.0;
      vmid[i * n + j] = static_cast<int>(v.size());
      v.emplace_back(dom.x0 + hx * i + s * offset * hx, dom.y0 + hy * (j + 0.5));
    }
  std::vector<std::vector<int>> el;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      std::vector<int> loop{id(i, j)};
      if (hmid[j * n + i] >= 0) loop.push_back(hmid[j * n + i]);
      loop.push_back(id(i + 1, j));
      if (vmid[(i + 1) * n + j] >= 0) loop.push_back(vmid[(i + 1) * n + j]);
      loop.push_back(id(i + 1, j + 1));
      if (j + 1 < n) loop.push_back(hmid[(j + 1) * n + i]);
      loop.push_back(id(i, j + 1));
      if (vmid[i * n + j] >= 0) loop.push_back(vmid[i * n + j]);
      el.push_back(std::move(loop));
    }
  return PolygonalMesh::build(std::move(v), std::move(el), {}, tagger ? tagger : rectangle_tagger(dom));
}

namespace detail {

/// Keeps the part of a convex polygon with (x - mid) . dir <= 0.
inline std::vector<Point> clip_half_plane(const std::vector<Point>& poly, const Point& mid, const Point& dir) {
  std::vector<Point> out;
  const auto n = poly.size();
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    double dp = (p - mid).dot(dir), dq = (q - mid).dot(dir);
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
  }
  return out;
}

/// Bucket grid over seed points for nearest-first neighbor sweeps.
class SeedGrid {
 public:
  SeedGrid(const std::vector<Point>& pts, const Rectangle& box, int target_per_cell = 2) : pts_(pts), box_(box) {
    const double n = std::max<double>(1.0, static_cast<double>(pts.size()) / target_per_cell);
    cell_ = std::sqrt(box.area() / n);
    nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t k = 0; k < pts.size(); ++k) buckets_[index(cell_of(pts[k]))].push_back(static_cast<int>(k));
  }

  double cell() const { return cell_; }
  int max_ring() const { return std::max(nx_, ny_); }

  std::pair<int, int> cell_of(const Point& p) const {
    int i = std::clamp(static_cast<int>((p.x() - box_.x0) / cell_), 0, nx_ - 1);
    int j = std::clamp(static_cast<int>((p.y() - box_.y0) / cell_), 0, ny_ - 1);
    return {i, j};
  }

  template <class F>
  void for_ring(std::pair<int, int> c, int r, F&& f) const {
    for (int j = c.second - r; j <= c.second + r; ++j)
      for (int i = c.first - r; i <= c.first + r; ++i) {
        if (std::max(std::abs(i - c.first), std::abs(j - c.second)) != r) continue;
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        for (int k : buckets_[index({i, j})]) f(k);
      }
  }

 private:
  std::size_t index(std::pair<int, int> c) const { return static_cast<std::size_t>(c.second) * nx_ + c.first; }

  const std::vector<Point>& pts_;
  Rectangle box_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Voronoi cells of sites[0..count) clipped to `box`; sites beyond `count`
/// only act as neighbors (mirror images).
inline std::vector<std::vector<Point>> voronoi_cells(const std::vector<Point>& sites, std::size_t count,
                                                     const Rectangle& box) {
  SeedGrid grid(sites, box);
  std::vector<std::vector<Point>> cells(count);
  for (std::size_t s = 0; s < count; ++s) {
    const Point& site = sites[s];
    std::vector<Point> poly{{box.x0, box.y0}, {box.x1, box.y0}, {box.x1, box.y1}, {box.x0, box.y1}};
    auto home = grid.cell_of(site);
    for (int r = 0; r <= grid.max_ring(); ++r) {
      double reach = 0.0;
      for (const auto& p : poly) reach = std::max(reach, (p - site).norm());
      if ((r - 1) * grid.cell() > 2.0 * reach) break;
      grid.for_ring(home, r, [&](int k) {
        if (static_cast<std::size_t>(k) == s) return;
        Point dir = sites[k] - site;
        if (dir.norm() == 0.0)
          throw Error(ErrorCategory::Mesh, "duplicate Voronoi seeds at (" + std::to_string(site.x()) + ", " +
                                               std::to_string(site.y()) + ")");
        poly = clip_half_plane(poly, 0.5 * (site + sites[k]), dir);
      });
      if (poly.size() < 3)
        throw Error(ErrorCategory::Mesh, "degenerate Voronoi cell for seed " + std::to_string(s));
    }
    cells[s] = std::move(poly);
  }
  return cells;
}

/// Fuses cell corners closer than `tol` (transitively) and builds index loops.
inline std::pair<std::vector<Point>, std::vector<std::vector<int>>> weld(
    const std::vector<std::vector<Point>>& cells, double tol) {
  std::vector<Point> raw;
  for (const auto& c : cells) raw.insert(raw.end(), c.begin(), c.end());
  std::vector<int> parent(raw.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  struct KeyHash {
    std::size_t operator()(const std::pair<long long, long long>& k) const {
      return std::hash<long long>()(k.first * 73856093LL ^ k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<long long, long long>, std::vector<int>, KeyHash> buckets;
  auto key = [tol](const Point& p) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor(p.x() / tol)),
                                           static_cast<long long>(std::floor(p.y() / tol))};
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto k = key(raw[i]);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find({k.first + dx, k.second + dy});
        if (it == buckets.end()) continue;
        for (int j : it->second)
          if ((raw[i] - raw[j]).norm() < tol) {
            int a = find(static_cast<int>(i)), b = find(j);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
          }
      }
    buckets[k].push_back(static_cast<int>(i));
  }
  std::vector<int> new_id(raw.size(), -1);
  std::vector<Point> verts;
  std::vector<int> members(raw.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int r = find(static_cast<int>(i));
    if (new_id[r] < 0) {
      new_id[r] = static_cast<int>(verts.size());
      verts.push_back(raw[r]);
    }
  }
  std::vector<std::vector<int>> loops;
  std::size_t offset = 0;
  for (const auto& c : cells) {
    std::vector<int> loop;
    for (std::size_t i = 0; i < c.size(); ++i) {
      int id = new_id[find(static_cast<int>(offset + i))];
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    offset += c.size();
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return {std::move(verts), std::move(loops)};
}

inline Point polygon_centroid(const std::vector<Point>& poly) { return make_geometry(poly).centroid; }

/// Moves every non-boundary vertex by a random offset of at most
/// fraction * half its shortest incident edge.
inline void perturb_interior(std::vector<Point>& verts, const std::vector<std::vector<int>>& loops, double fraction,
                             std::mt19937_64& rng) {
  if (fraction <= 0.0) return;
  std::vector<double> shortest(verts.size(), 1e300);
  std::map<std::pair<int, int>, int> use;
  for (const auto& l : loops)
    for (std::size_t i = 0; i < l.size(); ++i) {
      int a = l[i], b = l[(i + 1) % l.size()];
      double len = (verts[a] - verts[b]).norm();
      shortest[a] = std::min(shortest[a], len);
      shortest[b] = std::min(shortest[b], len);
      ++use[std::minmax(a, b)];
    }
  std::vector<bool> on_boundary(verts.size(), false);
  for (const auto& [e, c] : use)
    if (c == 1) on_boundary[e.first] = on_boundary[e.second] = true;
  for (std::size_t v = 0; v < verts.size(); ++v) {
    double r = fraction * 0.5 * shortest[v] * std::sqrt(uniform01(rng));
    double t = 2.0 * std::numbers::pi * uniform01(rng);
    if (!on_boundary[v]) verts[v] += r * Point(std::cos(t), std::sin(t));
  }
}

}  // namespace detail

struct VoronoiOptions {
  int n_seeds = 64;
  std::uint64_t rng_seed = 1;
  int lloyd_iterations = 0;
  double perturbation = 0.0;
};

inline PolygonalMesh generate_voronoi_mesh(const VoronoiOptions& opt, const Rectangle& dom = {},
                                           const PolygonalMesh::Tagger& tagger = {}) {
  detail::require_positive(opt.n_seeds, "n_seeds");
  if (!(opt.perturbation >= 0.0 && opt.perturbation < 0.5))
    throw Error(ErrorCategory::Mesh, "perturbation must lie in [0, 0.5)");
  std::mt19937_64 rng(opt.rng_seed);
  std::vector<Point> seeds;
  for (int i = 0; i < opt.n_seeds; ++i) {
    double x = dom.x0 + dom.width() * detail::uniform01(rng);
    double y = dom.y0 + dom.height() * detail::uniform01(rng);
    seeds.emplace_back(x, y);
  }
  auto cells = detail::voronoi_cells(seeds, seeds.size(), dom);
  for (int it = 0; it < opt.lloyd_iterations; ++it) {
    for (std::size_t s = 0; s < seeds.size(); ++s) seeds[s] = detail::polygon_centroid(cells[s]);
    cells = detail::voronoi_cells(seeds, seeds.size(), dom);
  }
  auto [verts, loops] = detail::weld(cells, 1e-10 * dom.diameter());
  detail::perturb_interior(verts, loops, opt.perturbation, rng);
  return PolygonalMesh::build(std::move(verts), std::move(loops), {}, tagger ? tagger : rectangle_tagger(dom));
}

struct AnnulusOptions {
  double rho_i = 1.0;
  double rho_o = 5.0;
  int n_seeds = 400;
  std::uint64_t rng_seed = 1;
  int lloyd_iterations = 10;
};

/// Voronoi mesh of the annulus rho_i < r < rho_o built from seeds mirrored
/// across both circles; boundary vertices are snapped onto the circles.
inline PolygonalMesh generate_annulus_mesh(const AnnulusOptions& opt) {
  if (!(opt.rho_i > 0.0 && opt.rho_i < opt.rho_o)) throw Error(ErrorCategory::Mesh, "need 0 < rho_i < rho_o");
  detail::require_positive(opt.n_seeds, "n_seeds");
  std::mt19937_64 rng(opt.rng_seed);
  const double ri = opt.rho_i, ro = opt.rho_o;
  std::vector<Point> seeds;
  while (static_cast<int>(seeds.size()) < opt.n_seeds) {
    Point p(ro * (2.0 * detail::uniform01(rng) - 1.0), ro * (2.0 * detail::uniform01(rng) - 1.0));
    double r = p.norm();
    if (r > ri && r < ro) seeds.push_back(p);
  }
  const double area = std::numbers::pi * (ro * ro - ri * ri);
  const double spacing = std::sqrt(area / opt.n_seeds);
  const double band = 1.5 * spacing;
  const double pad = 2.0 * band + spacing;
  Rectangle box{-ro - pad, -ro - pad, ro + pad, ro + pad};

  auto with_mirrors = [&](const std::vector<Point>& s) {
    std::vector<Point> all = s;
    for (const auto& p : s) {
      double r = p.norm();
      Point dir = p / r;
      if (ro - r < band) all.push_back((2.0 * ro - r) * dir);
      if (r - ri < band) all.push_back((2.0 * ri - r) * dir);
    }
    return all;
  };
  auto cells = detail::voronoi_cells(with_mirrors(seeds), seeds.size(), box);
  for (int it = 0; it < opt.lloyd_iterations; ++it) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      Point c = detail::polygon_centroid(cells[s]);
      double r = c.norm();
      if (r > ri && r < ro) seeds[s] = c;
    }
    cells = detail::voronoi_cells(with_mirrors(seeds), seeds.size(), box);
  }
  auto [verts, loops] = detail::weld(cells, 1e-3 * spacing);

  std::map<std::pair<int, int>, int> use;
  for (const auto& l : loops)
    for (std::size_t i = 0; i < l.size(); ++i) ++use[std::minmax(l[i], l[(i + 1) % l.size()])];
  const double mid = 0.5 * (ri + ro);
  std::vector<bool> snapped(verts.size(), false);
  for (const auto& [e, c] : use) {
    if (c != 1) continue;
    Point m = 0.5 * (verts[e.first] + verts[e.second]);
    double target = m.norm() < mid ? ri : ro;
    if (std::abs(m.norm() - target) > spacing)
      throw Error(ErrorCategory::Mesh, "annulus boundary not resolved by the seeds; increase n_seeds");
    for (int v : {e.first, e.second})
      if (!snapped[v]) {
        verts[v] *= target / verts[v].norm();
        snapped[v] = true;
      }
  }
  auto tagger = [mid](const Point& a, const Point& b) {
    return (0.5 * (a + b)).norm() < mid ? BoundaryTag::Inner : BoundaryTag::Outer;
  };
  return PolygonalMesh::build(std::move(verts), std::move(loops), {}, tagger);
}

}  // namespace vemsad::mesh
