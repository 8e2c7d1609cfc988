#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vemsad/core/error.hpp"

namespace vemsad::mesh {

using Point = Eigen::Vector2d;

enum class BoundaryTag : std::uint8_t { Dirichlet, Neumann, Inner, Outer };

inline std::string_view to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return "D";
    case BoundaryTag::Neumann: return "N";
    case BoundaryTag::Inner: return "inner";
    case BoundaryTag::Outer: return "outer";
  }
  return "?";
}

inline BoundaryTag parse_tag(std::string_view s) {
  if (s == "D") return BoundaryTag::Dirichlet;
  if (s == "N") return BoundaryTag::Neumann;
  if (s == "inner") return BoundaryTag::Inner;
  if (s == "outer") return BoundaryTag::Outer;
  throw Error(ErrorCategory::Mesh, "unknown boundary tag '" + std::string(s) + "'");
}

/// Geometry of one polygon, detached from the mesh so element kernels can be
/// fed arbitrary polygons in tests.
struct ElementGeometry {
  std::vector<Point> vertices;  // counter-clockwise
  Point centroid = Point::Zero();
  double area = 0.0;
  double diameter = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  const Point& vertex(std::size_t i) const { return vertices[i % vertices.size()]; }

  /// Outward unit normal of local edge i (vertex i -> vertex i+1).
  Point outward_normal(std::size_t i) const {
    Point t = vertex(i + 1) - vertex(i);
    return Point(t.y(), -t.x()) / t.norm();
  }
  double edge_length(std::size_t i) const { return (vertex(i + 1) - vertex(i)).norm(); }
};

inline double signed_area(std::span<const Point> loop) {
  double a = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % loop.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

inline ElementGeometry make_geometry(std::vector<Point> vertices) {
  ElementGeometry g;
  g.vertices = std::move(vertices);
  const auto n = g.vertices.size();
  double a = 0.0, cx = 0.0, cy = 0.0;
  // Shift to the first vertex to limit cancellation on far-from-origin meshes.
  const Point o = g.vertices[0];
  for (std::size_t i = 0; i < n; ++i) {
    Point p = g.vertices[i] - o;
    Point q = g.vertices[(i + 1) % n] - o;
    double c = p.x() * q.y() - q.x() * p.y();
    a += c;
    cx += (p.x() + q.x()) * c;
    cy += (p.y() + q.y()) * c;
  }
  a *= 0.5;
  g.area = a;
  g.centroid = o + Point(cx, cy) / (6.0 * a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      g.diameter = std::max(g.diameter, (g.vertices[i] - g.vertices[j]).norm());
  return g;
}

namespace detail {

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

inline bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

/// True if no two non-adjacent edges of the closed loop cross and no vertex repeats.
inline bool is_simple_polygon(std::span<const Point> loop) {
  const auto n = loop.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((loop[i] - loop[j]).norm() == 0.0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (detail::segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

struct Edge {
  /// Vertex pair in the traversal direction of elements[0]; the global edge
  /// normal is the outward normal of elements[0].
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> elements{-1, -1};
  std::optional<BoundaryTag> tag;

  bool is_boundary() const { return elements[1] < 0; }
};

struct Element {
  std::vector<int> vertices;  // counter-clockwise
  std::vector<int> edges;     // local edge i joins vertices[i] -> vertices[i+1]
  std::vector<std::int8_t> edge_sign;  // +1 if the edge's global orientation matches
};

struct TaggedEdge {
  std::array<int, 2> vertices;
  BoundaryTag tag;
};

/// Immutable conforming polygonal mesh with boundary tags and per-element
/// geometric caches.
class PolygonalMesh {
 public:
  using Tagger = std::function<BoundaryTag(const Point&, const Point&)>;

  PolygonalMesh() = default;

  /// Builds from vertex coordinates and element loops. Clockwise loops are
  /// reversed (see reoriented()). Boundary edges are tagged either by the
  /// explicit list or by `tagger`; an untagged boundary edge is an error.
  static PolygonalMesh build(std::vector<Point> vertices, std::vector<std::vector<int>> elements,
                             const std::vector<TaggedEdge>& tags, const Tagger& tagger = {}) {
    PolygonalMesh m;
    m.vertices_ = std::move(vertices);
    const int nv = static_cast<int>(m.vertices_.size());
    if (elements.empty()) throw Error(ErrorCategory::Mesh, "mesh has no elements");

    m.elements_.resize(elements.size());
    m.geometry_.resize(elements.size());
    std::map<std::pair<int, int>, int> edge_of;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      auto loop = std::move(elements[e]);
      if (loop.size() < 3)
        throw Error(ErrorCategory::Mesh, "element " + std::to_string(e) + " has fewer than 3 vertices");
      std::vector<Point> pts;
      for (int v : loop) {
        if (v < 0 || v >= nv)
          throw Error(ErrorCategory::Mesh, "element " + std::to_string(e) + " references vertex " +
                                               std::to_string(v) + " out of range");
        pts.push_back(m.vertices_[v]);
      }
      if (signed_area(pts) < 0.0) {
        std::reverse(loop.begin(), loop.end());
        std::reverse(pts.begin(), pts.end());
        m.reoriented_ = true;
      }
      if (!is_simple_polygon(pts) || signed_area(pts) <= 0.0)
        throw Error(ErrorCategory::Mesh, "element " + std::to_string(e) + " is not a simple polygon with positive area");

      Element& el = m.elements_[e];
      el.vertices = loop;
      for (std::size_t i = 0; i < loop.size(); ++i) {
        int a = loop[i], b = loop[(i + 1) % loop.size()];
        auto key = std::minmax(a, b);
        auto it = edge_of.find({key.first, key.second});
        if (it == edge_of.end()) {
          int id = static_cast<int>(m.edges_.size());
          Edge ed;
          ed.vertices = {a, b};
          ed.elements = {static_cast<int>(e), -1};
          m.edges_.push_back(ed);
          edge_of.emplace(std::pair{key.first, key.second}, id);
          el.edges.push_back(id);
          el.edge_sign.push_back(1);
        } else {
          Edge& ed = m.edges_[it->second];
          if (ed.elements[1] >= 0)
            throw Error(ErrorCategory::Mesh, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                 ") is shared by more than two elements");
          if (ed.vertices[0] != b)
            throw Error(ErrorCategory::Mesh, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                                 ") is traversed in the same direction by two elements");
          ed.elements[1] = static_cast<int>(e);
          el.edges.push_back(it->second);
          el.edge_sign.push_back(-1);
        }
      }
      m.geometry_[e] = make_geometry(std::move(pts));
      m.h_ = std::max(m.h_, m.geometry_[e].diameter);
    }

    for (const auto& t : tags) {
      auto key = std::minmax(t.vertices[0], t.vertices[1]);
      auto it = edge_of.find({key.first, key.second});
      if (it == edge_of.end())
        throw Error(ErrorCategory::Mesh, "tagged edge (" + std::to_string(t.vertices[0]) + "," +
                                             std::to_string(t.vertices[1]) + ") is not an edge of the mesh");
      Edge& ed = m.edges_[it->second];
      if (!ed.is_boundary())
        throw Error(ErrorCategory::Mesh, "tagged edge (" + std::to_string(t.vertices[0]) + "," +
                                             std::to_string(t.vertices[1]) + ") is interior");
      if (ed.tag && *ed.tag != t.tag)
        throw Error(ErrorCategory::Mesh, "boundary edge tagged twice with different tags");
      ed.tag = t.tag;
    }
    for (auto& ed : m.edges_) {
      if (!ed.is_boundary()) continue;
      if (!ed.tag && tagger) ed.tag = tagger(m.vertices_[ed.vertices[0]], m.vertices_[ed.vertices[1]]);
      if (!ed.tag)
        throw Error(ErrorCategory::Mesh, "boundary edge (" + std::to_string(ed.vertices[0]) + "," +
                                             std::to_string(ed.vertices[1]) + ") has no tag");
    }
    return m;
  }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_elements() const { return elements_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& vertex(int i) const { return vertices_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_[i]; }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int i) const { return elements_[i]; }
  const ElementGeometry& geometry(int i) const { return geometry_[i]; }

  /// Global mesh size: the largest element diameter.
  double h() const { return h_; }
  /// True if any input element loop was clockwise and had to be reversed.
  bool reoriented() const { return reoriented_; }

  double total_area() const {
    double a = 0.0;
    for (const auto& g : geometry_) a += g.area;
    return a;
  }

  double edge_length(int e) const {
    return (vertices_[edges_[e].vertices[1]] - vertices_[edges_[e].vertices[0]]).norm();
  }
  /// Unit normal of the global edge orientation (outward for elements[0]).
  Point edge_normal(int e) const {
    Point t = vertices_[edges_[e].vertices[1]] - vertices_[edges_[e].vertices[0]];
    return Point(t.y(), -t.x()) / t.norm();
  }

  std::size_t count_boundary_edges() const {
    return static_cast<std::size_t>(
        std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_boundary(); }));
  }

  std::vector<TaggedEdge> boundary_tags() const {
    std::vector<TaggedEdge> out;
    for (const auto& e : edges_)
      if (e.is_boundary()) out.push_back({e.vertices, *e.tag});
    return out;
  }

  /// Index of an element containing p, or -1.
  int locate(const Point& p) const {
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      const auto& g = geometry_[e];
      if ((p - g.centroid).norm() > g.diameter) continue;
      bool inside = false;
      const auto n = g.vertices.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = g.vertices[i];
        const Point& b = g.vertices[j];
        if (((a.y() > p.y()) != (b.y() > p.y())) &&
            (p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()))
          inside = !inside;
      }
      if (inside) return static_cast<int>(e);
    }
    return -1;
  }

 private:
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
  std::vector<Element> elements_;
  std::vector<ElementGeometry> geometry_;
  double h_ = 0.0;
  bool reoriented_ = false;
};

/// Per-element regularity figures.
struct RegularityReport {
  std::vector<double> edge_ratio;       // min_e h_e / h_E
  std::vector<bool> centroid_visible;   // centroid sees every edge (star proxy)
  std::vector<bool> convex;
  std::vector<int> flagged;             // edge ratio below rho or centroid not in kernel
  double min_edge_ratio = 1.0;
};

inline bool is_convex(const ElementGeometry& g) {
  const auto n = g.num_vertices();
  for (std::size_t i = 0; i < n; ++i)
    if (detail::cross(g.vertex(i + 1) - g.vertex(i), g.vertex(i + 2) - g.vertex(i + 1)) < 0.0) return false;
  return true;
}

/// Whether every edge of g is seen from `p` with positive orientation, i.e.
/// p lies in the polygon's kernel.
inline bool sees_all_edges(const ElementGeometry& g, const Point& p) {
  for (std::size_t i = 0; i < g.num_vertices(); ++i)
    if (detail::cross(g.vertex(i) - p, g.vertex(i + 1) - p) <= 0.0) return false;
  return true;
}

inline RegularityReport validate_regularity(const PolygonalMesh& mesh, double rho) {
  RegularityReport r;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& g = mesh.geometry(static_cast<int>(e));
    double ratio = 1e300;
    for (std::size_t i = 0; i < g.num_vertices(); ++i) ratio = std::min(ratio, g.edge_length(i) / g.diameter);
    bool convex = is_convex(g);
    bool visible = convex || sees_all_edges(g, g.centroid);
    r.edge_ratio.push_back(ratio);
    r.convex.push_back(convex);
    r.centroid_visible.push_back(visible);
    r.min_edge_ratio = std::min(r.min_edge_ratio, ratio);
    if (ratio < rho || !visible) r.flagged.push_back(static_cast<int>(e));
  }
  return r;
}

}  // namespace vemsad::mesh
