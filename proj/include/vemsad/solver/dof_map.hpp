#pragma once

#include <vector>

#include "vemsad/diffusion/local_space.hpp"
#include "vemsad/elasticity/local_space.hpp"
#include "vemsad/mesh/polygonal_mesh.hpp"

namespace vemsad::solver {

using mesh::BoundaryTag;
using mesh::Point;

/// Element kernels for every element of a mesh; built once and reused by
/// every Picard sweep.
struct Discretization {
  const mesh::PolygonalMesh* mesh = nullptr;
  int k1 = 2;
  int k2 = 1;
  int quad_degree = -1;
  std::vector<elasticity::ElasticityElement> elastic;
  std::vector<diffusion::DiffusionElement> transport;

  static Discretization build(const mesh::PolygonalMesh& m, int k1, int k2, int quad_degree = -1) {
    Discretization d;
    d.mesh = &m;
    d.k1 = k1;
    d.k2 = k2;
    d.quad_degree = quad_degree >= 0 ? quad_degree : 2 * std::max(k1, k2) + 4;
    d.elastic.reserve(m.num_elements());
    d.transport.reserve(m.num_elements());
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
      const auto& g = m.geometry(static_cast<int>(e));
      d.elastic.emplace_back(g, k1, d.quad_degree);
      d.transport.emplace_back(g, k2, d.quad_degree);
    }
    return d;
  }
};

/// Local-to-global table: global index and orientation sign per local DoF.
struct LocalMap {
  std::vector<int> index;
  std::vector<double> sign;
};

/// Global numbering of the four fields.
///
/// Displacement: two components per vertex, then per edge the k1-1 interior
/// nodes (in the edge's global direction), then element moments. Flux: k2+1
/// normal values per edge along its global direction, measured against the
/// global edge normal, then element moments. Pressure and concentration are
/// element-wise polynomial coefficients.
struct GlobalDoFMap {
  int n_u = 0, n_p = 0, n_flux = 0, n_phi = 0;
  std::vector<LocalMap> u, p, flux, phi;

  int total_elasticity() const { return n_u + n_p; }
  int total_diffusion() const { return n_flux + n_phi; }
  int total() const { return total_elasticity() + total_diffusion(); }

  /// Global displacement index of boundary node j (0 = the vertex) on the
  /// global edge, counted along the edge's global direction.
  int edge_node_u(const mesh::PolygonalMesh& m, int k1, int edge, int j, int comp) const {
    const auto& ed = m.edge(edge);
    if (j == 0) return 2 * ed.vertices[0] + comp;
    if (j == k1) return 2 * ed.vertices[1] + comp;
    return 2 * static_cast<int>(m.num_vertices()) + 2 * ((k1 - 1) * edge + (j - 1)) + comp;
  }
  int edge_flux(int k2, int edge, int j) const { return (k2 + 1) * edge + j; }

  static GlobalDoFMap build(const Discretization& d) {
    const auto& m = *d.mesh;
    GlobalDoFMap g;
    const int nv = static_cast<int>(m.num_vertices()), ne = static_cast<int>(m.num_edges());
    const int nel = static_cast<int>(m.num_elements());
    const int k1 = d.k1, k2 = d.k2;
    const int u_interior = poly::dim_p(k1 - 1) - 1 + poly::dim_p(k1 - 3);
    const int flux_interior = poly::dim_p(k2) - 1 + poly::dim_p(k2 - 1);
    const int u_elem_offset = 2 * nv + 2 * (k1 - 1) * ne;
    const int flux_elem_offset = (k2 + 1) * ne;
    g.n_u = u_elem_offset + u_interior * nel;
    g.n_p = poly::dim_p(k1 - 1) * nel;
    g.n_flux = flux_elem_offset + flux_interior * nel;
    g.n_phi = poly::dim_p(k2) * nel;
    g.u.resize(nel);
    g.p.resize(nel);
    g.flux.resize(nel);
    g.phi.resize(nel);
    for (int e = 0; e < nel; ++e) {
      const auto& el = m.element(e);
      const auto& ee = d.elastic[e];
      const auto& te = d.transport[e];
      const int nloc = static_cast<int>(el.vertices.size());

      LocalMap& um = g.u[e];
      um.index.assign(ee.num_dofs(), -1);
      um.sign.assign(ee.num_dofs(), 1.0);
      for (int i = 0; i < nloc; ++i) {
        int edge = el.edges[i];
        bool forward = el.edge_sign[i] > 0;
        for (int j = 0; j < k1; ++j) {
          int gj = forward ? j : k1 - j;  // position along the global direction
          for (int c = 0; c < 2; ++c) {
            int local = ee.node_dof(ee.node(i, j), c);
            um.index[local] = j == 0 ? 2 * el.vertices[i] + c : g.edge_node_u(m, k1, edge, gj, c);
          }
        }
      }
      for (int a = 0; a < u_interior; ++a) um.index[ee.div_dof(0) + a] = u_elem_offset + u_interior * e + a;

      LocalMap& pm = g.p[e];
      for (int a = 0; a < ee.num_pressure(); ++a) {
        pm.index.push_back(ee.num_pressure() * e + a);
        pm.sign.push_back(1.0);
      }

      LocalMap& fm = g.flux[e];
      fm.index.assign(te.num_dofs(), -1);
      fm.sign.assign(te.num_dofs(), 1.0);
      for (int i = 0; i < nloc; ++i) {
        int edge = el.edges[i];
        bool forward = el.edge_sign[i] > 0;
        for (int j = 0; j <= k2; ++j) {
          int gj = forward ? j : k2 - j;
          fm.index[te.edge_dof(i, j)] = g.edge_flux(k2, edge, gj);
          fm.sign[te.edge_dof(i, j)] = forward ? 1.0 : -1.0;
        }
      }
      for (int a = 0; a < flux_interior; ++a)
        fm.index[te.num_edge_dofs() + a] = flux_elem_offset + flux_interior * e + a;

      LocalMap& phm = g.phi[e];
      for (int a = 0; a < te.num_concentration(); ++a) {
        phm.index.push_back(te.num_concentration() * e + a);
        phm.sign.push_back(1.0);
      }
    }
    return g;
  }
};

/// Gathers a local vector from a global one.
inline Eigen::VectorXd gather(const LocalMap& map, const Eigen::VectorXd& global) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(map.index.size()));
  for (std::size_t i = 0; i < map.index.size(); ++i) v(static_cast<Eigen::Index>(i)) = map.sign[i] * global(map.index[i]);
  return v;
}

}  // namespace vemsad::solver
