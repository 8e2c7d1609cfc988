#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "vemsad/solver/picard.hpp"

namespace vemsad::bench {

using mesh::Point;

/// Per-element values of the projected fields at the element centroid.
struct ElementFields {
  std::vector<double> displacement_magnitude, pressure, flux_magnitude, concentration;
};

inline ElementFields element_fields(const solver::Discretization& d, const solver::GlobalDoFMap& map,
                                    const solver::CoupledSolution& s) {
  ElementFields f;
  for (std::size_t i = 0; i < d.mesh->num_elements(); ++i) {
    const int e = static_cast<int>(i);
    const auto& ee = d.elastic[e];
    const auto& te = d.transport[e];
    const Point x = ee.geometry().centroid;
    f.displacement_magnitude.push_back(ee.eval_poly(s.projected_displacement(d, map, e), x).norm());
    f.pressure.push_back(ee.pressure_basis().value(solver::gather(map.p[e], s.p), x));
    f.flux_magnitude.push_back(te.eval_poly(s.projected_flux(d, map, e), x).norm());
    f.concentration.push_back(te.basis().value(solver::gather(map.phi[e], s.phi), x));
  }
  return f;
}

/// Legacy ASCII VTK unstructured grid of polygons with four cell scalars.
inline void export_vtk(const solver::Discretization& d, const solver::GlobalDoFMap& map,
                       const solver::CoupledSolution& s, const std::filesystem::path& path,
                       const std::string& title = "vem-sad solution") {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
  const auto& m = *d.mesh;
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(12);
  os << "POINTS " << m.num_vertices() << " double\n";
  for (const auto& v : m.vertices()) os << v.x() << ' ' << v.y() << " 0\n";
  std::size_t total = 0;
  for (const auto& el : m.elements()) total += el.vertices.size() + 1;
  os << "CELLS " << m.num_elements() << ' ' << total << '\n';
  for (const auto& el : m.elements()) {
    os << el.vertices.size();
    for (int v : el.vertices) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << m.num_elements() << '\n';
  for (std::size_t e = 0; e < m.num_elements(); ++e) os << "7\n";
  ElementFields f = element_fields(d, map, s);
  os << "CELL_DATA " << m.num_elements() << '\n';
  auto scalar = [&](const char* name, const std::vector<double>& v) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) os << x << '\n';
  };
  scalar("displacement_magnitude", f.displacement_magnitude);
  scalar("pressure", f.pressure);
  scalar("flux_magnitude", f.flux_magnitude);
  scalar("concentration", f.concentration);
  if (!os) throw Error(ErrorCategory::Io, "write to '" + path.string() + "' failed");
}

/// Writes `content` to `path`, creating parent directories.
inline void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
  os << content;
  if (!os) throw Error(ErrorCategory::Io, "write to '" + path.string() + "' failed");
}

}  // namespace vemsad::bench
