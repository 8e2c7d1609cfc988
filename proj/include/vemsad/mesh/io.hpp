#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vemsad/mesh/polygonal_mesh.hpp"

namespace vemsad::mesh {

inline nlohmann::json to_json(const PolygonalMesh& m) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : m.vertices()) j["vertices"].push_back({v.x(), v.y()});
  j["elements"] = nlohmann::json::array();
  for (const auto& e : m.elements()) j["elements"].push_back(e.vertices);
  j["boundary"] = nlohmann::json::array();
  for (const auto& t : m.boundary_tags())
    j["boundary"].push_back({{"edge", {t.vertices[0], t.vertices[1]}}, {"tag", std::string(to_string(t.tag))}});
  return j;
}

inline PolygonalMesh from_json(const nlohmann::json& j) {
  try {
    std::vector<Point> verts;
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2) throw Error(ErrorCategory::Mesh, "vertex entries must be [x, y]");
      verts.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    std::vector<std::vector<int>> elements;
    for (const auto& e : j.at("elements")) elements.push_back(e.get<std::vector<int>>());
    std::vector<TaggedEdge> tags;
    if (j.contains("boundary"))
      for (const auto& b : j.at("boundary")) {
        auto ed = b.at("edge").get<std::vector<int>>();
        if (ed.size() != 2) throw Error(ErrorCategory::Mesh, "boundary edge must list two vertices");
        tags.push_back({{ed[0], ed[1]}, parse_tag(b.at("tag").get<std::string>())});
      }
    return PolygonalMesh::build(std::move(verts), std::move(elements), tags);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCategory::Mesh, std::string("malformed mesh file: ") + ex.what());
  }
}

inline void save_mesh(const PolygonalMesh& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::Io, "cannot write " + path.string());
  out << to_json(m).dump(1) << '\n';
  if (!out) throw Error(ErrorCategory::Io, "write failed for " + path.string());
}

inline PolygonalMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCategory::Mesh, "malformed mesh file " + path.string() + ": " + ex.what());
  }
  return from_json(j);
}

}  // namespace vemsad::mesh
