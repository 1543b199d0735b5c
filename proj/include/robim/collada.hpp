#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "robim/detail/io.hpp"
#include "robim/detail/xml.hpp"
#include "robim/error.hpp"
#include "robim/pose.hpp"

namespace robim {

struct Mesh {
  std::vector<Vec3> vertices;           // meters
  std::vector<std::array<int, 3>> triangles;  // vertex index triples

  void validate() const {
    if (triangles.empty()) fail(ErrorKind::invariant, "mesh has no triangles");
    const int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles) {
      for (int idx : t) {
        if (idx < 0 || idx >= n)
          fail(ErrorKind::invariant, "mesh triangle index out of range");
      }
    }
    for (const Vec3& v : vertices) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
        fail(ErrorKind::invariant, "mesh vertex is not finite");
    }
  }
};

namespace detail {

inline std::vector<double> parse_floats(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

inline std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::istringstream ss(text);
  int v;
  while (ss >> v) out.push_back(v);
  return out;
}

// 4x4 row-major transform applied to homogeneous points.
struct Mat4 {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

  Vec3 apply(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z + m[3],
            m[4] * v.x + m[5] * v.y + m[6] * v.z + m[7],
            m[8] * v.x + m[9] * v.y + m[10] * v.z + m[11]};
  }
};

}  // namespace detail

// Parses the COLLADA subset used by per-element geometry exports: a single
// triangle geometry, an asset unit scale, and an optional visual-scene node
// matrix. Polylist and other primitive types are rejected.
inline Mesh parse_collada_mesh(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr) {
  const std::string src = detail::read_file(path);
  auto root = detail::parse_xml(src);
  if (root->name != "COLLADA")
    fail(ErrorKind::parse, path.string() + ": root element is not COLLADA");

  double unit_scale = 1.0;
  const detail::XmlNode* asset = root->first("asset");
  const detail::XmlNode* unit = asset ? asset->first("unit") : nullptr;
  if (unit) {
    unit_scale = std::stod(unit->attr("meter", "1.0"));
  } else if (warnings) {
    warnings->push_back(path.string() + ": no <unit> declaration, assuming meters");
  }

  const detail::XmlNode* lib = root->first("library_geometries");
  if (!lib) fail(ErrorKind::parse, path.string() + ": missing library_geometries");
  auto geoms = lib->all("geometry");
  if (geoms.size() != 1)
    fail(ErrorKind::parse, path.string() + ": expected exactly one geometry, found " +
                               std::to_string(geoms.size()));
  const detail::XmlNode* mesh_node = geoms[0]->first("mesh");
  if (!mesh_node) fail(ErrorKind::parse, path.string() + ": geometry has no mesh");

  for (const char* bad : {"polylist", "polygons", "lines", "tristrips", "trifans"}) {
    if (mesh_node->first(bad))
      fail(ErrorKind::parse,
           path.string() + ": unsupported primitive type <" + bad + ">");
  }
  const detail::XmlNode* tris = mesh_node->first("triangles");
  if (!tris) fail(ErrorKind::parse, path.string() + ": mesh has no <triangles>");

  // Resolve the VERTEX input through <vertices> to the positions source.
  const detail::XmlNode* vertices_node = mesh_node->first("vertices");
  std::string positions_id;
  if (vertices_node) {
    for (const auto* input : vertices_node->all("input")) {
      if (input->attr("semantic") == "POSITION")
        positions_id = input->attr("source");
    }
  }
  int vertex_offset = 0;
  int stride = 1;
  for (const auto* input : tris->all("input")) {
    const int off = std::stoi(input->attr("offset", "0"));
    stride = std::max(stride, off + 1);
    if (input->attr("semantic") == "VERTEX") vertex_offset = off;
  }
  if (positions_id.empty())
    fail(ErrorKind::parse, path.string() + ": no POSITION source");
  if (!positions_id.empty() && positions_id[0] == '#') positions_id.erase(0, 1);

  std::vector<double> coords;
  for (const auto* source : mesh_node->all("source")) {
    if (source->attr("id") == positions_id) {
      const detail::XmlNode* arr = source->first("float_array");
      if (!arr) fail(ErrorKind::parse, path.string() + ": position source has no float_array");
      coords = detail::parse_floats(arr->text);
    }
  }
  if (coords.empty() || coords.size() % 3 != 0)
    fail(ErrorKind::parse, path.string() + ": bad position float_array");

  // Optional per-element node transform from the visual scene.
  detail::Mat4 xf;
  if (const auto* scenes = root->first("library_visual_scenes")) {
    if (const auto* scene = scenes->first("visual_scene")) {
      if (const auto* node = scene->first("node")) {
        if (const auto* m = node->first("matrix")) {
          auto vals = detail::parse_floats(m->text);
          if (vals.size() != 16)
            fail(ErrorKind::parse, path.string() + ": node matrix needs 16 values");
          std::copy(vals.begin(), vals.end(), xf.m.begin());
        }
      }
    }
  }

  Mesh mesh;
  mesh.vertices.reserve(coords.size() / 3);
  for (std::size_t i = 0; i + 2 < coords.size(); i += 3) {
    Vec3 v = xf.apply({coords[i], coords[i + 1], coords[i + 2]});
    mesh.vertices.push_back(v * unit_scale);
  }

  const auto* p = tris->first("p");
  if (!p) fail(ErrorKind::parse, path.string() + ": <triangles> has no <p>");
  auto idx = detail::parse_ints(p->text);
  if (idx.size() % (3 * stride) != 0)
    fail(ErrorKind::parse, path.string() + ": index list not a multiple of triangle stride");
  for (std::size_t i = 0; i + 3 * stride <= idx.size(); i += 3 * stride) {
    mesh.triangles.push_back({idx[i + vertex_offset], idx[i + stride + vertex_offset],
                              idx[i + 2 * stride + vertex_offset]});
  }
  mesh.validate();
  return mesh;
}

}  // namespace robim
