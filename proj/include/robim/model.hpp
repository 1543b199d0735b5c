#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "robim/collada.hpp"
#include "robim/date.hpp"
#include "robim/detail/io.hpp"
#include "robim/geometry.hpp"
#include "robim/pose.hpp"
#include "robim/site_params.hpp"

namespace robim {

using Json = nlohmann::ordered_json;

enum class ElementCategory { building, site_object, storage, zone_marker };

inline std::string to_string(ElementCategory c) {
  switch (c) {
    case ElementCategory::building: return "building";
    case ElementCategory::site_object: return "site_object";
    case ElementCategory::storage: return "storage";
    case ElementCategory::zone_marker: return "zone_marker";
  }
  return "?";
}

inline ElementCategory element_category_from(const std::string& s) {
  if (s == "building") return ElementCategory::building;
  if (s == "site_object") return ElementCategory::site_object;
  if (s == "storage") return ElementCategory::storage;
  if (s == "zone_marker") return ElementCategory::zone_marker;
  fail(ErrorKind::parse, "unknown element category '" + s + "'");
}

// Axis-aligned box in the element-local frame, centered at the origin.
struct BoxGeometry {
  Vec3 extents;  // full side lengths, meters
};

struct MeshGeometry {
  std::string file;  // path relative to the manifest
  Mesh mesh;         // parsed at load
};

struct Element {
  std::string id;
  std::string name;
  std::variant<BoxGeometry, MeshGeometry> geometry;
  Pose placement;  // world frame
  ElementCategory category = ElementCategory::building;
  std::map<std::string, Vec3> local_points;  // e.g. "pick_point"
  std::optional<std::string> linked_task_id;

  bool is_box() const { return std::holds_alternative<BoxGeometry>(geometry); }
  const BoxGeometry& box() const { return std::get<BoxGeometry>(geometry); }
  const MeshGeometry& mesh_ref() const { return std::get<MeshGeometry>(geometry); }
};

struct ScheduleTask {
  std::string id;
  std::string name;
  Date start_date;
  Date finish_date;
  bool robotization = false;
  std::optional<std::string> task_spec_id;
  std::vector<std::string> element_ids;
};

struct Project {
  std::vector<Element> elements;
  std::vector<ScheduleTask> tasks;
  SiteParams site_params;
  Date simulation_start_date;

  const Element* find_element(const std::string& id) const {
    for (const Element& e : elements)
      if (e.id == id) return &e;
    return nullptr;
  }

  const ScheduleTask* find_task(const std::string& id) const {
    for (const ScheduleTask& t : tasks)
      if (t.id == id) return &t;
    return nullptr;
  }

  void validate() const {
    std::set<std::string> element_ids, task_ids;
    for (const Element& e : elements) {
      if (!element_ids.insert(e.id).second)
        fail(ErrorKind::invariant, "duplicate element id '" + e.id + "'");
      e.placement.validate();
      if (e.is_box()) {
        const Vec3& ext = e.box().extents;
        if (!(ext.x > 0 && ext.y > 0 && ext.z > 0))
          fail(ErrorKind::invariant, "element '" + e.id + "' has non-positive box extents");
      }
    }
    for (const ScheduleTask& t : tasks) {
      if (!task_ids.insert(t.id).second)
        fail(ErrorKind::invariant, "duplicate task id '" + t.id + "'");
      if (t.finish_date < t.start_date)
        fail(ErrorKind::invariant, "task '" + t.id + "' finishes before it starts");
      if (t.robotization && !t.task_spec_id)
        fail(ErrorKind::invariant,
             "robotized task '" + t.id + "' has no task specification id");
      for (const std::string& eid : t.element_ids) {
        if (!element_ids.count(eid))
          fail(ErrorKind::reference,
               "task '" + t.id + "' references unknown element '" + eid + "'");
      }
    }
    for (const Element& e : elements) {
      if (e.linked_task_id && !task_ids.count(*e.linked_task_id))
        fail(ErrorKind::reference,
             "element '" + e.id + "' references unknown task '" + *e.linked_task_id + "'");
    }
    site_params.validate();
  }
};

namespace detail {

inline Pose pose_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 6)
    fail(ErrorKind::parse, "pose must be a 6-element array [x,y,z,roll,pitch,yaw]");
  Pose p;
  p.x = j[0];
  p.y = j[1];
  p.z = j[2];
  p.roll = j[3];
  p.pitch = j[4];
  p.yaw = j[5];
  return p.normalized();
}

inline Json pose_to_json(const Pose& p) {
  return Json::array({p.x, p.y, p.z, p.roll, p.pitch, p.yaw});
}

inline Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3)
    fail(ErrorKind::parse, "point must be a 3-element array");
  return {j[0], j[1], j[2]};
}

inline Json parse_json_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(ErrorKind::io, "file not found: " + path.string());
  const std::string text = read_file(path);
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::parse, "malformed JSON in " + path.string());
  return j;
}

}  // namespace detail

inline SiteParams site_params_from_json(const Json& j) {
  SiteParams p;
  if (j.contains("allowable_robot_footprint_radius_max"))
    p.allowable_robot_footprint_radius_max = j["allowable_robot_footprint_radius_max"];
  if (j.contains("allowable_robot_weight_max"))
    p.allowable_robot_weight_max = j["allowable_robot_weight_max"];
  if (j.contains("nav_speed_min")) p.nav_speed_min = j["nav_speed_min"];
  if (j.contains("nav_speed_max")) p.nav_speed_max = j["nav_speed_max"];
  if (j.contains("prohibited_zones"))
    p.prohibited_zones = j["prohibited_zones"].get<std::vector<std::string>>();
  if (j.contains("zone_speed_caps")) {
    for (const auto& [k, v] : j["zone_speed_caps"].items()) p.zone_speed_caps[k] = v;
  }
  return p;
}

inline Json site_params_to_json(const SiteParams& p) {
  Json j;
  j["allowable_robot_footprint_radius_max"] = p.allowable_robot_footprint_radius_max;
  j["allowable_robot_weight_max"] = p.allowable_robot_weight_max;
  j["nav_speed_min"] = p.nav_speed_min;
  j["nav_speed_max"] = p.nav_speed_max;
  j["prohibited_zones"] = p.prohibited_zones;
  j["zone_speed_caps"] = p.zone_speed_caps;
  return j;
}

// Loads a project manifest and all referenced geometry files. Mesh paths are
// resolved relative to the manifest location.
inline Project load_project(const std::filesystem::path& manifest_path,
                            std::vector<std::string>* warnings = nullptr) {
  const Json j = detail::parse_json_file(manifest_path);
  const auto base_dir = manifest_path.parent_path();

  Project project;
  if (!j.contains("simulation_start_date"))
    fail(ErrorKind::parse, manifest_path.string() + ": missing simulation_start_date");
  project.simulation_start_date = Date::parse(j["simulation_start_date"]);
  if (j.contains("site_params"))
    project.site_params = site_params_from_json(j["site_params"]);

  for (const Json& ej : j.value("elements", Json::array())) {
    Element e;
    if (!ej.contains("id")) fail(ErrorKind::parse, "element without id");
    e.id = ej["id"];
    e.name = ej.value("name", e.id);
    e.placement = detail::pose_from_json(ej.value("pose", Json::array({0, 0, 0, 0, 0, 0})));
    e.category = element_category_from(ej.value("category", "building"));
    if (ej.contains("box")) {
      e.geometry = BoxGeometry{detail::vec3_from_json(ej["box"])};
    } else if (ej.contains("mesh")) {
      MeshGeometry g;
      g.file = ej["mesh"];
      const auto mesh_path = base_dir / g.file;
      if (!std::filesystem::exists(mesh_path))
        fail(ErrorKind::reference,
             "element '" + e.id + "' references missing mesh file " + mesh_path.string());
      g.mesh = parse_collada_mesh(mesh_path, warnings);
      e.geometry = std::move(g);
    } else {
      fail(ErrorKind::parse, "element '" + e.id + "' has neither box nor mesh geometry");
    }
    if (ej.contains("local_points")) {
      for (const auto& [name, pt] : ej["local_points"].items())
        e.local_points[name] = detail::vec3_from_json(pt);
    }
    if (ej.contains("linked_task_id")) e.linked_task_id = ej["linked_task_id"];
    project.elements.push_back(std::move(e));
  }

  for (const Json& tj : j.value("tasks", Json::array())) {
    ScheduleTask t;
    if (!tj.contains("id")) fail(ErrorKind::parse, "task without id");
    t.id = tj["id"];
    t.name = tj.value("name", t.id);
    t.start_date = Date::parse(tj.value("start_date", ""));
    t.finish_date = Date::parse(tj.value("finish_date", ""));
    t.robotization = tj.value("robotization", false);
    if (tj.contains("task_spec_id")) t.task_spec_id = tj["task_spec_id"];
    t.element_ids = tj.value("element_ids", std::vector<std::string>{});
    project.tasks.push_back(std::move(t));
  }

  project.validate();
  return project;
}

inline Json project_to_json(const Project& project) {
  Json j;
  j["schema_version"] = 1;
  j["simulation_start_date"] = project.simulation_start_date.str();
  j["site_params"] = site_params_to_json(project.site_params);
  j["elements"] = Json::array();
  for (const Element& e : project.elements) {
    Json ej;
    ej["id"] = e.id;
    ej["name"] = e.name;
    ej["category"] = to_string(e.category);
    ej["pose"] = detail::pose_to_json(e.placement);
    if (e.is_box()) {
      const Vec3& x = e.box().extents;
      ej["box"] = Json::array({x.x, x.y, x.z});
    } else {
      ej["mesh"] = e.mesh_ref().file;
    }
    if (!e.local_points.empty()) {
      Json pts;
      for (const auto& [name, p] : e.local_points)
        pts[name] = Json::array({p.x, p.y, p.z});
      ej["local_points"] = pts;
    }
    if (e.linked_task_id) ej["linked_task_id"] = *e.linked_task_id;
    j["elements"].push_back(std::move(ej));
  }
  j["tasks"] = Json::array();
  for (const ScheduleTask& t : project.tasks) {
    Json tj;
    tj["id"] = t.id;
    tj["name"] = t.name;
    tj["start_date"] = t.start_date.str();
    tj["finish_date"] = t.finish_date.str();
    tj["robotization"] = t.robotization;
    if (t.task_spec_id) tj["task_spec_id"] = *t.task_spec_id;
    tj["element_ids"] = t.element_ids;
    j["tasks"].push_back(std::move(tj));
  }
  return j;
}

inline void save_project(const Project& project, const std::filesystem::path& path) {
  detail::write_file(path, project_to_json(project).dump(2) + "\n");
}

namespace detail {

// Collects the portion of world-space segment [p, q] lying inside the z band.
inline void clip_segment_to_band(const Vec3& p, const Vec3& q, double z_min, double z_max,
                                 std::vector<Vec2>& out) {
  auto in_band = [&](const Vec3& v) { return v.z >= z_min && v.z <= z_max; };
  if (in_band(p)) out.push_back({p.x, p.y});
  if (in_band(q)) out.push_back({q.x, q.y});
  const double dz = q.z - p.z;
  if (dz == 0.0) return;
  for (double plane : {z_min, z_max}) {
    const double t = (plane - p.z) / dz;
    if (t > 0.0 && t < 1.0)
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
  }
}

}  // namespace detail

// Convex hull of the XY projection of the element's world-placed geometry
// restricted to [z_min, z_max]. Empty when the geometry misses the band.
inline Polygon element_footprint(const Element& element, double z_min, double z_max) {
  if (z_max < z_min) fail(ErrorKind::invariant, "z band is not well-ordered");
  std::vector<Vec2> pts;
  if (element.is_box()) {
    const Vec3 h = element.box().extents * 0.5;
    Vec3 corners[8];
    int n = 0;
    for (double sx : {-1.0, 1.0})
      for (double sy : {-1.0, 1.0})
        for (double sz : {-1.0, 1.0})
          corners[n++] = element.placement.transform({sx * h.x, sy * h.y, sz * h.z});
    static const int edges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                                     {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
    for (const auto& e : edges)
      detail::clip_segment_to_band(corners[e[0]], corners[e[1]], z_min, z_max, pts);
  } else {
    const Mesh& mesh = element.mesh_ref().mesh;
    std::vector<Vec3> world(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
      world[i] = element.placement.transform(mesh.vertices[i]);
    for (const auto& t : mesh.triangles) {
      for (int k = 0; k < 3; ++k)
        detail::clip_segment_to_band(world[t[k]], world[t[(k + 1) % 3]], z_min, z_max, pts);
    }
  }
  return convex_hull(std::move(pts));
}

}  // namespace robim
