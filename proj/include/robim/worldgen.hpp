#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "robim/detail/io.hpp"
#include "robim/detail/sha256.hpp"
#include "robim/grid.hpp"
#include "robim/kb.hpp"
#include "robim/model.hpp"

namespace robim {

// Schedule-driven element partition (flow A6 input sorting). The three sets
// are disjoint and cover the whole project.
struct WorldPartition {
  std::vector<const Element*> preexisting;   // finished before simulation start
  std::vector<const Element*> scheduled;     // to be installed during the run
  std::vector<const Element*> site_objects;  // storages, zones, other site objects
};

inline WorldPartition partition_elements(const Project& project) {
  WorldPartition part;
  for (const Element& e : project.elements) {
    if (e.category == ElementCategory::site_object || e.category == ElementCategory::storage ||
        e.category == ElementCategory::zone_marker) {
      part.site_objects.push_back(&e);
      continue;
    }
    const ScheduleTask* task = e.linked_task_id ? project.find_task(*e.linked_task_id) : nullptr;
    if (task && !(task->finish_date < project.simulation_start_date)) {
      part.scheduled.push_back(&e);
    } else {
      part.preexisting.push_back(&e);
    }
  }
  return part;
}

struct SimWorld {
  const Project* project = nullptr;
  WorldPartition partition;
  OccupancyGrid grid;
  std::map<std::string, Pose> named_poses;     // element name -> placement (site objects)
  std::map<std::string, Pose> install_targets; // scheduled element id -> target placement
  double z_band_min = 0.1;
  double z_band_max = 1.8;

  const Element* find_world_object(ElementCategory category, const std::string& tag) const {
    for (const Element* e : partition.site_objects)
      if (e->category == category && e->name == tag) return e;
    for (const Element* e : partition.preexisting)
      if (e->category == category && e->name == tag) return e;
    return nullptr;
  }
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::string sdf_pose(const Pose& p) {
  return fmt_num(p.x) + " " + fmt_num(p.y) + " " + fmt_num(p.z) + " " + fmt_num(p.roll) + " " +
         fmt_num(p.pitch) + " " + fmt_num(p.yaw);
}

inline std::string sdf_geometry(const Element& e, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out = pad + "<geometry>\n";
  if (e.is_box()) {
    const Vec3& x = e.box().extents;
    out += pad + "  <box><size>" + fmt_num(x.x) + " " + fmt_num(x.y) + " " + fmt_num(x.z) +
           "</size></box>\n";
  } else {
    out += pad + "  <mesh><uri>" + e.mesh_ref().file + "</uri></mesh>\n";
  }
  out += pad + "</geometry>\n";
  return out;
}

inline std::string sdf_model(const Element& e, bool with_pose) {
  if (!e.is_box() && e.mesh_ref().mesh.triangles.empty())
    fail(ErrorKind::invariant, "element '" + e.id + "' has zero triangles");
  std::string out;
  out += "  <model name=\"" + e.id + "\">\n";
  out += "    <static>true</static>\n";
  if (with_pose) out += "    <pose>" + sdf_pose(e.placement) + "</pose>\n";
  out += "    <link name=\"link\">\n";
  out += "      <collision name=\"collision\">\n" + sdf_geometry(e, 8) + "      </collision>\n";
  out += "      <visual name=\"visual\">\n" + sdf_geometry(e, 8) + "      </visual>\n";
  out += "    </link>\n";
  out += "  </model>\n";
  return out;
}

}  // namespace detail

struct EmittedFile {
  std::string name;  // relative to the output directory
  std::string sha256;
};

struct WorldFileManifest {
  std::vector<EmittedFile> files;

  const EmittedFile* find(const std::string& name) const {
    for (const auto& f : files)
      if (f.name == name) return &f;
    return nullptr;
  }
};

// Emits world.sdf (preexisting + site objects) and one standalone model file
// per scheduled element, e.g. frame_1.sdf. Output bytes are deterministic.
inline WorldFileManifest emit_sdf(const SimWorld& world, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  WorldFileManifest manifest;
  auto emit = [&](const std::string& name, const std::string& content) {
    detail::write_file(out_dir / name, content);
    manifest.files.push_back({name, detail::Sha256::hex(content)});
  };

  std::string w;
  w += "<?xml version=\"1.0\"?>\n";
  w += "<sdf version=\"1.6\">\n";
  w += "<world name=\"construction_site\">\n";
  for (const Element* e : world.partition.preexisting) w += detail::sdf_model(*e, true);
  for (const Element* e : world.partition.site_objects) w += detail::sdf_model(*e, true);
  w += "</world>\n";
  w += "</sdf>\n";
  emit("world.sdf", w);

  for (const Element* e : world.partition.scheduled) {
    std::string m;
    m += "<?xml version=\"1.0\"?>\n";
    m += "<sdf version=\"1.6\">\n";
    m += detail::sdf_model(*e, false);
    m += "</sdf>\n";
    emit(e->id + ".sdf", m);
  }
  return manifest;
}

struct GridParams {
  double z_band_min = 0.1;   // navigable robot height band
  double z_band_max = 1.8;
  double resolution = 0.05;  // meters per cell
  double margin = 1.0;       // free border around all footprints
};

// Rasterizes the static world (preexisting + site objects) into an occupancy
// grid. Scheduled elements do not mark the map but do extend its bounds so
// installed frames later fit inside.
inline OccupancyGrid build_occupancy_grid(const Project& project, const WorldPartition& part,
                                          const GridParams& params,
                                          std::vector<std::string>* warnings = nullptr) {
  if (!(params.resolution > 0.0)) fail(ErrorKind::invariant, "resolution must be positive");

  std::vector<Polygon> static_footprints;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  auto extend = [&](const Polygon& poly) {
    for (const Vec2& v : poly) {
      if (!any) {
        xmin = xmax = v.x;
        ymin = ymax = v.y;
        any = true;
      } else {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
      }
    }
  };

  for (const auto* group : {&part.preexisting, &part.site_objects}) {
    for (const Element* e : *group) {
      Polygon fp = element_footprint(*e, params.z_band_min, params.z_band_max);
      if (fp.size() < 3) continue;
      extend(fp);
      static_footprints.push_back(std::move(fp));
    }
  }
  for (const Element* e : part.scheduled) {
    Polygon fp = element_footprint(*e, params.z_band_min, params.z_band_max);
    if (fp.size() >= 3) extend(fp);  // bounds only
  }

  OccupancyGrid grid;
  grid.resolution = params.resolution;
  if (!any) {
    if (warnings) warnings->push_back("world has no geometry in the z band; emitting 1x1 free grid");
    grid.width = 1;
    grid.height = 1;
    grid.cells.assign(1, Cell::free);
    return grid;
  }

  xmin -= params.margin;
  ymin -= params.margin;
  xmax += params.margin;
  ymax += params.margin;
  grid.origin = Pose::xyz_yaw(xmin, ymin, 0.0, 0.0);
  grid.width = static_cast<int>(std::ceil((xmax - xmin) / params.resolution));
  grid.height = static_cast<int>(std::ceil((ymax - ymin) / params.resolution));
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, Cell::free);

  for (const Polygon& fp : static_footprints) {
    double fxmin = fp[0].x, fxmax = fp[0].x, fymin = fp[0].y, fymax = fp[0].y;
    for (const Vec2& v : fp) {
      fxmin = std::min(fxmin, v.x);
      fxmax = std::max(fxmax, v.x);
      fymin = std::min(fymin, v.y);
      fymax = std::max(fymax, v.y);
    }
    const int c0 = std::max(0, grid.col_of(fxmin));
    const int c1 = std::min(grid.width - 1, grid.col_of(fxmax));
    const int r0 = std::max(0, grid.row_of(fymin));
    const int r1 = std::min(grid.height - 1, grid.row_of(fymax));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (grid.at(c, r) == Cell::occupied) continue;
        Rect cell{grid.origin.x + c * grid.resolution, grid.origin.y + r * grid.resolution,
                  grid.origin.x + (c + 1) * grid.resolution,
                  grid.origin.y + (r + 1) * grid.resolution};
        if (convex_rect_overlap(fp, cell)) grid.at(c, r) = Cell::occupied;
      }
    }
  }
  grid.validate();
  return grid;
}

// Marks an element's footprint occupied in an existing grid (used when an
// installed frame becomes an obstacle for subsequent navigation).
inline void stamp_element(OccupancyGrid& grid, const Element& element, const Pose& placement,
                          double z_min, double z_max) {
  Element placed = element;
  placed.placement = placement;
  Polygon fp = element_footprint(placed, z_min, z_max);
  if (fp.size() < 3) return;
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (grid.at(c, r) == Cell::occupied) continue;
      Rect cell{grid.origin.x + c * grid.resolution, grid.origin.y + r * grid.resolution,
                grid.origin.x + (c + 1) * grid.resolution,
                grid.origin.y + (r + 1) * grid.resolution};
      if (convex_rect_overlap(fp, cell)) grid.at(c, r) = Cell::occupied;
    }
  }
}

// Assembles the simulation world: partition, grid, named poses, and install
// targets, and checks that every world object referenced by an active task
// specification resolves.
inline SimWorld build_sim_world(const Project& project, const KnowledgeBase& kb,
                                const GridParams& params,
                                std::vector<std::string>* warnings = nullptr) {
  SimWorld world;
  world.project = &project;
  world.partition = partition_elements(project);
  world.grid = build_occupancy_grid(project, world.partition, params, warnings);
  world.z_band_min = params.z_band_min;
  world.z_band_max = params.z_band_max;
  for (const Element* e : world.partition.site_objects)
    world.named_poses[e->name] = e->placement;
  for (const Element* e : world.partition.scheduled)
    world.install_targets[e->id] = e->placement;

  for (const ScheduleTask& task : project.tasks) {
    if (!task.robotization) continue;
    const TaskSpecification& spec = lookup_spec(kb, *task.task_spec_id);
    for (const ActionDef& action : spec.actions) {
      for (const auto& [arg, binding] : action.input_bindings) {
        if (binding.source != BindingExpr::Source::world_object_pose) continue;
        if (!world.find_world_object(binding.category, binding.tag))
          fail(ErrorKind::reference, "world object " + binding.describe() +
                                         " required by '" + action.action_name +
                                         "' is missing from the simulation world");
      }
    }
  }
  return world;
}

// --- PGM metric map (map-server byte convention) ---

inline constexpr unsigned char kPgmFree = 254;
inline constexpr unsigned char kPgmOccupied = 0;
inline constexpr unsigned char kPgmUnknown = 205;

inline WorldFileManifest write_map_pgm(const OccupancyGrid& grid,
                                       const std::filesystem::path& out_path) {
  grid.validate();
  std::string pgm = "P5\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) +
                    "\n255\n";
  // PGM rows run top-down; grid rows run bottom-up (south to north).
  for (int r = grid.height - 1; r >= 0; --r) {
    for (int c = 0; c < grid.width; ++c) {
      unsigned char b = kPgmFree;
      if (grid.at(c, r) == Cell::occupied) b = kPgmOccupied;
      else if (grid.at(c, r) == Cell::unknown) b = kPgmUnknown;
      pgm += static_cast<char>(b);
    }
  }
  detail::write_file(out_path, pgm);

  Json meta;
  meta["image"] = out_path.filename().string();
  meta["resolution"] = grid.resolution;
  meta["origin"] = Json::array({grid.origin.x, grid.origin.y, grid.origin.yaw});
  meta["negate"] = 0;
  meta["occupied_thresh"] = 0.65;
  meta["free_thresh"] = 0.196;
  const auto meta_path = std::filesystem::path(out_path).replace_extension(".json");
  const std::string meta_text = meta.dump(2) + "\n";
  detail::write_file(meta_path, meta_text);

  WorldFileManifest manifest;
  manifest.files.push_back({out_path.filename().string(), detail::Sha256::hex(pgm)});
  manifest.files.push_back({meta_path.filename().string(), detail::Sha256::hex(meta_text)});
  return manifest;
}

inline OccupancyGrid read_map_pgm(const std::filesystem::path& pgm_path) {
  const std::string data = detail::read_file(pgm_path);
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  if (token() != "P5") fail(ErrorKind::parse, pgm_path.string() + ": not a binary PGM");
  OccupancyGrid grid;
  grid.width = std::stoi(token());
  grid.height = std::stoi(token());
  const int maxval = std::stoi(token());
  if (maxval != 255) fail(ErrorKind::parse, pgm_path.string() + ": expected maxval 255");
  ++pos;  // single whitespace after maxval
  if (data.size() - pos != static_cast<std::size_t>(grid.width) * grid.height)
    fail(ErrorKind::parse, pgm_path.string() + ": raster size mismatch");

  const Json meta =
      detail::parse_json_file(std::filesystem::path(pgm_path).replace_extension(".json"));
  grid.resolution = meta["resolution"];
  grid.origin = Pose::xyz_yaw(meta["origin"][0], meta["origin"][1], 0.0, meta["origin"][2]);

  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, Cell::free);
  for (int pr = 0; pr < grid.height; ++pr) {
    const int r = grid.height - 1 - pr;
    for (int c = 0; c < grid.width; ++c) {
      const auto b = static_cast<unsigned char>(data[pos + static_cast<std::size_t>(pr) * grid.width + c]);
      Cell cell = Cell::free;
      if (b == kPgmOccupied) cell = Cell::occupied;
      else if (b == kPgmUnknown) cell = Cell::unknown;
      grid.at(c, r) = cell;
    }
  }
  grid.validate();
  return grid;
}

}  // namespace robim
