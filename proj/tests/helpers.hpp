#pragma once

#include <chrono>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "robim/robim.hpp"

namespace helpers {

using namespace robim;

inline std::string assets(const std::string& rel) { return std::string(ASSETS_DIR) + "/" + rel; }
inline std::string scenario(const std::string& rel) {
  return assets("scenarios/two_bedroom/" + rel);
}

struct ScenarioRun {
  Project project;
  KnowledgeBase kb;
  std::vector<RobotDescriptor> fleet;
  SimWorld world;
  SimParams params;
  std::vector<ActionPlan> plans;
  SimOutcome outcome;
  double wall_seconds = 0.0;
};

// Runs project -> world -> plans -> simulation, mirroring the CLI pipeline.
inline ScenarioRun run_scenario(const std::string& project_file, const std::string& agents_file,
                                const std::string& params_file, double dt_override = -1.0) {
  auto t0 = std::chrono::steady_clock::now();
  auto run = std::make_unique<ScenarioRun>();
  ScenarioRun& s = *run;
  s.project = load_project(scenario(project_file));
  s.kb = load_kb({assets("kb/default_kb.json")});
  s.fleet = load_fleet(assets("fleet/husky_ur5.json"));
  s.world = build_sim_world(s.project, s.kb, GridParams{});
  s.world.project = &s.project;
  s.params = SimParams::load(scenario(params_file));
  if (dt_override > 0.0) s.params.dt = dt_override;

  std::vector<AgentScript> agents;
  if (!agents_file.empty()) agents = load_agents(scenario(agents_file));
  for (const ScheduleTask& task : s.project.tasks) {
    if (!task.robotization) continue;
    const auto& spec = lookup_spec(s.kb, *task.task_spec_id);
    const auto resolved = resolve_skills(s.kb, spec);
    const auto matched = match_robots(s.fleet, resolved.required_capabilities, s.project.site_params);
    REQUIRE(!matched.empty());
    auto plans = compile_plan(task, spec, s.world, matched.front(), s.kb, s.params);
    s.plans.insert(s.plans.end(), plans.begin(), plans.end());
  }
  s.outcome = robim::run(s.world, s.fleet.front(), s.plans, agents, s.params);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ScenarioRun out = std::move(*run);
  out.world.project = &out.project;  // keep the pointer valid after the move
  return out;
}

// --- simulation invariant checks (shared by unit and acceptance tests) ---

// Carried pose must equal robot pose composed with the arm transform at every
// tick (logical rigid attachment).
inline bool check_attach_rigidity(const Trace& trace, const RobotDescriptor& robot) {
  for (const TraceTick& tick : trace.ticks) {
    if (!tick.carried) continue;
    const ArmPose& arm = pose_lookup(robot, tick.arm_pose);
    const Pose expect =
        Simulation::carried_pose(tick.robot, arm, tick.carried->orientation);
    const Pose& got = tick.carried->object_pose;
    if (std::abs(expect.x - got.x) > 1e-12 || std::abs(expect.y - got.y) > 1e-12 ||
        std::abs(expect.z - got.z) > 1e-12 || std::abs(expect.yaw - got.yaw) > 1e-12 ||
        std::abs(expect.roll - got.roll) > 1e-12)
      return false;
  }
  return true;
}

// Per-tick displacement never exceeds the site/robot speed limit.
inline bool check_speed_compliance(const Trace& trace, double max_speed) {
  for (std::size_t i = 1; i < trace.ticks.size(); ++i) {
    const double dt = trace.ticks[i].t - trace.ticks[i - 1].t;
    const double d = trace.ticks[i].robot.distance_xy(trace.ticks[i - 1].robot);
    if (d > max_speed * dt + 1e-9) return false;
  }
  return true;
}

// The robot center keeps clear of static obstacles. The margin is one cell
// below the planning inflation because the robot interpolates between cell
// centers.
inline std::size_t collision_ticks(const Trace& trace, const OccupancyGrid& static_grid,
                                   double inflation_radius) {
  const double radius = inflation_radius - static_grid.resolution;
  std::size_t bad = 0;
  for (const TraceTick& tick : trace.ticks) {
    const int c = static_grid.col_of(tick.robot.x), r = static_grid.row_of(tick.robot.y);
    if (!static_grid.in_bounds(c, r)) continue;
    if (clearance_at(static_grid, c, r, radius + static_grid.resolution) < radius) ++bad;
  }
  return bad;
}

// Every installed element is installed exactly once and never revisited.
inline bool check_install_permanence(const Trace& trace) {
  std::set<std::string> installed;
  for (const TraceEvent& e : trace.events) {
    if (e.kind == "install") {
      if (!installed.insert(e.data.value("element", "")).second) return false;
    }
    if (e.kind == "attach" && installed.count(e.data.value("element", ""))) return false;
  }
  return true;
}

// attach/detach alternate per element and installs equal detaches.
inline bool check_element_conservation(const Trace& trace) {
  std::optional<std::string> held;
  std::size_t detaches = 0;
  for (const TraceEvent& e : trace.events) {
    if (e.kind == "attach") {
      if (held) return false;
      held = e.data.value("element", "");
    } else if (e.kind == "detach") {
      if (!held || *held != e.data.value("element", "")) return false;
      held.reset();
      ++detaches;
    }
  }
  return detaches == trace.count_events("install") && !held;
}

inline bool events_equal(const Trace& a, const Trace& b) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.t != y.t || x.kind != y.kind || x.plan_id != y.plan_id || x.action != y.action ||
        x.data != y.data)
      return false;
  }
  return true;
}

// --- independent Dijkstra oracle for the path planner ---

struct OracleResult {
  bool reachable = false;
  PathCost cost;
};

// Plain Dijkstra over the same move set and exact (straight, diagonal) step
// counts; deliberately has no heuristic and no tie-breaking cleverness.
inline OracleResult dijkstra_oracle(const OccupancyGrid& grid, int sc, int sr, int gc, int gr,
                                    double inflation_radius) {
  const auto blocked = inflate_grid(grid, inflation_radius);
  auto idx = [&](int c, int r) { return static_cast<std::size_t>(r) * grid.width + c; };
  if (blocked[idx(sc, sr)] || blocked[idx(gc, gr)]) return {};

  const std::size_t n = grid.cells.size();
  std::vector<PathCost> dist(n);
  std::vector<std::uint8_t> done(n, 0), seen(n, 0);
  auto val = [](const PathCost& c) {
    return static_cast<long double>(c.straight) + static_cast<long double>(c.diagonal) * kSqrt2L;
  };
  using QE = std::pair<long double, std::size_t>;
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> open;
  dist[idx(sc, sr)] = {};
  seen[idx(sc, sr)] = 1;
  open.push({0.0L, idx(sc, sr)});
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (done[i]) continue;
    done[i] = 1;
    const int c = static_cast<int>(i) % grid.width;
    const int r = static_cast<int>(i) / grid.width;
    if (c == gc && r == gr) return {true, dist[i]};
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dc == 0 && dr == 0) continue;
        const int cc = c + dc, rr = r + dr;
        if (!grid.in_bounds(cc, rr) || blocked[idx(cc, rr)]) continue;
        if (dc != 0 && dr != 0 && (blocked[idx(c, rr)] || blocked[idx(cc, r)])) continue;
        PathCost nd = dist[i];
        (dc != 0 && dr != 0) ? ++nd.diagonal : ++nd.straight;
        const std::size_t j = idx(cc, rr);
        if (!seen[j] || val(nd) < val(dist[j])) {
          dist[j] = nd;
          seen[j] = 1;
          open.push({val(nd), j});
        }
      }
    }
  }
  return {};
}

inline OccupancyGrid random_grid(std::mt19937& rng, int max_side = 50, double max_density = 0.4) {
  std::uniform_int_distribution<int> side(4, max_side);
  std::uniform_real_distribution<double> dens(0.0, max_density);
  OccupancyGrid g;
  g.resolution = 0.05;
  g.width = side(rng);
  g.height = side(rng);
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, Cell::free);
  const double p = dens(rng);
  std::bernoulli_distribution occ(p);
  for (Cell& c : g.cells)
    if (occ(rng)) c = Cell::occupied;
  return g;
}

}  // namespace helpers
