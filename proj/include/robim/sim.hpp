#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "robim/fleet.hpp"
#include "robim/kb.hpp"
#include "robim/planner.hpp"
#include "robim/trace.hpp"
#include "robim/worldgen.hpp"

namespace robim {

// --- scripted worker agents ---

struct AgentWaypoint {
  Pose pose;
  double dwell = 0.0;  // seconds
};

struct AgentScript {
  std::string agent_id;
  std::string role;
  std::vector<AgentWaypoint> waypoints;
  double speed = 1.0;  // m/s
  bool loop = true;

  void validate() const {
    if (!(speed > 0.0)) fail(ErrorKind::invariant, "agent '" + agent_id + "' speed must be positive");
    if (waypoints.empty()) fail(ErrorKind::invariant, "agent '" + agent_id + "' has no waypoints");
  }
};

inline std::vector<AgentScript> load_agents(const std::filesystem::path& path) {
  const Json j = detail::parse_json_file(path);
  std::vector<AgentScript> agents;
  for (const Json& aj : j.value("agents", Json::array())) {
    AgentScript a;
    a.agent_id = aj.value("agent_id", "");
    if (a.agent_id.empty()) fail(ErrorKind::parse, path.string() + ": agent without agent_id");
    a.role = aj.value("role", a.agent_id);
    a.speed = aj.value("speed", 1.0);
    a.loop = aj.value("loop", true);
    for (const Json& wj : aj.value("waypoints", Json::array())) {
      AgentWaypoint w;
      w.pose = detail::pose_from_json(wj.at("pose"));
      w.dwell = wj.value("dwell", 0.0);
      a.waypoints.push_back(w);
    }
    a.validate();
    agents.push_back(std::move(a));
  }
  return agents;
}

// Piecewise-linear open-loop motion: dwell at each waypoint, travel straight
// between them; closed cycle when looping. Pose is an analytic function of t,
// so tick rate only affects sampling.
class AgentTimeline {
 public:
  explicit AgentTimeline(const AgentScript& script) : script_(script) {
    const auto& wp = script.waypoints;
    double t = 0.0;
    for (std::size_t i = 0; i < wp.size(); ++i) {
      if (wp[i].dwell > 0.0) {
        segments_.push_back({t, t + wp[i].dwell, i, i});
        t += wp[i].dwell;
      }
      const bool wraps = i + 1 == wp.size();
      if (wraps && !script.loop) break;
      const std::size_t next = wraps ? 0 : i + 1;
      const double dist = std::hypot(wp[next].pose.x - wp[i].pose.x, wp[next].pose.y - wp[i].pose.y);
      if (dist > 0.0) {
        segments_.push_back({t, t + dist / script.speed, i, next});
        t += dist / script.speed;
      }
    }
    cycle_ = t;
  }

  Pose pose_at(double t) const {
    const auto& wp = script_.waypoints;
    if (segments_.empty()) return wp.front().pose;
    if (script_.loop) {
      t = std::fmod(t, cycle_);
      if (t < 0) t += cycle_;
    } else if (t >= cycle_) {
      return wp.back().pose;
    }
    for (const Segment& s : segments_) {
      if (t <= s.t1 || &s == &segments_.back()) {
        if (s.from == s.to) return wp[s.from].pose;
        const double u = (s.t1 > s.t0) ? std::clamp((t - s.t0) / (s.t1 - s.t0), 0.0, 1.0) : 0.0;
        const Pose& a = wp[s.from].pose;
        const Pose& b = wp[s.to].pose;
        Pose p = Pose::xyz_yaw(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), a.z,
                               std::atan2(b.y - a.y, b.x - a.x));
        return p;
      }
    }
    return wp.back().pose;
  }

 private:
  struct Segment {
    double t0, t1;
    std::size_t from, to;  // waypoint indices; from==to means dwell
  };
  AgentScript script_;
  std::vector<Segment> segments_;
  double cycle_ = 0.0;
};

// --- action plans (flows B1/B2) ---

enum class SkillKind { navigate, grasp, release };

struct BoundAction {
  std::string action_name;
  std::string skill_id;
  SkillKind kind = SkillKind::navigate;
  Json bound_inputs = Json::object();  // arg name -> concrete value
  std::optional<Pose> destination;     // navigate
  std::optional<Vec3> pick_point;      // grasp (element-local)
  std::optional<Pose> target_pose;     // release (install pose)
  std::optional<std::string> target_element_id;
};

struct ActionPlan {
  std::string task_id;
  std::string robot_id;
  std::string element_id;  // target element, doubles as the plan id
  std::vector<BoundAction> steps;
};

struct SimParams {
  double dt = 0.1;                  // seconds
  double inflation_radius = 0.3;    // planning radius of the unloaded robot
  double standoff = 0.2;            // extra gap between robot edge and install face
  double reorient_duration = 8.0;   // seconds per carry-orientation change
  double dispatch_latency = 0.5;    // seconds between consecutive actions
  double idle_duration = 10.0;      // run length when there are no plans
  double worker_near_radius = 1.0;  // tick flag radius for workers near the robot
  bool abort_on_failure = false;
  Pose robot_start;

  static SimParams from_json(const Json& j) {
    SimParams p;
    p.dt = j.value("dt", p.dt);
    p.inflation_radius = j.value("inflation_radius", p.inflation_radius);
    p.standoff = j.value("standoff", p.standoff);
    p.reorient_duration = j.value("reorient_duration", p.reorient_duration);
    p.dispatch_latency = j.value("dispatch_latency", p.dispatch_latency);
    p.idle_duration = j.value("idle_duration", p.idle_duration);
    p.worker_near_radius = j.value("worker_near_radius", p.worker_near_radius);
    p.abort_on_failure = j.value("abort_on_failure", p.abort_on_failure);
    if (j.contains("robot_start")) p.robot_start = detail::pose_from_json(j["robot_start"]);
    if (!(p.dt > 0.0)) fail(ErrorKind::invariant, "dt must be positive");
    return p;
  }

  static SimParams load(const std::filesystem::path& path) {
    return from_json(detail::parse_json_file(path));
  }
};

namespace detail {

inline SkillKind classify_skill(const SkillDef& skill) {
  bool has_map = false, has_local = false, has_target = false;
  for (const ArgSpec& a : skill.input_args) {
    has_map |= a.semantic_type == SemanticType::metric_map;
    has_local |= a.semantic_type == SemanticType::local_point;
    has_target |= a.semantic_type == SemanticType::target_element_pose;
  }
  if (has_map) return SkillKind::navigate;
  if (has_local) return SkillKind::grasp;
  if (has_target) return SkillKind::release;
  fail(ErrorKind::invariant, "skill '" + skill.skill_id + "' has no recognizable kind");
}

// The pose commanded by a world_object_pose binding. When a pickup-location
// zone marker exists, the matched object's nearest one is the commanded pose
// (the robot stops next to the storage, not on it); ties break on element id.
inline Pose resolve_world_object_pose(const SimWorld& world, const BindingExpr& binding) {
  const Element* target = world.find_world_object(binding.category, binding.tag);
  if (!target)
    fail(ErrorKind::reference, "cannot resolve " + binding.describe() + " in the simulation world");
  const Element* best = nullptr;
  double best_d = 0.0;
  for (const Element* e : world.partition.site_objects) {
    if (e->category != ElementCategory::zone_marker || e->name != "pickup_location") continue;
    const double d = e->placement.distance_xy(target->placement);
    if (!best || d < best_d || (d == best_d && e->id < best->id)) {
      best = e;
      best_d = d;
    }
  }
  if (best) {
    Pose p = best->placement;
    p.yaw = normalize_angle(std::atan2(target->placement.y - p.y, target->placement.x - p.x));
    return p;
  }
  return target->placement;
}

// Element-local axis along the thinnest box extent, expressed in world XY.
inline Vec2 install_normal(const Element& element) {
  double yaw = element.placement.yaw;
  double axis_angle = kPi / 2.0;  // default: local +Y
  if (element.is_box() && element.box().extents.x < element.box().extents.y) axis_angle = 0.0;
  const double a = yaw + axis_angle;
  return {std::cos(a), std::sin(a)};
}

inline double element_thickness(const Element& element) {
  if (!element.is_box()) return 0.1;
  return std::min(element.box().extents.x, element.box().extents.y);
}

}  // namespace detail

// Standoff pose for installing an element: offset from the target along the
// install normal so the robot body clears the final frame position. The two
// sides are tried in deterministic (+normal, -normal) order against the
// static grid.
inline Pose install_standoff(const SimWorld& world, const Element& element,
                             const SimParams& params) {
  const Vec2 n = detail::install_normal(element);
  const double d =
      params.inflation_radius + params.standoff + detail::element_thickness(element) * 0.5;
  const auto blocked = inflate_grid(world.grid, params.inflation_radius);
  for (double side : {1.0, -1.0}) {
    const double x = element.placement.x + side * n.x * d;
    const double y = element.placement.y + side * n.y * d;
    const int c = world.grid.col_of(x), r = world.grid.row_of(y);
    if (!world.grid.in_bounds(c, r)) continue;
    if (blocked[static_cast<std::size_t>(r) * world.grid.width + c]) continue;
    return Pose::xyz_yaw(x, y, 0.0, std::atan2(-side * n.y, -side * n.x));
  }
  fail(ErrorKind::planning,
       "no free standoff pose next to install target '" + element.id + "'");
}

// Flows B1/B2: compiles a robotized task into one fully bound ActionPlan per
// target element, in schedule order.
inline std::vector<ActionPlan> compile_plan(const ScheduleTask& task, const TaskSpecification& spec,
                                            const SimWorld& world, const RobotDescriptor& robot,
                                            const KnowledgeBase& kb,
                                            const SimParams& params = {}) {
  std::vector<ActionPlan> plans;
  for (const std::string& element_id : task.element_ids) {
    const Element* element = world.project->find_element(element_id);
    if (!element)
      fail(ErrorKind::reference, "task '" + task.id + "' targets unknown element '" + element_id + "'");
    ActionPlan plan;
    plan.task_id = task.id;
    plan.robot_id = robot.id;
    plan.element_id = element_id;

    for (const ActionDef& action : spec.actions) {
      const SkillDef& skill = kb.skills.at(action.skill_id);
      BoundAction step;
      step.action_name = action.action_name;
      step.skill_id = action.skill_id;
      step.kind = detail::classify_skill(skill);
      step.target_element_id = element_id;

      for (const auto& [arg, binding] : action.input_bindings) {
        switch (binding.source) {
          case BindingExpr::Source::world_object_pose: {
            const Pose p = detail::resolve_world_object_pose(world, binding);
            step.destination = p;
            step.bound_inputs[arg] = detail::pose_to_json(p);
            break;
          }
          case BindingExpr::Source::element_local_point: {
            auto it = element->local_points.find(binding.point_name);
            if (it == element->local_points.end())
              fail(ErrorKind::invariant, "element '" + element_id + "' lacks local point '" +
                                             binding.point_name +
                                             "' (modeling requirements not satisfied?)");
            step.pick_point = it->second;
            step.bound_inputs[arg] = Json::array({it->second.x, it->second.y, it->second.z});
            break;
          }
          case BindingExpr::Source::element_target_pose: {
            const Pose target = element->placement;
            if (step.kind == SkillKind::navigate) {
              const Pose standoff = install_standoff(world, *element, params);
              step.destination = standoff;
              step.bound_inputs[arg] = detail::pose_to_json(standoff);
            } else {
              step.target_pose = target;
              step.bound_inputs[arg] = detail::pose_to_json(target);
            }
            break;
          }
          case BindingExpr::Source::user_param:
            step.bound_inputs[arg] = "runtime:" + binding.param_name;
            break;
          case BindingExpr::Source::generated_map:
            step.bound_inputs[arg] = "map";
            break;
        }
      }
      if (step.kind == SkillKind::navigate && !step.destination)
        fail(ErrorKind::invariant, "navigation action '" + action.action_name + "' has no destination");
      if (step.kind == SkillKind::release && !step.target_pose)
        fail(ErrorKind::invariant, "release action '" + action.action_name + "' has no target pose");
      plan.steps.push_back(std::move(step));
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

// --- carry orientation fitting ---

struct OrientationFit {
  std::vector<CarryOrientation> per_cell;   // aligned with path.cells
  std::vector<std::size_t> reorient_cells;  // indices where orientation changes
};

// Chooses a carry orientation per path cell from the corridor clearance:
// horizontal where the full carried length fits, sideways where only the
// thin profile fits. Fails naming the blocking cell when neither fits.
inline OrientationFit orientation_fit(const OccupancyGrid& grid, const GridPath& path,
                                      double lateral_extent, double carried_length,
                                      double carried_width) {
  const double half_horizontal = std::max(lateral_extent, carried_length * 0.5);
  const double half_sideways = std::max(lateral_extent, carried_width * 0.5);
  const double cap = half_horizontal + 2.0 * grid.resolution;

  OrientationFit fit;
  fit.per_cell.reserve(path.cells.size());
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const auto [c, r] = path.cells[i];
    const double clear = clearance_at(grid, c, r, cap);
    if (clear >= half_horizontal) {
      fit.per_cell.push_back(CarryOrientation::horizontal);
    } else if (clear >= half_sideways) {
      fit.per_cell.push_back(CarryOrientation::sideways);
    } else {
      fail(ErrorKind::planning,
           "carried object fits in no orientation at cell (" + std::to_string(c) + ", " +
               std::to_string(r) + "): clearance " + std::to_string(clear) + " m");
    }
    if (i > 0 && fit.per_cell[i] != fit.per_cell[i - 1]) fit.reorient_cells.push_back(i);
  }
  return fit;
}

// --- deterministic discrete-time execution (flow B5) ---

struct SimOutcome {
  Trace trace;
  std::vector<std::string> installed;     // element ids, install order
  std::vector<std::string> failed_plans;  // element ids
  OccupancyGrid final_grid;
};

class Simulation {
 public:
  Simulation(const SimWorld& world, const RobotDescriptor& robot,
             const std::vector<AgentScript>& agents, const SimParams& params)
      : world_(world), robot_(robot), params_(params) {
    working_grid_ = world.grid;
    planning_grid_ = world.grid;
    for (const std::string& zone_id : world.project->site_params.prohibited_zones) {
      const Element* zone = world.project->find_element(zone_id);
      if (zone) stamp_element(planning_grid_, *zone, zone->placement, -1e9, 1e9);
    }
    for (const auto& [zone_id, cap] : world.project->site_params.zone_speed_caps) {
      const Element* zone = world.project->find_element(zone_id);
      if (zone) {
        Polygon poly = element_footprint(*zone, -1e9, 1e9);
        if (poly.size() >= 3) speed_zones_.emplace_back(std::move(poly), cap);
      }
    }
    for (const AgentScript& a : agents) {
      agent_ids_.push_back(a.agent_id);
      timelines_.emplace_back(a);
    }
    robot_pose_ = params.robot_start;
    arm_pose_ = "default";
    trace_.dt = params.dt;
    trace_.robot_id = robot.id;
  }

  SimOutcome run(const std::vector<ActionPlan>& plans) {
    record_tick(0.0);
    for (const ActionPlan& plan : plans) {
      try {
        execute_plan(plan);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::planning) throw;
        push_event("plan_failed", plan.element_id, current_action_,
                   Json{{"reason", e.what()}});
        failed_.push_back(plan.element_id);
        if (params_.abort_on_failure) break;
      }
    }
    if (plans.empty()) hold(params_.idle_duration);
    flush_final_tick();
    SimOutcome out;
    out.trace = std::move(trace_);
    out.installed = installed_order_;
    out.failed_plans = failed_;
    out.final_grid = working_grid_;
    return out;
  }

  static Pose carried_pose(const Pose& robot_pose, const ArmPose& arm, CarryOrientation o) {
    Pose tf = arm.carried_object_transform.value_or(Pose{});
    Pose p = robot_pose.compose(tf);
    if (o == CarryOrientation::sideways) p.roll = normalize_angle(p.roll + kPi / 2.0);
    return p;
  }

 private:
  const SimWorld& world_;
  const RobotDescriptor& robot_;
  SimParams params_;
  OccupancyGrid working_grid_;   // physical obstacles, grows with installs
  OccupancyGrid planning_grid_;  // working grid + prohibited zones
  std::vector<std::pair<Polygon, double>> speed_zones_;
  std::vector<std::string> agent_ids_;
  std::vector<AgentTimeline> timelines_;

  Trace trace_;
  double t_ = 0.0;
  long next_tick_ = 0;  // tick index; tick time = index * dt
  double last_event_t_ = -1.0;
  Pose robot_pose_;
  std::string arm_pose_;
  std::optional<CarriedState> attached_;
  std::set<std::string> installed_;
  std::vector<std::string> installed_order_;
  std::vector<std::string> failed_;
  std::string current_plan_;
  std::string current_action_;

  double speed_cap_at(double x, double y) const {
    double cap = std::min(robot_.max_speed, world_.project->site_params.nav_speed_max);
    for (const auto& [poly, zone_cap] : speed_zones_) {
      if (point_in_convex(poly, {x, y})) cap = std::min(cap, zone_cap);
    }
    return cap;
  }

  void refresh_carried() {
    if (!attached_) return;
    const ArmPose& arm = pose_lookup(robot_, arm_pose_);
    attached_->object_pose = carried_pose(robot_pose_, arm, attached_->orientation);
  }

  void push_event(const std::string& kind, const std::string& plan_id, const std::string& action,
                  Json data = Json::object()) {
    double t = t_;
    if (t <= last_event_t_) t = last_event_t_ + 1e-6;  // keep the stream strictly increasing
    last_event_t_ = t;
    trace_.events.push_back({t, kind, plan_id, action, std::move(data)});
  }

  void record_tick(double t) {
    TraceTick tick;
    tick.t = t;
    tick.robot = robot_pose_;
    tick.arm_pose = arm_pose_;
    tick.carried = attached_;
    for (std::size_t i = 0; i < timelines_.size(); ++i)
      tick.agents.emplace_back(agent_ids_[i], timelines_[i].pose_at(t));
    for (const auto& [id, pose] : tick.agents) {
      if (pose.distance_xy(tick.robot) <= params_.worker_near_radius) tick.worker_in_path = true;
    }
    trace_.ticks.push_back(std::move(tick));
  }

  // Advances sim time to t_end while the robot pose follows `pose_fn`,
  // emitting tick records at every dt multiple passed.
  template <typename PoseFn>
  void advance(double t_end, PoseFn&& pose_fn) {
    while ((next_tick_ + 1) * params_.dt <= t_end + 1e-12) {
      ++next_tick_;
      const double tk = next_tick_ * params_.dt;
      robot_pose_ = pose_fn(std::min(tk, t_end));
      refresh_carried();
      record_tick(tk);
    }
    robot_pose_ = pose_fn(t_end);
    refresh_carried();
    t_ = t_end;
  }

  void hold(double duration) {
    const Pose frozen = robot_pose_;
    advance(t_ + duration, [frozen](double) { return frozen; });
  }

  void flush_final_tick() {
    // One closing tick if the run did not end exactly on a tick boundary.
    if (std::abs(next_tick_ * params_.dt - t_) > 1e-9) {
      ++next_tick_;
      record_tick(next_tick_ * params_.dt);
    }
  }

  void transition_arm(const std::string& pose_name) {
    const ArmPose& pose = pose_lookup(robot_, pose_name);
    arm_pose_ = pose_name;
    refresh_carried();
    hold(pose.transition_duration);
  }

  std::string nav_arm_pose(const std::string& skill_id) const {
    if (robot_.pose_library.count(skill_id)) return skill_id;
    return "default";
  }

  // Travel polyline: exact start, path cell centers, exact destination.
  struct TravelPoint {
    double x, y;
    double t;  // arrival time
    CarryOrientation orientation = CarryOrientation::horizontal;
  };

  std::vector<TravelPoint> build_profile(const GridPath& path, const Pose& from, const Pose& to,
                                         const std::vector<CarryOrientation>* orientations) {
    std::vector<TravelPoint> pts;
    pts.push_back({from.x, from.y, t_,
                   orientations ? orientations->front() : CarryOrientation::horizontal});
    auto push = [&](double x, double y, CarryOrientation o) {
      TravelPoint& prev = pts.back();
      const double dist = std::hypot(x - prev.x, y - prev.y);
      const double cap = speed_cap_at((x + prev.x) / 2.0, (y + prev.y) / 2.0);
      pts.push_back({x, y, prev.t + (dist > 0 ? dist / cap : 0.0), o});
    };
    for (std::size_t i = 0; i < path.cells.size(); ++i) {
      const auto [c, r] = path.cells[i];
      push(working_grid_.cell_x(c), working_grid_.cell_y(r),
           orientations ? (*orientations)[i] : CarryOrientation::horizontal);
    }
    push(to.x, to.y, orientations ? orientations->back() : CarryOrientation::horizontal);
    return pts;
  }

  void travel(const std::vector<TravelPoint>& pts, const Pose& final_pose) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const TravelPoint& a = pts[i - 1];
      const TravelPoint& b = pts[i];
      if (attached_ && b.orientation != a.orientation) {
        // Stop and rotate the carried object before entering the segment.
        push_event("reorient", current_plan_, current_action_,
                   Json{{"to", to_string(b.orientation)}});
        attached_->orientation = b.orientation;
        hold(params_.reorient_duration);
      }
      if (b.t <= a.t) continue;
      const double yaw = std::atan2(b.y - a.y, b.x - a.x);
      const double t0 = t_;
      const double duration = b.t - a.t;
      const TravelPoint pa = a, pb = b;
      advance(t_ + duration, [pa, pb, yaw, t0, duration](double t) {
        const double u = std::clamp((t - t0) / duration, 0.0, 1.0);
        return Pose::xyz_yaw(pa.x + u * (pb.x - pa.x), pa.y + u * (pb.y - pa.y), 0.0, yaw);
      });
    }
    const Pose fp = final_pose;
    advance(t_, [fp](double) { return fp; });
    robot_pose_ = final_pose;
    refresh_carried();
  }

  void do_navigate(const BoundAction& step) {
    transition_arm(nav_arm_pose(step.skill_id));
    const Pose goal = *step.destination;
    double inflation = params_.inflation_radius;
    const Element* carried_element = nullptr;
    double half_sideways = 0.0, half_horizontal = 0.0;
    double length = 0.1, width = 0.1;
    if (attached_) {
      carried_element = world_.project->find_element(attached_->element_id);
      if (carried_element && carried_element->is_box()) {
        length = std::max(carried_element->box().extents.x, carried_element->box().extents.y);
        width = std::min(carried_element->box().extents.x, carried_element->box().extents.y);
      }
      const ArmPose& arm = pose_lookup(robot_, arm_pose_);
      half_sideways = std::max(arm.lateral_extent, width * 0.5);
      half_horizontal = std::max(arm.lateral_extent, length * 0.5);
      inflation = std::max(inflation, half_sideways);
    }

    std::vector<CarryOrientation> orientations;
    std::optional<GridPath> path;
    if (attached_ && half_horizontal > inflation) {
      // Preferred: a corridor wide enough to carry the material horizontally
      // the whole way; no reorientation needed if one exists.
      try {
        path = plan_path(planning_grid_, robot_pose_, goal,
                         std::max(params_.inflation_radius, half_horizontal));
        orientations.assign(path->cells.size(), CarryOrientation::horizontal);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::planning) throw;
      }
    }
    if (!path) path = plan_path(planning_grid_, robot_pose_, goal, inflation);

    if (attached_ && carried_element && orientations.empty()) {
      const ArmPose& arm = pose_lookup(robot_, arm_pose_);
      OrientationFit fit =
          orientation_fit(working_grid_, *path, arm.lateral_extent, length, width);
      orientations = std::move(fit.per_cell);
      if (!orientations.empty() && attached_->orientation != orientations.front()) {
        push_event("reorient", current_plan_, current_action_,
                   Json{{"to", to_string(orientations.front())}});
        attached_->orientation = orientations.front();
        refresh_carried();
        hold(params_.reorient_duration);
      }
    }
    travel(build_profile(*path, robot_pose_, goal, orientations.empty() ? nullptr : &orientations),
           goal);
  }

  void do_grasp(const BoundAction& step) {
    const std::vector<std::string>& seq =
        robot_.grasp_sequence.empty() ? std::vector<std::string>{step.skill_id} : robot_.grasp_sequence;
    for (const std::string& pose_name : seq) transition_arm(pose_name);
    CarriedState carried;
    carried.element_id = *step.target_element_id;
    carried.orientation = CarryOrientation::horizontal;
    attached_ = carried;
    refresh_carried();
    Json data;
    data["element"] = carried.element_id;
    if (step.pick_point)
      data["grasp_point"] = Json::array({step.pick_point->x, step.pick_point->y, step.pick_point->z});
    push_event("attach", current_plan_, current_action_, data);
  }

  void do_release(const BoundAction& step) {
    if (attached_ && attached_->orientation != CarryOrientation::horizontal) {
      push_event("reorient", current_plan_, current_action_, Json{{"to", "horizontal"}});
      attached_->orientation = CarryOrientation::horizontal;
      refresh_carried();
      hold(params_.reorient_duration);
    }
    const std::vector<std::string>& seq = robot_.release_sequence.empty()
                                              ? std::vector<std::string>{step.skill_id}
                                              : robot_.release_sequence;
    for (const std::string& pose_name : seq) transition_arm(pose_name);

    const std::string element_id = *step.target_element_id;
    const Element* element = world_.project->find_element(element_id);
    push_event("detach", current_plan_, current_action_, Json{{"element", element_id}});
    attached_.reset();
    installed_.insert(element_id);
    installed_order_.push_back(element_id);
    if (element) {
      stamp_element(working_grid_, *element, *step.target_pose, world_.z_band_min,
                    world_.z_band_max);
      stamp_element(planning_grid_, *element, *step.target_pose, world_.z_band_min,
                    world_.z_band_max);
    }
    push_event("install", current_plan_, current_action_,
               Json{{"element", element_id}, {"pose", detail::pose_to_json(*step.target_pose)}});
  }

  void execute_plan(const ActionPlan& plan) {
    current_plan_ = plan.element_id;
    for (const BoundAction& step : plan.steps) {
      current_action_ = step.action_name;
      push_event("action_start", plan.element_id, step.action_name,
                 Json{{"skill", step.skill_id}});
      switch (step.kind) {
        case SkillKind::navigate: do_navigate(step); break;
        case SkillKind::grasp: do_grasp(step); break;
        case SkillKind::release: do_release(step); break;
      }
      push_event("action_end", plan.element_id, step.action_name, Json{{"skill", step.skill_id}});
      hold(params_.dispatch_latency);
    }
  }
};

// Executes the compiled plans sequentially among the scripted agents. The
// whole run is a pure function of its inputs.
inline SimOutcome run(const SimWorld& world, const RobotDescriptor& robot,
                      const std::vector<ActionPlan>& plans, const std::vector<AgentScript>& agents,
                      const SimParams& params) {
  Simulation sim(world, robot, agents, params);
  return sim.run(plans);
}

}  // namespace robim
