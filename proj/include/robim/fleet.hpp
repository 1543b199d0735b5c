#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "robim/model.hpp"
#include "robim/site_params.hpp"

namespace robim {

// A named arm configuration (flow B4). Arms are abstracted to pose states
// with transition durations instead of joint trajectories.
struct ArmPose {
  std::string pose_name;
  std::optional<Pose> carried_object_transform;  // object pose relative to base
  double lateral_extent = 0.0;                   // max XY half-extent in this pose
  double transition_duration = 0.0;              // seconds to enter from any pose
};

struct RobotDescriptor {
  std::string id;
  std::set<std::string> capabilities;
  double footprint_radius = 0.55;  // circumscribed, meters
  double height = 1.0;
  double weight = 75.0;  // kg
  double max_speed = 1.0;
  double arm_reach = 0.85;
  std::map<std::string, ArmPose> pose_library;
  std::vector<std::string> grasp_sequence;    // MM-G-1 pose order, attach after last
  std::vector<std::string> release_sequence;  // MM-R-1 pose order, detach after last

  void validate() const {
    if (!(footprint_radius > 0.0)) fail(ErrorKind::invariant, "robot footprint radius must be positive");
    if (!(max_speed > 0.0)) fail(ErrorKind::invariant, "robot max speed must be positive");
    for (const auto& [name, pose] : pose_library) {
      if (pose.transition_duration < 0.0)
        fail(ErrorKind::invariant, "pose '" + name + "' has negative transition duration");
    }
    for (const auto* seq : {&grasp_sequence, &release_sequence}) {
      for (const std::string& name : *seq) {
        if (!pose_library.count(name))
          fail(ErrorKind::reference, "robot '" + id + "' sequence references unknown pose '" + name + "'");
      }
    }
  }
};

inline std::vector<RobotDescriptor> load_fleet(const std::filesystem::path& path) {
  const Json j = detail::parse_json_file(path);
  std::vector<RobotDescriptor> fleet;
  for (const Json& rj : j.value("robots", Json::array())) {
    RobotDescriptor r;
    r.id = rj.value("id", "");
    if (r.id.empty()) fail(ErrorKind::parse, path.string() + ": robot without id");
    for (const Json& c : rj.value("capabilities", Json::array())) r.capabilities.insert(c.get<std::string>());
    r.footprint_radius = rj.value("footprint_radius", r.footprint_radius);
    r.height = rj.value("height", r.height);
    r.weight = rj.value("weight", r.weight);
    r.max_speed = rj.value("max_speed", r.max_speed);
    r.arm_reach = rj.value("arm_reach", r.arm_reach);
    for (const Json& pj : rj.value("pose_library", Json::array())) {
      ArmPose pose;
      pose.pose_name = pj.value("pose_name", "");
      if (pose.pose_name.empty()) fail(ErrorKind::parse, "arm pose without pose_name");
      if (pj.contains("carried_object_transform") && !pj["carried_object_transform"].is_null())
        pose.carried_object_transform = detail::pose_from_json(pj["carried_object_transform"]);
      pose.lateral_extent = pj.value("lateral_extent", 0.0);
      pose.transition_duration = pj.value("transition_duration", 0.0);
      if (!r.pose_library.emplace(pose.pose_name, pose).second)
        fail(ErrorKind::invariant, "robot '" + r.id + "' has duplicate pose '" + pose.pose_name + "'");
    }
    r.grasp_sequence = rj.value("grasp_sequence", std::vector<std::string>{});
    r.release_sequence = rj.value("release_sequence", std::vector<std::string>{});
    r.validate();
    fleet.push_back(std::move(r));
  }
  return fleet;
}

// Flow B3: capability superset plus site size/weight limits; fleet order is
// preserved. An empty result is a reportable condition, not an error.
inline std::vector<RobotDescriptor> match_robots(const std::vector<RobotDescriptor>& fleet,
                                                 const std::set<std::string>& required_caps,
                                                 const SiteParams& site) {
  std::vector<RobotDescriptor> out;
  for (const RobotDescriptor& r : fleet) {
    const bool caps_ok = std::includes(r.capabilities.begin(), r.capabilities.end(),
                                       required_caps.begin(), required_caps.end());
    if (caps_ok && r.footprint_radius <= site.allowable_robot_footprint_radius_max &&
        r.weight <= site.allowable_robot_weight_max) {
      out.push_back(r);
    }
  }
  return out;
}

inline const ArmPose& pose_lookup(const RobotDescriptor& robot, const std::string& pose_name) {
  auto it = robot.pose_library.find(pose_name);
  if (it == robot.pose_library.end()) {
    std::string names;
    for (const auto& [n, _] : robot.pose_library) names += (names.empty() ? "" : ", ") + n;
    fail(ErrorKind::reference, "robot '" + robot.id + "' has no pose '" + pose_name +
                                   "' (available: " + names + ")");
  }
  return it->second;
}

}  // namespace robim
