#pragma once

#include <set>
#include <string>
#include <vector>

#include "robim/kb.hpp"
#include "robim/model.hpp"

namespace robim {

// Parameters the runtime supplies itself (the robot's own state), so they
// never become 4D BIM modeling requirements.
inline const std::set<std::string>& runtime_provided_params() {
  static const std::set<std::string> params = {"robot_initial_pose"};
  return params;
}

// One unresolvable (task, action, skill argument) triple (flow A3).
struct ModelingRequirement {
  std::string task_id;
  std::string action_name;
  std::string skill_id;
  std::string missing_arg;
  BindingExpr requirement;  // the binding that could not be resolved
  std::string description;
  bool satisfied = false;
};

// Resolvability of a binding against the current project; target elements are
// the task's linked elements.
inline bool binding_resolvable(const Project& project, const ScheduleTask& task,
                               const BindingExpr& binding) {
  switch (binding.source) {
    case BindingExpr::Source::generated_map:
    case BindingExpr::Source::element_target_pose:
      return true;  // produced by world generation / read off the BIM placement
    case BindingExpr::Source::user_param:
      return runtime_provided_params().count(binding.param_name) > 0;
    case BindingExpr::Source::world_object_pose:
      for (const Element& e : project.elements) {
        if (e.category == binding.category && e.name == binding.tag) return true;
      }
      return false;
    case BindingExpr::Source::element_local_point:
      if (task.element_ids.empty()) return false;
      for (const std::string& eid : task.element_ids) {
        const Element* e = project.find_element(eid);
        if (!e || !e->local_points.count(binding.point_name)) return false;
      }
      return true;
  }
  return false;
}

inline std::vector<ModelingRequirement> derive_requirements(const Project& project,
                                                            const KnowledgeBase& kb) {
  std::vector<ModelingRequirement> out;
  for (const ScheduleTask& task : project.tasks) {
    if (!task.robotization) continue;
    const TaskSpecification* spec = nullptr;
    try {
      spec = &lookup_spec(kb, *task.task_spec_id);
    } catch (const Error& e) {
      fail(ErrorKind::reference,
           "robotized task '" + task.id + "': " + std::string(e.what()));
    }
    for (const ActionDef& action : spec->actions) {
      for (const auto& [arg, binding] : action.input_bindings) {
        if (binding_resolvable(project, task, binding)) continue;
        ModelingRequirement req;
        req.task_id = task.id;
        req.action_name = action.action_name;
        req.skill_id = action.skill_id;
        req.missing_arg = arg;
        req.requirement = binding;
        req.description = "action '" + action.action_name + "' (" + action.skill_id +
                          ") needs " + binding.describe() + " for input '" + arg + "'";
        out.push_back(std::move(req));
      }
    }
  }
  return out;
}

struct SatisfactionReport {
  std::vector<ModelingRequirement> requirements;  // satisfied flags updated
  bool pass = true;

  std::size_t unsatisfied_count() const {
    std::size_t n = 0;
    for (const auto& r : requirements)
      if (!r.satisfied) ++n;
    return n;
  }
};

// Flow A4: re-evaluates previously derived requirements against the current
// (possibly augmented) project.
inline SatisfactionReport check_satisfaction(const Project& project,
                                             std::vector<ModelingRequirement> reqs) {
  SatisfactionReport report;
  for (ModelingRequirement& req : reqs) {
    const ScheduleTask* task = project.find_task(req.task_id);
    req.satisfied = task && binding_resolvable(project, *task, req.requirement);
    report.pass = report.pass && req.satisfied;
    report.requirements.push_back(std::move(req));
  }
  return report;
}

// Flow A5: invariant-checks site parameters and resolves zone references.
inline SiteParams validate_site_params(const SiteParams& params, const Project& project) {
  SiteParams out = params;
  out.validate();
  auto check_zone = [&](const std::string& zone_id) {
    const Element* e = project.find_element(zone_id);
    if (!e) fail(ErrorKind::reference, "site params reference unknown zone '" + zone_id + "'");
    if (e->category != ElementCategory::zone_marker)
      fail(ErrorKind::invariant, "zone '" + zone_id + "' is not a zone_marker element");
  };
  for (const std::string& z : out.prohibited_zones) check_zone(z);
  for (const auto& [z, _] : out.zone_speed_caps) check_zone(z);
  return out;
}

inline Json requirements_to_json(const std::vector<ModelingRequirement>& reqs) {
  Json arr = Json::array();
  for (const auto& r : reqs) {
    Json j;
    j["task_id"] = r.task_id;
    j["action_name"] = r.action_name;
    j["skill_id"] = r.skill_id;
    j["missing_arg"] = r.missing_arg;
    j["requirement"] = r.requirement.describe();
    j["description"] = r.description;
    j["satisfied"] = r.satisfied;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace robim
