#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "robim/model.hpp"

namespace robim {

enum class SemanticType { world_pose, local_point, metric_map, target_element_pose, scalar_param };

inline std::string to_string(SemanticType t) {
  switch (t) {
    case SemanticType::world_pose: return "world_pose";
    case SemanticType::local_point: return "local_point";
    case SemanticType::metric_map: return "metric_map";
    case SemanticType::target_element_pose: return "target_element_pose";
    case SemanticType::scalar_param: return "scalar_param";
  }
  return "?";
}

inline SemanticType semantic_type_from(const std::string& s) {
  if (s == "world_pose") return SemanticType::world_pose;
  if (s == "local_point") return SemanticType::local_point;
  if (s == "metric_map") return SemanticType::metric_map;
  if (s == "target_element_pose") return SemanticType::target_element_pose;
  if (s == "scalar_param") return SemanticType::scalar_param;
  fail(ErrorKind::parse, "unknown semantic type '" + s + "'");
}

struct ArgSpec {
  std::string arg_name;
  SemanticType semantic_type = SemanticType::world_pose;
};

struct SkillDef {
  std::string skill_id;  // e.g. "NV-1"
  std::string name;
  std::vector<ArgSpec> input_args;
  std::vector<std::string> required_capabilities;
};

// How a skill argument is bound against the simulation world (flow B2).
struct BindingExpr {
  enum class Source {
    world_object_pose,    // pose of a world object matched by (category, tag)
    element_local_point,  // named point in the target element's local frame
    element_target_pose,  // the target element's final placement from the BIM
    user_param,           // named parameter supplied by the user or runtime
    generated_map,        // the occupancy grid produced by world generation
  };

  Source source = Source::generated_map;
  ElementCategory category = ElementCategory::storage;  // world_object_pose
  std::string tag;                                      // world_object_pose
  std::string point_name;                               // element_local_point
  std::string param_name;                               // user_param

  std::string describe() const {
    switch (source) {
      case Source::world_object_pose:
        return "world object (" + robim::to_string(category) + ", '" + tag + "')";
      case Source::element_local_point:
        return "element local point '" + point_name + "'";
      case Source::element_target_pose:
        return "element target pose";
      case Source::user_param:
        return "user parameter '" + param_name + "'";
      case Source::generated_map:
        return "generated metric map";
    }
    return "?";
  }
};

struct ActionDef {
  std::string action_name;
  std::string skill_id;
  std::map<std::string, BindingExpr> input_bindings;  // arg_name -> binding
};

struct TaskSpecification {
  std::string spec_id;  // e.g. "I-W-F-#1"
  std::vector<ActionDef> actions;
};

struct KnowledgeBase {
  std::map<std::string, TaskSpecification> specs;
  std::map<std::string, SkillDef> skills;

  void validate() const {
    for (const auto& [spec_id, spec] : specs) {
      if (spec.actions.empty())
        fail(ErrorKind::invariant, "task specification '" + spec_id + "' has no actions");
      for (const ActionDef& action : spec.actions) {
        auto it = skills.find(action.skill_id);
        if (it == skills.end())
          fail(ErrorKind::reference, "action '" + action.action_name + "' in '" + spec_id +
                                         "' references undefined skill '" + action.skill_id + "'");
        // Bindings must cover the skill's arguments exactly.
        const SkillDef& skill = it->second;
        std::set<std::string> bound, declared;
        for (const auto& [arg, _] : action.input_bindings) bound.insert(arg);
        for (const ArgSpec& a : skill.input_args) declared.insert(a.arg_name);
        for (const std::string& arg : declared) {
          if (!bound.count(arg))
            fail(ErrorKind::invariant, "action '" + action.action_name + "' leaves skill argument '" +
                                           arg + "' of " + action.skill_id + " unbound");
        }
        for (const std::string& arg : bound) {
          if (!declared.count(arg))
            fail(ErrorKind::invariant, "action '" + action.action_name + "' binds unknown argument '" +
                                           arg + "' of " + action.skill_id);
        }
      }
    }
  }
};

namespace detail {

inline BindingExpr binding_from_json(const Json& j) {
  BindingExpr b;
  const std::string source = j.value("source", "");
  if (source == "world_object_pose") {
    b.source = BindingExpr::Source::world_object_pose;
    b.category = element_category_from(j.value("category", ""));
    b.tag = j.value("tag", "");
  } else if (source == "element_local_point") {
    b.source = BindingExpr::Source::element_local_point;
    b.point_name = j.value("point_name", "");
    if (b.point_name.empty()) fail(ErrorKind::parse, "element_local_point binding needs point_name");
  } else if (source == "element_target_pose") {
    b.source = BindingExpr::Source::element_target_pose;
  } else if (source == "user_param") {
    b.source = BindingExpr::Source::user_param;
    b.param_name = j.value("param_name", "");
    if (b.param_name.empty()) fail(ErrorKind::parse, "user_param binding needs param_name");
  } else if (source == "generated_map") {
    b.source = BindingExpr::Source::generated_map;
  } else {
    fail(ErrorKind::parse, "unknown binding source '" + source + "'");
  }
  return b;
}

}  // namespace detail

// Loads skills and task specifications from one or more KB files. The merge
// is order-independent; duplicate ids across files are an error.
inline KnowledgeBase load_kb(const std::vector<std::filesystem::path>& paths) {
  KnowledgeBase kb;
  for (const auto& path : paths) {
    const Json j = detail::parse_json_file(path);
    for (const Json& sj : j.value("skills", Json::array())) {
      SkillDef skill;
      skill.skill_id = sj.value("skill_id", "");
      if (skill.skill_id.empty()) fail(ErrorKind::parse, path.string() + ": skill without skill_id");
      skill.name = sj.value("name", skill.skill_id);
      std::set<std::string> seen;
      for (const Json& aj : sj.value("input_args", Json::array())) {
        ArgSpec arg;
        arg.arg_name = aj.value("arg_name", "");
        arg.semantic_type = semantic_type_from(aj.value("semantic_type", ""));
        if (!seen.insert(arg.arg_name).second)
          fail(ErrorKind::invariant,
               "skill '" + skill.skill_id + "' has duplicate argument '" + arg.arg_name + "'");
        skill.input_args.push_back(std::move(arg));
      }
      skill.required_capabilities =
          sj.value("required_capabilities", std::vector<std::string>{});
      if (!kb.skills.emplace(skill.skill_id, skill).second)
        fail(ErrorKind::invariant, "duplicate skill id '" + skill.skill_id + "'");
    }
    for (const Json& pj : j.value("specs", Json::array())) {
      TaskSpecification spec;
      spec.spec_id = pj.value("spec_id", "");
      if (spec.spec_id.empty()) fail(ErrorKind::parse, path.string() + ": spec without spec_id");
      for (const Json& aj : pj.value("actions", Json::array())) {
        ActionDef action;
        action.action_name = aj.value("action_name", "");
        action.skill_id = aj.value("skill_id", "");
        const Json bindings = aj.value("input_bindings", Json::object());
        for (const auto& [arg, bj] : bindings.items())
          action.input_bindings[arg] = detail::binding_from_json(bj);
        spec.actions.push_back(std::move(action));
      }
      if (!kb.specs.emplace(spec.spec_id, spec).second)
        fail(ErrorKind::invariant, "duplicate task specification id '" + spec.spec_id + "'");
    }
  }
  kb.validate();
  return kb;
}

// Flow A1: exact-id retrieval, no fuzzy matching.
inline const TaskSpecification& lookup_spec(const KnowledgeBase& kb, const std::string& spec_id) {
  auto it = kb.specs.find(spec_id);
  if (it == kb.specs.end()) {
    std::string known;
    for (const auto& [id, _] : kb.specs) known += (known.empty() ? "" : ", ") + id;
    fail(ErrorKind::reference,
         "unknown task specification '" + spec_id + "' (known: " + known + ")");
  }
  return it->second;
}

struct ResolvedSkills {
  std::vector<std::pair<const ActionDef*, const SkillDef*>> pairs;  // action order
  std::set<std::string> required_capabilities;                      // union
};

// Flow A2: pairs each action with its skill definition and aggregates the
// capability requirements.
inline ResolvedSkills resolve_skills(const KnowledgeBase& kb, const TaskSpecification& spec) {
  ResolvedSkills out;
  for (const ActionDef& action : spec.actions) {
    const SkillDef& skill = kb.skills.at(action.skill_id);
    out.pairs.emplace_back(&action, &skill);
    out.required_capabilities.insert(skill.required_capabilities.begin(),
                                     skill.required_capabilities.end());
  }
  return out;
}

}  // namespace robim
