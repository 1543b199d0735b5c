#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"

using namespace robim;
namespace fs = std::filesystem;

namespace {

fs::path temp_kb(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  detail::write_file(p, content);
  return p;
}

}  // namespace

TEST_CASE("default knowledge base defines the frame installation task") {
  const KnowledgeBase kb = load_kb({helpers::assets("kb/default_kb.json")});
  CHECK(kb.skills.size() == 4);
  REQUIRE(kb.skills.count("NV-1") == 1);
  REQUIRE(kb.skills.count("NV-2") == 1);
  REQUIRE(kb.skills.count("MM-G-1") == 1);
  REQUIRE(kb.skills.count("MM-R-1") == 1);

  const TaskSpecification& spec = lookup_spec(kb, "I-W-F-#1");
  REQUIRE(spec.actions.size() == 4);
  CHECK(spec.actions[0].action_name == "navigate to frame pick up location");
  CHECK(spec.actions[0].skill_id == "NV-1");
  CHECK(spec.actions[1].action_name == "pick frame");
  CHECK(spec.actions[1].skill_id == "MM-G-1");
  CHECK(spec.actions[2].action_name == "navigate to install location");
  CHECK(spec.actions[2].skill_id == "NV-2");
  CHECK(spec.actions[3].action_name == "install frame");
  CHECK(spec.actions[3].skill_id == "MM-R-1");
}

TEST_CASE("spec lookup failure lists the known ids") {
  const KnowledgeBase kb = load_kb({helpers::assets("kb/default_kb.json")});
  try {
    lookup_spec(kb, "I-W-F-#9");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::reference);
    CHECK(std::string(e.what()).find("I-W-F-#1") != std::string::npos);
  }
}

TEST_CASE("resolve_skills pairs actions with skills and unions capabilities") {
  const KnowledgeBase kb = load_kb({helpers::assets("kb/default_kb.json")});
  const ResolvedSkills resolved = resolve_skills(kb, lookup_spec(kb, "I-W-F-#1"));
  REQUIRE(resolved.pairs.size() == 4);
  CHECK(resolved.pairs[0].second->skill_id == "NV-1");
  CHECK(resolved.pairs[3].second->skill_id == "MM-R-1");
  CHECK(resolved.required_capabilities ==
        std::set<std::string>{"navigate", "carry", "manipulate", "grasp", "release"});
}

TEST_CASE("validation catches binding and reference errors") {
  SUBCASE("action referencing an undefined skill") {
    const auto p = temp_kb("kb_undef_skill.json", R"({
      "specs": [{"spec_id": "S", "actions": [
        {"action_name": "a", "skill_id": "GHOST", "input_bindings": {}}]}]})");
    CHECK_THROWS_AS(load_kb({p}), Error);
  }
  SUBCASE("unbound skill argument") {
    const auto p = temp_kb("kb_unbound.json", R"({
      "skills": [{"skill_id": "K", "input_args": [
        {"arg_name": "x", "semantic_type": "world_pose"}]}],
      "specs": [{"spec_id": "S", "actions": [
        {"action_name": "a", "skill_id": "K", "input_bindings": {}}]}]})");
    CHECK_THROWS_AS(load_kb({p}), Error);
  }
  SUBCASE("binding an argument the skill does not declare") {
    const auto p = temp_kb("kb_extra.json", R"({
      "skills": [{"skill_id": "K", "input_args": []}],
      "specs": [{"spec_id": "S", "actions": [
        {"action_name": "a", "skill_id": "K", "input_bindings": {
          "ghost": {"source": "generated_map"}}}]}]})");
    CHECK_THROWS_AS(load_kb({p}), Error);
  }
  SUBCASE("empty spec") {
    const auto p = temp_kb("kb_empty_spec.json", R"({
      "specs": [{"spec_id": "S", "actions": []}]})");
    CHECK_THROWS_AS(load_kb({p}), Error);
  }
}

TEST_CASE("multi-file merge is order independent, duplicates rejected") {
  const auto extra = temp_kb("kb_extra_skill.json", R"({
    "skills": [{"skill_id": "NV-3", "name": "patrol", "input_args": [
      {"arg_name": "map", "semantic_type": "metric_map"}],
      "required_capabilities": ["navigate"]}]})");
  const auto a = load_kb({helpers::assets("kb/default_kb.json"), extra});
  const auto b = load_kb({extra, helpers::assets("kb/default_kb.json")});
  CHECK(a.skills.size() == 5);
  CHECK(b.skills.size() == 5);
  CHECK(a.skills.count("NV-3") == 1);

  CHECK_THROWS_AS(
      load_kb({helpers::assets("kb/default_kb.json"), helpers::assets("kb/default_kb.json")}),
      Error);
  CHECK_THROWS_AS(load_kb({fs::temp_directory_path() / "kb_does_not_exist.json"}), Error);
}

TEST_CASE("binding parser rejects malformed sources") {
  CHECK_THROWS_AS(detail::binding_from_json(Json{{"source", "teleport"}}), Error);
  CHECK_THROWS_AS(detail::binding_from_json(Json{{"source", "user_param"}}), Error);
  CHECK_THROWS_AS(detail::binding_from_json(Json{{"source", "element_local_point"}}), Error);
  const BindingExpr b = detail::binding_from_json(
      Json{{"source", "world_object_pose"}, {"category", "storage"}, {"tag", "s"}});
  CHECK(b.source == BindingExpr::Source::world_object_pose);
  CHECK(b.tag == "s");
}
