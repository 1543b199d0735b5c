#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace robim;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_fleet(const Json& j) {
  const fs::path p = fs::temp_directory_path() / "fleet_under_test.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

RobotDescriptor make_robot(std::string id, std::set<std::string> caps, double radius,
                           double weight) {
  RobotDescriptor r;
  r.id = std::move(id);
  r.capabilities = std::move(caps);
  r.footprint_radius = radius;
  r.weight = weight;
  return r;
}

}  // namespace

TEST_CASE("bundled fleet file loads with a complete pose library") {
  const auto fleet = load_fleet(helpers::assets("fleet/husky_ur5.json"));
  REQUIRE(fleet.size() == 1);
  const RobotDescriptor& r = fleet[0];
  CHECK(r.id == "husky_ur5");
  CHECK(r.capabilities ==
        std::set<std::string>{"navigate", "carry", "manipulate", "grasp", "release"});
  CHECK(r.footprint_radius == 0.55);
  CHECK(r.weight == 95.0);
  CHECK(r.max_speed == 1.0);

  for (const char* name : {"default", "NV-1", "NV-2", "approach_grasp", "lift", "place",
                           "retract"}) {
    const ArmPose& pose = pose_lookup(r, name);
    CHECK(pose.pose_name == name);
    CHECK(pose.transition_duration > 0.0);
    CHECK(pose.lateral_extent > 0.0);
  }
  // Poses used while an object is attached must define where it rides.
  CHECK(pose_lookup(r, "NV-2").carried_object_transform.has_value());
  CHECK(pose_lookup(r, "lift").carried_object_transform.has_value());
  CHECK(!pose_lookup(r, "NV-1").carried_object_transform.has_value());
  CHECK(r.grasp_sequence == std::vector<std::string>{"approach_grasp", "lift"});
  CHECK(r.release_sequence == std::vector<std::string>{"place", "retract"});
}

TEST_CASE("fleet matching filters on capabilities, size, and weight") {
  const std::vector<RobotDescriptor> fleet = {
      make_robot("small_nav", {"navigate"}, 0.3, 40.0),
      make_robot("full_a", {"navigate", "carry", "manipulate", "grasp", "release"}, 0.5, 90.0),
      make_robot("wide", {"navigate", "carry", "manipulate", "grasp", "release"}, 0.9, 90.0),
      make_robot("heavy", {"navigate", "carry", "manipulate", "grasp", "release"}, 0.5, 300.0),
      make_robot("full_b", {"navigate", "carry", "manipulate", "grasp", "release", "weld"}, 0.55,
                 100.0),
  };
  SiteParams site;  // radius <= 0.6, weight <= 120

  const std::set<std::string> caps = {"navigate", "carry", "manipulate", "grasp", "release"};
  const auto matched = match_robots(fleet, caps, site);
  REQUIRE(matched.size() == 2);
  // Fleet order is preserved; extra capabilities are fine.
  CHECK(matched[0].id == "full_a");
  CHECK(matched[1].id == "full_b");

  SUBCASE("no required capabilities matches everything within limits") {
    const auto all = match_robots(fleet, {}, site);
    REQUIRE(all.size() == 3);
    CHECK(all[0].id == "small_nav");
  }
  SUBCASE("an unsatisfiable requirement yields an empty result, not an error") {
    CHECK(match_robots(fleet, {"fly"}, site).empty());
  }
  SUBCASE("boundary values are inclusive") {
    site.allowable_robot_footprint_radius_max = 0.5;
    site.allowable_robot_weight_max = 90.0;
    const auto exact = match_robots(fleet, caps, site);
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].id == "full_a");
  }
}

TEST_CASE("pose lookup failure names the robot and the available poses") {
  const auto fleet = load_fleet(helpers::assets("fleet/husky_ur5.json"));
  try {
    pose_lookup(fleet[0], "handstand");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::reference);
    CHECK(std::string(e.what()).find("husky_ur5") != std::string::npos);
    CHECK(std::string(e.what()).find("handstand") != std::string::npos);
    CHECK(std::string(e.what()).find("NV-1") != std::string::npos);
  }
}

TEST_CASE("fleet file validation") {
  Json base = Json::parse(detail::read_file(helpers::assets("fleet/husky_ur5.json")));

  SUBCASE("missing robot id") {
    base["robots"][0].erase("id");
    CHECK_THROWS_WITH_AS(load_fleet(write_temp_fleet(base)), doctest::Contains("without id"),
                         Error);
  }
  SUBCASE("duplicate pose name") {
    base["robots"][0]["pose_library"].push_back(base["robots"][0]["pose_library"][0]);
    CHECK_THROWS_WITH_AS(load_fleet(write_temp_fleet(base)), doctest::Contains("duplicate pose"),
                         Error);
  }
  SUBCASE("sequence referencing an unknown pose") {
    base["robots"][0]["grasp_sequence"].push_back("warp");
    CHECK_THROWS_WITH_AS(load_fleet(write_temp_fleet(base)), doctest::Contains("warp"), Error);
  }
  SUBCASE("negative transition duration") {
    base["robots"][0]["pose_library"][0]["transition_duration"] = -1.0;
    CHECK_THROWS_AS(load_fleet(write_temp_fleet(base)), Error);
  }
  SUBCASE("non-positive max speed") {
    base["robots"][0]["max_speed"] = 0.0;
    CHECK_THROWS_AS(load_fleet(write_temp_fleet(base)), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_fleet(fs::temp_directory_path() / "no_such_fleet.json"), Error);
  }
}
