#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace robim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = fs::temp_directory_path() / ("cli_out_" + std::to_string(counter) + ".txt");
  const fs::path err = fs::temp_directory_path() / ("cli_err_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = detail::read_file(out);
  r.err = detail::read_file(err);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

std::string common_args(const std::string& project, const fs::path& out) {
  return "--project " + helpers::scenario(project) + " --kb " +
         helpers::assets("kb/default_kb.json") + " --out " + out.string();
}

}  // namespace

TEST_CASE("derive exits 0 when the model satisfies all requirements") {
  const fs::path out = fresh_dir("cli_derive_ok");
  const CliResult r = run_cli("derive " + common_args("project_case1.json", out));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("no modeling requirements derived") != std::string::npos);
  CHECK(r.out.find("MISSING") == std::string::npos);
  CHECK(fs::exists(out / "requirements.json"));
}

TEST_CASE("derive exits 2 and lists the gaps for an unaugmented model") {
  const fs::path out = fresh_dir("cli_derive_gap");
  const CliResult r = run_cli("derive " + common_args("project_unaugmented.json", out));
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("MISSING") != std::string::npos);
  CHECK(r.out.find("frame_material_storage") != std::string::npos);
  CHECK(r.out.find("pick_point") != std::string::npos);
  CHECK(r.out.find("2 unsatisfied") != std::string::npos);

  const Json reqs = Json::parse(detail::read_file(out / "requirements.json"));
  CHECK(reqs.size() == 2);
}

TEST_CASE("missing input files exit 1 and name the path") {
  const CliResult r = run_cli("derive --project " + helpers::scenario("project_case1.json") +
                              " --kb /nonexistent/kb.json");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("/nonexistent/kb.json") != std::string::npos);
}

TEST_CASE("validate accepts the bundled inputs") {
  const CliResult r = run_cli("validate --project " + helpers::scenario("project_case1.json") +
                              " --kb " + helpers::assets("kb/default_kb.json") + " --fleet " +
                              helpers::assets("fleet/husky_ur5.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("validation passed") != std::string::npos);
}

TEST_CASE("build-world refuses an unsatisfied model and writes nothing") {
  const fs::path out = fresh_dir("cli_world_refused");
  const CliResult r = run_cli("build-world " + common_args("project_unaugmented.json", out));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("refusing to proceed") != std::string::npos);
  CHECK(r.err.find("--force") != std::string::npos);
  CHECK(!fs::exists(out / "manifest.json"));
  CHECK(!fs::exists(out / "map.pgm"));
}

TEST_CASE("build-world --force proceeds and records the override") {
  // Strip the pick points so exactly one requirement is unsatisfied while the
  // world itself stays buildable.
  Json project = Json::parse(detail::read_file(helpers::scenario("project_case1.json")));
  for (Json& e : project["elements"]) {
    e.erase("local_points");
    if (e.contains("mesh")) e["mesh"] = helpers::scenario(e["mesh"].get<std::string>());
  }
  const fs::path proj = fs::temp_directory_path() / "project_no_pick_points.json";
  std::ofstream(proj) << project.dump(2);

  const fs::path out = fresh_dir("cli_world_forced");
  const CliResult r = run_cli("build-world --force --project " + proj.string() + " --kb " +
                              helpers::assets("kb/default_kb.json") + " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("proceeding past 1 unsatisfied") != std::string::npos);
  CHECK(fs::exists(out / "world" / "world.sdf"));
  CHECK(fs::exists(out / "map.pgm"));

  const Json manifest = Json::parse(detail::read_file(out / "manifest.json"));
  CHECK(manifest["subcommand"] == "build-world");
  CHECK(manifest["forced"] == true);
  CHECK(manifest["requirements_unsatisfied"] == 1);
  CHECK(!manifest["files"].empty());
}

TEST_CASE("--force cannot mask a world object missing from the model") {
  // The unaugmented project lacks the storage element entirely; the world
  // cannot be assembled, force or not.
  const fs::path out = fresh_dir("cli_world_forced_missing");
  const CliResult r =
      run_cli("build-world --force " + common_args("project_unaugmented.json", out));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("frame_material_storage") != std::string::npos);
  CHECK(!fs::exists(out / "map.pgm"));
}

TEST_CASE("build-world honors a custom grid resolution") {
  const fs::path out = fresh_dir("cli_world_res");
  const CliResult r =
      run_cli("build-world --resolution 0.1 " + common_args("project_case1.json", out));
  CHECK(r.exit_code == 0);
  const Json manifest = Json::parse(detail::read_file(out / "manifest.json"));
  CHECK(manifest["resolution"] == 0.1);
  const Json map_meta = Json::parse(detail::read_file(out / "map.json"));
  CHECK(map_meta["resolution"] == 0.1);
}

TEST_CASE("simulate requires a fleet") {
  const fs::path out = fresh_dir("cli_sim_nofleet");
  const CliResult r = run_cli("simulate " + common_args("project_case1.json", out));
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("--fleet") != std::string::npos);
}

TEST_CASE("pipeline produces the full artifact set") {
  const fs::path out = fresh_dir("cli_pipeline");
  const CliResult r = run_cli(
      "pipeline " + common_args("project_widened.json", out) + " --fleet " +
      helpers::assets("fleet/husky_ur5.json") + " --sim-params " +
      helpers::scenario("sim_params_widened.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("9 element(s) installed, 0 plan(s) failed") != std::string::npos);

  for (const char* rel : {"world/world.sdf", "map.pgm", "map.json", "trace.jsonl",
                          "report/trajectories.svg", "report/separation.svg",
                          "report/summary.json", "manifest.json"})
    CHECK(fs::exists(out / rel));

  const Json summary = Json::parse(detail::read_file(out / "report" / "summary.json"));
  CHECK(summary["install_count"] == 9);
  CHECK(summary["failed_plans"] == 0);
  CHECK(summary["reorient_events"] == 0);

  const Json manifest = Json::parse(detail::read_file(out / "manifest.json"));
  CHECK(manifest["subcommand"] == "pipeline");
  CHECK(manifest["installed"].size() == 9);
  // Every manifest entry carries a content hash.
  for (const Json& f : manifest["files"]) {
    CHECK(f["sha256"].get<std::string>().size() == 64);
  }

  SUBCASE("report rebuilds analytics from the emitted trace") {
    const fs::path rep = fresh_dir("cli_report");
    const CliResult rr = run_cli("report --trace " + (out / "trace.jsonl").string() + " --out " +
                                 rep.string());
    CHECK(rr.exit_code == 0);
    CHECK(fs::exists(rep / "summary.json"));
    const Json again = Json::parse(detail::read_file(rep / "summary.json"));
    CHECK(again["install_count"] == 9);
    CHECK(again["run_total_s"] == summary["run_total_s"]);
  }
}

TEST_CASE("an unreachable goal exits 3 naming the failing action") {
  // Same scenario with the storage area buried under a slab, so the first
  // navigation goal is unreachable.
  Json project = Json::parse(detail::read_file(helpers::scenario("project_case1.json")));
  for (Json& e : project["elements"]) {
    if (e.contains("mesh"))
      e["mesh"] = helpers::scenario(e["mesh"].get<std::string>());
  }
  project["elements"].push_back(Json{{"id", "slab"},
                                     {"name", "slab"},
                                     {"category", "site_object"},
                                     {"pose", Json::array({4.25, 3.5, 1.0, 0, 0, 0})},
                                     {"box", Json::array({5.0, 4.0, 2.0})}});
  const fs::path proj = fs::temp_directory_path() / "project_blocked.json";
  std::ofstream(proj) << project.dump(2);

  const fs::path out = fresh_dir("cli_blocked");
  const CliResult r = run_cli(
      "simulate --project " + proj.string() + " --kb " + helpers::assets("kb/default_kb.json") +
      " --out " + out.string() + " --fleet " + helpers::assets("fleet/husky_ur5.json") +
      " --sim-params " + helpers::scenario("sim_params_case1.json") + " --abort-on-failure");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("plan 'frame_0' failed during 'navigate to frame pick up location'") !=
        std::string::npos);
  // The trace and manifest still land on disk for postmortem analysis.
  CHECK(fs::exists(out / "trace.jsonl"));
  const Json manifest = Json::parse(detail::read_file(out / "manifest.json"));
  CHECK(manifest["failed_plans"] == Json::array({"frame_0"}));
}
