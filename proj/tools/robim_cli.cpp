#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "robim/robim.hpp"

namespace fs = std::filesystem;
using robim::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUnsatisfied = 2;
constexpr int kExitPlanFailure = 3;

struct RunConfig {
  std::string project_path;
  std::vector<std::string> kb_paths;
  std::string fleet_path;
  std::string agents_path;
  std::string sim_params_path;
  std::string out_dir = "run";
  std::string trace_path;  // report subcommand input
  double resolution = 0.05;
  double dt = -1.0;  // <0: take from sim params file / default
  bool force = false;
  bool abort_on_failure = false;
};

struct Loaded {
  robim::Project project;
  robim::KnowledgeBase kb;
  std::vector<std::string> warnings;
};

Loaded load_inputs(const RunConfig& cfg) {
  Loaded in;
  in.project = robim::load_project(cfg.project_path, &in.warnings);
  std::vector<fs::path> kb_paths(cfg.kb_paths.begin(), cfg.kb_paths.end());
  in.kb = robim::load_kb(kb_paths);
  for (const std::string& w : in.warnings) std::cerr << "warning: " << w << "\n";
  return in;
}

robim::SimParams load_sim_params(const RunConfig& cfg) {
  robim::SimParams params;
  if (!cfg.sim_params_path.empty()) params = robim::SimParams::load(cfg.sim_params_path);
  if (cfg.dt > 0.0) params.dt = cfg.dt;
  if (cfg.abort_on_failure) params.abort_on_failure = true;
  return params;
}

void print_requirements(const robim::SatisfactionReport& report) {
  if (report.requirements.empty()) {
    std::cout << "no modeling requirements derived\n";
    return;
  }
  std::printf("%-28s %-36s %-10s %-10s\n", "task", "action", "skill", "status");
  for (const auto& r : report.requirements) {
    std::printf("%-28s %-36s %-10s %-10s\n", r.task_id.c_str(), r.action_name.c_str(),
                r.skill_id.c_str(), r.satisfied ? "satisfied" : "MISSING");
    std::printf("    needs: %s (input '%s')\n", r.requirement.describe().c_str(),
                r.missing_arg.c_str());
  }
  std::printf("%zu requirement(s), %zu unsatisfied\n", report.requirements.size(),
              report.unsatisfied_count());
}

struct RunManifest {
  Json j;
  RunManifest(const std::string& subcommand, const RunConfig& cfg) {
    j["subcommand"] = subcommand;
    j["resolution"] = cfg.resolution;
    j["forced"] = cfg.force;
    j["files"] = Json::array();
  }
  void add(const std::string& name, const std::string& sha) {
    j["files"].push_back(Json{{"name", name}, {"sha256", sha}});
  }
  void add(const robim::WorldFileManifest& m, const std::string& prefix = "") {
    for (const auto& f : m.files) add(prefix + f.name, f.sha256);
  }
  void add_file(const fs::path& run_dir, const std::string& rel) {
    add(rel, robim::detail::Sha256::hex(robim::detail::read_file(run_dir / rel)));
  }
  void write(const fs::path& run_dir) {
    robim::detail::write_file(run_dir / "manifest.json", j.dump(2) + "\n");
  }
};

// Derives requirements and prints them; sets `pass`.
robim::SatisfactionReport derive_report(const Loaded& in) {
  auto reqs = robim::derive_requirements(in.project, in.kb);
  auto report = robim::check_satisfaction(in.project, std::move(reqs));
  robim::validate_site_params(in.project.site_params, in.project);
  return report;
}

int cmd_derive(const RunConfig& cfg) {
  Loaded in = load_inputs(cfg);
  auto report = derive_report(in);
  print_requirements(report);
  fs::create_directories(cfg.out_dir);
  const std::string text = robim::requirements_to_json(report.requirements).dump(2) + "\n";
  robim::detail::write_file(fs::path(cfg.out_dir) / "requirements.json", text);
  return report.pass ? kExitOk : kExitUnsatisfied;
}

int cmd_validate(const RunConfig& cfg) {
  Loaded in = load_inputs(cfg);
  in.project.validate();
  in.kb.validate();
  robim::validate_site_params(in.project.site_params, in.project);
  if (!cfg.fleet_path.empty()) {
    for (const auto& robot : robim::load_fleet(cfg.fleet_path)) robot.validate();
  }
  std::cout << "validation passed: " << in.project.elements.size() << " element(s), "
            << in.project.tasks.size() << " task(s)\n";
  return kExitOk;
}

// Returns the gate exit code (0 to proceed) and records the decision.
int gate_on_requirements(const Loaded& in, const RunConfig& cfg, RunManifest& manifest) {
  auto report = derive_report(in);
  manifest.j["requirements_unsatisfied"] = report.unsatisfied_count();
  if (!report.pass) {
    if (!cfg.force) {
      std::cerr << "refusing to proceed: " << report.unsatisfied_count()
                << " unsatisfied modeling requirement(s); rerun `derive` for the list or pass "
                   "--force\n";
      return kExitUnsatisfied;
    }
    std::cerr << "warning: proceeding past " << report.unsatisfied_count()
              << " unsatisfied requirement(s) (--force)\n";
  }
  return kExitOk;
}

robim::SimWorld make_world(const Loaded& in, const RunConfig& cfg,
                           std::vector<std::string>* warnings) {
  robim::GridParams grid_params;
  grid_params.resolution = cfg.resolution;
  return robim::build_sim_world(in.project, in.kb, grid_params, warnings);
}

int cmd_build_world(const RunConfig& cfg) {
  Loaded in = load_inputs(cfg);
  RunManifest manifest("build-world", cfg);
  if (int rc = gate_on_requirements(in, cfg, manifest); rc != kExitOk) return rc;

  std::vector<std::string> warnings;
  robim::SimWorld world = make_world(in, cfg, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const fs::path run_dir = cfg.out_dir;
  manifest.add(robim::emit_sdf(world, run_dir / "world"), "world/");
  manifest.add(robim::write_map_pgm(world.grid, run_dir / "map.pgm"));
  manifest.write(run_dir);
  std::cout << "world artifacts written to " << run_dir.string() << " ("
            << manifest.j["files"].size() << " files + manifest)\n";
  return kExitOk;
}

int simulate_impl(const RunConfig& cfg, bool emit_world_artifacts) {
  Loaded in = load_inputs(cfg);
  RunManifest manifest(emit_world_artifacts ? "pipeline" : "simulate", cfg);
  if (int rc = gate_on_requirements(in, cfg, manifest); rc != kExitOk) return rc;

  std::vector<std::string> warnings;
  robim::SimWorld world = make_world(in, cfg, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";

  const fs::path run_dir = cfg.out_dir;
  if (emit_world_artifacts) {
    manifest.add(robim::emit_sdf(world, run_dir / "world"), "world/");
    manifest.add(robim::write_map_pgm(world.grid, run_dir / "map.pgm"));
  }

  if (cfg.fleet_path.empty()) {
    std::cerr << "error: --fleet is required to simulate\n";
    return kExitInputError;
  }
  const auto fleet = robim::load_fleet(cfg.fleet_path);
  std::vector<robim::AgentScript> agents;
  if (!cfg.agents_path.empty()) agents = robim::load_agents(cfg.agents_path);
  const robim::SimParams params = load_sim_params(cfg);

  std::vector<robim::ActionPlan> plans;
  for (const robim::ScheduleTask& task : in.project.tasks) {
    if (!task.robotization) continue;
    const auto& spec = robim::lookup_spec(in.kb, *task.task_spec_id);
    const auto resolved = robim::resolve_skills(in.kb, spec);
    const auto matched =
        robim::match_robots(fleet, resolved.required_capabilities, in.project.site_params);
    if (matched.empty()) {
      std::cerr << "error: no robot in the fleet satisfies task '" << task.id
                << "' (capabilities + site limits)\n";
      return kExitPlanFailure;
    }
    auto task_plans = robim::compile_plan(task, spec, world, matched.front(), in.kb, params);
    plans.insert(plans.end(), std::make_move_iterator(task_plans.begin()),
                 std::make_move_iterator(task_plans.end()));
  }
  if (plans.empty()) {
    std::cerr << "warning: no robotized tasks in the schedule; nothing to simulate\n";
  }
  const robim::RobotDescriptor& robot =
      plans.empty() ? fleet.front()
                    : *std::find_if(fleet.begin(), fleet.end(), [&](const auto& r) {
                        return r.id == plans.front().robot_id;
                      });

  robim::SimOutcome outcome = robim::run(world, robot, plans, agents, params);
  robim::write_trace(outcome.trace, run_dir / "trace.jsonl");
  manifest.add_file(run_dir, "trace.jsonl");

  auto report = robim::emit_report(outcome.trace, &outcome.final_grid, run_dir / "report");
  for (const std::string& f : report.files) manifest.add_file(run_dir, "report/" + f);

  manifest.j["installed"] = outcome.installed;
  manifest.j["failed_plans"] = outcome.failed_plans;
  manifest.write(run_dir);

  std::cout << outcome.installed.size() << " element(s) installed, "
            << outcome.failed_plans.size() << " plan(s) failed; run total "
            << report.summary["run_total_s"].dump() << " s\n";
  if (!outcome.failed_plans.empty()) {
    for (const auto& e : outcome.trace.events) {
      if (e.kind == "plan_failed")
        std::cerr << "plan '" << e.plan_id << "' failed during '" << e.action
                  << "': " << e.data.value("reason", "") << "\n";
    }
    return kExitPlanFailure;
  }
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  robim::Trace trace = robim::read_trace(cfg.trace_path);
  auto report = robim::emit_report(trace, nullptr, cfg.out_dir);
  std::cout << "report written to " << cfg.out_dir << " ("
            << report.files.size() << " files)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4D-model-driven robot construction simulation pipeline"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model_opts = [&](CLI::App* cmd, bool need_kb) {
    cmd->add_option("--project", cfg.project_path, "project manifest path")->required();
    auto* kb = cmd->add_option("--kb", cfg.kb_paths, "knowledge base file(s)");
    if (need_kb) kb->required();
  };
  auto add_out_opts = [&](CLI::App* cmd) {
    cmd->add_option("--out", cfg.out_dir, "run output directory");
  };
  auto add_world_opts = [&](CLI::App* cmd) {
    cmd->add_option("--resolution", cfg.resolution, "occupancy grid resolution (m/cell)");
    cmd->add_flag("--force", cfg.force, "proceed past unsatisfied modeling requirements");
  };
  auto add_sim_opts = [&](CLI::App* cmd) {
    cmd->add_option("--fleet", cfg.fleet_path, "fleet descriptor file");
    cmd->add_option("--agents", cfg.agents_path, "worker agent scripts file");
    cmd->add_option("--sim-params", cfg.sim_params_path, "simulation parameter config file");
    cmd->add_option("--dt", cfg.dt, "tick length in seconds (overrides config)");
    cmd->add_flag("--abort-on-failure", cfg.abort_on_failure, "stop at the first failed plan");
  };

  auto* derive = app.add_subcommand("derive", "derive and check 4D modeling requirements");
  add_model_opts(derive, true);
  add_out_opts(derive);

  auto* validate = app.add_subcommand("validate", "validate project, KB, and fleet inputs");
  add_model_opts(validate, true);
  validate->add_option("--fleet", cfg.fleet_path, "fleet descriptor file");

  auto* build_world = app.add_subcommand("build-world", "emit SDF world and occupancy map");
  add_model_opts(build_world, true);
  add_out_opts(build_world);
  add_world_opts(build_world);

  auto* simulate = app.add_subcommand("simulate", "compile plans and run the simulation");
  add_model_opts(simulate, true);
  add_out_opts(simulate);
  add_world_opts(simulate);
  add_sim_opts(simulate);

  auto* report = app.add_subcommand("report", "rebuild analytics from an existing trace");
  report->add_option("--trace", cfg.trace_path, "trace.jsonl path")->required();
  add_out_opts(report);

  auto* pipeline = app.add_subcommand("pipeline", "derive, build world, simulate, and report");
  add_model_opts(pipeline, true);
  add_out_opts(pipeline);
  add_world_opts(pipeline);
  add_sim_opts(pipeline);

  CLI11_PARSE(app, argc, argv);

  try {
    if (derive->parsed()) return cmd_derive(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    if (build_world->parsed()) return cmd_build_world(cfg);
    if (simulate->parsed()) return simulate_impl(cfg, false);
    if (report->parsed()) return cmd_report(cfg);
    if (pipeline->parsed()) return simulate_impl(cfg, true);
  } catch (const robim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == robim::ErrorKind::planning ? kExitPlanFailure : kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
