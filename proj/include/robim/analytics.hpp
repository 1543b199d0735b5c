#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robim/detail/io.hpp"
#include "robim/grid.hpp"
#include "robim/trace.hpp"
#include "robim/worldgen.hpp"

namespace robim {

inline constexpr const char* kRobotAgentId = "robot";

struct SeparationSeries {
  std::string agent_a;
  std::string agent_b;
  std::vector<std::pair<double, double>> samples;  // (t, distance)
  double min_distance = 0.0;
  double min_time = 0.0;
};

namespace detail {

inline std::optional<Pose> agent_pose_in_tick(const TraceTick& tick, const std::string& id) {
  if (id == kRobotAgentId) return tick.robot;
  for (const auto& [aid, pose] : tick.agents)
    if (aid == id) return pose;
  return std::nullopt;
}

}  // namespace detail

// Euclidean XY center-to-center distance at every shared tick. "robot" names
// the robot itself.
inline SeparationSeries separation(const Trace& trace, const std::string& a,
                                   const std::string& b) {
  SeparationSeries series;
  series.agent_a = a;
  series.agent_b = b;
  for (const TraceTick& tick : trace.ticks) {
    const auto pa = detail::agent_pose_in_tick(tick, a);
    const auto pb = detail::agent_pose_in_tick(tick, b);
    if (!pa || !pb) {
      fail(ErrorKind::reference, "agent '" + std::string(!pa ? a : b) + "' not present in trace");
    }
    series.samples.emplace_back(tick.t, pa->distance_xy(*pb));
  }
  if (series.samples.empty())
    fail(ErrorKind::invariant, "trace has no ticks to compute separation over");
  series.min_distance = series.samples.front().second;
  series.min_time = series.samples.front().first;
  for (const auto& [t, d] : series.samples) {
    if (d < series.min_distance) {
      series.min_distance = d;
      series.min_time = t;
    }
  }
  return series;
}

struct ActionDuration {
  std::string action_name;
  double start = 0.0;
  double end = 0.0;
  double duration() const { return end - start; }
};

struct PlanDurations {
  std::string plan_id;
  std::vector<ActionDuration> actions;
  double total = 0.0;  // sum of action durations
};

struct DurationReport {
  std::vector<PlanDurations> plans;
  double run_total = 0.0;  // sum of plan totals (sequential execution)
};

inline DurationReport durations(const Trace& trace) {
  DurationReport report;
  std::map<std::string, std::size_t> plan_index;
  std::optional<std::pair<std::string, TraceEvent>> open_action;  // (plan, start event)
  for (const TraceEvent& e : trace.events) {
    if (e.kind == "action_start") {
      if (open_action)
        fail(ErrorKind::invariant, "malformed trace: nested action_start at t=" + std::to_string(e.t));
      open_action = {e.plan_id, e};
    } else if (e.kind == "action_end") {
      if (!open_action || open_action->first != e.plan_id || open_action->second.action != e.action)
        fail(ErrorKind::invariant, "malformed trace: unmatched action_end at t=" + std::to_string(e.t));
      auto it = plan_index.find(e.plan_id);
      if (it == plan_index.end()) {
        it = plan_index.emplace(e.plan_id, report.plans.size()).first;
        report.plans.push_back({e.plan_id, {}, 0.0});
      }
      PlanDurations& plan = report.plans[it->second];
      plan.actions.push_back({e.action, open_action->second.t, e.t});
      open_action.reset();
    } else if (e.kind == "plan_failed") {
      open_action.reset();  // terminal failure closes the running action
    }
  }
  if (open_action)
    fail(ErrorKind::invariant, "malformed trace: action_start without action_end");
  for (PlanDurations& plan : report.plans) {
    plan.total = 0.0;
    for (const ActionDuration& a : plan.actions) plan.total += a.duration();
    report.run_total += plan.total;
  }
  return report;
}

// --- deterministic SVG / summary emission ---

namespace detail {

struct SvgCanvas {
  std::string body;
  double xmin, ymin, xmax, ymax;
  double scale = 40.0;  // px per meter

  double px(double x) const { return (x - xmin) * scale; }
  double py(double y) const { return (ymax - y) * scale; }  // y up in world, down in SVG

  void rect(double x0, double y0, double x1, double y1, const std::string& fill) {
    body += "  <rect x=\"" + fmt_num(px(x0)) + "\" y=\"" + fmt_num(py(y1)) + "\" width=\"" +
            fmt_num((x1 - x0) * scale) + "\" height=\"" + fmt_num((y1 - y0) * scale) +
            "\" fill=\"" + fill + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    body += "  <polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) body += fmt_num(px(x)) + "," + fmt_num(py(y)) + " ";
    body += "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& fill) {
    body += "  <text x=\"" + fmt_num(px(x)) + "\" y=\"" + fmt_num(py(y)) +
            "\" font-size=\"12\" fill=\"" + fill + "\">" + s + "</text>\n";
  }

  std::string finish() const {
    const double w = (xmax - xmin) * scale, h = (ymax - ymin) * scale;
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_num(w) + "\" height=\"" +
           fmt_num(h) + "\" viewBox=\"0 0 " + fmt_num(w) + " " + fmt_num(h) + "\">\n" + body +
           "</svg>\n";
  }
};

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"#d62728", "#1f77b4", "#2ca02c",
                                                  "#9467bd", "#ff7f0e", "#8c564b"};
  return colors;
}

}  // namespace detail

struct ReportFiles {
  std::vector<std::string> files;
  Json summary;
};

// Emits the trajectory overlay, the per-pair separation charts, and a
// structured summary. Output bytes are deterministic for a given trace.
inline ReportFiles emit_report(const Trace& trace, const OccupancyGrid* grid,
                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ReportFiles out;
  const auto agent_ids = trace.agent_ids();

  // Trajectory overlay.
  detail::SvgCanvas canvas{};
  if (grid && grid->width > 1) {
    canvas.xmin = grid->origin.x;
    canvas.ymin = grid->origin.y;
    canvas.xmax = grid->origin.x + grid->width * grid->resolution;
    canvas.ymax = grid->origin.y + grid->height * grid->resolution;
  } else {
    canvas.xmin = canvas.ymin = 1e18;
    canvas.xmax = canvas.ymax = -1e18;
    for (const TraceTick& tick : trace.ticks) {
      auto extend = [&](const Pose& p) {
        canvas.xmin = std::min(canvas.xmin, p.x - 1);
        canvas.xmax = std::max(canvas.xmax, p.x + 1);
        canvas.ymin = std::min(canvas.ymin, p.y - 1);
        canvas.ymax = std::max(canvas.ymax, p.y + 1);
      };
      extend(tick.robot);
      for (const auto& [_, p] : tick.agents) extend(p);
    }
  }
  canvas.rect(canvas.xmin, canvas.ymin, canvas.xmax, canvas.ymax, "#ffffff");
  if (grid) {
    for (int r = 0; r < grid->height; ++r) {
      int run_start = -1;
      for (int c = 0; c <= grid->width; ++c) {
        const bool occ = c < grid->width && grid->at(c, r) == Cell::occupied;
        if (occ && run_start < 0) run_start = c;
        if (!occ && run_start >= 0) {
          canvas.rect(grid->origin.x + run_start * grid->resolution,
                      grid->origin.y + r * grid->resolution,
                      grid->origin.x + c * grid->resolution,
                      grid->origin.y + (r + 1) * grid->resolution, "#444444");
          run_start = -1;
        }
      }
    }
  }
  std::vector<std::pair<double, double>> robot_pts;
  for (const TraceTick& tick : trace.ticks) robot_pts.emplace_back(tick.robot.x, tick.robot.y);
  canvas.polyline(robot_pts, detail::palette()[0]);
  for (std::size_t i = 0; i < agent_ids.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (const TraceTick& tick : trace.ticks) {
      auto p = detail::agent_pose_in_tick(tick, agent_ids[i]);
      if (p) pts.emplace_back(p->x, p->y);
    }
    canvas.polyline(pts, detail::palette()[(i + 1) % detail::palette().size()]);
  }
  detail::write_file(out_dir / "trajectories.svg", canvas.finish());
  out.files.push_back("trajectories.svg");

  // Separation chart: robot vs each agent.
  Json sep_summary = Json::array();
  std::string sep_svg;
  if (agent_ids.empty()) {
    sep_svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"60\">\n"
              "  <text x=\"10\" y=\"30\" font-size=\"12\">no worker agents in trace; "
              "separation analysis empty</text>\n</svg>\n";
  } else {
    const double t_end = trace.ticks.back().t;
    double d_max = 1.0;
    std::vector<SeparationSeries> all;
    for (const std::string& id : agent_ids) {
      all.push_back(separation(trace, kRobotAgentId, id));
      for (const auto& [_, d] : all.back().samples) d_max = std::max(d_max, d);
    }
    detail::SvgCanvas chart{};
    chart.xmin = 0;
    chart.xmax = std::max(t_end, 1.0);
    chart.ymin = 0;
    chart.ymax = d_max * 1.05;
    chart.scale = 1.0;
    // Rescale so time fits 720 px and distance 240 px.
    const double sx = 720.0 / (chart.xmax - chart.xmin);
    const double sy = 240.0 / (chart.ymax - chart.ymin);
    std::string body = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"280\">\n";
    for (std::size_t i = 0; i < all.size(); ++i) {
      body += "  <polyline fill=\"none\" stroke=\"" +
              detail::palette()[(i + 1) % detail::palette().size()] +
              "\" stroke-width=\"1\" points=\"";
      for (const auto& [t, d] : all[i].samples)
        body += detail::fmt_num(20.0 + t * sx) + "," + detail::fmt_num(260.0 - d * sy) + " ";
      body += "\"/>\n";
      body += "  <text x=\"24\" y=\"" + detail::fmt_num(16.0 + 14.0 * i) + "\" font-size=\"12\" fill=\"" +
              detail::palette()[(i + 1) % detail::palette().size()] + "\">robot vs " + agent_ids[i] +
              "</text>\n";
      Json s;
      s["pair"] = Json::array({kRobotAgentId, agent_ids[i]});
      s["min_distance_m"] = all[i].min_distance;
      s["min_time_s"] = all[i].min_time;
      sep_summary.push_back(std::move(s));
    }
    body += "</svg>\n";
    sep_svg = body;
  }
  detail::write_file(out_dir / "separation.svg", sep_svg);
  out.files.push_back("separation.svg");

  // Structured summary.
  Json summary;
  summary["install_count"] = trace.count_events("install");
  summary["failed_plans"] = trace.count_events("plan_failed");
  summary["reorient_events"] = trace.count_events("reorient");
  summary["separation"] = sep_summary;
  double min_worker = -1.0;
  for (const Json& s : sep_summary) {
    const double d = s["min_distance_m"];
    if (min_worker < 0 || d < min_worker) min_worker = d;
  }
  if (min_worker >= 0) summary["min_robot_worker_separation_m"] = min_worker;
  double min_carpenter = -1.0;
  for (const Json& s : sep_summary) {
    const std::string other = s["pair"][1];
    if (other.rfind("carpenter", 0) != 0) continue;
    const double d = s["min_distance_m"];
    if (min_carpenter < 0 || d < min_carpenter) min_carpenter = d;
  }
  if (min_carpenter >= 0) summary["min_robot_carpenter_separation_m"] = min_carpenter;
  // Sampling error bound on minima: one tick of relative motion.
  summary["separation_error_bound_m_note"] =
      "minima sampled at trace tick rate; error bound is relative speed * dt";

  const DurationReport dur = durations(trace);
  Json plans = Json::array();
  for (const PlanDurations& p : dur.plans) {
    Json pj;
    pj["plan"] = p.plan_id;
    pj["total_s"] = p.total;
    Json actions = Json::array();
    for (const ActionDuration& a : p.actions) {
      actions.push_back(Json{{"action", a.action_name}, {"duration_s", a.duration()}});
    }
    pj["actions"] = actions;
    plans.push_back(std::move(pj));
  }
  summary["plans"] = plans;
  summary["run_total_s"] = dur.run_total;

  std::size_t worker_in_path = 0;
  for (const TraceTick& tick : trace.ticks)
    if (tick.worker_in_path) ++worker_in_path;
  summary["worker_in_path_ticks"] = worker_in_path;

  detail::write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  out.files.push_back("summary.json");
  out.summary = summary;
  return out;
}

}  // namespace robim
