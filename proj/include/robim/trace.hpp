#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "robim/detail/io.hpp"
#include "robim/model.hpp"

namespace robim {

enum class CarryOrientation { horizontal, sideways };

inline std::string to_string(CarryOrientation o) {
  return o == CarryOrientation::horizontal ? "horizontal" : "sideways";
}

inline CarryOrientation carry_orientation_from(const std::string& s) {
  if (s == "horizontal") return CarryOrientation::horizontal;
  if (s == "sideways") return CarryOrientation::sideways;
  fail(ErrorKind::parse, "unknown carry orientation '" + s + "'");
}

struct CarriedState {
  std::string element_id;
  CarryOrientation orientation = CarryOrientation::horizontal;
  Pose object_pose;  // world frame
};

struct TraceTick {
  double t = 0.0;
  Pose robot;
  std::string arm_pose;
  std::optional<CarriedState> carried;
  std::vector<std::pair<std::string, Pose>> agents;  // stable order
  bool worker_in_path = false;
};

// Event kinds: action_start, action_end, attach, detach, reorient, install,
// plan_failed.
struct TraceEvent {
  double t = 0.0;
  std::string kind;
  std::string plan_id;  // target element id
  std::string action;
  Json data = Json::object();
};

struct Trace {
  double dt = 0.1;
  std::string robot_id;
  std::vector<TraceTick> ticks;
  std::vector<TraceEvent> events;

  std::vector<std::string> agent_ids() const {
    std::vector<std::string> ids;
    if (!ticks.empty()) {
      for (const auto& [id, _] : ticks.front().agents) ids.push_back(id);
    }
    return ids;
  }

  std::size_t count_events(const std::string& kind) const {
    std::size_t n = 0;
    for (const auto& e : events)
      if (e.kind == kind) ++n;
    return n;
  }
};

namespace detail {

inline Json tick_to_json(const TraceTick& tick) {
  Json j;
  j["type"] = "tick";
  j["t"] = tick.t;
  j["robot"] = pose_to_json(tick.robot);
  j["arm"] = tick.arm_pose;
  if (tick.carried) {
    Json c;
    c["element"] = tick.carried->element_id;
    c["orientation"] = to_string(tick.carried->orientation);
    c["pose"] = pose_to_json(tick.carried->object_pose);
    j["carried"] = c;
  } else {
    j["carried"] = nullptr;
  }
  Json agents = Json::object();
  for (const auto& [id, pose] : tick.agents) agents[id] = pose_to_json(pose);
  j["agents"] = agents;
  if (tick.worker_in_path) j["worker_in_path"] = true;
  return j;
}

inline Json event_to_json(const TraceEvent& e) {
  Json j;
  j["type"] = "event";
  j["t"] = e.t;
  j["kind"] = e.kind;
  j["plan"] = e.plan_id;
  j["action"] = e.action;
  j["data"] = e.data;
  return j;
}

}  // namespace detail

// Line-delimited JSON: one header line, then tick and event records in time
// order. Byte-deterministic for a given trace.
inline void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::string out;
  Json header;
  header["type"] = "header";
  header["dt"] = trace.dt;
  header["robot_id"] = trace.robot_id;
  out += header.dump() + "\n";

  std::size_t ei = 0;
  for (const TraceTick& tick : trace.ticks) {
    while (ei < trace.events.size() && trace.events[ei].t <= tick.t)
      out += detail::event_to_json(trace.events[ei++]).dump() + "\n";
    out += detail::tick_to_json(tick).dump() + "\n";
  }
  while (ei < trace.events.size())
    out += detail::event_to_json(trace.events[ei++]).dump() + "\n";
  detail::write_file(path, out);
}

inline Trace read_trace(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  Trace trace;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::parse, path.string() + ": malformed trace line");
    const std::string type = j.value("type", "");
    if (type == "header") {
      trace.dt = j.value("dt", 0.1);
      trace.robot_id = j.value("robot_id", "");
    } else if (type == "tick") {
      TraceTick tick;
      tick.t = j["t"];
      tick.robot = detail::pose_from_json(j["robot"]);
      tick.arm_pose = j.value("arm", "");
      if (!j["carried"].is_null()) {
        CarriedState c;
        c.element_id = j["carried"]["element"];
        c.orientation = carry_orientation_from(j["carried"]["orientation"]);
        c.object_pose = detail::pose_from_json(j["carried"]["pose"]);
        tick.carried = c;
      }
      for (const auto& [id, pj] : j["agents"].items())
        tick.agents.emplace_back(id, detail::pose_from_json(pj));
      tick.worker_in_path = j.value("worker_in_path", false);
      trace.ticks.push_back(std::move(tick));
    } else if (type == "event") {
      TraceEvent e;
      e.t = j["t"];
      e.kind = j["kind"];
      e.plan_id = j.value("plan", "");
      e.action = j.value("action", "");
      e.data = j.value("data", Json::object());
      trace.events.push_back(std::move(e));
    } else {
      fail(ErrorKind::parse, path.string() + ": unknown trace record type '" + type + "'");
    }
  }
  return trace;
}

}  // namespace robim
