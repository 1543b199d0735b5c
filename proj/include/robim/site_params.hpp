#pragma once

#include <map>
#include <string>
#include <vector>

#include "robim/error.hpp"

namespace robim {

// Jobsite-specific restrictions and navigation parameters (flow A5).
struct SiteParams {
  double allowable_robot_footprint_radius_max = 0.6;  // meters
  double allowable_robot_weight_max = 120.0;          // kilograms
  double nav_speed_min = 0.2;                         // m/s (documented default)
  double nav_speed_max = 1.0;                         // m/s (documented default)
  std::vector<std::string> prohibited_zones;          // zone_marker element ids
  std::map<std::string, double> zone_speed_caps;      // zone id -> m/s

  void validate() const {
    if (!(nav_speed_min > 0.0) || !(nav_speed_min <= nav_speed_max))
      fail(ErrorKind::invariant,
           "nav speed bounds must satisfy 0 < min <= max (got min=" +
               std::to_string(nav_speed_min) + ", max=" + std::to_string(nav_speed_max) + ")");
    if (!(allowable_robot_footprint_radius_max > 0.0))
      fail(ErrorKind::invariant, "allowable robot footprint radius must be positive");
    if (!(allowable_robot_weight_max > 0.0))
      fail(ErrorKind::invariant, "allowable robot weight must be positive");
    for (const auto& [zone, cap] : zone_speed_caps) {
      if (!(cap > 0.0))
        fail(ErrorKind::invariant, "zone speed cap for '" + zone + "' must be positive");
    }
  }
};

}  // namespace robim
