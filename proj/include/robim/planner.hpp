#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "robim/grid.hpp"

namespace robim {

inline constexpr long double kSqrt2L = 1.41421356237309504880168872420969808L;

// Path cost as exact step counts: length = (straight + diag*sqrt(2)) * resolution.
struct PathCost {
  int straight = 0;
  int diagonal = 0;

  bool operator==(const PathCost&) const = default;

  double meters(double resolution) const {
    return (static_cast<long double>(straight) + static_cast<long double>(diagonal) * kSqrt2L) *
           resolution;
  }
};

struct GridPath {
  std::vector<std::pair<int, int>> cells;  // (col, row), start to goal
  PathCost cost;
  double length_m = 0.0;
};

// Boolean obstacle mask after inflating occupied cells by a metric radius
// (center-to-center distance). Unknown cells are treated as obstacles.
inline std::vector<std::uint8_t> inflate_grid(const OccupancyGrid& grid, double inflation_radius) {
  std::vector<std::uint8_t> blocked(grid.cells.size(), 0);
  const int rad_cells = static_cast<int>(std::floor(inflation_radius / grid.resolution + 1e-9));
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -rad_cells; dr <= rad_cells; ++dr) {
    for (int dc = -rad_cells; dc <= rad_cells; ++dc) {
      const double d = std::hypot(dc * grid.resolution, dr * grid.resolution);
      if (d <= inflation_radius + 1e-12) offsets.emplace_back(dc, dr);
    }
  }
  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      if (grid.at(c, r) == Cell::free) continue;
      for (const auto& [dc, dr] : offsets) {
        const int cc = c + dc, rr = r + dr;
        if (grid.in_bounds(cc, rr)) blocked[static_cast<std::size_t>(rr) * grid.width + cc] = 1;
      }
    }
  }
  return blocked;
}

// Distance from a cell center to the nearest occupied cell center, capped at
// `cap` meters. Exact within the cap (bounded window scan).
inline double clearance_at(const OccupancyGrid& grid, int col, int row, double cap) {
  const int rad = static_cast<int>(std::ceil(cap / grid.resolution)) + 1;
  double best = cap;
  for (int dr = -rad; dr <= rad; ++dr) {
    for (int dc = -rad; dc <= rad; ++dc) {
      const int c = col + dc, r = row + dr;
      if (!grid.in_bounds(c, r)) continue;
      if (grid.at(c, r) != Cell::occupied) continue;
      best = std::min(best, std::hypot(dc * grid.resolution, dr * grid.resolution));
    }
  }
  return best;
}

namespace detail {

struct AStarNode {
  long double f;
  long double h;
  int row;
  int col;

  bool operator>(const AStarNode& o) const {
    return std::tie(f, h, row, col) > std::tie(o.f, o.h, o.row, o.col);
  }
};

inline long double octile_h(int c0, int r0, int c1, int r1) {
  const int dx = std::abs(c0 - c1), dy = std::abs(r0 - r1);
  const int diag = std::min(dx, dy);
  return static_cast<long double>(dx + dy - 2 * diag) + static_cast<long double>(diag) * kSqrt2L;
}

}  // namespace detail

// Minimal-cost 8-connected path on the inflated grid. Axial steps cost 1 and
// diagonal steps sqrt(2) (in cells, scaled by resolution); diagonal moves are
// allowed only when both adjacent axial cells are free. Ties break on
// (f, h, row, col), so the result is fully deterministic.
inline GridPath plan_path(const OccupancyGrid& grid, const Pose& start, const Pose& goal,
                          double inflation_radius) {
  const auto blocked = inflate_grid(grid, inflation_radius);
  auto is_blocked = [&](int c, int r) {
    return blocked[static_cast<std::size_t>(r) * grid.width + c] != 0;
  };

  const int sc = grid.col_of(start.x), sr = grid.row_of(start.y);
  const int gc = grid.col_of(goal.x), gr = grid.row_of(goal.y);
  if (!grid.in_bounds(sc, sr) || is_blocked(sc, sr))
    fail(ErrorKind::planning, "path start is outside the map or inside an inflated obstacle");
  if (!grid.in_bounds(gc, gr) || is_blocked(gc, gr))
    fail(ErrorKind::planning, "path goal is outside the map or inside an inflated obstacle");

  const std::size_t n = grid.cells.size();
  std::vector<PathCost> g_cost(n);
  std::vector<std::uint8_t> closed(n, 0), opened(n, 0);
  std::vector<int> parent(n, -1);
  auto idx = [&](int c, int r) { return static_cast<std::size_t>(r) * grid.width + c; };
  auto g_val = [&](std::size_t i) {
    return static_cast<long double>(g_cost[i].straight) +
           static_cast<long double>(g_cost[i].diagonal) * kSqrt2L;
  };

  std::priority_queue<detail::AStarNode, std::vector<detail::AStarNode>, std::greater<>> open;
  g_cost[idx(sc, sr)] = {};
  opened[idx(sc, sr)] = 1;
  open.push({detail::octile_h(sc, sr, gc, gr), detail::octile_h(sc, sr, gc, gr), sr, sc});

  static const int dc8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dr8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  bool found = false;
  while (!open.empty()) {
    const auto node = open.top();
    open.pop();
    const std::size_t i = idx(node.col, node.row);
    if (closed[i]) continue;
    closed[i] = 1;
    if (node.col == gc && node.row == gr) {
      found = true;
      break;
    }
    for (int k = 0; k < 8; ++k) {
      const int nc = node.col + dc8[k], nr = node.row + dr8[k];
      if (!grid.in_bounds(nc, nr) || is_blocked(nc, nr)) continue;
      const bool diag = k >= 4;
      if (diag && (is_blocked(node.col, nr) || is_blocked(nc, node.row))) continue;
      const std::size_t j = idx(nc, nr);
      if (closed[j]) continue;
      PathCost cand = g_cost[i];
      (diag ? cand.diagonal : cand.straight) += 1;
      const long double cand_val = static_cast<long double>(cand.straight) +
                                   static_cast<long double>(cand.diagonal) * kSqrt2L;
      if (!opened[j] || cand_val < g_val(j)) {
        g_cost[j] = cand;
        parent[j] = static_cast<int>(i);
        opened[j] = 1;
        const long double h = detail::octile_h(nc, nr, gc, gr);
        open.push({cand_val + h, h, nr, nc});
      }
    }
  }
  if (!found) fail(ErrorKind::planning, "no path between start and goal");

  GridPath path;
  int cur = static_cast<int>(idx(gc, gr));
  while (cur >= 0) {
    path.cells.emplace_back(cur % grid.width, cur / grid.width);
    cur = parent[cur];
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = g_cost[idx(gc, gr)];
  path.length_m = path.cost.meters(grid.resolution);
  return path;
}

}  // namespace robim
