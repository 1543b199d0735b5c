#pragma once

#include <cstdint>
#include <vector>

#include "robim/error.hpp"
#include "robim/pose.hpp"

namespace robim {

enum class Cell : std::uint8_t { free = 0, occupied = 1, unknown = 2 };

// Row-major 2D occupancy raster. The origin pose is the world position of
// the outer corner of cell (0, 0); cells index as (col, row) = (x, y).
struct OccupancyGrid {
  double resolution = 0.05;  // meters per cell
  Pose origin;               // world pose of cell (0,0) corner
  int width = 0;             // columns
  int height = 0;            // rows
  std::vector<Cell> cells;

  void validate() const {
    if (!(resolution > 0.0)) fail(ErrorKind::invariant, "grid resolution must be positive");
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != cells.size())
      fail(ErrorKind::invariant, "grid cell count does not match width*height");
  }

  bool in_bounds(int col, int row) const {
    return col >= 0 && col < width && row >= 0 && row < height;
  }

  Cell at(int col, int row) const { return cells[static_cast<std::size_t>(row) * width + col]; }
  Cell& at(int col, int row) { return cells[static_cast<std::size_t>(row) * width + col]; }

  // World coordinates of a cell center.
  double cell_x(int col) const { return origin.x + (col + 0.5) * resolution; }
  double cell_y(int row) const { return origin.y + (row + 0.5) * resolution; }

  int col_of(double x) const { return static_cast<int>(std::floor((x - origin.x) / resolution)); }
  int row_of(double y) const { return static_cast<int>(std::floor((y - origin.y) / resolution)); }

  std::size_t occupied_count() const {
    std::size_t n = 0;
    for (Cell c : cells)
      if (c == Cell::occupied) ++n;
    return n;
  }

  bool operator==(const OccupancyGrid&) const = default;
};

}  // namespace robim
