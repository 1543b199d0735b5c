#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "robim/pose.hpp"

namespace robim {

struct Vec2 {
  double x = 0.0, y = 0.0;
  bool operator==(const Vec2&) const = default;
};

using Polygon = std::vector<Vec2>;  // convex, counter-clockwise

inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain. Returns a CCW convex hull; collinear points dropped.
inline Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(a);
}

// Point strictly inside or on the boundary of a convex CCW polygon.
inline bool point_in_convex(const Polygon& poly, const Vec2& p) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if (cross2(a, b, p) < 0) return false;
  }
  return true;
}

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

// Positive-area overlap between a convex CCW polygon and an axis-aligned
// rectangle (separating axis with strict inequalities, so shapes that only
// touch along an edge do not count as overlapping).
inline bool convex_rect_overlap(const Polygon& poly, const Rect& r) {
  if (poly.size() < 3) return false;
  double pxmin = poly[0].x, pxmax = poly[0].x, pymin = poly[0].y, pymax = poly[0].y;
  for (const Vec2& v : poly) {
    pxmin = std::min(pxmin, v.x);
    pxmax = std::max(pxmax, v.x);
    pymin = std::min(pymin, v.y);
    pymax = std::max(pymax, v.y);
  }
  if (pxmax <= r.xmin || pxmin >= r.xmax || pymax <= r.ymin || pymin >= r.ymax) {
    return false;
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double nx = -(b.y - a.y);
    const double ny = b.x - a.x;
    // Rect corner most positive along the inward normal (nx, ny).
    const double cx = nx > 0 ? r.xmax : r.xmin;
    const double cy = ny > 0 ? r.ymax : r.ymin;
    if (nx * (cx - a.x) + ny * (cy - a.y) <= 0) return false;
  }
  return true;
}

}  // namespace robim
