#pragma once

#include <array>
#include <cmath>

#include "robim/error.hpp"

namespace robim {

constexpr double kPi = 3.14159265358979323846;

// Normalizes an angle to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

// XYZRPY world pose. Angles are kept normalized to (-pi, pi].
struct Pose {
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;

  bool operator==(const Pose&) const = default;

  static Pose xyz_yaw(double x, double y, double z, double yaw) {
    Pose p;
    p.x = x;
    p.y = y;
    p.z = z;
    p.yaw = normalize_angle(yaw);
    return p;
  }

  Pose normalized() const {
    Pose p = *this;
    p.roll = normalize_angle(p.roll);
    p.pitch = normalize_angle(p.pitch);
    p.yaw = normalize_angle(p.yaw);
    return p;
  }

  void validate() const {
    for (double v : {x, y, z, roll, pitch, yaw}) {
      if (!std::isfinite(v)) fail(ErrorKind::invariant, "pose contains non-finite value");
    }
  }

  // Column-major 3x3 rotation from intrinsic ZYX (yaw-pitch-roll).
  std::array<double, 9> rotation() const {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    return {cy * cp, sy * cp, -sp,
            cy * sp * sr - sy * cr, sy * sp * sr + cy * cr, cp * sr,
            cy * sp * cr + sy * sr, sy * sp * cr - cy * sr, cp * cr};
  }

  Vec3 transform(const Vec3& local) const {
    const auto r = rotation();
    return {r[0] * local.x + r[3] * local.y + r[6] * local.z + x,
            r[1] * local.x + r[4] * local.y + r[7] * local.z + y,
            r[2] * local.x + r[5] * local.y + r[8] * local.z + z};
  }

  // Composes this pose with a child pose expressed in this frame.
  Pose compose(const Pose& child) const {
    Vec3 p = transform({child.x, child.y, child.z});
    // Yaw-only composition for the rotational part: the simulation keeps the
    // base and carried objects upright, so roll/pitch add componentwise.
    Pose out;
    out.x = p.x;
    out.y = p.y;
    out.z = p.z;
    out.roll = normalize_angle(roll + child.roll);
    out.pitch = normalize_angle(pitch + child.pitch);
    out.yaw = normalize_angle(yaw + child.yaw);
    return out;
  }

  double distance_xy(const Pose& o) const {
    return std::hypot(x - o.x, y - o.y);
  }
};

}  // namespace robim
