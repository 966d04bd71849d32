// Copyright (c) 2026 gaitforge contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace gaitforge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;  // m/s^2, +z up

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

inline Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

inline Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return m;
}

inline Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

/// Euler angles in the library-wide convention: intrinsic yaw-pitch-roll
/// (Z-Y-X), R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZyx {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

inline Mat3 rotation_from_euler(const EulerZyx& e) {
  return rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll);
}

/// Inverse of rotation_from_euler. Pitch is returned in [-pi/2, pi/2]; at the
/// gimbal singularity (|pitch| = pi/2) yaw is set to zero.
inline EulerZyx euler_from_rotation(const Mat3& r) {
  EulerZyx e;
  const double sp = -r(2, 0);
  e.pitch = std::asin(std::clamp(sp, -1.0, 1.0));
  if (std::abs(sp) < 1.0 - 1e-12) {
    e.roll = std::atan2(r(2, 1), r(2, 2));
    e.yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    e.roll = std::atan2(-r(1, 2), r(1, 1));
    e.yaw = 0.0;
  }
  return e;
}

}  // namespace gaitforge
