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

#include "gaitforge/math.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace gaitforge {

// "Digit-lite" biped: a floating-base torso and two six-joint legs
// (hip roll, hip yaw, hip pitch, knee, ankle pitch, ankle roll), no closed
// chains, no passive spring joints, no arms.

enum class Leg { left, right };

inline double leg_mirror(Leg leg) { return leg == Leg::left ? 1.0 : -1.0; }

/// Joint indices within a JointVector. Left leg first, then right.
enum JointId : int {
  j_l_hip_roll = 0,
  j_l_hip_yaw,
  j_l_hip_pitch,
  j_l_knee,
  j_l_ankle_pitch,
  j_l_ankle_roll,
  j_r_hip_roll,
  j_r_hip_yaw,
  j_r_hip_pitch,
  j_r_knee,
  j_r_ankle_pitch,
  j_r_ankle_roll,
  kNumJoints
};

inline constexpr int kJointsPerLeg = 6;

inline constexpr std::array<const char*, kNumJoints> kJointNames = {
    "l_hip_roll", "l_hip_yaw", "l_hip_pitch", "l_knee", "l_ankle_pitch", "l_ankle_roll",
    "r_hip_roll", "r_hip_yaw", "r_hip_pitch", "r_knee", "r_ankle_pitch", "r_ankle_roll"};

inline constexpr std::array<const char*, kJointsPerLeg> kLegJointNames = {
    "hip_roll", "hip_yaw", "hip_pitch", "knee", "ankle_pitch", "ankle_roll"};

using JointVector = Eigen::Matrix<double, kNumJoints, 1>;

inline int leg_joint(Leg leg, int within) {
  return (leg == Leg::left ? 0 : kJointsPerLeg) + within;
}

struct BasePose {
  Vec3 position = Vec3::Zero();
  double roll = 0.0;   // psi
  double pitch = 0.0;  // theta
  double yaw = 0.0;    // phi

  Mat3 rotation() const { return rotation_from_euler({roll, pitch, yaw}); }
};

struct Transform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Transform operator*(const Transform& o) const {
    return {rotation * o.rotation, translation + rotation * o.translation};
  }
  Vec3 operator*(const Vec3& p) const { return translation + rotation * p; }
};

struct SupportPlane {
  double roll = 0.0;   // gamma
  double pitch = 0.0;  // alpha
};

struct JointLimits {
  double min = 0.0;
  double max = 0.0;
};

struct RobotModel {
  double torso_mass = 22.0;
  double leg_mass_per_leg = 13.0;
  double hip_width = 0.3;
  double thigh_length = 0.4;
  double shank_length = 0.4;
  double foot_half_length = 0.08;
  double foot_half_width = 0.04;
  double ankle_height = 0.05;

  // Digit-specific neutral ankle offsets from the hardware regulation law,
  // exposed for compatibility with the paper-form ankle targets.
  double ankle_roll_offset = 0.366;
  double ankle_pitch_offset = 0.065;

  // Per-leg-joint limits in kLegJointNames order (same for both legs).
  std::array<JointLimits, kJointsPerLeg> joint_limits = {{
      {-0.7, 0.7},    // hip_roll
      {-0.9, 0.9},    // hip_yaw
      {-1.6, 1.6},    // hip_pitch
      {0.0, 2.4},     // knee
      {-1.2, 1.2},    // ankle_pitch
      {-0.9, 0.9},    // ankle_roll
  }};
  std::array<double, kJointsPerLeg> torque_limits = {150, 80, 200, 250, 60, 40};

  // Torso box (x-depth, y-width, z-height) used for its inertia tensor.
  Vec3 torso_extent = Vec3(0.20, 0.30, 0.50);
  Vec3 torso_com = Vec3(0.0, 0.0, 0.10);

  double total_mass() const { return torso_mass + 2.0 * leg_mass_per_leg; }

  double max_leg_reach() const { return thigh_length + shank_length + ankle_height; }

  Vec3 hip_offset(Leg leg) const {
    return Vec3(0.0, leg_mirror(leg) * 0.5 * hip_width, 0.0);
  }

  JointLimits limits_for(int joint_index) const {
    return joint_limits[joint_index % kJointsPerLeg];
  }
  double torque_limit_for(int joint_index) const {
    return torque_limits[joint_index % kJointsPerLeg];
  }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("robot model: ") + what +
                                                  " must be positive");
    };
    positive(torso_mass, "torso_mass");
    positive(leg_mass_per_leg, "leg_mass_per_leg");
    positive(hip_width, "hip_width");
    positive(thigh_length, "thigh_length");
    positive(shank_length, "shank_length");
    positive(foot_half_length, "foot_half_length");
    positive(foot_half_width, "foot_half_width");
    positive(ankle_height, "ankle_height");
    for (const auto& lim : joint_limits)
      if (!(lim.min < lim.max))
        throw std::invalid_argument("robot model: joint limit min must be below max");
  }
};

enum class Frame { foot_left, foot_right, com };

namespace detail {

/// Leg chain transforms relative to the base frame, one entry per joint plus
/// the sole. Chain: hip_roll -> hip_yaw -> hip_pitch -> knee -> ankle_pitch
/// -> ankle_roll -> sole center.
inline Transform leg_chain_to_sole(const RobotModel& m, const JointVector& q, Leg leg) {
  const int o = leg == Leg::left ? 0 : kJointsPerLeg;
  Transform t{Mat3::Identity(), m.hip_offset(leg)};
  t = t * Transform{rot_x(q[o + 0]), Vec3::Zero()};                       // hip roll
  t = t * Transform{rot_z(q[o + 1]), Vec3::Zero()};                       // hip yaw
  t = t * Transform{rot_y(q[o + 2]), Vec3::Zero()};                       // hip pitch
  t = t * Transform{rot_y(q[o + 3]), Vec3(0, 0, -m.thigh_length)};        // knee
  t = t * Transform{rot_y(q[o + 4]), Vec3(0, 0, -m.shank_length)};        // ankle pitch
  t = t * Transform{rot_x(q[o + 5]), Vec3::Zero()};                       // ankle roll
  t = t * Transform{Mat3::Identity(), Vec3(0, 0, -m.ankle_height)};       // sole center
  return t;
}

// Link mass fractions of one leg, in chain order: hip-roll link, hip-yaw
// link, thigh, shank, ankle link, foot.
inline constexpr std::array<double, 6> kLegMassFractions = {1.0 / 13.0, 1.0 / 13.0,
                                                            5.0 / 13.0, 4.0 / 13.0,
                                                            0.5 / 13.0, 1.5 / 13.0};

}  // namespace detail

/// World pose of the requested frame. For Frame::com the translation is the
/// whole-robot center of mass and the rotation is the torso rotation.
inline Transform forward_kinematics(const RobotModel& m, const BasePose& base,
                                    const JointVector& joints, Frame frame) {
  const Transform world_base{base.rotation(), base.position};
  if (frame == Frame::foot_left || frame == Frame::foot_right) {
    const Leg leg = frame == Frame::foot_left ? Leg::left : Leg::right;
    return world_base * detail::leg_chain_to_sole(m, joints, leg);
  }

  // Center of mass: accumulate link coms along both chains.
  double total = m.torso_mass;
  Vec3 weighted = m.torso_mass * (world_base * m.torso_com);
  for (Leg leg : {Leg::left, Leg::right}) {
    const int o = leg == Leg::left ? 0 : kJointsPerLeg;
    Transform t{Mat3::Identity(), m.hip_offset(leg)};
    t = t * Transform{rot_x(joints[o + 0]), Vec3::Zero()};
    t = t * Transform{rot_z(joints[o + 1]), Vec3::Zero()};
    t = t * Transform{rot_y(joints[o + 2]), Vec3::Zero()};
    const std::array<Vec3, 6> link_coms = {
        Vec3::Zero(), Vec3::Zero(), Vec3(0, 0, -0.5 * m.thigh_length),
        Vec3(0, 0, -0.5 * m.shank_length), Vec3::Zero(), Vec3(0, 0, -0.5 * m.ankle_height)};
    // Walk the chain accumulating each link's com.
    Transform links[6];
    links[0] = t;  // hip-roll link frame (after hip roll/yaw/pitch rotations share origin)
    links[1] = t;
    links[2] = t;
    links[3] = links[2] * Transform{rot_y(joints[o + 3]), Vec3(0, 0, -m.thigh_length)};
    links[4] = links[3] * Transform{rot_y(joints[o + 4]), Vec3(0, 0, -m.shank_length)};
    links[5] = links[4] * Transform{rot_x(joints[o + 5]), Vec3::Zero()};
    for (int k = 0; k < 6; ++k) {
      const double mk = m.leg_mass_per_leg * detail::kLegMassFractions[k];
      weighted += mk * (world_base * (links[k] * link_coms[k]));
      total += mk;
    }
  }
  return {world_base.rotation, weighted / total};
}

struct LegJoints {
  double hip_roll = 0.0;
  double hip_yaw = 0.0;  // held constant at zero by the analytic IK
  double hip_pitch = 0.0;
  double knee = 0.0;
};

inline double ik_min_leg_length() { return 0.1; }

/// Analytic leg IK for a sole target expressed in the base frame, with the
/// ankle joints at zero. Returns nullopt when the target lies outside the
/// reachable annulus; callers clamp their trajectory instead of failing.
inline std::optional<LegJoints> inverse_kinematics(const RobotModel& m,
                                                   const Vec3& foot_target, Leg leg) {
  const Vec3 p = foot_target - m.hip_offset(leg);
  const double a = m.thigh_length;
  const double b = m.shank_length + m.ankle_height;
  const double d = p.norm();
  // Closed at the top so the fully extended leg is representable.
  if (!(d > ik_min_leg_length()) || !(d <= a + b + 1e-9)) return std::nullopt;

  LegJoints out;
  out.hip_roll = std::atan2(p.y(), -p.z());
  // Express the target in the rolled leg plane.
  const Vec3 pp = rot_x(-out.hip_roll) * p;
  const double cos_knee_outer = std::clamp((a * a + b * b - d * d) / (2.0 * a * b), -1.0, 1.0);
  out.knee = kPi - std::acos(cos_knee_outer);
  const double chord_pitch = std::atan2(-pp.x(), -pp.z());
  out.hip_pitch = chord_pitch - std::atan2(b * std::sin(out.knee), a + b * std::cos(out.knee));
  return out;
}

/// Reads the support plane roll (gamma) and pitch (alpha) off a stance-foot
/// world rotation by Euler decomposition, clamped to +-pi/3. Throws if the
/// input is not orthonormal within 1e-6.
inline SupportPlane estimate_support_plane(const Mat3& stance_foot_rotation_world) {
  const Mat3& r = stance_foot_rotation_world;
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
      std::abs(r.determinant() - 1.0) > 1e-6)
    throw std::invalid_argument("estimate_support_plane: input is not a rotation");
  const EulerZyx e = euler_from_rotation(r);
  const double lim = kPi / 3.0;
  return {std::clamp(e.roll, -lim, lim), std::clamp(e.pitch, -lim, lim)};
}

}  // namespace gaitforge
