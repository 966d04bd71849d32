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

#include "gaitforge/physics.hpp"

#include <algorithm>
#include <array>

namespace gaitforge {

// Low-level gait layer: phase machine, contact-driven stance switching,
// semi-elliptical swing trajectory realization, ankle and torso regulation,
// and joint-level PD tracking. The high-level policy only shapes the swing
// trajectory through the Action.

struct Action {
  double step_length = 0.0;  // ell, signed, m
  double ellipse_yaw = 0.0;  // rad about the hip-frame Z axis
  double shift_x = 0.0;      // m
  double shift_y = 0.0;      // m, mirrored per leg downstream
  double shift_z = 0.0;      // m
};

struct ActionLimits {
  double step_length = 0.3;
  double ellipse_yaw = 0.3;
  double shift_x = 0.1;
  double shift_y = 0.1;
  double shift_z = 0.1;
};

inline Action clamp_action(const Action& a, const ActionLimits& lim = {}) {
  Action out;
  out.step_length = std::clamp(a.step_length, -lim.step_length, lim.step_length);
  out.ellipse_yaw = std::clamp(a.ellipse_yaw, -lim.ellipse_yaw, lim.ellipse_yaw);
  out.shift_x = std::clamp(a.shift_x, -lim.shift_x, lim.shift_x);
  out.shift_y = std::clamp(a.shift_y, -lim.shift_y, lim.shift_y);
  out.shift_z = std::clamp(a.shift_z, -lim.shift_z, lim.shift_z);
  return out;
}

enum class AnkleMode {
  level,  // geometric foot leveling for this model's joint conventions
  paper,  // hardware regulation law with Digit neutral offsets
};

struct GaitParams {
  double t_swing = 0.35;                  // s, nominal step duration
  double clearance = 0.07;                // m, semi-ellipse apex height
  double contact_force_threshold = 30.0;  // N
  int contact_debounce_ticks = 3;
  double tau_min_guard = 0.3;             // scuff-rejection phase guard
  double nominal_foot_depth = -0.82;      // z0 in the hip frame, m

  // Swing-leg PD gains in kLegJointNames order.
  std::array<double, kJointsPerLeg> kp_swing = {300, 100, 300, 300, 30, 20};
  std::array<double, kJointsPerLeg> kd_swing = {8, 3, 8, 8, 0.8, 0.5};

  // Torso regulation gains (stance hip roll / pitch).
  double torso_p_roll = 300.0;
  double torso_d_roll = 20.0;
  double torso_p_pitch = 300.0;
  double torso_d_pitch = 20.0;

  double stance_knee_p = 300.0;
  double stance_knee_d = 8.0;
  double stance_hip_yaw_p = 100.0;
  double stance_hip_yaw_d = 3.0;
  double stance_ankle_damping = 1.0;  // N m s / rad, the only stance ankle torque

  AnkleMode ankle_mode = AnkleMode::level;
  double level_ankle_roll_offset = 0.0;
  double level_ankle_pitch_offset = 0.0;
};

struct GaitState {
  double tau = 0.0;  // phase in [0, 1)
  Leg swing_leg = Leg::left;
  SupportPlane latched_plane{};
  Action latched_action{};
  long steps_completed = 0;
  double time_in_step = 0.0;
  double stance_knee_hold = 0.0;          // knee angle latched at touchdown
  std::array<int, 2> contact_streak = {0, 0};
};

/// Sign convention from the hardware regulation law: -1 when the left leg
/// swings, +1 when the right leg swings.
inline double swing_sign(Leg swing_leg) { return swing_leg == Leg::left ? -1.0 : 1.0; }

/// Semi-elliptical swing target in the swing leg's hip frame. The path runs
/// from -ell/2 at tau=0 to +ell/2 at tau->1 with apex `clearance` at tau=0.5,
/// then the ellipse is yawed and the (mirrored) shifts applied.
inline Vec3 swing_foot_target(const Action& action, double tau, const GaitParams& params,
                              Leg leg) {
  const Vec3 arc(-0.5 * action.step_length * std::cos(kPi * tau), 0.0,
                 params.clearance * std::sin(kPi * tau));
  Vec3 p = rot_z(action.ellipse_yaw) * arc;
  p.x() += action.shift_x;
  p.y() += leg_mirror(leg) * action.shift_y;
  p.z() += params.nominal_foot_depth + action.shift_z;
  return p;
}

struct ContactHistory {
  std::array<int, 2> streak = {0, 0};
};

/// Debounced contact detection: true once the foot's normal force has
/// exceeded the threshold (strictly) for `contact_debounce_ticks` ticks.
inline bool detect_contact(const ContactReport& report, Leg foot, const GaitParams& params,
                           ContactHistory& history) {
  int& streak = history.streak[foot == Leg::left ? 0 : 1];
  if (report.foot(foot).normal_force > params.contact_force_threshold)
    streak += 1;
  else
    streak = 0;
  return streak >= params.contact_debounce_ticks;
}

/// Advances the phase variable and fires step events (tau wrap or a debounced
/// premature contact past the scuff guard). Support-plane latching, action
/// re-query and knee-hold latching are done by the caller when
/// steps_completed increments, since they need kinematics and the policy.
inline GaitState advance_phase(const GaitState& gait, double dt, bool swing_contact,
                               const GaitParams& params) {
  GaitState out = gait;
  out.tau += dt / params.t_swing;
  out.time_in_step += dt;
  const bool event = out.tau >= 1.0 || (swing_contact && out.tau > params.tau_min_guard);
  if (event) {
    out.tau = 0.0;
    out.time_in_step = 0.0;
    out.swing_leg = gait.swing_leg == Leg::left ? Leg::right : Leg::left;
    out.steps_completed += 1;
  }
  return out;
}

/// Swing ankle targets per the hardware regulation law. Offsets default to
/// the Digit neutral values carried by the robot model.
inline std::pair<double, double> ankle_targets(double q_hip_roll, double q_hip_pitch,
                                               double roll, double pitch,
                                               const SupportPlane& plane, Leg swing_leg,
                                               double roll_offset = 0.366,
                                               double pitch_offset = 0.065) {
  const double sf = swing_sign(swing_leg);
  const double q_tr = q_hip_roll + sf * (roll_offset + roll + plane.roll);
  const double q_tp = q_hip_pitch + sf * (pitch_offset - pitch - plane.pitch);
  return {q_tr, q_tp};
}

/// Swing ankle targets that keep the sole parallel to the estimated support
/// plane under this model's joint axis conventions (roll chain: base roll +
/// hip roll + ankle roll; pitch chain adds the knee).
inline std::pair<double, double> ankle_targets_leveling(double q_hip_roll, double q_hip_pitch,
                                                        double q_knee, double roll,
                                                        double pitch,
                                                        const SupportPlane& plane,
                                                        double roll_offset = 0.0,
                                                        double pitch_offset = 0.0) {
  const double q_tr = plane.roll - roll - q_hip_roll + roll_offset;
  const double q_tp = plane.pitch - pitch - q_hip_pitch - q_knee + pitch_offset;
  return {q_tr, q_tp};
}

struct TorsoGains {
  double p_roll = 300.0;
  double d_roll = 20.0;
  double p_pitch = 300.0;
  double d_pitch = 20.0;
};

/// Stance-hip PD attitude regulation in the hardware law's sign convention;
/// targets are zero roll/pitch and zero rates.
inline std::pair<double, double> torso_regulation(double roll, double pitch, double roll_rate,
                                                  double pitch_rate, const TorsoGains& gains,
                                                  Leg swing_leg) {
  const double u_hr = gains.p_roll * (0.0 - roll) + gains.d_roll * (0.0 - roll_rate);
  const double u_hp =
      -swing_sign(swing_leg) * (gains.p_pitch * (0.0 - pitch) + gains.d_pitch * (0.0 - pitch_rate));
  return {u_hr, u_hp};
}

/// Full low-level controller tick: swing leg tracks the semi-ellipse through
/// IK plus ankle regulation; stance leg applies torso regulation with a
/// position-held knee and a passive (velocity-damped) ankle.
inline JointTorques compute_torques(const RobotModel& model, const SimState& sim,
                                    const GaitState& gait, const GaitParams& params) {
  JointTorques torques = JointTorques::Zero();
  const Leg swing = gait.swing_leg;
  const Leg stance = swing == Leg::left ? Leg::right : Leg::left;
  const int so = swing == Leg::left ? 0 : kJointsPerLeg;
  const int to = stance == Leg::left ? 0 : kJointsPerLeg;

  // --- Swing leg: trajectory tracking.
  const Vec3 hip_target = swing_foot_target(gait.latched_action, gait.tau, params, swing);
  Vec3 rel = hip_target;
  const double min_len = ik_min_leg_length() + 0.05;
  const double max_len = model.max_leg_reach() - 0.005;
  const double len = rel.norm();
  if (len < min_len)
    rel *= (len > 1e-12 ? min_len / len : 0.0);
  else if (len > max_len)
    rel *= max_len / len;
  const auto ik = inverse_kinematics(model, model.hip_offset(swing) + rel, swing);

  std::array<double, kJointsPerLeg> target{};
  if (ik) {
    target[0] = ik->hip_roll;
    target[1] = ik->hip_yaw;
    target[2] = ik->hip_pitch;
    target[3] = ik->knee;
  } else {
    // Clamped target still unreachable only through numerical corner cases;
    // hold the current pose rather than fault mid-control.
    for (int k = 0; k < 4; ++k) target[k] = sim.joints[so + k];
  }

  double ankle_roll_t, ankle_pitch_t;
  if (params.ankle_mode == AnkleMode::level) {
    std::tie(ankle_roll_t, ankle_pitch_t) = ankle_targets_leveling(
        sim.joints[so + 0], sim.joints[so + 2], sim.joints[so + 3], sim.base.roll,
        sim.base.pitch, gait.latched_plane, params.level_ankle_roll_offset,
        params.level_ankle_pitch_offset);
  } else {
    std::tie(ankle_roll_t, ankle_pitch_t) =
        ankle_targets(sim.joints[so + 0], sim.joints[so + 2], sim.base.roll, sim.base.pitch,
                      gait.latched_plane, swing, model.ankle_roll_offset,
                      model.ankle_pitch_offset);
  }
  target[4] = ankle_pitch_t;
  target[5] = ankle_roll_t;

  for (int k = 0; k < kJointsPerLeg; ++k) {
    const JointLimits lim = model.joint_limits[k];
    const double q_d = std::clamp(target[k], lim.min, lim.max);
    torques[so + k] =
        params.kp_swing[k] * (q_d - sim.joints[so + k]) - params.kd_swing[k] * sim.joint_vel[so + k];
  }

  // --- Stance leg: attitude regulation.
  const TorsoGains tg{params.torso_p_roll, params.torso_d_roll, params.torso_p_pitch,
                      params.torso_d_pitch};
  const auto [u_hr, u_hp] = torso_regulation(sim.base.roll, sim.base.pitch,
                                             sim.base_ang_vel.x(), sim.base_ang_vel.y(), tg,
                                             swing);
  // Map the regulation law onto this model's joint axes: joint torque reacts
  // on the torso with opposite sign, and hip pitch axes are not mirrored
  // between legs here.
  torques[to + 0] = -u_hr;
  torques[to + 2] = -swing_sign(swing) * u_hp;
  torques[to + 1] = params.stance_hip_yaw_p * (0.0 - sim.joints[to + 1]) -
                    params.stance_hip_yaw_d * sim.joint_vel[to + 1];
  torques[to + 3] = params.stance_knee_p * (gait.stance_knee_hold - sim.joints[to + 3]) -
                    params.stance_knee_d * sim.joint_vel[to + 3];
  torques[to + 4] = -params.stance_ankle_damping * sim.joint_vel[to + 4];
  torques[to + 5] = -params.stance_ankle_damping * sim.joint_vel[to + 5];

  for (int j = 0; j < kNumJoints; ++j) {
    const double lim = model.torque_limit_for(j);
    torques[j] = std::clamp(torques[j], -lim, lim);
  }
  return torques;
}

}  // namespace gaitforge
