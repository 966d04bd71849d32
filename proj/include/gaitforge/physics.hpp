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

#include "gaitforge/dynamics.hpp"
#include "gaitforge/robot_model.hpp"
#include "gaitforge/terrain.hpp"

#include <array>
#include <cmath>

namespace gaitforge {

inline constexpr int kContactPointsPerFoot = 4;
inline constexpr int kNumContactPoints = 2 * kContactPointsPerFoot;

/// Friction-spring state for one foot corner point.
struct ContactAnchor {
  Vec3 point = Vec3::Zero();  // world
  bool active = false;
};

struct SimState {
  BasePose base;
  Vec3 base_lin_vel = Vec3::Zero();   // world frame
  Vec3 base_ang_vel = Vec3::Zero();   // Euler-angle rates (roll, pitch, yaw)
  JointVector joints = JointVector::Zero();
  JointVector joint_vel = JointVector::Zero();
  double time = 0.0;
  std::array<ContactAnchor, kNumContactPoints> anchors{};
};

struct FootContact {
  double normal_force = 0.0;
  Vec2 tangential_force = Vec2::Zero();  // world x/y components
  int num_points_in_contact = 0;
  Vec3 center_of_pressure = Vec3::Zero();
};

struct ContactReport {
  FootContact left;
  FootContact right;

  const FootContact& foot(Leg leg) const { return leg == Leg::left ? left : right; }
};

struct StepOutcome {
  ContactReport contact;
  bool diverged = false;
};

struct PhysicsParams {
  double contact_stiffness = 5e4;      // N/m
  double contact_damping = 500.0;      // N s/m
  double tangential_stiffness = 2e4;   // N/m
  double tangential_damping = 200.0;   // N s/m
  double max_dt = 0.002;               // s
};

using JointTorques = Eigen::Matrix<double, kNumJoints, 1>;

/// Optional external disturbance: a world-frame force applied at the torso
/// center of mass (used by the push tests).
struct ExternalForce {
  Vec3 force = Vec3::Zero();
};

/// Floating-base biped simulator. The floating base is a chain of three
/// world-aligned prismatic joints followed by intrinsic Z-Y-X Euler rotation
/// joints, so generalized velocities are exactly the SimState fields.
class BipedSim {
 public:
  explicit BipedSim(const RobotModel& model, const PhysicsParams& params = {})
      : model_(model), params_(params), system_(build_tree(model)) {
    q_.resize(kDof);
    qd_.resize(kDof);
    tau_.resize(kDof);
    qdd_.resize(kDof);
    corner_local_ = {{
        Vec3(model.foot_half_length, model.foot_half_width, -model.ankle_height),
        Vec3(model.foot_half_length, -model.foot_half_width, -model.ankle_height),
        Vec3(-model.foot_half_length, model.foot_half_width, -model.ankle_height),
        Vec3(-model.foot_half_length, -model.foot_half_width, -model.ankle_height),
    }};
  }

  static constexpr int kDof = 6 + kNumJoints;
  static constexpr int kTorsoBody = 5;
  static constexpr int kLeftFootBody = 11;
  static constexpr int kRightFootBody = 17;

  const RobotModel& model() const { return model_; }
  const PhysicsParams& params() const { return params_; }

  static int foot_body(Leg leg) {
    return leg == Leg::left ? kLeftFootBody : kRightFootBody;
  }

  /// Advances the state by one semi-implicit Euler step. Torques are clamped
  /// to the model torque limits before application.
  StepOutcome step(SimState& state, const JointTorques& torques, const Terrain& terrain,
                   double dt, const ExternalForce* push = nullptr) {
    StepOutcome out;
    pack(state);
    system_.update_kinematics(q_, qd_);
    system_.clear_external_forces();
    out.contact = apply_contact_forces(state, terrain);
    if (push != nullptr && push->force.squaredNorm() > 0.0) {
      const Vec3 com = system_.point_position(kTorsoBody, model_.torso_com);
      system_.add_point_force(kTorsoBody, com, push->force);
    }

    tau_.head<6>().setZero();
    for (int j = 0; j < kNumJoints; ++j) {
      const double lim = model_.torque_limit_for(j);
      tau_[6 + j] = std::clamp(torques[j], -lim, lim);
    }

    system_.forward_dynamics(q_, qd_, tau_, qdd_);
    qd_ += qdd_ * dt;
    q_ += qd_ * dt;
    unpack(state);
    state.time += dt;

    for (int i = 0; i < kDof; ++i) {
      if (!std::isfinite(q_[i]) || !std::isfinite(qd_[i]) || std::abs(q_[i]) > 1e6 ||
          std::abs(qd_[i]) > 1e6) {
        out.diverged = true;
        break;
      }
    }
    return out;
  }

  /// Kinematics refresh without stepping (for logging and controllers that
  /// need world-frame foot data).
  void refresh_kinematics(const SimState& state) {
    pack(state);
    system_.update_kinematics(q_, qd_);
  }

  Mat3 foot_rotation(Leg leg) const { return system_.body_rotation(foot_body(leg)); }
  Vec3 foot_position(Leg leg) const { return system_.body_position(foot_body(leg)); }

  double mechanical_energy(const SimState& state) {
    pack(state);
    system_.update_kinematics(q_, qd_);
    return system_.kinetic_energy() + system_.potential_energy();
  }

  Vec3 com_position(const SimState& state) {
    pack(state);
    system_.update_kinematics(q_, qd_);
    return system_.system_com();
  }

  const ArticulatedSystem& system() const { return system_; }

 private:
  static std::vector<BodyDef> build_tree(const RobotModel& m) {
    std::vector<BodyDef> bodies;
    bodies.reserve(kDof);
    auto add = [&](int parent, JointType type, const Vec3& axis, const Vec3& offset,
                   double mass, const Vec3& com, const Mat3& inertia) {
      BodyDef b;
      b.parent = parent;
      b.joint = type;
      b.axis = axis;
      b.offset = offset;
      b.mass = mass;
      b.com = com;
      b.inertia_com = inertia;
      bodies.push_back(b);
      return static_cast<int>(bodies.size()) - 1;
    };

    const Mat3 zero = Mat3::Zero();
    // Floating base chain: x, y, z translations then yaw, pitch, roll.
    int p = add(-1, JointType::prismatic, Vec3::UnitX(), Vec3::Zero(), 0, Vec3::Zero(), zero);
    p = add(p, JointType::prismatic, Vec3::UnitY(), Vec3::Zero(), 0, Vec3::Zero(), zero);
    p = add(p, JointType::prismatic, Vec3::UnitZ(), Vec3::Zero(), 0, Vec3::Zero(), zero);
    p = add(p, JointType::revolute, Vec3::UnitZ(), Vec3::Zero(), 0, Vec3::Zero(), zero);
    p = add(p, JointType::revolute, Vec3::UnitY(), Vec3::Zero(), 0, Vec3::Zero(), zero);
    const int torso = add(p, JointType::revolute, Vec3::UnitX(), Vec3::Zero(), m.torso_mass,
                          m.torso_com, box_inertia(m.torso_mass, m.torso_extent));

    const double leg_m = m.leg_mass_per_leg;
    const auto& fr = detail::kLegMassFractions;
    for (Leg leg : {Leg::left, Leg::right}) {
      const Vec3 hip = m.hip_offset(leg);
      const double m_hr = leg_m * fr[0], m_hy = leg_m * fr[1], m_thigh = leg_m * fr[2],
                   m_shank = leg_m * fr[3], m_ankle = leg_m * fr[4], m_foot = leg_m * fr[5];
      int b = add(torso, JointType::revolute, Vec3::UnitX(), hip, m_hr, Vec3::Zero(),
                  point_inertia(m_hr, 0.05));
      b = add(b, JointType::revolute, Vec3::UnitZ(), Vec3::Zero(), m_hy, Vec3::Zero(),
              point_inertia(m_hy, 0.05));
      b = add(b, JointType::revolute, Vec3::UnitY(), Vec3::Zero(), m_thigh,
              Vec3(0, 0, -0.5 * m.thigh_length), rod_inertia(m_thigh, m.thigh_length));
      b = add(b, JointType::revolute, Vec3::UnitY(), Vec3(0, 0, -m.thigh_length), m_shank,
              Vec3(0, 0, -0.5 * m.shank_length), rod_inertia(m_shank, m.shank_length));
      b = add(b, JointType::revolute, Vec3::UnitY(), Vec3(0, 0, -m.shank_length), m_ankle,
              Vec3::Zero(), point_inertia(m_ankle, 0.03));
      add(b, JointType::revolute, Vec3::UnitX(), Vec3::Zero(), m_foot,
          Vec3(0, 0, -0.5 * m.ankle_height),
          box_inertia(m_foot, Vec3(2 * m.foot_half_length, 2 * m.foot_half_width,
                                   m.ankle_height)));
    }
    return bodies;
  }

  static Mat3 box_inertia(double mass, const Vec3& extent) {
    const double x = extent.x(), y = extent.y(), z = extent.z();
    Mat3 i = Mat3::Zero();
    i(0, 0) = mass / 12.0 * (y * y + z * z);
    i(1, 1) = mass / 12.0 * (x * x + z * z);
    i(2, 2) = mass / 12.0 * (x * x + y * y);
    return i;
  }

  /// Small compact link approximated by a solid sphere of the given radius.
  static Mat3 point_inertia(double mass, double radius) {
    return Mat3::Identity() * (0.4 * mass * radius * radius);
  }

  /// Slender rod along z, com-centered.
  static Mat3 rod_inertia(double mass, double length) {
    Mat3 i = Mat3::Zero();
    const double v = mass * length * length / 12.0;
    i(0, 0) = v;
    i(1, 1) = v;
    i(2, 2) = 0.4 * mass * 0.03 * 0.03;
    return i;
  }

  void pack(const SimState& s) {
    q_[0] = s.base.position.x();
    q_[1] = s.base.position.y();
    q_[2] = s.base.position.z();
    q_[3] = s.base.yaw;
    q_[4] = s.base.pitch;
    q_[5] = s.base.roll;
    qd_[0] = s.base_lin_vel.x();
    qd_[1] = s.base_lin_vel.y();
    qd_[2] = s.base_lin_vel.z();
    qd_[3] = s.base_ang_vel.z();  // yaw rate
    qd_[4] = s.base_ang_vel.y();  // pitch rate
    qd_[5] = s.base_ang_vel.x();  // roll rate
    for (int j = 0; j < kNumJoints; ++j) {
      q_[6 + j] = s.joints[j];
      qd_[6 + j] = s.joint_vel[j];
    }
  }

  void unpack(SimState& s) const {
    s.base.position = Vec3(q_[0], q_[1], q_[2]);
    s.base.yaw = q_[3];
    s.base.pitch = q_[4];
    s.base.roll = q_[5];
    s.base_lin_vel = Vec3(qd_[0], qd_[1], qd_[2]);
    s.base_ang_vel = Vec3(qd_[5], qd_[4], qd_[3]);
    for (int j = 0; j < kNumJoints; ++j) {
      s.joints[j] = q_[6 + j];
      s.joint_vel[j] = qd_[6 + j];
    }
  }

  ContactReport apply_contact_forces(SimState& state, const Terrain& terrain) {
    ContactReport report;
    for (Leg leg : {Leg::left, Leg::right}) {
      FootContact& fc = leg == Leg::left ? report.left : report.right;
      const int body = foot_body(leg);
      const int base_idx = (leg == Leg::left ? 0 : kContactPointsPerFoot);
      Vec3 cop_accum = Vec3::Zero();
      Vec3 tang_accum = Vec3::Zero();
      for (int c = 0; c < kContactPointsPerFoot; ++c) {
        ContactAnchor& anchor = state.anchors[base_idx + c];
        const Vec3 p = system_.point_position(body, corner_local_[c]);
        const double h = terrain_height(terrain, p.x(), p.y());
        const double pen_v = h - p.z();
        if (pen_v <= 0.0) {
          anchor.point = p;
          anchor.active = false;
          continue;
        }
        const Vec3 n = terrain_normal(terrain, p.x(), p.y());
        const double depth = pen_v * n.z();
        const Vec3 v = system_.point_velocity(body, corner_local_[c]);
        const double vn = n.dot(v);
        double fn = params_.contact_stiffness * depth - params_.contact_damping * vn;
        if (fn < 0.0) fn = 0.0;

        if (!anchor.active) {
          anchor.point = p;
          anchor.active = true;
        }
        const Vec3 d = p - anchor.point;
        const Vec3 dt_tang = d - n * n.dot(d);
        const Vec3 vt = v - n * vn;
        Vec3 ft = -params_.tangential_stiffness * dt_tang - params_.tangential_damping * vt;
        const double ft_max = terrain.friction * fn;
        const double ft_norm = ft.norm();
        if (ft_norm > ft_max) {
          ft *= (ft_max / ft_norm);
          // Slip: re-seat the anchor so the spring carries the clamped force.
          anchor.point = p + ft / params_.tangential_stiffness;
        }

        system_.add_point_force(body, p, n * fn + ft);
        fc.normal_force += fn;
        tang_accum += ft;
        cop_accum += fn * p;
        fc.num_points_in_contact += 1;
      }
      fc.tangential_force = tang_accum.head<2>();
      if (fc.normal_force > 0.0) fc.center_of_pressure = cop_accum / fc.normal_force;
    }
    return report;
  }

  RobotModel model_;
  PhysicsParams params_;
  ArticulatedSystem system_;
  std::array<Vec3, kContactPointsPerFoot> corner_local_;
  Eigen::VectorXd q_, qd_, tau_, qdd_;
};

/// Single-shot form of the stepping operation; rollout loops keep a BipedSim
/// instance instead of paying tree construction per tick.
inline StepOutcome step(const RobotModel& model, SimState& state, const JointTorques& torques,
                        const Terrain& terrain, double dt) {
  BipedSim sim(model);
  return sim.step(state, torques, terrain, dt);
}

}  // namespace gaitforge
