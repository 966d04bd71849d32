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

#include "gaitforge/robot_model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gaitforge;

namespace {

RobotModel reference_model() {
  RobotModel m;  // defaults: thigh 0.4, shank 0.4, ankle 0.05, hip width 0.3
  return m;
}

/// Independent FK oracle: plain 4x4 homogeneous matrices multiplied in chain
/// order, no shared code with the Transform implementation.
Eigen::Matrix4d h_rot(const Mat3& r) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = r;
  return h;
}

Eigen::Matrix4d h_trans(double x, double y, double z) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h(0, 3) = x;
  h(1, 3) = y;
  h(2, 3) = z;
  return h;
}

Eigen::Matrix4d fk_oracle(const RobotModel& m, const BasePose& base, const JointVector& q,
                          Leg leg) {
  const int o = leg == Leg::left ? 0 : kJointsPerLeg;
  const double s = leg == Leg::left ? 1.0 : -1.0;
  Eigen::Matrix4d h = h_trans(base.position.x(), base.position.y(), base.position.z()) *
                      h_rot(rot_z(base.yaw)) * h_rot(rot_y(base.pitch)) * h_rot(rot_x(base.roll));
  h = h * h_trans(0.0, s * 0.5 * m.hip_width, 0.0);
  h = h * h_rot(rot_x(q[o + 0]));
  h = h * h_rot(rot_z(q[o + 1]));
  h = h * h_rot(rot_y(q[o + 2]));
  h = h * h_trans(0, 0, -m.thigh_length) * h_rot(rot_y(q[o + 3]));
  h = h * h_trans(0, 0, -m.shank_length) * h_rot(rot_y(q[o + 4]));
  h = h * h_rot(rot_x(q[o + 5]));
  h = h * h_trans(0, 0, -m.ankle_height);
  return h;
}

}  // namespace

TEST_CASE("forward kinematics straight-leg configuration") {
  const RobotModel m = reference_model();
  const Transform left = forward_kinematics(m, {}, JointVector::Zero(), Frame::foot_left);
  CHECK((left.translation - Vec3(0.0, 0.15, -0.85)).norm() < 1e-12);
  CHECK((left.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const Transform right = forward_kinematics(m, {}, JointVector::Zero(), Frame::foot_right);
  CHECK((right.translation - Vec3(0.0, -0.15, -0.85)).norm() < 1e-12);
}

TEST_CASE("forward kinematics under pure base yaw") {
  const RobotModel m = reference_model();
  BasePose base;
  base.yaw = kPi / 2.0;
  const Transform left = forward_kinematics(m, base, JointVector::Zero(), Frame::foot_left);
  CHECK((left.translation - Vec3(-0.15, 0.0, -0.85)).norm() < 1e-12);
}

TEST_CASE("forward kinematics matches homogeneous-matrix oracle") {
  const RobotModel m = reference_model();
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    BasePose base;
    base.position = Vec3(u(rng), u(rng), u(rng) + 1.0);
    base.roll = 0.4 * u(rng);
    base.pitch = 0.4 * u(rng);
    base.yaw = 2.0 * u(rng);
    JointVector q;
    for (int j = 0; j < kNumJoints; ++j) q[j] = 0.8 * u(rng);
    for (Leg leg : {Leg::left, Leg::right}) {
      const Frame frame = leg == Leg::left ? Frame::foot_left : Frame::foot_right;
      const Transform t = forward_kinematics(m, base, q, frame);
      const Eigen::Matrix4d h = fk_oracle(m, base, q, leg);
      CHECK((t.translation - h.topRightCorner<3, 1>()).norm() < 1e-10);
      CHECK((t.rotation - h.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((t.rotation.transpose() * t.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <
            1e-9);
      CHECK(std::abs(t.rotation.determinant() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("forward kinematics is equivariant under base yaw") {
  const RobotModel m = reference_model();
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 100; ++i) {
    JointVector q;
    for (int j = 0; j < kNumJoints; ++j) q[j] = u(rng);
    BasePose base;
    const Transform t0 = forward_kinematics(m, base, q, Frame::foot_left);
    const double delta = 2.5 * u(rng);
    BasePose yawed = base;
    yawed.yaw = delta;
    const Transform t1 = forward_kinematics(m, yawed, q, Frame::foot_left);
    CHECK((t1.translation - rot_z(delta) * t0.translation).norm() < 1e-10);
  }
}

TEST_CASE("inverse kinematics trivial cases") {
  const RobotModel m = reference_model();
  const auto full = inverse_kinematics(m, Vec3(0.0, 0.15, -0.85), Leg::left);
  REQUIRE(full.has_value());
  CHECK(std::abs(full->hip_roll) < 1e-6);
  CHECK(std::abs(full->hip_pitch) < 1e-6);
  CHECK(std::abs(full->knee) < 1e-6);
  CHECK(full->hip_yaw == 0.0);

  CHECK_FALSE(inverse_kinematics(m, Vec3(0.0, 0.15, -0.05), Leg::left).has_value());
  CHECK_FALSE(inverse_kinematics(m, Vec3(0.0, 0.15, -2.0), Leg::left).has_value());
}

TEST_CASE("IK of FK recovers joints; FK of IK recovers targets") {
  const RobotModel m = reference_model();
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 10000; ++i) {
    JointVector q = JointVector::Zero();
    const Leg leg = (i % 2 == 0) ? Leg::left : Leg::right;
    const int o = leg == Leg::left ? 0 : kJointsPerLeg;
    q[o + 0] = 0.6 * u(rng);               // hip roll
    q[o + 2] = 1.0 * u(rng);               // hip pitch
    q[o + 3] = 1.1 * (u(rng) + 1.0);       // knee in (0, 2.2)
    const Transform t = forward_kinematics(
        m, {}, q, leg == Leg::left ? Frame::foot_left : Frame::foot_right);
    const auto ik = inverse_kinematics(m, t.translation, leg);
    if (!ik) continue;  // outside annulus (knee near zero)
    ++tested;
    CHECK(std::abs(ik->hip_roll - q[o + 0]) < 1e-6);
    CHECK(std::abs(ik->hip_pitch - q[o + 2]) < 1e-6);
    CHECK(std::abs(ik->knee - q[o + 3]) < 1e-6);
    JointVector back = JointVector::Zero();
    back[o + 0] = ik->hip_roll;
    back[o + 1] = ik->hip_yaw;
    back[o + 2] = ik->hip_pitch;
    back[o + 3] = ik->knee;
    const Transform t2 = forward_kinematics(
        m, {}, back, leg == Leg::left ? Frame::foot_left : Frame::foot_right);
    CHECK((t2.translation - t.translation).norm() < 1e-9);
  }
  CHECK(tested > 9000);
}

TEST_CASE("support plane estimation") {
  CHECK(estimate_support_plane(Mat3::Identity()).roll == 0.0);
  CHECK(estimate_support_plane(Mat3::Identity()).pitch == 0.0);

  const SupportPlane pitch_only = estimate_support_plane(rot_y(0.1));
  CHECK(pitch_only.roll == Catch::Approx(0.0).margin(1e-12));
  CHECK(pitch_only.pitch == Catch::Approx(0.1).epsilon(1e-12));

  // Composed in the declared convention order: pitch after roll.
  const SupportPlane both = estimate_support_plane(rot_y(0.12) * rot_x(0.05));
  CHECK(both.roll == Catch::Approx(0.05).margin(1e-9));
  CHECK(both.pitch == Catch::Approx(0.12).margin(1e-9));

  // Exactness over a convention-generated grid.
  for (double a = -0.26; a <= 0.26; a += 0.052)
    for (double g = -0.17; g <= 0.17; g += 0.085) {
      const SupportPlane p = estimate_support_plane(rot_y(a) * rot_x(g));
      CHECK(p.roll == Catch::Approx(g).margin(1e-9));
      CHECK(p.pitch == Catch::Approx(a).margin(1e-9));
    }

  // Yaw does not leak into the estimate.
  const SupportPlane yawed = estimate_support_plane(rot_z(0.8) * rot_y(0.1) * rot_x(-0.05));
  CHECK(yawed.roll == Catch::Approx(-0.05).margin(1e-9));
  CHECK(yawed.pitch == Catch::Approx(0.1).margin(1e-9));

  // Clamping beyond +-pi/3.
  const SupportPlane steep = estimate_support_plane(rot_y(1.4));
  CHECK(steep.pitch == Catch::Approx(kPi / 3.0));

  Mat3 not_rot = Mat3::Identity();
  not_rot(0, 0) = 1.5;
  CHECK_THROWS_AS(estimate_support_plane(not_rot), std::invalid_argument);
}

TEST_CASE("model validation rejects bad geometry") {
  RobotModel m = reference_model();
  CHECK_NOTHROW(m.validate());
  CHECK(m.total_mass() == Catch::Approx(48.0));
  m.thigh_length = -1.0;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  RobotModel m2 = reference_model();
  m2.joint_limits[0] = {0.5, -0.5};
  CHECK_THROWS_AS(m2.validate(), std::invalid_argument);
}
