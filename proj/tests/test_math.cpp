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

#include "gaitforge/math.hpp"
#include "gaitforge/spatial.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gaitforge;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == Catch::Approx(kPi));
  CHECK(wrap_angle(-kPi) == Catch::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == Catch::Approx(kPi));
  CHECK(wrap_angle(-6.2) == Catch::Approx(0.08318530717958605).epsilon(1e-12));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::sin(w) - std::sin(a)) < 1e-9);
    CHECK(std::abs(std::cos(w) - std::cos(a)) < 1e-9);
  }
}

TEST_CASE("euler zyx round trip") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int i = 0; i < 2000; ++i) {
    EulerZyx e{u(rng), u(rng) * 0.9, u(rng) * 2.0};
    const Mat3 r = rotation_from_euler(e);
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == Catch::Approx(1.0).epsilon(1e-12));
    const EulerZyx back = euler_from_rotation(r);
    CHECK(back.roll == Catch::Approx(e.roll).margin(1e-10));
    CHECK(back.pitch == Catch::Approx(e.pitch).margin(1e-10));
    CHECK(wrap_angle(back.yaw - e.yaw) == Catch::Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("euler composition order is Rz Ry Rx") {
  const Mat3 r = rotation_from_euler({0.1, 0.2, 0.3});
  const Mat3 expect = rot_z(0.3) * rot_y(0.2) * rot_x(0.1);
  CHECK((r - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("spatial transform composition matches 6x6 matrix algebra") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto motion_matrix = [](const SpatialTransform& x) {
    Mat6 m = Mat6::Zero();
    m.topLeftCorner<3, 3>() = x.E;
    m.bottomRightCorner<3, 3>() = x.E;
    m.bottomLeftCorner<3, 3>() = -x.E * skew(x.r);
    return m;
  };
  for (int i = 0; i < 200; ++i) {
    SpatialTransform a{rotation_from_euler({u(rng), u(rng), u(rng)}), Vec3(u(rng), u(rng), u(rng))};
    SpatialTransform b{rotation_from_euler({u(rng), u(rng), u(rng)}), Vec3(u(rng), u(rng), u(rng))};
    const SpatialTransform c = a.then(b);
    const Mat6 expect = motion_matrix(b) * motion_matrix(a);
    Vec6 v;
    for (int k = 0; k < 6; ++k) v[k] = u(rng);
    CHECK((c.apply_motion(v) - expect * v).cwiseAbs().maxCoeff() < 1e-12);
    // Force transform is the inverse transpose of the motion transform.
    const Vec6 f = c.apply_force(v);
    CHECK((expect.transpose() * f - v).cwiseAbs().maxCoeff() < 1e-10);
    // Child-to-parent force accumulation is the plain transpose.
    CHECK((a.apply_force_to_parent(v) - motion_matrix(a).transpose() * v).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("spatial inertia transform agrees with matrix sandwich") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mass = 0.5 + std::abs(u(rng)) * 3.0;
    const Vec3 com(u(rng), u(rng), u(rng));
    Mat3 ic = Mat3::Zero();
    ic.diagonal() << 0.1 + std::abs(u(rng)), 0.1 + std::abs(u(rng)), 0.1 + std::abs(u(rng));
    const SpatialInertia si = SpatialInertia::from_com(mass, com, ic);

    Mat6 big;
    big.topLeftCorner<3, 3>() = si.I;
    big.topRightCorner<3, 3>() = skew(si.h);
    big.bottomLeftCorner<3, 3>() = -skew(si.h);
    big.bottomRightCorner<3, 3>() = mass * Mat3::Identity();

    SpatialTransform x{rotation_from_euler({u(rng), u(rng), u(rng)}), Vec3(u(rng), u(rng), u(rng))};
    Mat6 xm = Mat6::Zero();
    xm.topLeftCorner<3, 3>() = x.E;
    xm.bottomRightCorner<3, 3>() = x.E;
    xm.bottomLeftCorner<3, 3>() = -x.E * skew(x.r);

    const SpatialInertia moved = si.to_parent(x);
    Mat6 big_moved;
    big_moved.topLeftCorner<3, 3>() = moved.I;
    big_moved.topRightCorner<3, 3>() = skew(moved.h);
    big_moved.bottomLeftCorner<3, 3>() = -skew(moved.h);
    big_moved.bottomRightCorner<3, 3>() = moved.mass * Mat3::Identity();

    CHECK((big_moved - xm.transpose() * big * xm).cwiseAbs().maxCoeff() < 1e-10);
  }
}
