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

#include "gaitforge/spatial.hpp"

#include <Eigen/Cholesky>

#include <cassert>
#include <stdexcept>
#include <vector>

namespace gaitforge {

// Kinematic tree of rigid bodies connected by single-DoF joints. Floating
// bases are modeled as a chain of three prismatic plus three revolute joints,
// which keeps every algorithm in the single-DoF textbook form.

enum class JointType { revolute, prismatic };

struct BodyDef {
  int parent = -1;                 // -1 attaches to the fixed world
  JointType joint = JointType::revolute;
  Vec3 axis = Vec3::UnitZ();       // joint axis, expressed in the parent frame at the joint
  Vec3 offset = Vec3::Zero();      // joint origin in the parent frame
  double mass = 0.0;
  Vec3 com = Vec3::Zero();         // body frame
  Mat3 inertia_com = Mat3::Zero(); // about the body's com, body frame
};

class ArticulatedSystem {
 public:
  explicit ArticulatedSystem(std::vector<BodyDef> bodies) : bodies_(std::move(bodies)) {
    const int n = static_cast<int>(bodies_.size());
    for (int i = 0; i < n; ++i) {
      if (bodies_[i].parent >= i)
        throw std::invalid_argument("bodies must be topologically ordered");
      inertias_.push_back(SpatialInertia::from_com(bodies_[i].mass, bodies_[i].com,
                                                   bodies_[i].inertia_com));
    }
    x_up_.resize(n);
    rot_w_.assign(n, Mat3::Identity());
    pos_w_.assign(n, Vec3::Zero());
    vel_.assign(n, Vec6::Zero());
    vj_.assign(n, Vec6::Zero());
    s_.assign(n, Vec6::Zero());
    fext_.assign(n, Vec6::Zero());
    acc_ws_.assign(n, Vec6::Zero());
    force_ws_.assign(n, Vec6::Zero());
    ic_ws_.resize(n);
    h_.resize(n, n);
    bias_.resize(n);
    qdd_ws_.resize(n);
    llt_ = Eigen::LLT<Eigen::MatrixXd>(n);
  }

  int dof() const { return static_cast<int>(bodies_.size()); }

  double total_mass() const {
    double m = 0.0;
    for (const auto& b : bodies_) m += b.mass;
    return m;
  }

  /// Recomputes joint transforms, world poses and body spatial velocities.
  void update_kinematics(const Eigen::VectorXd& q, const Eigen::VectorXd& qd) {
    const int n = dof();
    assert(q.size() == n && qd.size() == n);
    for (int i = 0; i < n; ++i) {
      const BodyDef& b = bodies_[i];
      Vec3 r_parent = b.offset;
      Mat3 rot_pc = Mat3::Identity();
      if (b.joint == JointType::revolute) {
        rot_pc = Eigen::AngleAxisd(q[i], b.axis).toRotationMatrix();
        s_[i].head<3>() = b.axis;
        s_[i].tail<3>().setZero();
      } else {
        r_parent += b.axis * q[i];
        s_[i].head<3>().setZero();
        s_[i].tail<3>() = b.axis;
      }
      x_up_[i].E = rot_pc.transpose();
      x_up_[i].r = r_parent;

      vj_[i] = s_[i] * qd[i];
      if (b.parent >= 0) {
        rot_w_[i] = rot_w_[b.parent] * rot_pc;
        pos_w_[i] = pos_w_[b.parent] + rot_w_[b.parent] * r_parent;
        vel_[i] = x_up_[i].apply_motion(vel_[b.parent]) + vj_[i];
      } else {
        rot_w_[i] = rot_pc;
        pos_w_[i] = r_parent;
        vel_[i] = vj_[i];
      }
    }
  }

  const Mat3& body_rotation(int i) const { return rot_w_[i]; }
  const Vec3& body_position(int i) const { return pos_w_[i]; }

  Vec3 point_position(int i, const Vec3& local) const {
    return pos_w_[i] + rot_w_[i] * local;
  }

  /// World-frame velocity of a body-fixed point.
  Vec3 point_velocity(int i, const Vec3& local) const {
    const Vec3 w = vel_[i].head<3>();
    const Vec3 v = vel_[i].tail<3>();
    return rot_w_[i] * (v + w.cross(local));
  }

  Vec3 body_angular_velocity(int i) const { return rot_w_[i] * vel_[i].head<3>(); }

  void clear_external_forces() {
    for (auto& f : fext_) f.setZero();
    has_fext_ = false;
  }

  /// Accumulates a world-frame force applied at a world point on a body.
  void add_point_force(int body, const Vec3& point_w, const Vec3& force_w) {
    fext_[body].head<3>() += point_w.cross(force_w);
    fext_[body].tail<3>() += force_w;
    has_fext_ = true;
  }

  /// Recursive Newton-Euler using the cached kinematics: returns the joint
  /// force vector tau = H qdd + C qd + g - tau_ext.
  void rnea(const Eigen::VectorXd& qdd, Eigen::VectorXd& tau_out) {
    const int n = dof();
    tau_out.resize(n);
    // Gravity enters as a fictitious upward base acceleration.
    const Vec6 a0 = (Vec6() << 0, 0, 0, 0, 0, kGravity).finished();
    for (int i = 0; i < n; ++i) {
      const int p = bodies_[i].parent;
      const Vec6 a_parent = (p >= 0) ? acc_ws_[p] : a0;
      acc_ws_[i] = x_up_[i].apply_motion(a_parent) + s_[i] * qdd[i] +
                   cross_motion(vel_[i], vj_[i]);
      force_ws_[i] = inertias_[i].apply(acc_ws_[i]) +
                     cross_force(vel_[i], inertias_[i].apply(vel_[i]));
      if (has_fext_) {
        SpatialTransform world_to_body{rot_w_[i].transpose(), pos_w_[i]};
        force_ws_[i] -= world_to_body.apply_force(fext_[i]);
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      tau_out[i] = s_[i].dot(force_ws_[i]);
      const int p = bodies_[i].parent;
      if (p >= 0) force_ws_[p] += x_up_[i].apply_force_to_parent(force_ws_[i]);
    }
  }

  /// Composite-rigid-body mass matrix using the cached kinematics.
  void mass_matrix(Eigen::MatrixXd& h_out) {
    const int n = dof();
    h_out.setZero(n, n);
    for (int i = 0; i < n; ++i) ic_ws_[i] = inertias_[i];
    for (int i = n - 1; i >= 0; --i) {
      const int p = bodies_[i].parent;
      if (p >= 0) ic_ws_[p] += ic_ws_[i].to_parent(x_up_[i]);
      Vec6 f = ic_ws_[i].apply(s_[i]);
      h_out(i, i) = s_[i].dot(f);
      int j = i;
      while (bodies_[j].parent >= 0) {
        f = x_up_[j].apply_force_to_parent(f);
        j = bodies_[j].parent;
        const double v = f.dot(s_[j]);
        h_out(i, j) = v;
        h_out(j, i) = v;
      }
    }
  }

  /// Forward dynamics: solves H qdd = tau - bias with external forces taken
  /// from the accumulated point forces.
  void forward_dynamics(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                        const Eigen::VectorXd& tau, Eigen::VectorXd& qdd_out) {
    update_kinematics(q, qd);
    qdd_ws_.setZero(dof());
    rnea(qdd_ws_, bias_);
    mass_matrix(h_);
    llt_.compute(h_);
    qdd_out = llt_.solve(tau - bias_);
  }

  double kinetic_energy() const {
    double e = 0.0;
    for (int i = 0; i < dof(); ++i) e += 0.5 * vel_[i].dot(inertias_[i].apply(vel_[i]));
    return e;
  }

  double potential_energy() const {
    double e = 0.0;
    for (int i = 0; i < dof(); ++i) {
      const Vec3 com_w = point_position(i, bodies_[i].com);
      e += bodies_[i].mass * kGravity * com_w.z();
    }
    return e;
  }

  Vec3 system_com() const {
    Vec3 c = Vec3::Zero();
    double m = 0.0;
    for (int i = 0; i < dof(); ++i) {
      c += bodies_[i].mass * point_position(i, bodies_[i].com);
      m += bodies_[i].mass;
    }
    return c / m;
  }

 private:
  std::vector<BodyDef> bodies_;
  std::vector<SpatialInertia> inertias_;
  std::vector<SpatialTransform> x_up_;
  std::vector<Mat3> rot_w_;
  std::vector<Vec3> pos_w_;
  std::vector<Vec6> vel_;
  std::vector<Vec6> vj_;
  std::vector<Vec6> s_;
  std::vector<Vec6> fext_;
  bool has_fext_ = false;

  std::vector<Vec6> acc_ws_;
  std::vector<Vec6> force_ws_;
  std::vector<SpatialInertia> ic_ws_;
  Eigen::MatrixXd h_;
  Eigen::VectorXd bias_;
  Eigen::VectorXd qdd_ws_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace gaitforge
