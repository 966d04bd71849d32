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

namespace gaitforge {

// 6D spatial algebra in Featherstone's convention. Motion vectors are
// (angular; linear), force vectors are (moment; force). A SpatialTransform
// X = (E, r) maps vectors expressed in frame A to frame B, where E rotates
// A-coordinates into B-coordinates and r is the origin of B expressed in A.

struct SpatialTransform {
  Mat3 E = Mat3::Identity();
  Vec3 r = Vec3::Zero();

  /// Motion map: (w; v) |-> (E w; E (v - r x w)).
  Vec6 apply_motion(const Vec6& m) const {
    const Vec3 w = m.head<3>();
    const Vec3 v = m.tail<3>();
    Vec6 out;
    out.head<3>() = E * w;
    out.tail<3>() = E * (v - r.cross(w));
    return out;
  }

  /// Force map into this frame: (n; f) |-> (E (n - r x f); E f).
  Vec6 apply_force(const Vec6& f) const {
    const Vec3 n = f.head<3>();
    const Vec3 fl = f.tail<3>();
    Vec6 out;
    out.head<3>() = E * (n - r.cross(fl));
    out.tail<3>() = E * fl;
    return out;
  }

  /// Force expressed in this (child) frame mapped back to the parent frame,
  /// i.e. the transpose of apply_motion.
  Vec6 apply_force_to_parent(const Vec6& f) const {
    const Vec3 n = E.transpose() * f.head<3>();
    const Vec3 fl = E.transpose() * f.tail<3>();
    Vec6 out;
    out.head<3>() = n + r.cross(fl);
    out.tail<3>() = fl;
    return out;
  }

  /// Composition: if this maps A->B and other maps B->C, returns A->C.
  SpatialTransform then(const SpatialTransform& other) const {
    SpatialTransform out;
    out.E = other.E * E;
    out.r = r + E.transpose() * other.r;
    return out;
  }
};

/// Spatial cross product for motion vectors: v x m.
inline Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  const Vec3 w = v.head<3>(), vl = v.tail<3>();
  const Vec3 mw = m.head<3>(), ml = m.tail<3>();
  Vec6 out;
  out.head<3>() = w.cross(mw);
  out.tail<3>() = vl.cross(mw) + w.cross(ml);
  return out;
}

/// Spatial cross product for force vectors: v x* f.
inline Vec6 cross_force(const Vec6& v, const Vec6& f) {
  const Vec3 w = v.head<3>(), vl = v.tail<3>();
  const Vec3 n = f.head<3>(), fl = f.tail<3>();
  Vec6 out;
  out.head<3>() = w.cross(n) + vl.cross(fl);
  out.tail<3>() = w.cross(fl);
  return out;
}

/// Rigid-body spatial inertia about the body frame origin.
struct SpatialInertia {
  double mass = 0.0;
  Vec3 h = Vec3::Zero();          // mass * com offset
  Mat3 I = Mat3::Zero();          // rotational inertia about the origin

  static SpatialInertia from_com(double mass, const Vec3& com, const Mat3& inertia_com) {
    SpatialInertia si;
    si.mass = mass;
    si.h = mass * com;
    const Mat3 cx = skew(com);
    si.I = inertia_com + mass * cx * cx.transpose();
    return si;
  }

  Vec6 apply(const Vec6& m) const {
    const Vec3 w = m.head<3>(), v = m.tail<3>();
    Vec6 out;
    out.head<3>() = I * w + h.cross(v);
    out.tail<3>() = mass * v - h.cross(w);
    return out;
  }

  /// Inertia of this body (expressed in child coordinates of X) re-expressed
  /// in the parent frame: X^T I X for the motion transform X (parent->child).
  SpatialInertia to_parent(const SpatialTransform& x) const {
    SpatialInertia out;
    out.mass = mass;
    const Vec3 h_p = x.E.transpose() * h + mass * x.r;
    out.h = h_p;
    const Mat3 Ip = x.E.transpose() * I * x.E;
    const Mat3 rx = skew(x.r);
    const Mat3 hx = skew(x.E.transpose() * h);
    out.I = Ip - rx * hx - (hx + mass * rx) * rx;
    return out;
  }

  SpatialInertia& operator+=(const SpatialInertia& o) {
    mass += o.mass;
    h += o.h;
    I += o.I;
    return *this;
  }
};

}  // namespace gaitforge
