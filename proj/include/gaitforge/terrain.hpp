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

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace gaitforge {

// Parametric heightfield terrains. Sign convention for slopes: the parameter
// is the support-plane pitch in the library Euler convention, so positive
// pitch descends along +x, h = -tan(alpha) * x, and positive roll raises +y,
// h = +tan(gamma) * y.

enum class TerrainKind { flat, slope, varying_slope, sinusoid, stairs };

struct SlopeSegment {
  double length = 1.0;  // m along +x
  double pitch = 0.0;   // rad, same sign convention as slope
};

struct Terrain {
  TerrainKind kind = TerrainKind::flat;
  double slope_pitch = 0.0;  // alpha_0
  double slope_roll = 0.0;   // gamma_0
  std::vector<SlopeSegment> segments;
  double amplitude = 0.05;
  double wavelength = 2.0;
  double step_length = 0.4;
  double step_height = 0.085;
  double friction = 0.8;
  double origin_offset = 0.0;  // pattern shift along +x

  static Terrain make_flat(double friction = 0.8) {
    Terrain t;
    t.kind = TerrainKind::flat;
    t.friction = friction;
    return t;
  }
  static Terrain make_slope(double pitch, double roll = 0.0) {
    Terrain t;
    t.kind = TerrainKind::slope;
    t.slope_pitch = pitch;
    t.slope_roll = roll;
    return t;
  }
  static Terrain make_stairs(double step_length, double step_height) {
    Terrain t;
    t.kind = TerrainKind::stairs;
    t.step_length = step_length;
    t.step_height = step_height;
    return t;
  }
  static Terrain make_sinusoid(double amplitude, double wavelength) {
    Terrain t;
    t.kind = TerrainKind::sinusoid;
    t.amplitude = amplitude;
    t.wavelength = wavelength;
    return t;
  }
  static Terrain make_varying(std::vector<SlopeSegment> segments) {
    Terrain t;
    t.kind = TerrainKind::varying_slope;
    t.segments = std::move(segments);
    return t;
  }
};

inline double terrain_height(const Terrain& t, double x, double y) {
  x -= t.origin_offset;
  switch (t.kind) {
    case TerrainKind::flat:
      return 0.0;
    case TerrainKind::slope:
      return -std::tan(t.slope_pitch) * x + std::tan(t.slope_roll) * y;
    case TerrainKind::varying_slope: {
      if (x <= 0.0 || t.segments.empty()) return 0.0;
      double h = 0.0;
      double x0 = 0.0;
      for (size_t i = 0; i < t.segments.size(); ++i) {
        const double len = t.segments[i].length;
        const double grade = -std::tan(t.segments[i].pitch);
        const bool last = i + 1 == t.segments.size();
        if (x < x0 + len || last) return h + grade * (x - x0);
        h += grade * len;
        x0 += len;
      }
      return h;
    }
    case TerrainKind::sinusoid:
      return t.amplitude * std::sin(2.0 * kPi * x / t.wavelength);
    case TerrainKind::stairs:
      if (x < 0.0) return 0.0;
      return std::floor(x / t.step_length) * t.step_height;
  }
  return 0.0;
}

/// Outward unit normal from the heightfield gradient. Stairs are piecewise
/// flat, so their normal is vertical everywhere the gradient exists.
inline Vec3 terrain_normal(const Terrain& t, double x, double y) {
  x -= t.origin_offset;
  (void)y;
  double dhdx = 0.0, dhdy = 0.0;
  switch (t.kind) {
    case TerrainKind::flat:
    case TerrainKind::stairs:
      break;
    case TerrainKind::slope:
      dhdx = -std::tan(t.slope_pitch);
      dhdy = std::tan(t.slope_roll);
      break;
    case TerrainKind::varying_slope: {
      if (x <= 0.0 || t.segments.empty()) break;
      double x0 = 0.0;
      dhdx = -std::tan(t.segments.back().pitch);
      for (const auto& seg : t.segments) {
        if (x < x0 + seg.length) {
          dhdx = -std::tan(seg.pitch);
          break;
        }
        x0 += seg.length;
      }
      break;
    }
    case TerrainKind::sinusoid:
      dhdx = t.amplitude * (2.0 * kPi / t.wavelength) *
             std::cos(2.0 * kPi * x / t.wavelength);
      break;
  }
  return Vec3(-dhdx, -dhdy, 1.0).normalized();
}

inline std::string terrain_kind_name(TerrainKind k) {
  switch (k) {
    case TerrainKind::flat: return "flat";
    case TerrainKind::slope: return "slope";
    case TerrainKind::varying_slope: return "varying_slope";
    case TerrainKind::sinusoid: return "sinusoid";
    case TerrainKind::stairs: return "stairs";
  }
  return "unknown";
}

/// Short human-readable tag used in sweep tables and logs.
inline std::string terrain_label(const Terrain& t) {
  char buf[96];
  switch (t.kind) {
    case TerrainKind::flat:
      return "flat";
    case TerrainKind::slope:
      std::snprintf(buf, sizeof(buf), "slope_%+.1fdeg", rad2deg(t.slope_pitch));
      return buf;
    case TerrainKind::varying_slope:
      std::snprintf(buf, sizeof(buf), "varying_%zuseg", t.segments.size());
      return buf;
    case TerrainKind::sinusoid:
      std::snprintf(buf, sizeof(buf), "sinusoid_a%.3f_l%.2f", t.amplitude, t.wavelength);
      return buf;
    case TerrainKind::stairs:
      std::snprintf(buf, sizeof(buf), "stairs_%.2fx%.3f", t.step_length, t.step_height);
      return buf;
  }
  return "unknown";
}

}  // namespace gaitforge
