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

#include "gaitforge/gait.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gaitforge {

// The sparse linear policy pi(s) = M s over a 12-entry observation, plus the
// heuristic sparsity masks and the hand-tuned warm starts that seed training.

enum class Task { slope, command, stair };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::slope: return "slope";
    case Task::command: return "command";
    case Task::stair: return "stair";
  }
  return "unknown";
}

inline Task task_from_name(const std::string& name) {
  if (name == "slope") return Task::slope;
  if (name == "command") return Task::command;
  if (name == "stair") return Task::stair;
  throw std::invalid_argument("unknown task: " + name);
}

/// Observation layout (fixed order).
enum ObsIndex : int {
  obs_roll = 0,      // psi
  obs_pitch,         // theta
  obs_yaw_err,       // e_phi
  obs_roll_rate,
  obs_pitch_rate,
  obs_yaw_rate,
  obs_plane_roll,    // gamma
  obs_plane_pitch,   // alpha
  obs_vel_err_x,
  obs_vel_err_y,
  obs_vel_err_z,
  obs_cmd_vel_x,     // v_x^d
  kObsDim
};

inline constexpr std::array<const char*, kObsDim> kObsNames = {
    "roll", "pitch", "yaw_err", "roll_rate", "pitch_rate", "yaw_rate",
    "plane_roll", "plane_pitch", "vel_err_x", "vel_err_y", "vel_err_z", "cmd_vel_x"};

/// Action row layout (fixed order).
enum ActIndex : int {
  act_step_length = 0,
  act_ellipse_yaw,
  act_shift_x,
  act_shift_y,
  act_shift_z,
  kActDim
};

inline constexpr std::array<const char*, kActDim> kActNames = {
    "step_length", "ellipse_yaw", "shift_x", "shift_y", "shift_z"};

using Observation = Eigen::Matrix<double, kObsDim, 1>;
using PolicyValues = Eigen::Matrix<double, kActDim, kObsDim>;
using PolicyMask = std::array<std::array<bool, kObsDim>, kActDim>;

struct CommandState {
  double vel_x = 0.0;  // heading-frame longitudinal target, m/s
  double vel_y = 0.0;  // lateral target, m/s
  double yaw = 0.0;    // desired heading, rad

  static constexpr double kMaxVelX = 0.6;
  static constexpr double kMaxVelY = 0.3;

  CommandState clamped() const {
    CommandState c = *this;
    c.vel_x = std::clamp(c.vel_x, -kMaxVelX, kMaxVelX);
    c.vel_y = std::clamp(c.vel_y, -kMaxVelY, kMaxVelY);
    return c;
  }
};

struct PolicyMatrix {
  PolicyValues values = PolicyValues::Zero();
  PolicyMask mask{};
  Task task = Task::slope;

  /// Zeroes every masked-out entry; call after any bulk write to values.
  void apply_mask() {
    for (int r = 0; r < kActDim; ++r)
      for (int c = 0; c < kObsDim; ++c)
        if (!mask[r][c]) values(r, c) = 0.0;
  }

  bool mask_consistent() const {
    for (int r = 0; r < kActDim; ++r)
      for (int c = 0; c < kObsDim; ++c)
        if (!mask[r][c] && values(r, c) != 0.0) return false;
    return true;
  }

  int mask_popcount() const {
    int n = 0;
    for (const auto& row : mask)
      for (bool b : row) n += b ? 1 : 0;
    return n;
  }
};

/// Task-specific heuristic sparsity pattern. All tasks share the
/// stabilization core; slope/command add terrain-adaptive shift entries and a
/// speed-to-step-length entry; stair adds the stub-recovery z-shift entry.
inline PolicyMask heuristic_mask(Task task) {
  PolicyMask m{};
  auto set = [&m](int r, int c) { m[r][c] = true; };
  // Stabilization core, common to every task.
  set(act_step_length, obs_pitch);
  set(act_shift_x, obs_vel_err_x);
  set(act_shift_z, obs_vel_err_z);
  set(act_shift_y, obs_roll);
  set(act_shift_y, obs_vel_err_y);
  set(act_ellipse_yaw, obs_yaw_err);
  // Terrain adaptation shared by all three tasks.
  set(act_shift_x, obs_plane_roll);
  set(act_shift_x, obs_plane_pitch);
  set(act_shift_z, obs_plane_roll);
  set(act_shift_z, obs_plane_pitch);
  switch (task) {
    case Task::slope:
      set(act_step_length, obs_vel_err_x);
      break;
    case Task::command:
      set(act_step_length, obs_cmd_vel_x);
      break;
    case Task::stair:
      set(act_step_length, obs_vel_err_x);
      set(act_shift_z, obs_vel_err_x);
      break;
  }
  return m;
}

/// Observation assembly. Velocity errors are expressed in the robot's heading
/// frame; gamma/alpha come from the per-step latched support plane.
inline Observation build_observation(const SimState& sim, const GaitState& gait,
                                     const CommandState& command) {
  Observation s;
  const double yaw = sim.base.yaw;
  const Vec3 v_heading = rot_z(-yaw) * sim.base_lin_vel;
  s[obs_roll] = sim.base.roll;
  s[obs_pitch] = sim.base.pitch;
  s[obs_yaw_err] = wrap_angle(command.yaw - yaw);
  s[obs_roll_rate] = sim.base_ang_vel.x();
  s[obs_pitch_rate] = sim.base_ang_vel.y();
  s[obs_yaw_rate] = sim.base_ang_vel.z();
  s[obs_plane_roll] = gait.latched_plane.roll;
  s[obs_plane_pitch] = gait.latched_plane.pitch;
  s[obs_vel_err_x] = command.vel_x - v_heading.x();
  s[obs_vel_err_y] = command.vel_y - v_heading.y();
  s[obs_vel_err_z] = 0.0 - sim.base_lin_vel.z();
  s[obs_cmd_vel_x] = command.vel_x;
  return s;
}

/// pi(s) = clamp(M s). No bias term: a zero observation maps to zero action.
inline Action evaluate(const PolicyMatrix& policy, const Observation& s,
                       const ActionLimits& limits = {}) {
  const Eigen::Matrix<double, kActDim, 1> raw = policy.values * s;
  Action a;
  a.step_length = raw[act_step_length];
  a.ellipse_yaw = raw[act_ellipse_yaw];
  a.shift_x = raw[act_shift_x];
  a.shift_y = raw[act_shift_y];
  a.shift_z = raw[act_shift_z];
  return clamp_action(a, limits);
}

struct WarmGain {
  int row;
  int col;
  double value;
};

/// Hand-tuned stabilizing gains, applied on top of the task mask. These keep
/// the robot stepping upright so training starts from a viable gait.
inline std::vector<WarmGain> default_warm_gains(Task task) {
  std::vector<WarmGain> g = {
      {act_step_length, obs_pitch, 0.4},
      {act_shift_x, obs_vel_err_x, -0.12},
      {act_shift_z, obs_vel_err_z, 0.05},
      {act_shift_y, obs_roll, 0.25},
      {act_shift_y, obs_vel_err_y, -0.12},
      {act_ellipse_yaw, obs_yaw_err, 0.5},
      {act_shift_x, obs_plane_pitch, -0.05},
      {act_shift_z, obs_plane_pitch, -0.10},
  };
  switch (task) {
    case Task::slope:
      g.push_back({act_step_length, obs_vel_err_x, 0.25});
      break;
    case Task::command:
      g.push_back({act_step_length, obs_cmd_vel_x, 0.35});
      break;
    case Task::stair:
      g.push_back({act_step_length, obs_vel_err_x, 0.25});
      g.push_back({act_shift_z, obs_vel_err_x, 0.15});
      break;
  }
  return g;
}

inline PolicyMatrix warm_start(Task task,
                               const std::vector<WarmGain>* override_gains = nullptr) {
  PolicyMatrix p;
  p.task = task;
  p.mask = heuristic_mask(task);
  const std::vector<WarmGain> gains =
      override_gains != nullptr ? *override_gains : default_warm_gains(task);
  for (const WarmGain& g : gains) p.values(g.row, g.col) = g.value;
  p.apply_mask();
  return p;
}

// --- Policy file format -----------------------------------------------------
//
//   gaitpolicy v1 <task>
//   rows 5 cols 12
//   <5 rows of 12 mask bits>
//   <5 rows of 12 values, full-precision scientific notation>

struct PolicyFormatError : std::runtime_error {
  explicit PolicyFormatError(const std::string& what) : std::runtime_error(what) {}
};

inline void save_policy(const PolicyMatrix& policy, std::ostream& os) {
  os << "gaitpolicy v1 " << task_name(policy.task) << "\n";
  os << "rows " << kActDim << " cols " << kObsDim << "\n";
  for (int r = 0; r < kActDim; ++r) {
    for (int c = 0; c < kObsDim; ++c) os << (c ? " " : "") << (policy.mask[r][c] ? 1 : 0);
    os << "\n";
  }
  char buf[40];
  for (int r = 0; r < kActDim; ++r) {
    for (int c = 0; c < kObsDim; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17e", policy.values(r, c));
      os << (c ? " " : "") << buf;
    }
    os << "\n";
  }
}

inline void save_policy(const PolicyMatrix& policy, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open policy file for writing: " + path);
  save_policy(policy, f);
}

inline PolicyMatrix load_policy(std::istream& is) {
  PolicyMatrix p;
  std::string magic, version, task;
  if (!(is >> magic >> version >> task) || magic != "gaitpolicy" || version != "v1")
    throw PolicyFormatError("bad policy header");
  p.task = task_from_name(task);
  std::string rows_kw, cols_kw;
  int rows = 0, cols = 0;
  if (!(is >> rows_kw >> rows >> cols_kw >> cols) || rows_kw != "rows" || cols_kw != "cols" ||
      rows != kActDim || cols != kObsDim)
    throw PolicyFormatError("bad policy dimensions");
  for (int r = 0; r < kActDim; ++r)
    for (int c = 0; c < kObsDim; ++c) {
      int bit;
      if (!(is >> bit) || (bit != 0 && bit != 1)) throw PolicyFormatError("bad mask bit");
      p.mask[r][c] = bit == 1;
    }
  for (int r = 0; r < kActDim; ++r)
    for (int c = 0; c < kObsDim; ++c) {
      double v;
      if (!(is >> v)) throw PolicyFormatError("bad value entry");
      p.values(r, c) = v;
    }
  if (!p.mask_consistent())
    throw PolicyFormatError("masked entry holds a nonzero value");
  return p;
}

inline PolicyMatrix load_policy(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open policy file: " + path);
  return load_policy(f);
}

}  // namespace gaitforge
