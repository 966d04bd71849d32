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

#include "gaitforge/eval.hpp"

#include <charconv>
#include <map>
#include <optional>
#include <sstream>

namespace gaitforge {

// Flat sectioned key = value experiment configuration. Every key is validated
// against the schema below; unknown sections or keys are errors.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  WorldConfig world;
  TrainConfig trainer;
  EvalConfig eval;
  Task task = Task::command;
  std::optional<PolicyMask> mask_override;
  std::vector<WarmGain> warm_gains;  // empty = task defaults
  Terrain terrain = Terrain::make_flat();
  std::string output_dir = "out";
  uint64_t seed = 0;
  int workers = 0;

  PolicyMatrix make_warm_start() const {
    PolicyMatrix p = warm_gains.empty() ? warm_start(task) : warm_start(task, &warm_gains);
    if (mask_override) {
      p.mask = *mask_override;
      p.apply_mask();
    }
    return p;
  }

  EpisodeParams episode_params() const {
    return {trainer.episode_len, trainer.termination, trainer.weights, task};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

inline std::vector<KeyValue> parse_kv_stream(std::istream& is) {
  std::vector<KeyValue> out;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    out.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
  }
  return out;
}

inline double to_double(const KeyValue& kv) {
  try {
    size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(kv.line) + ": bad number for " + kv.key);
  }
}

inline long to_long(const KeyValue& kv) {
  try {
    size_t pos = 0;
    const long v = std::stol(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(kv.line) + ": bad integer for " + kv.key);
  }
}

inline bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw ConfigError("line " + std::to_string(kv.line) + ": bad boolean for " + kv.key);
}

inline int leg_joint_index(const std::string& name) {
  for (int k = 0; k < kJointsPerLeg; ++k)
    if (name == kLegJointNames[k]) return k;
  return -1;
}

inline int action_index(const std::string& name) {
  for (int k = 0; k < kActDim; ++k)
    if (name == kActNames[k]) return k;
  return -1;
}

inline int obs_index(const std::string& name) {
  for (int k = 0; k < kObsDim; ++k)
    if (name == kObsNames[k]) return k;
  return -1;
}

}  // namespace detail

/// Parses a terrain spec string: flat | slope:<deg>[:<roll_deg>] |
/// stairs:<len>:<height> | sinusoid:<amp>:<wavelength> |
/// varying:<len>:<deg>[:<len>:<deg>...]
inline Terrain parse_terrain_spec(const std::string& spec) {
  const auto parts = detail::split(spec, ':');
  if (parts.empty()) throw ConfigError("empty terrain spec");
  const std::string& kind = parts[0];
  auto num = [&](size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (const std::exception&) {
      throw ConfigError("bad terrain spec: " + spec);
    }
  };
  if (kind == "flat") return Terrain::make_flat();
  if (kind == "slope")
    return Terrain::make_slope(deg2rad(num(1)), parts.size() > 2 ? deg2rad(num(2)) : 0.0);
  if (kind == "stairs") {
    Terrain t = Terrain::make_stairs(num(1), num(2));
    t.origin_offset = 0.4;
    return t;
  }
  if (kind == "sinusoid") return Terrain::make_sinusoid(num(1), num(2));
  if (kind == "varying") {
    if (parts.size() < 3 || (parts.size() - 1) % 2 != 0)
      throw ConfigError("bad varying terrain spec: " + spec);
    std::vector<SlopeSegment> segments;
    for (size_t i = 1; i + 1 < parts.size(); i += 2)
      segments.push_back({num(i), deg2rad(num(i + 1))});
    return Terrain::make_varying(segments);
  }
  throw ConfigError("unknown terrain kind: " + kind);
}

/// Parses a velocity list: "lo:step:hi" range syntax or a comma list.
inline std::vector<double> parse_velocities(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = detail::split(spec, ':');
    if (parts.size() != 3) throw ConfigError("bad velocity range: " + spec);
    double lo, step, hi;
    try {
      lo = std::stod(parts[0]);
      step = std::stod(parts[1]);
      hi = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw ConfigError("bad velocity range: " + spec);
    }
    if (!(step > 0.0)) throw ConfigError("velocity range step must be positive");
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  } else {
    for (const auto& tok : detail::split(spec, ',')) {
      if (tok.empty()) continue;
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad velocity list: " + spec);
      }
    }
  }
  if (out.empty()) throw ConfigError("empty velocity list");
  return out;
}

inline PolicyMask parse_mask_spec(const std::string& spec) {
  PolicyMask mask{};
  for (const auto& tok : detail::split(spec, ',')) {
    if (tok.empty()) continue;
    const auto pair = detail::split(tok, ':');
    if (pair.size() != 2) throw ConfigError("bad mask entry: " + tok);
    const int r = detail::action_index(pair[0]);
    const int c = detail::obs_index(pair[1]);
    if (r < 0 || c < 0) throw ConfigError("unknown mask entry: " + tok);
    mask[r][c] = true;
  }
  return mask;
}

inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  bool task_seen = false;
  const auto kvs = detail::parse_kv_stream(is);
  using detail::KeyValue;

  auto fail = [](const KeyValue& kv) {
    throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key +
                      "' in section [" + kv.section + "]");
  };

  for (const KeyValue& kv : kvs) {
    const std::string& s = kv.section;
    const std::string& k = kv.key;
    if (s == "run") {
      if (k == "output_dir") cfg.output_dir = kv.value;
      else if (k == "seed") cfg.seed = static_cast<uint64_t>(detail::to_long(kv));
      else if (k == "workers") cfg.workers = static_cast<int>(detail::to_long(kv));
      else fail(kv);
    } else if (s == "robot") {
      RobotModel& m = cfg.world.robot;
      if (k == "torso_mass") m.torso_mass = detail::to_double(kv);
      else if (k == "leg_mass_per_leg") m.leg_mass_per_leg = detail::to_double(kv);
      else if (k == "hip_width") m.hip_width = detail::to_double(kv);
      else if (k == "thigh_length") m.thigh_length = detail::to_double(kv);
      else if (k == "shank_length") m.shank_length = detail::to_double(kv);
      else if (k == "foot_half_length") m.foot_half_length = detail::to_double(kv);
      else if (k == "foot_half_width") m.foot_half_width = detail::to_double(kv);
      else if (k == "ankle_height") m.ankle_height = detail::to_double(kv);
      else if (k == "ankle_roll_offset") m.ankle_roll_offset = detail::to_double(kv);
      else if (k == "ankle_pitch_offset") m.ankle_pitch_offset = detail::to_double(kv);
      else if (k.rfind("joint_limits_", 0) == 0) {
        const int j = detail::leg_joint_index(k.substr(13));
        const auto parts = detail::split(kv.value, ':');
        if (j < 0 || parts.size() != 2) fail(kv);
        try {
          m.joint_limits[j] = {std::stod(parts[0]), std::stod(parts[1])};
        } catch (const std::exception&) {
          throw ConfigError("line " + std::to_string(kv.line) + ": bad joint limits");
        }
      } else if (k.rfind("torque_limits_", 0) == 0) {
        const int j = detail::leg_joint_index(k.substr(14));
        if (j < 0) fail(kv);
        m.torque_limits[j] = detail::to_double(kv);
      } else fail(kv);
    } else if (s == "physics") {
      PhysicsParams& p = cfg.world.physics;
      if (k == "dt") cfg.world.dt = detail::to_double(kv);
      else if (k == "contact_stiffness") p.contact_stiffness = detail::to_double(kv);
      else if (k == "contact_damping") p.contact_damping = detail::to_double(kv);
      else if (k == "tangential_stiffness") p.tangential_stiffness = detail::to_double(kv);
      else if (k == "tangential_damping") p.tangential_damping = detail::to_double(kv);
      else fail(kv);
    } else if (s == "terrain") {
      Terrain& t = cfg.terrain;
      if (k == "kind") {
        if (kv.value == "flat") t.kind = TerrainKind::flat;
        else if (kv.value == "slope") t.kind = TerrainKind::slope;
        else if (kv.value == "varying_slope") t.kind = TerrainKind::varying_slope;
        else if (kv.value == "sinusoid") t.kind = TerrainKind::sinusoid;
        else if (kv.value == "stairs") t.kind = TerrainKind::stairs;
        else throw ConfigError("line " + std::to_string(kv.line) + ": unknown terrain kind");
      } else if (k == "pitch_deg") t.slope_pitch = deg2rad(detail::to_double(kv));
      else if (k == "roll_deg") t.slope_roll = deg2rad(detail::to_double(kv));
      else if (k == "amplitude") t.amplitude = detail::to_double(kv);
      else if (k == "wavelength") t.wavelength = detail::to_double(kv);
      else if (k == "step_length") t.step_length = detail::to_double(kv);
      else if (k == "step_height") t.step_height = detail::to_double(kv);
      else if (k == "friction") t.friction = detail::to_double(kv);
      else if (k == "origin_offset") t.origin_offset = detail::to_double(kv);
      else if (k == "segments") {
        t.segments.clear();
        for (const auto& tok : detail::split(kv.value, ',')) {
          const auto p = detail::split(tok, ':');
          if (p.size() != 2) throw ConfigError("line " + std::to_string(kv.line) + ": bad segment");
          try {
            t.segments.push_back({std::stod(p[0]), deg2rad(std::stod(p[1]))});
          } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(kv.line) + ": bad segment");
          }
        }
      } else fail(kv);
    } else if (s == "gait") {
      GaitParams& g = cfg.world.gait;
      if (k == "t_swing") g.t_swing = detail::to_double(kv);
      else if (k == "clearance") g.clearance = detail::to_double(kv);
      else if (k == "contact_force_threshold") g.contact_force_threshold = detail::to_double(kv);
      else if (k == "contact_debounce_ticks") g.contact_debounce_ticks = static_cast<int>(detail::to_long(kv));
      else if (k == "tau_min_guard") g.tau_min_guard = detail::to_double(kv);
      else if (k == "nominal_foot_depth") g.nominal_foot_depth = detail::to_double(kv);
      else if (k == "torso_p_roll") g.torso_p_roll = detail::to_double(kv);
      else if (k == "torso_d_roll") g.torso_d_roll = detail::to_double(kv);
      else if (k == "torso_p_pitch") g.torso_p_pitch = detail::to_double(kv);
      else if (k == "torso_d_pitch") g.torso_d_pitch = detail::to_double(kv);
      else if (k == "stance_knee_p") g.stance_knee_p = detail::to_double(kv);
      else if (k == "stance_knee_d") g.stance_knee_d = detail::to_double(kv);
      else if (k == "stance_hip_yaw_p") g.stance_hip_yaw_p = detail::to_double(kv);
      else if (k == "stance_hip_yaw_d") g.stance_hip_yaw_d = detail::to_double(kv);
      else if (k == "stance_ankle_damping") g.stance_ankle_damping = detail::to_double(kv);
      else if (k == "ankle_mode") {
        if (kv.value == "level") g.ankle_mode = AnkleMode::level;
        else if (kv.value == "paper") g.ankle_mode = AnkleMode::paper;
        else throw ConfigError("line " + std::to_string(kv.line) + ": unknown ankle mode");
      } else if (k == "level_ankle_roll_offset") g.level_ankle_roll_offset = detail::to_double(kv);
      else if (k == "level_ankle_pitch_offset") g.level_ankle_pitch_offset = detail::to_double(kv);
      else if (k.rfind("kp_", 0) == 0) {
        const int j = detail::leg_joint_index(k.substr(3));
        if (j < 0) fail(kv);
        g.kp_swing[j] = detail::to_double(kv);
      } else if (k.rfind("kd_", 0) == 0) {
        const int j = detail::leg_joint_index(k.substr(3));
        if (j < 0) fail(kv);
        g.kd_swing[j] = detail::to_double(kv);
      } else fail(kv);
    } else if (s == "policy") {
      ControlConfig& c = cfg.world.control;
      if (k == "task") {
        cfg.task = task_from_name(kv.value);
        task_seen = true;
      } else if (k == "update_mode") {
        if (kv.value == "per_step") c.update_mode = PolicyUpdateMode::per_step;
        else if (kv.value == "continuous") c.update_mode = PolicyUpdateMode::continuous;
        else throw ConfigError("line " + std::to_string(kv.line) + ": unknown update mode");
      } else if (k == "update_rate_hz") c.update_rate_hz = detail::to_double(kv);
      else if (k == "clamp_step_length") c.action_limits.step_length = detail::to_double(kv);
      else if (k == "clamp_ellipse_yaw") c.action_limits.ellipse_yaw = detail::to_double(kv);
      else if (k == "clamp_shift_x") c.action_limits.shift_x = detail::to_double(kv);
      else if (k == "clamp_shift_y") c.action_limits.shift_y = detail::to_double(kv);
      else if (k == "clamp_shift_z") c.action_limits.shift_z = detail::to_double(kv);
      else if (k == "mask") cfg.mask_override = parse_mask_spec(kv.value);
      else if (k.rfind("warm_", 0) == 0) {
        const std::string rest = k.substr(5);
        bool matched = false;
        for (int r = 0; r < kActDim && !matched; ++r) {
          const std::string act = kActNames[r];
          if (rest.rfind(act + "_", 0) == 0) {
            const int c2 = detail::obs_index(rest.substr(act.size() + 1));
            if (c2 >= 0) {
              cfg.warm_gains.push_back({r, c2, detail::to_double(kv)});
              matched = true;
            }
          }
        }
        if (!matched) fail(kv);
      } else fail(kv);
    } else if (s == "trainer") {
      TrainConfig& t = cfg.trainer;
      if (k == "beta") t.ars.beta = detail::to_double(kv);
      else if (k == "nu") t.ars.nu = detail::to_double(kv);
      else if (k == "n_dirs") t.ars.n_dirs = static_cast<int>(detail::to_long(kv));
      else if (k == "top_b") t.ars.top_b = static_cast<int>(detail::to_long(kv));
      else if (k == "sigma_floor") t.ars.sigma_floor = detail::to_double(kv);
      else if (k == "episode_len") t.episode_len = detail::to_long(kv);
      else if (k == "iterations") t.iterations = static_cast<int>(detail::to_long(kv));
      else if (k == "checkpoint_every") t.checkpoint_every = static_cast<int>(detail::to_long(kv));
      else if (k == "w1") t.weights.w1 = detail::to_double(kv);
      else if (k == "w2") t.weights.w2 = detail::to_double(kv);
      else if (k == "w3") t.weights.w3 = detail::to_double(kv);
      else if (k == "w4") t.weights.w4 = detail::to_double(kv);
      else if (k == "w5") t.weights.w5 = detail::to_double(kv);
      else if (k == "W") t.weights.W = detail::to_double(kv);
      else if (k == "topple_angle") t.termination.topple_angle = detail::to_double(kv);
      else if (k == "height_fraction") t.termination.min_height_fraction = detail::to_double(kv);
      else if (k == "slope_set_deg") {
        t.sampler.slope_set_deg.clear();
        for (const auto& tok : detail::split(kv.value, ','))
          if (!tok.empty()) t.sampler.slope_set_deg.push_back(std::stod(tok));
      } else if (k == "stair_set") {
        t.sampler.stair_set.clear();
        for (const auto& tok : detail::split(kv.value, ',')) {
          const auto p = detail::split(tok, ':');
          if (p.size() != 2) throw ConfigError("line " + std::to_string(kv.line) + ": bad stair set");
          t.sampler.stair_set.emplace_back(std::stod(p[0]), std::stod(p[1]));
        }
      } else if (k == "target_velocity") t.sampler.target_velocity = detail::to_double(kv);
      else if (k == "command_interval") t.sampler.command_interval = detail::to_double(kv);
      else if (k == "command_max_dvx") t.sampler.command_max_dvx = detail::to_double(kv);
      else if (k == "command_max_dvy") t.sampler.command_max_dvy = detail::to_double(kv);
      else if (k == "command_max_dyaw_deg") t.sampler.command_max_dyaw = deg2rad(detail::to_double(kv));
      else if (k == "stair_start") t.sampler.stair_start = detail::to_double(kv);
      else if (k == "friction") t.sampler.friction = detail::to_double(kv);
      else if (k == "log_wall_time") t.log_wall_time = detail::to_bool(kv);
      else fail(kv);
    } else if (s == "eval") {
      EvalConfig& e = cfg.eval;
      if (k == "trials") e.trials = static_cast<int>(detail::to_long(kv));
      else if (k == "episode_len") e.episode_len = detail::to_long(kv);
      else if (k == "log_every") e.log_every = static_cast<int>(detail::to_long(kv));
      else if (k == "forward_bias") e.forward_bias = detail::to_bool(kv);
      else fail(kv);
    } else {
      throw ConfigError("line " + std::to_string(kv.line) + ": unknown section [" + s + "]");
    }
  }

  (void)task_seen;
  cfg.world.robot.validate();
  cfg.trainer.task = cfg.task;
  cfg.trainer.sampler.task = cfg.task;
  cfg.trainer.seed = cfg.seed;
  cfg.trainer.workers = cfg.workers;
  cfg.trainer.sampler.episode_seconds =
      static_cast<double>(cfg.trainer.episode_len) * cfg.world.dt;
  if (cfg.world.dt <= 0.0 || cfg.world.dt > cfg.world.physics.max_dt)
    throw ConfigError("dt must lie in (0, " + std::to_string(cfg.world.physics.max_dt) + "]");
  if (cfg.trainer.ars.top_b <= 0 || cfg.trainer.ars.top_b > cfg.trainer.ars.n_dirs)
    throw ConfigError("trainer: need 0 < top_b <= n_dirs");
  if (!(cfg.trainer.ars.beta > 0.0) || !(cfg.trainer.ars.nu > 0.0))
    throw ConfigError("trainer: beta and nu must be positive");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  return parse_config(f);
}

}  // namespace gaitforge
