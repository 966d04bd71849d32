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

#include "gaitforge/policy.hpp"
#include "gaitforge/rng.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace gaitforge {

// Episode machinery shared by training and evaluation: reward functions,
// per-episode terrain/command sampling, and the deterministic
// physics + gait + policy loop.

struct RewardWeights {
  double w1 = 10.0;   // roll kernel
  double w2 = 10.0;   // pitch kernel
  double w3 = 5.0;    // heading error kernel
  double w4 = 100.0;  // height error kernel
  double w5 = 50.0;   // velocity error kernel (command reward)
  double W = 30.0;    // per-tick distance weight (terrain reward)
};

inline double gaussian_kernel(double w, double x) { return std::exp(-w * x * x); }

/// Terrain-task reward: four attitude/height kernels plus weighted per-tick
/// progress along the heading direction.
inline double reward_terrain(double roll, double pitch, double yaw_err, double height_err,
                             double dx, const RewardWeights& w) {
  return gaussian_kernel(w.w1, roll) + gaussian_kernel(w.w2, pitch) +
         gaussian_kernel(w.w3, yaw_err) + gaussian_kernel(w.w4, height_err) + w.W * dx;
}

/// Command-task reward: progress term replaced by heading-velocity tracking.
inline double reward_command(double roll, double pitch, double yaw_err, double height_err,
                             double vel_err, const RewardWeights& w) {
  return gaussian_kernel(w.w1, roll) + gaussian_kernel(w.w2, pitch) +
         gaussian_kernel(w.w3, yaw_err) + gaussian_kernel(w.w4, height_err) +
         gaussian_kernel(w.w5, vel_err);
}

struct TerminationParams {
  double topple_angle = 0.6;        // rad, roll or pitch
  double min_height_fraction = 0.6;  // of nominal base height above terrain
};

enum class TerminationCause { max_len, topple, height, diverged };

inline const char* termination_name(TerminationCause c) {
  switch (c) {
    case TerminationCause::max_len: return "max_len";
    case TerminationCause::topple: return "topple";
    case TerminationCause::height: return "height";
    case TerminationCause::diverged: return "diverged";
  }
  return "unknown";
}

struct EpisodeResult {
  double total_reward = 0.0;
  long ticks_survived = 0;
  double distance = 0.0;  // along the commanded heading
  TerminationCause termination_cause = TerminationCause::max_len;
};

struct CommandSegment {
  double t_start = 0.0;
  CommandState command;
};

struct CommandSchedule {
  std::vector<CommandSegment> segments;  // sorted by t_start, first at t=0

  static CommandSchedule constant(const CommandState& c) { return {{{0.0, c}}}; }

  const CommandState& at(double t) const {
    size_t i = 0;
    while (i + 1 < segments.size() && segments[i + 1].t_start <= t) ++i;
    return segments[i].command;
  }
};

struct EpisodeSetup {
  Terrain terrain;
  CommandSchedule commands = CommandSchedule::constant({});
};

enum class PolicyUpdateMode { per_step, continuous };

struct ControlConfig {
  PolicyUpdateMode update_mode = PolicyUpdateMode::continuous;
  double update_rate_hz = 25.0;
  ActionLimits action_limits;
};

/// Physical context of a rollout, fixed across an experiment.
struct WorldConfig {
  RobotModel robot;
  PhysicsParams physics;
  GaitParams gait;
  ControlConfig control;
  double dt = 5e-4;
};

/// Per-episode numbers: length, termination, reward shape.
struct EpisodeParams {
  long episode_len = 15000;
  TerminationParams termination;
  RewardWeights weights;
  Task task = Task::command;
};

struct PushSpec {
  double impulse = 0.0;  // N s
  Vec3 direction = Vec3::UnitY();
  double t_apply = 1.0;
  double duration = 0.1;
};

struct TickRecord {
  double time = 0.0;
  BasePose base;
  Vec3 base_lin_vel = Vec3::Zero();
  Vec3 base_ang_vel = Vec3::Zero();
  JointVector joints = JointVector::Zero();
  JointVector joint_vel = JointVector::Zero();
  JointTorques torques = JointTorques::Zero();
  double tau = 0.0;
  Leg swing_leg = Leg::left;
  Action action;
  Observation observation = Observation::Zero();
  double contact_normal_left = 0.0;
  double contact_normal_right = 0.0;
  CommandState command;
  double height_err = 0.0;
  double dt = 0.0;  // wall coverage of this record (dt * log_every)
};

struct RolloutLog {
  std::vector<TickRecord> ticks;
};

/// Standing pose with level feet: two-link IK places the ankle, the ankle
/// pitch levels the sole, and the base height puts both soles on the terrain.
inline SimState initial_standing_state(const RobotModel& model, const GaitParams& gait,
                                       const Terrain& terrain) {
  const double za = gait.nominal_foot_depth + model.ankle_height;  // ankle z in hip frame
  const double d = -za;
  const double a = model.thigh_length, b = model.shank_length;
  const double cos_outer = std::clamp((a * a + b * b - d * d) / (2.0 * a * b), -1.0, 1.0);
  const double knee = kPi - std::acos(cos_outer);
  const double hip_pitch = -std::atan2(b * std::sin(knee), a + b * std::cos(knee));
  const double ankle_pitch = -(hip_pitch + knee);

  SimState s;
  for (Leg leg : {Leg::left, Leg::right}) {
    const int o = leg == Leg::left ? 0 : kJointsPerLeg;
    s.joints[o + 2] = hip_pitch;
    s.joints[o + 3] = knee;
    s.joints[o + 4] = ankle_pitch;
  }
  const double ground = terrain_height(terrain, 0.0, 0.0);
  s.base.position = Vec3(0.0, 0.0, ground - gait.nominal_foot_depth);
  return s;
}

/// Gait state at episode start: left leg swings first, support plane and
/// knee hold latched from the right (stance) foot, action from the policy.
inline GaitState initial_gait_state(BipedSim& sim, const SimState& state,
                                    const PolicyMatrix& policy, const ControlConfig& control,
                                    const CommandState& command) {
  GaitState g;
  g.swing_leg = Leg::left;
  sim.refresh_kinematics(state);
  g.latched_plane = estimate_support_plane(sim.foot_rotation(Leg::right));
  g.stance_knee_hold = state.joints[j_r_knee];
  g.latched_action = evaluate(policy, build_observation(state, g, command),
                              control.action_limits);
  return g;
}

/// Runs one deterministic episode. A non-null `log` collects every
/// `log_every`-th tick. Returns the accumulated reward, survival ticks,
/// heading distance, and the termination cause.
inline EpisodeResult rollout(const WorldConfig& world, const PolicyMatrix& policy,
                             const EpisodeSetup& setup, const EpisodeParams& params,
                             const PushSpec* push = nullptr, RolloutLog* log = nullptr,
                             int log_every = 8) {
  BipedSim sim(world.robot, world.physics);
  SimState state = initial_standing_state(world.robot, world.gait, setup.terrain);
  CommandState command = setup.commands.at(0.0).clamped();
  GaitState gait = initial_gait_state(sim, state, policy, world.control, command);
  ContactHistory contact_history;

  const double dt = world.dt;
  const double nominal_height = -world.gait.nominal_foot_depth;
  long policy_period = 0;
  if (world.control.update_mode == PolicyUpdateMode::continuous &&
      world.control.update_rate_hz > 0.0)
    policy_period = std::max<long>(1, std::lround(1.0 / (world.control.update_rate_hz * dt)));

  EpisodeResult result;
  ExternalForce push_force;

  for (long tick = 0; tick < params.episode_len; ++tick) {
    const double t = state.time;
    command = setup.commands.at(t).clamped();

    if (policy_period > 0 && tick % policy_period == 0 && tick > 0) {
      gait.latched_action = evaluate(policy, build_observation(state, gait, command),
                                     world.control.action_limits);
    }

    const JointTorques torques = compute_torques(world.robot, state, gait, world.gait);

    const ExternalForce* push_ptr = nullptr;
    if (push != nullptr && t >= push->t_apply && t < push->t_apply + push->duration) {
      push_force.force = push->direction.normalized() * (push->impulse / push->duration);
      push_ptr = &push_force;
    }

    const Vec3 pos_before = state.base.position;
    const StepOutcome outcome = sim.step(state, torques, setup.terrain, dt, push_ptr);

    // Contact-driven phase machine; re-latch at step events.
    const bool swing_contact =
        detect_contact(outcome.contact, gait.swing_leg, world.gait, contact_history);
    const GaitState advanced = advance_phase(gait, dt, swing_contact, world.gait);
    const bool step_event = advanced.steps_completed > gait.steps_completed;
    gait = advanced;
    if (step_event) {
      sim.refresh_kinematics(state);
      const Leg stance = gait.swing_leg == Leg::left ? Leg::right : Leg::left;
      gait.latched_plane = estimate_support_plane(sim.foot_rotation(stance));
      gait.stance_knee_hold = state.joints[leg_joint(stance, 3)];
      contact_history.streak = {0, 0};
      gait.latched_action = evaluate(policy, build_observation(state, gait, command),
                                     world.control.action_limits);
    }

    // Per-tick reward and bookkeeping.
    const double heading = command.yaw;
    const Vec3 delta = state.base.position - pos_before;
    const double dx = std::cos(heading) * delta.x() + std::sin(heading) * delta.y();
    const double yaw_err = wrap_angle(command.yaw - state.base.yaw);
    const double terrain_h =
        terrain_height(setup.terrain, state.base.position.x(), state.base.position.y());
    const double height_err = nominal_height - (state.base.position.z() - terrain_h);

    double r;
    if (params.task == Task::command) {
      const Vec3 v_heading = rot_z(-state.base.yaw) * state.base_lin_vel;
      r = reward_command(state.base.roll, state.base.pitch, yaw_err, height_err,
                         command.vel_x - v_heading.x(), params.weights);
    } else {
      r = reward_terrain(state.base.roll, state.base.pitch, yaw_err, height_err, dx,
                         params.weights);
    }
    result.total_reward += r;
    result.distance += dx;
    result.ticks_survived = tick + 1;

    if (log != nullptr && tick % log_every == 0) {
      TickRecord rec;
      rec.time = state.time;
      rec.base = state.base;
      rec.base_lin_vel = state.base_lin_vel;
      rec.base_ang_vel = state.base_ang_vel;
      rec.joints = state.joints;
      rec.joint_vel = state.joint_vel;
      rec.torques = torques;
      rec.tau = gait.tau;
      rec.swing_leg = gait.swing_leg;
      rec.action = gait.latched_action;
      rec.observation = build_observation(state, gait, command);
      rec.contact_normal_left = outcome.contact.left.normal_force;
      rec.contact_normal_right = outcome.contact.right.normal_force;
      rec.command = command;
      rec.height_err = height_err;
      rec.dt = dt * log_every;
      log->ticks.push_back(rec);
    }

    if (outcome.diverged) {
      result.termination_cause = TerminationCause::diverged;
      return result;
    }
    if (std::abs(state.base.roll) > params.termination.topple_angle ||
        std::abs(state.base.pitch) > params.termination.topple_angle) {
      result.termination_cause = TerminationCause::topple;
      return result;
    }
    if (state.base.position.z() - terrain_h <
        params.termination.min_height_fraction * nominal_height) {
      result.termination_cause = TerminationCause::height;
      return result;
    }
  }
  result.termination_cause = TerminationCause::max_len;
  return result;
}

// --- Episode setup sampling --------------------------------------------------

struct SetupSampler {
  Task task = Task::command;
  std::vector<double> slope_set_deg = {-13, -11, -7, 0, 7, 11, 13};
  std::vector<std::pair<double, double>> stair_set = {{0.3, 0.05}, {0.4, 0.085}, {0.5, 0.1}};
  double target_velocity = 0.2;  // terrain-task fixed forward command
  double command_interval = 3.0;
  double command_max_dvx = 0.2;
  double command_max_dvy = 0.1;
  double command_max_dyaw = deg2rad(2.5);
  double stair_start = 0.4;  // flat run-up before the first riser
  double friction = 0.8;
  double episode_seconds = 7.5;  // schedule horizon
  bool forward_bias = false;     // evaluation-only: non-negative vel_x increments
};

/// Draws the per-episode terrain and command schedule. Terrain tasks draw
/// from the discrete terrain sets with a fixed small forward command; the
/// command task walks flat ground with piecewise-constant commands updated
/// every `command_interval` seconds by capped increments.
inline EpisodeSetup sample_episode_setup(const SetupSampler& sampler, Rng& rng) {
  EpisodeSetup setup;
  switch (sampler.task) {
    case Task::slope: {
      const double deg = sampler.slope_set_deg.empty()
                             ? 0.0
                             : sampler.slope_set_deg[rng.uniform_int(
                                   static_cast<int>(sampler.slope_set_deg.size()))];
      setup.terrain = Terrain::make_slope(deg2rad(deg));
      setup.terrain.friction = sampler.friction;
      setup.commands = CommandSchedule::constant({sampler.target_velocity, 0.0, 0.0});
      break;
    }
    case Task::stair: {
      const auto& pick = sampler.stair_set[rng.uniform_int(
          static_cast<int>(sampler.stair_set.size()))];
      setup.terrain = Terrain::make_stairs(pick.first, pick.second);
      setup.terrain.friction = sampler.friction;
      setup.terrain.origin_offset = sampler.stair_start;
      setup.commands = CommandSchedule::constant({sampler.target_velocity, 0.0, 0.0});
      break;
    }
    case Task::command: {
      setup.terrain = Terrain::make_flat(sampler.friction);
      CommandState c;
      CommandSchedule schedule;
      for (double t = 0.0; t < sampler.episode_seconds; t += sampler.command_interval) {
        const double lo = sampler.forward_bias ? 0.0 : -sampler.command_max_dvx;
        c.vel_x += rng.uniform(lo, sampler.command_max_dvx);
        c.vel_y += rng.uniform(-sampler.command_max_dvy, sampler.command_max_dvy);
        c.yaw += rng.uniform(-sampler.command_max_dyaw, sampler.command_max_dyaw);
        c = c.clamped();
        schedule.segments.push_back({t, c});
      }
      setup.commands = schedule;
      break;
    }
  }
  return setup;
}

}  // namespace gaitforge
