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

#include "gaitforge/config.hpp"

#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>

namespace gaitforge {

// Exit codes shared across subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalAbort = 3;
inline constexpr int kExitCorruptPolicy = 4;

inline std::optional<int> workers_from_env() {
  const char* v = std::getenv("GAITFORGE_WORKERS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    return std::max(1, std::stoi(v));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline void write_run_meta(const std::string& out_dir, const std::string& command,
                           double wall_seconds) {
  std::ofstream f(std::filesystem::path(out_dir) / "run_meta.txt");
  const std::time_t now = std::time(nullptr);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  f << "command = " << command << "\n";
  f << "finished_at = " << stamp << "\n";
  f << "wall_seconds = " << wall_seconds << "\n";
}

struct TrainArgs {
  std::string config_path;
  std::optional<int> iterations;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::string output_dir;  // overrides config when non-empty
  bool quiet = false;
};

inline int cmd_train(const TrainArgs& args) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error (" << args.config_path << "): " << e.what() << "\n";
    return kExitConfigError;
  }
  if (args.iterations) cfg.trainer.iterations = *args.iterations;
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.trainer.seed = *args.seed;
  }
  if (args.workers) cfg.trainer.workers = *args.workers;
  if (const auto env = workers_from_env()) cfg.trainer.workers = *env;
  const std::string out_dir = args.output_dir.empty() ? cfg.output_dir : args.output_dir;

  const PolicyMatrix warm = cfg.make_warm_start();
  const auto t0 = std::chrono::steady_clock::now();
  const TrainOutcome outcome =
      train(cfg.world, cfg.trainer, warm, out_dir,
            [&](const IterationStats& s) {
              if (!args.quiet)
                std::cout << "iter " << s.iteration << " reward_mean " << s.reward_mean
                          << " distance_mean " << s.distance_mean << "\n";
            });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_meta(out_dir, "train", wall);
  if (outcome.aborted) {
    std::cerr << "training aborted: " << outcome.abort_reason << "\n";
    return kExitNumericalAbort;
  }
  return kExitOk;
}

inline int load_policy_checked(const std::string& path, PolicyMatrix& out) {
  try {
    out = load_policy(path);
  } catch (const PolicyFormatError& e) {
    std::cerr << "corrupt policy file (" << path << "): " << e.what() << "\n";
    return kExitCorruptPolicy;
  } catch (const std::exception& e) {
    std::cerr << "cannot load policy (" << path << "): " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

struct EvalArgs {
  std::string policy_path;
  std::string config_path;
  std::string terrain;          // optional spec; empty = config [terrain]
  std::optional<double> velocity;
  double push = 0.0;            // impulse, N s
  std::string push_dir = "lateral";
  double push_time = 2.0;
  std::optional<int> trials;
  std::optional<uint64_t> seed;
  std::string output_dir;
};

inline Vec3 push_direction_from_name(const std::string& name) {
  if (name == "lateral") return Vec3::UnitY();
  if (name == "forward") return Vec3::UnitX();
  if (name == "backward") return -Vec3::UnitX();
  if (name == "up") return Vec3::UnitZ();
  throw ConfigError("unknown push direction: " + name);
}

inline int cmd_eval(const EvalArgs& args) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error (" << args.config_path << "): " << e.what() << "\n";
    return kExitConfigError;
  }
  PolicyMatrix policy;
  if (const int rc = load_policy_checked(args.policy_path, policy); rc != kExitOk) return rc;

  const uint64_t seed = args.seed.value_or(cfg.seed);
  const int trials = std::max(1, args.trials.value_or(cfg.eval.trials));
  const std::string out_dir = args.output_dir.empty() ? cfg.output_dir : args.output_dir;
  std::filesystem::create_directories(out_dir);

  EpisodeParams params = cfg.episode_params();
  params.task = policy.task;
  params.episode_len = cfg.eval.episode_len;

  Terrain terrain = cfg.terrain;
  try {
    if (!args.terrain.empty()) terrain = parse_terrain_spec(args.terrain);
  } catch (const std::exception& e) {
    std::cerr << "terrain error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::vector<MetricsReport> reports;
  if (args.push > 0.0) {
    Vec3 dir;
    try {
      dir = push_direction_from_name(args.push_dir);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitConfigError;
    }
    RolloutLog log;
    const PushResult res = push_test(cfg.world, policy, args.push, dir, args.push_time, params,
                                     &log, 3.0, cfg.eval.log_every);
    reports.push_back(res.metrics);
    std::ofstream csv(std::filesystem::path(out_dir) / "rollout.csv");
    write_rollout_csv(log, csv);
  } else {
    for (int k = 0; k < trials; ++k) {
      EpisodeSetup setup;
      setup.terrain = terrain;
      Rng rng(derive_seed(seed, {0xe7a2ull, static_cast<uint64_t>(k)}));
      if (policy.task == Task::command && !args.velocity) {
        SetupSampler sampler = cfg.trainer.sampler;
        sampler.task = Task::command;
        sampler.forward_bias = cfg.eval.forward_bias;
        sampler.episode_seconds = static_cast<double>(params.episode_len) * cfg.world.dt;
        setup.commands = sample_episode_setup(sampler, rng).commands;
      } else {
        const double v = args.velocity.value_or(cfg.trainer.sampler.target_velocity);
        setup.commands = CommandSchedule::constant({v, 0.0, 0.0});
        if (terrain.kind != TerrainKind::flat && terrain.kind != TerrainKind::slope && k > 0)
          setup.terrain.origin_offset += rng.uniform(0.0, 0.3);
      }
      RolloutLog log;
      const EpisodeResult result =
          rollout(cfg.world, policy, setup, params, nullptr, &log, cfg.eval.log_every);
      reports.push_back(compute_metrics(result, log, cfg.world.robot, params.weights,
                                        cfg.world.dt));
      if (k == 0) {
        std::ofstream csv(std::filesystem::path(out_dir) / "rollout.csv");
        write_rollout_csv(log, csv);
      }
    }
  }

  std::ofstream mf(std::filesystem::path(out_dir) / "metrics.txt");
  double mean_distance = 0.0, mean_stability = 0.0;
  for (const auto& m : reports) {
    mean_distance += m.distance / reports.size();
    mean_stability += m.torso_stability / reports.size();
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", mean_distance);
  mf << "trials = " << reports.size() << "\n";
  mf << "mean_distance = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.10g", mean_stability);
  mf << "mean_torso_stability = " << buf << "\n\n";
  for (size_t k = 0; k < reports.size(); ++k) {
    mf << "[trial " << k << "]\n";
    write_metrics(reports[k], mf);
    mf << "\n";
  }
  return kExitOk;
}

struct SweepArgs {
  std::string policy_path;
  std::string config_path;
  std::string velocities;  // range or comma list
  std::string terrains;    // comma-separated terrain specs
  std::optional<int> trials;
  std::optional<uint64_t> seed;
  std::string output_dir;
};

inline int cmd_sweep(const SweepArgs& args) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(args.config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error (" << args.config_path << "): " << e.what() << "\n";
    return kExitConfigError;
  }
  PolicyMatrix policy;
  if (const int rc = load_policy_checked(args.policy_path, policy); rc != kExitOk) return rc;

  std::vector<double> velocities;
  std::vector<Terrain> terrains;
  try {
    velocities = parse_velocities(args.velocities);
    for (const auto& spec : detail::split(args.terrains, ','))
      if (!spec.empty()) terrains.push_back(parse_terrain_spec(spec));
    if (terrains.empty()) throw ConfigError("empty terrain list");
  } catch (const std::exception& e) {
    std::cerr << "sweep error: " << e.what() << "\n";
    return kExitConfigError;
  }

  EpisodeParams params = cfg.episode_params();
  params.task = policy.task;
  params.episode_len = cfg.eval.episode_len;
  int workers = cfg.workers;
  if (const auto env = workers_from_env()) workers = *env;

  const auto rows =
      velocity_sweep(cfg.world, policy, terrains, velocities,
                     std::max(1, args.trials.value_or(cfg.eval.trials)),
                     args.seed.value_or(cfg.seed), params, resolve_workers(workers));
  const std::string out_dir = args.output_dir.empty() ? cfg.output_dir : args.output_dir;
  std::filesystem::create_directories(out_dir);
  std::ofstream f(std::filesystem::path(out_dir) / "sweep.csv");
  write_sweep_csv(rows, f);
  return kExitOk;
}

struct RolloutArgs {
  std::string policy_path;
  std::string config_path;
  std::string terrain;
  std::optional<double> velocity;
  std::optional<uint64_t> seed;
  std::string output_dir;
};

inline int cmd_rollout(const RolloutArgs& args) {
  EvalArgs ev;
  ev.policy_path = args.policy_path;
  ev.config_path = args.config_path;
  ev.terrain = args.terrain;
  ev.velocity = args.velocity;
  ev.seed = args.seed;
  ev.trials = 1;
  ev.output_dir = args.output_dir;
  return cmd_eval(ev);
}

}  // namespace gaitforge
