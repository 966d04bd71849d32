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

#include "gaitforge/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <thread>

namespace gaitforge {

// Augmented Random Search (V1-t: antithetic directions, top-b selection,
// reward-std step scaling) restricted to the masked parameter subspace.

struct ArsConfig {
  double beta = 0.03;        // learning rate
  double nu = 0.04;          // perturbation std
  int n_dirs = 8;
  int top_b = 4;
  double sigma_floor = 1e-6;
};

struct DirectionOutcome {
  double reward_plus = 0.0;
  double reward_minus = 0.0;
  double distance_plus = 0.0;
  double distance_minus = 0.0;
};

/// Evaluates all perturbed policy pairs of one iteration. Entry i holds
/// (M + nu d_i, M - nu d_i).
using BatchObjective = std::function<std::vector<DirectionOutcome>(
    const std::vector<std::pair<PolicyMatrix, PolicyMatrix>>&, int iteration)>;

/// Gaussian direction with nonzeros only at unmasked entries, drawn in fixed
/// row-major order for reproducibility.
inline PolicyValues sample_direction(const PolicyMask& mask, Rng& rng) {
  PolicyValues d = PolicyValues::Zero();
  for (int r = 0; r < kActDim; ++r)
    for (int c = 0; c < kObsDim; ++c)
      if (mask[r][c]) d(r, c) = rng.normal();
  return d;
}

/// Population standard deviation with a divide-by-zero floor.
inline double reward_std(const std::vector<double>& rewards, double floor_value) {
  if (rewards.empty()) return floor_value;
  const double mean =
      std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
  double acc = 0.0;
  for (double r : rewards) acc += (r - mean) * (r - mean);
  const double sd = std::sqrt(acc / static_cast<double>(rewards.size()));
  return std::max(sd, floor_value);
}

/// Pure ARS update combine step: top-b selection by max(r+, r-), reward-std
/// scaling, update along reward-weighted direction differences. Masked
/// entries stay exactly zero.
inline PolicyMatrix ars_combine(const PolicyMatrix& policy,
                                const std::vector<PolicyValues>& directions,
                                const std::vector<DirectionOutcome>& outcomes,
                                const ArsConfig& cfg, double* sigma_out = nullptr) {
  const int n = static_cast<int>(directions.size());
  const int b = std::min(cfg.top_b, n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::max(outcomes[i].reward_plus, outcomes[i].reward_minus) >
           std::max(outcomes[j].reward_plus, outcomes[j].reward_minus);
  });

  std::vector<double> selected_rewards;
  selected_rewards.reserve(2 * b);
  for (int k = 0; k < b; ++k) {
    selected_rewards.push_back(outcomes[order[k]].reward_plus);
    selected_rewards.push_back(outcomes[order[k]].reward_minus);
  }
  const double sigma = reward_std(selected_rewards, cfg.sigma_floor);
  if (sigma_out != nullptr) *sigma_out = sigma;

  PolicyMatrix out = policy;
  const double scale = cfg.beta / (static_cast<double>(b) * sigma);
  for (int k = 0; k < b; ++k) {
    const int i = order[k];
    out.values += scale * (outcomes[i].reward_plus - outcomes[i].reward_minus) * directions[i];
  }
  out.apply_mask();
  return out;
}

/// One ARS iteration: sample masked directions, evaluate the antithetic pairs
/// through the objective, combine. Deterministic given (policy, seed,
/// iteration) and a deterministic objective.
inline PolicyMatrix ars_update(const PolicyMatrix& policy, const ArsConfig& cfg, int iteration,
                               uint64_t seed, const BatchObjective& objective,
                               double* sigma_out = nullptr,
                               std::vector<DirectionOutcome>* outcomes_out = nullptr) {
  std::vector<PolicyValues> directions(cfg.n_dirs);
  std::vector<std::pair<PolicyMatrix, PolicyMatrix>> pairs;
  pairs.reserve(cfg.n_dirs);
  for (int i = 0; i < cfg.n_dirs; ++i) {
    Rng rng(derive_seed(seed, {0xD17ull, static_cast<uint64_t>(iteration),
                               static_cast<uint64_t>(i)}));
    directions[i] = sample_direction(policy.mask, rng);
    PolicyMatrix plus = policy, minus = policy;
    plus.values += cfg.nu * directions[i];
    minus.values -= cfg.nu * directions[i];
    plus.apply_mask();
    minus.apply_mask();
    pairs.emplace_back(std::move(plus), std::move(minus));
  }
  const std::vector<DirectionOutcome> outcomes = objective(pairs, iteration);
  if (outcomes_out != nullptr) *outcomes_out = outcomes;
  return ars_combine(policy, directions, outcomes, cfg, sigma_out);
}

/// Runs fn(0..n_tasks) on up to `workers` threads. Each task writes its own
/// output slot, so results are identical for any worker count.
inline void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  const int n_threads = std::min(workers, n_tasks);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct TrainConfig {
  Task task = Task::command;
  ArsConfig ars;
  long episode_len = 15000;
  uint64_t seed = 0;
  int iterations = 300;
  int checkpoint_every = 50;
  RewardWeights weights;
  TerminationParams termination;
  SetupSampler sampler;  // task field is kept in sync by the config loader
  int workers = 0;       // 0 = hardware concurrency
  bool log_wall_time = false;
};

struct IterationStats {
  int iteration = 0;
  double reward_mean = 0.0;
  double reward_max = 0.0;
  double sigma = 0.0;
  double distance_mean = 0.0;
  double wall_time_s = 0.0;
};

struct TrainOutcome {
  PolicyMatrix policy;
  std::vector<IterationStats> curve;
  bool aborted = false;
  std::string abort_reason;
};

inline int resolve_workers(int configured) {
  if (configured > 0) return configured;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Rollout-backed batch objective: direction i draws its episode setup from
/// (seed, iteration, i) and evaluates + and - against that same setup, so the
/// antithetic pair differs only through the perturbation.
inline BatchObjective make_rollout_objective(const WorldConfig& world, const TrainConfig& cfg) {
  const int workers = resolve_workers(cfg.workers);
  return [world, cfg, workers](const std::vector<std::pair<PolicyMatrix, PolicyMatrix>>& pairs,
                               int iteration) {
    const int n = static_cast<int>(pairs.size());
    std::vector<DirectionOutcome> outcomes(n);
    std::vector<EpisodeSetup> setups(n);
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(cfg.seed, {0x5e7ull, static_cast<uint64_t>(iteration),
                                     static_cast<uint64_t>(i)}));
      setups[i] = sample_episode_setup(cfg.sampler, rng);
    }
    EpisodeParams ep{cfg.episode_len, cfg.termination, cfg.weights, cfg.task};
    parallel_for(2 * n, workers, [&](int k) {
      const int i = k / 2;
      const bool plus = (k % 2) == 0;
      const PolicyMatrix& m = plus ? pairs[i].first : pairs[i].second;
      const EpisodeResult res = rollout(world, m, setups[i], ep);
      if (plus) {
        outcomes[i].reward_plus = res.total_reward;
        outcomes[i].distance_plus = res.distance;
      } else {
        outcomes[i].reward_minus = res.total_reward;
        outcomes[i].distance_minus = res.distance;
      }
    });
    return outcomes;
  };
}

inline void write_training_csv(const std::string& path, const std::vector<IterationStats>& curve) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open training log for writing: " + path);
  f << "iteration,reward_mean,reward_max,sigma_R,distance_mean,wall_time_s\n";
  char buf[192];
  for (const auto& s : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g,%.3f\n", s.iteration,
                  s.reward_mean, s.reward_max, s.sigma, s.distance_mean, s.wall_time_s);
    f << buf;
  }
}

inline std::string checkpoint_path(const std::string& out_dir, int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoint_%06d.policy", iteration);
  return (std::filesystem::path(out_dir) / buf).string();
}

/// Full training loop from the task warm start. Writes checkpoints and the
/// training CSV when `out_dir` is non-empty. Aborts cleanly (with the partial
/// curve) if a non-finite reward appears.
inline TrainOutcome train(const WorldConfig& world, const TrainConfig& cfg,
                          const PolicyMatrix& initial, const std::string& out_dir = "",
                          const std::function<void(const IterationStats&)>& on_iteration = {}) {
  TrainOutcome out;
  out.policy = initial;
  const BatchObjective objective = make_rollout_objective(world, cfg);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    save_policy(out.policy, checkpoint_path(out_dir, 0));
  }
  const auto t0 = std::chrono::steady_clock::now();
  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<DirectionOutcome> outcomes;
    double sigma = 0.0;
    PolicyMatrix next = ars_update(out.policy, cfg.ars, it, cfg.seed, objective, &sigma,
                                   &outcomes);
    IterationStats stats;
    stats.iteration = it + 1;
    stats.sigma = sigma;
    double sum = 0.0, peak = -std::numeric_limits<double>::infinity(), dist = 0.0;
    bool finite = true;
    for (const auto& o : outcomes) {
      sum += o.reward_plus + o.reward_minus;
      peak = std::max({peak, o.reward_plus, o.reward_minus});
      dist += o.distance_plus + o.distance_minus;
      finite = finite && std::isfinite(o.reward_plus) && std::isfinite(o.reward_minus);
    }
    const double denom = 2.0 * static_cast<double>(outcomes.size());
    stats.reward_mean = sum / denom;
    stats.reward_max = peak;
    stats.distance_mean = dist / denom;
    if (cfg.log_wall_time)
      stats.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.curve.push_back(stats);
    if (!finite) {
      out.aborted = true;
      out.abort_reason = "non-finite reward at iteration " + std::to_string(it + 1);
      break;
    }
    out.policy = next;
    if (on_iteration) on_iteration(stats);
    if (!out_dir.empty() && cfg.checkpoint_every > 0 &&
        (it + 1) % cfg.checkpoint_every == 0)
      save_policy(out.policy, checkpoint_path(out_dir, it + 1));
  }
  if (!out_dir.empty()) {
    save_policy(out.policy, (std::filesystem::path(out_dir) / "policy_final.policy").string());
    write_training_csv((std::filesystem::path(out_dir) / "training.csv").string(), out.curve);
  }
  return out;
}

}  // namespace gaitforge
