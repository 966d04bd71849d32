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

#include "gaitforge/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App app{"gaitforge: linear-policy bipedal locomotion lab"};
  app.require_subcommand(1);

  gaitforge::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a policy with ARS");
  train->add_option("config", train_args.config_path, "Experiment config file")->required();
  int train_iterations = -1;
  uint64_t train_seed = 0;
  bool train_seed_set = false;
  int train_workers = 0;
  train->add_option("--iterations", train_iterations, "Override iteration count");
  train->add_option("--seed", train_seed, "Override experiment seed")
      ->each([&](const std::string&) { train_seed_set = true; });
  train->add_option("--workers", train_workers, "Override worker count");
  train->add_option("--out", train_args.output_dir, "Override output directory");
  train->add_flag("--quiet", train_args.quiet, "Suppress per-iteration progress");

  gaitforge::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a policy file");
  eval->add_option("policy", eval_args.policy_path, "Policy file")->required();
  eval->add_option("config", eval_args.config_path, "Experiment config file")->required();
  eval->add_option("--terrain", eval_args.terrain, "Terrain spec, e.g. slope:7");
  double eval_velocity = 0.0;
  bool eval_velocity_set = false;
  eval->add_option("--velocity", eval_velocity, "Fixed target heading velocity")
      ->each([&](const std::string&) { eval_velocity_set = true; });
  eval->add_option("--push", eval_args.push, "Push impulse in N s");
  eval->add_option("--push-dir", eval_args.push_dir, "lateral|forward|backward|up");
  eval->add_option("--push-time", eval_args.push_time, "Push onset time, s");
  int eval_trials = 0;
  eval->add_option("--trials", eval_trials, "Number of seeded rollouts");
  uint64_t eval_seed = 0;
  bool eval_seed_set = false;
  eval->add_option("--seed", eval_seed, "Evaluation seed")
      ->each([&](const std::string&) { eval_seed_set = true; });
  eval->add_option("--out", eval_args.output_dir, "Override output directory");

  gaitforge::SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Velocity sweep over terrains");
  sweep->add_option("policy", sweep_args.policy_path, "Policy file")->required();
  sweep->add_option("config", sweep_args.config_path, "Experiment config file")->required();
  sweep->add_option("--velocities", sweep_args.velocities, "Range lo:step:hi or comma list")
      ->required();
  sweep->add_option("--terrains", sweep_args.terrains, "Comma-separated terrain specs")
      ->required();
  int sweep_trials = 0;
  sweep->add_option("--trials", sweep_args.trials, "Trials per cell");
  uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  sweep->add_option("--seed", sweep_seed, "Sweep seed")
      ->each([&](const std::string&) { sweep_seed_set = true; });
  sweep->add_option("--out", sweep_args.output_dir, "Override output directory");
  (void)sweep_trials;

  gaitforge::RolloutArgs rollout_args;
  auto* roll = app.add_subcommand("rollout", "Run one logged episode");
  roll->add_option("policy", rollout_args.policy_path, "Policy file")->required();
  roll->add_option("config", rollout_args.config_path, "Experiment config file")->required();
  roll->add_option("--terrain", rollout_args.terrain, "Terrain spec");
  double roll_velocity = 0.0;
  bool roll_velocity_set = false;
  roll->add_option("--velocity", roll_velocity, "Fixed target heading velocity")
      ->each([&](const std::string&) { roll_velocity_set = true; });
  uint64_t roll_seed = 0;
  bool roll_seed_set = false;
  roll->add_option("--seed", roll_seed, "Rollout seed")
      ->each([&](const std::string&) { roll_seed_set = true; });
  roll->add_option("--out", rollout_args.output_dir, "Override output directory");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    if (train_iterations >= 0) train_args.iterations = train_iterations;
    if (train_seed_set) train_args.seed = train_seed;
    if (train_workers > 0) train_args.workers = train_workers;
    return gaitforge::cmd_train(train_args);
  }
  if (eval->parsed()) {
    if (eval_velocity_set) eval_args.velocity = eval_velocity;
    if (eval_trials > 0) eval_args.trials = eval_trials;
    if (eval_seed_set) eval_args.seed = eval_seed;
    return gaitforge::cmd_eval(eval_args);
  }
  if (sweep->parsed()) {
    if (sweep_seed_set) sweep_args.seed = sweep_seed;
    return gaitforge::cmd_sweep(sweep_args);
  }
  if (roll->parsed()) {
    if (roll_velocity_set) rollout_args.velocity = roll_velocity;
    if (roll_seed_set) rollout_args.seed = roll_seed;
    return gaitforge::cmd_rollout(rollout_args);
  }
  return 1;
}
