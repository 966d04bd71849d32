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

#include "gaitforge/eval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace gaitforge;

namespace {

TickRecord level_tick(double t) {
  TickRecord r;
  r.time = t;
  r.dt = 0.01;
  return r;
}

}  // namespace

TEST_CASE("torso stability of a perfectly level log is 4") {
  RolloutLog log;
  for (int i = 0; i < 100; ++i) log.ticks.push_back(level_tick(0.01 * i));
  CHECK(torso_stability(log, {}) == 4.0);
}

TEST_CASE("torso stability single-tick kernel value") {
  RewardWeights w;
  RolloutLog log;
  TickRecord r = level_tick(0.0);
  r.height_err = std::sqrt(1.0 / w.w4);  // w4 * e^2 = 1
  log.ticks.push_back(r);
  CHECK(torso_stability(log, w) == Catch::Approx(3.3678794411714423).epsilon(1e-14));
}

TEST_CASE("torso stability is the arithmetic mean over ticks") {
  RewardWeights w;
  RolloutLog log;
  TickRecord a = level_tick(0.0);
  TickRecord b = level_tick(0.01);
  b.base.roll = 0.1;
  log.ticks.push_back(a);
  log.ticks.push_back(b);
  const double vb = 3.0 + gaussian_kernel(w.w1, 0.1);
  CHECK(torso_stability(log, w) == Catch::Approx((4.0 + vb) / 2.0).epsilon(1e-14));
  RolloutLog empty;
  CHECK_THROWS_AS(torso_stability(empty, w), EmptyLogError);
}

TEST_CASE("cost of transport integrates positive mechanical work only") {
  RobotModel model;
  RolloutLog log;
  // Constant total positive power of 100 W for 10 s: tau * qd = 50 on two
  // joints, one of which also has a negative-power partner that must clip.
  for (int i = 0; i < 1000; ++i) {
    TickRecord r = level_tick(0.01 * i);
    r.torques[j_l_knee] = 50.0;
    r.joint_vel[j_l_knee] = 1.0;
    r.torques[j_r_knee] = 25.0;
    r.joint_vel[j_r_knee] = 2.0;
    r.torques[j_l_hip_pitch] = 40.0;   // negative power, clipped to zero
    r.joint_vel[j_l_hip_pitch] = -1.0;
    log.ticks.push_back(r);
  }
  const double cot = cost_of_transport(log, model, 5.0);
  CHECK(cot == Catch::Approx(0.42473666326877335).epsilon(1e-9));

  RolloutLog quiet;
  for (int i = 0; i < 10; ++i) quiet.ticks.push_back(level_tick(0.01 * i));
  CHECK(cost_of_transport(quiet, model, 1.0) == 0.0);
  CHECK_THROWS_AS(cost_of_transport(quiet, model, 0.01), DegenerateDistanceError);
}

TEST_CASE("velocity sweep emits one row per terrain-velocity cell") {
  WorldConfig world;
  EpisodeParams params;
  params.episode_len = 500;
  params.task = Task::command;
  const PolicyMatrix policy = warm_start(Task::command);

  const std::vector<Terrain> terrains = {Terrain::make_flat(),
                                         Terrain::make_slope(deg2rad(5.0))};
  const std::vector<double> velocities = {0.1, 0.2, 0.3};
  const auto rows = velocity_sweep(world, policy, terrains, velocities, 2, 99, params, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].terrain == "flat");
  CHECK(rows[0].v_target == 0.1);
  CHECK(rows[5].v_target == 0.3);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.mean_distance));
    CHECK(r.mean_ticks > 0.0);
  }

  const auto again = velocity_sweep(world, policy, terrains, velocities, 2, 99, params, 1);
  REQUIRE(again.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mean_distance == again[i].mean_distance);
    CHECK(rows[i].mean_ticks == again[i].mean_ticks);
  }
}

TEST_CASE("sweep csv schema") {
  std::ostringstream os;
  write_sweep_csv({{"flat", 0.1, 1.5, 1000.0}}, os);
  CHECK(os.str() == "terrain,v_target,mean_distance,mean_ticks\nflat,0.1,1.5,1000\n");
}

TEST_CASE("push test reports the recovery flag and applies a real force") {
  WorldConfig world;
  EpisodeParams params;
  params.episode_len = 1000;
  params.task = Task::command;
  const PolicyMatrix policy = warm_start(Task::command);

  // An absurd impulse knocks the robot over immediately.
  const PushResult hit = push_test(world, policy, 500.0, Vec3::UnitY(), 0.2, params);
  CHECK_FALSE(hit.recovered);
  CHECK(hit.metrics.push_applied);
  CHECK(hit.metrics.termination_cause != TerminationCause::max_len);

  // The pulse leaves a mark: trajectories with and without it diverge.
  PushSpec tap;
  tap.impulse = 2.0;
  tap.t_apply = 0.1;
  EpisodeSetup setup;
  setup.terrain = Terrain::make_flat();
  EpisodeParams short_params = params;
  short_params.episode_len = 600;
  const EpisodeResult with = rollout(world, policy, setup, short_params, &tap);
  const EpisodeResult without = rollout(world, policy, setup, short_params);
  CHECK(with.total_reward != without.total_reward);
}

TEST_CASE("metrics report writer includes every field") {
  MetricsReport m;
  m.distance = 1.25;
  m.ticks_survived = 1500;
  m.torso_stability = 3.5;
  m.cot = 0.3;
  m.mean_speed = 0.25;
  m.termination_cause = TerminationCause::topple;
  std::ostringstream os;
  write_metrics(m, os);
  const std::string text = os.str();
  CHECK(text.find("distance = 1.25") != std::string::npos);
  CHECK(text.find("ticks_survived = 1500") != std::string::npos);
  CHECK(text.find("torso_stability = 3.5") != std::string::npos);
  CHECK(text.find("cot = 0.3") != std::string::npos);
  CHECK(text.find("termination_cause = topple") != std::string::npos);
  CHECK(text.find("recovered") == std::string::npos);
}

TEST_CASE("rollout csv carries the fixed schema and monotone time") {
  WorldConfig world;
  EpisodeParams params;
  params.episode_len = 400;
  params.task = Task::command;
  EpisodeSetup setup;
  setup.terrain = Terrain::make_flat();
  RolloutLog log;
  rollout(world, warm_start(Task::command), setup, params, nullptr, &log, 4);
  REQUIRE(log.ticks.size() == 100);
  for (size_t i = 1; i < log.ticks.size(); ++i)
    CHECK(log.ticks[i].time > log.ticks[i - 1].time);
  std::ostringstream os;
  write_rollout_csv(log, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("time,pos_x,pos_y,pos_z", 0) == 0);
  const size_t cols = std::count(header.begin(), header.end(), ',') + 1;
  std::string row;
  std::getline(is, row);
  CHECK(std::count(row.begin(), row.end(), ',') + 1 == static_cast<long>(cols));
}
