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
#include "gaitforge/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gaitforge;

TEST_CASE("config parsing covers every section") {
  std::istringstream is(R"(
# experiment configuration
[run]
output_dir = /tmp/gf_test_out
seed = 42
workers = 2

[robot]
torso_mass = 20
leg_mass_per_leg = 14
hip_width = 0.28
joint_limits_knee = 0.0:2.2
torque_limits_knee = 240

[physics]
dt = 0.0005
contact_stiffness = 4e4

[terrain]
kind = slope
pitch_deg = 7

[gait]
t_swing = 0.3
clearance = 0.08
kp_knee = 350
ankle_mode = level

[policy]
task = slope
update_mode = continuous
update_rate_hz = 25
warm_step_length_pitch = 0.5

[trainer]
beta = 0.02
nu = 0.03
n_dirs = 4
top_b = 2
iterations = 10
slope_set_deg = -7, 0, 7
target_velocity = 0.25

[eval]
trials = 3
episode_len = 4000
)");
  const ExperimentConfig cfg = parse_config(is);
  CHECK(cfg.seed == 42);
  CHECK(cfg.workers == 2);
  CHECK(cfg.world.robot.torso_mass == 20.0);
  CHECK(cfg.world.robot.leg_mass_per_leg == 14.0);
  CHECK(cfg.world.robot.joint_limits[3].max == 2.2);
  CHECK(cfg.world.robot.torque_limits[3] == 240.0);
  CHECK(cfg.world.physics.contact_stiffness == 4e4);
  CHECK(cfg.terrain.kind == TerrainKind::slope);
  CHECK(cfg.terrain.slope_pitch == Catch::Approx(deg2rad(7.0)));
  CHECK(cfg.world.gait.t_swing == 0.3);
  CHECK(cfg.world.gait.kp_swing[3] == 350.0);
  CHECK(cfg.task == Task::slope);
  CHECK(cfg.trainer.task == Task::slope);
  CHECK(cfg.trainer.sampler.task == Task::slope);
  CHECK(cfg.trainer.ars.beta == 0.02);
  CHECK(cfg.trainer.ars.n_dirs == 4);
  CHECK(cfg.trainer.sampler.slope_set_deg == std::vector<double>{-7.0, 0.0, 7.0});
  CHECK(cfg.trainer.sampler.target_velocity == 0.25);
  CHECK(cfg.trainer.seed == 42);
  CHECK(cfg.eval.trials == 3);
  CHECK(cfg.eval.episode_len == 4000);
  REQUIRE(cfg.warm_gains.size() == 1);
  CHECK(cfg.warm_gains[0].row == act_step_length);
  CHECK(cfg.warm_gains[0].col == obs_pitch);

  const PolicyMatrix warm = cfg.make_warm_start();
  CHECK(warm.values(act_step_length, obs_pitch) == 0.5);
  CHECK(warm.mask_consistent());
}

TEST_CASE("unknown keys and sections are rejected") {
  std::istringstream bad_key("[gait]\nnot_a_key = 1\n");
  CHECK_THROWS_AS(parse_config(bad_key), ConfigError);
  std::istringstream bad_section("[nonsense]\nx = 1\n");
  CHECK_THROWS_AS(parse_config(bad_section), ConfigError);
  std::istringstream bad_number("[gait]\nt_swing = abc\n");
  CHECK_THROWS_AS(parse_config(bad_number), ConfigError);
  std::istringstream bad_ars("[trainer]\ntop_b = 9\nn_dirs = 4\n");
  CHECK_THROWS_AS(parse_config(bad_ars), ConfigError);
  std::istringstream empty("");
  CHECK_NOTHROW(parse_config(empty));  // all defaults
}

TEST_CASE("velocity range parsing") {
  const auto v = parse_velocities("0.1:0.1:0.5");
  REQUIRE(v.size() == 5);
  CHECK(v[0] == Catch::Approx(0.1));
  CHECK(v[4] == Catch::Approx(0.5));
  const auto list = parse_velocities("0.2,0.4");
  REQUIRE(list.size() == 2);
  CHECK_THROWS_AS(parse_velocities("0.5:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_velocities(""), ConfigError);
  CHECK_THROWS_AS(parse_velocities("a:b:c"), ConfigError);
}

TEST_CASE("terrain spec parsing") {
  CHECK(parse_terrain_spec("flat").kind == TerrainKind::flat);
  const Terrain s = parse_terrain_spec("slope:-7");
  CHECK(s.kind == TerrainKind::slope);
  CHECK(s.slope_pitch == Catch::Approx(deg2rad(-7.0)));
  const Terrain st = parse_terrain_spec("stairs:0.4:0.085");
  CHECK(st.step_length == 0.4);
  CHECK(st.step_height == 0.085);
  const Terrain si = parse_terrain_spec("sinusoid:0.05:2.0");
  CHECK(si.amplitude == 0.05);
  const Terrain vr = parse_terrain_spec("varying:1.0:7:2.0:-5");
  REQUIRE(vr.segments.size() == 2);
  CHECK(vr.segments[1].pitch == Catch::Approx(deg2rad(-5.0)));
  CHECK_THROWS_AS(parse_terrain_spec("mesa:1"), ConfigError);
}

TEST_CASE("mask override spec") {
  const PolicyMask m = parse_mask_spec("step_length:pitch, shift_x:vel_err_x");
  CHECK(m[act_step_length][obs_pitch]);
  CHECK(m[act_shift_x][obs_vel_err_x]);
  int count = 0;
  for (const auto& row : m)
    for (bool b : row) count += b;
  CHECK(count == 2);
  CHECK_THROWS_AS(parse_mask_spec("bogus:pitch"), ConfigError);
}

TEST_CASE("cmd_train reports a config error for a missing file") {
  TrainArgs args;
  args.config_path = "/nonexistent/path/experiment.cfg";
  CHECK(cmd_train(args) == kExitConfigError);
}

TEST_CASE("cmd_eval rejects a corrupt policy file with exit code 4") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gf_cfg_test";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "exp.cfg";
  {
    std::ofstream f(cfg_path);
    f << "[run]\noutput_dir = " << (dir / "out").string() << "\n";
  }
  const fs::path bad_policy = dir / "bad.policy";
  {
    PolicyMatrix p = warm_start(Task::slope);
    std::ostringstream os;
    save_policy(p, os);
    std::string text = os.str();
    // Corrupt a masked (zero) entry in the value block: roll_rate column of
    // the first value row.
    const size_t header_end = text.find('\n', text.find("cols")) + 1;
    size_t pos = header_end;
    for (int skip = 0; skip < kActDim; ++skip) pos = text.find('\n', pos) + 1;
    // pos is the start of the first value row; replace it entirely.
    const size_t eol = text.find('\n', pos);
    std::string row;
    for (int c = 0; c < kObsDim; ++c) row += (c ? " " : "") + std::string("9.9e-01");
    text = text.substr(0, pos) + row + text.substr(eol);
    std::ofstream f(bad_policy);
    f << text;
  }
  EvalArgs args;
  args.policy_path = bad_policy.string();
  args.config_path = cfg_path.string();
  CHECK(cmd_eval(args) == kExitCorruptPolicy);
  fs::remove_all(dir);
}

TEST_CASE("cmd_sweep validates velocity syntax and terrain lists") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gf_sweep_test";
  fs::create_directories(dir);
  const fs::path cfg_path = dir / "exp.cfg";
  {
    std::ofstream f(cfg_path);
    f << "[run]\noutput_dir = " << (dir / "out").string() << "\n[eval]\nepisode_len = 200\n";
  }
  const fs::path policy_path = dir / "p.policy";
  save_policy(warm_start(Task::command), policy_path.string());

  SweepArgs bad_range;
  bad_range.policy_path = policy_path.string();
  bad_range.config_path = cfg_path.string();
  bad_range.velocities = "0.5:0.1";  // malformed range
  bad_range.terrains = "flat";
  CHECK(cmd_sweep(bad_range) == kExitConfigError);

  SweepArgs empty_terrains = bad_range;
  empty_terrains.velocities = "0.1:0.1:0.2";
  empty_terrains.terrains = "";
  CHECK(cmd_sweep(empty_terrains) == kExitConfigError);

  SweepArgs ok = empty_terrains;
  ok.terrains = "flat,slope:5";
  ok.trials = 1;
  CHECK(cmd_sweep(ok) == kExitOk);
  std::ifstream csv(dir / "out" / "sweep.csv");
  REQUIRE(csv.good());
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "terrain,v_target,mean_distance,mean_ticks");
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);  // 2 terrains x 2 velocities
  fs::remove_all(dir);
}
