// Copyright 2026 The sarkit Authors
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

#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sarkit/envs/factory.hpp"
#include "sarkit/harness/commands.hpp"
#include "sarkit/harness/experiment.hpp"
#include "sarkit/harness/pipeline.hpp"
#include "test_util.hpp"

using namespace sarkit;
using namespace sarkit::harness;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A pendulum experiment small enough that no run performs a gradient update
// (the learning threshold exceeds the whole budget), so pipeline mechanics
// are exercised in milliseconds.
ExperimentConfig tiny_pendulum_config() {
  ExperimentConfig config;
  config.name = "tiny";
  config.play_env = {{"name", "pendulum_hold"}};
  config.train_env = {{"name", "pendulum_hold"}};
  config.eval_envs = {{"in", {{"name", "pendulum_hold"}}},
                      {"shifted", {{"name", "pendulum_hold"}, {"target_angle", 0.4}}}};
  config.play_steps = 240;
  config.train_steps = 360;
  config.seeds = {1};
  config.log_episodes = 3;
  config.stochastic_log = true;
  config.eval_episodes = 3;
  config.sac.hidden = {8, 8};
  config.sac.batch_size = 16;
  config.sac.start_learning = 100000;  // beyond the budget: no updates
  return config;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("provenance hash matches the published reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);

  const nlohmann::json a = {{"x", 1}, {"y", 2}};
  const nlohmann::json b = {{"y", 2}, {"x", 1}};  // key order is irrelevant
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  nlohmann::json c = a;
  c["x"] = 3;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("experiment config: defaults, overrides, and rejection") {
  const auto defaults = experiment_from_json(nlohmann::json::object());
  CHECK(defaults.play_steps == 50000);
  CHECK(defaults.train_steps == 150000);
  CHECK(defaults.blend_weight == 0.66);
  CHECK(defaults.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(defaults.sac.batch_size == 256);
  CHECK(defaults.total_steps() == 200000);

  const auto overridden = experiment_from_json(
      {{"play_steps", 1000},
       {"seeds", {7}},
       {"train_env", {{"name", "pendulum_hold"}}},
       {"sac", {{"batch_size", 32}, {"hidden", {16, 16}}}}});
  CHECK(overridden.play_steps == 1000);
  CHECK(overridden.train_steps == 150000);  // untouched keys keep defaults
  CHECK(overridden.seeds == std::vector<std::uint64_t>{7});
  CHECK(overridden.sac.batch_size == 32);
  CHECK(overridden.sac.hidden == std::vector<std::size_t>{16, 16});
  CHECK(overridden.sac.gamma == 0.98);

  CHECK(testutil::thrown_kind([] {
          experiment_from_json({{"playsteps", 1000}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          experiment_from_json({{"sac", {{"batchsize", 32}}}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          experiment_from_json({{"blend_weight", 1.5}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          experiment_from_json({{"seeds", nlohmann::json::array()}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          experiment_from_json({{"play_env", {{"muscles", 4}}}});
        }) == ErrorKind::kConfiguration);

  // Round trip: serializing and re-parsing reproduces the same document.
  const auto echo = experiment_to_json(overridden);
  CHECK(experiment_to_json(experiment_from_json(echo)) == echo);
  CHECK(config_hash(echo) == config_hash(experiment_to_json(overridden)));
}

TEST_CASE("condition names round-trip and unknown names are rejected") {
  for (const Condition c : all_conditions()) {
    CHECK(condition_from_string(condition_name(c)) == c);
  }
  CHECK(testutil::thrown_kind([] { condition_from_string("sarles"); }) ==
        ErrorKind::kConfiguration);
}

TEST_CASE("final-decile summary is recomputable from the records") {
  RunMetrics metrics;
  metrics.condition = "test";
  for (int i = 1; i <= 20; ++i) {
    EpisodeRow row;
    row.step = static_cast<std::uint64_t>(i) * 50;
    row.episode_return = static_cast<double>(i);
    row.success = i >= 19;  // only the final two succeed
    row.distance = 0.5 * i;
    metrics.records.push_back(row);
  }
  const Summary summary = metrics.final_decile();  // window = ceil(20/10) = 2
  CHECK(summary.episodes == 2);
  CHECK(summary.mean_return == doctest::Approx(19.5).epsilon(1e-15));
  CHECK(summary.success_rate == 1.0);
  CHECK(summary.mean_distance == doctest::Approx(9.75).epsilon(1e-15));
  CHECK(summary.return_stddev == doctest::Approx(0.5).epsilon(1e-12));

  // Tiny runs fall back to a single-episode window.
  metrics.records.resize(5);
  const Summary tail = metrics.final_decile();
  CHECK(tail.episodes == 1);
  CHECK(tail.mean_return == 5.0);
  CHECK(tail.return_stddev == 0.0);

  CHECK(RunMetrics{}.final_decile().episodes == 0);
}

TEST_CASE("metrics tables survive the file round trip byte for byte") {
  testutil::TempDir dir("metrics-roundtrip");
  RunMetrics metrics;
  metrics.condition = "sar-rl";
  metrics.seed = 42;
  metrics.hash = "0123456789abcdef";
  metrics.records = {{60, -12.34567890123, false, 1.0 / 3.0},
                     {120, 0.1, true, 2.5e-7},
                     {180, -3.0, false, 0.0}};
  metrics.contributions = Matrix(3, 2);
  metrics.contributions(0, 0) = 0.25;
  metrics.contributions(0, 1) = 0.75;
  metrics.contributions(1, 0) = 1.0 / 3.0;
  metrics.contributions(1, 1) = 2.0 / 3.0;
  metrics.contributions(2, 0) = 0.5;
  metrics.contributions(2, 1) = 0.5;

  const std::string path = dir.file("metrics.csv");
  save_metrics_csv(path, metrics);
  const RunMetrics loaded = load_metrics_csv(path);
  CHECK(loaded.condition == "sar-rl");
  CHECK(loaded.seed == 42);
  CHECK(loaded.hash == "0123456789abcdef");
  REQUIRE(loaded.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded.records[i].step == metrics.records[i].step);
    CHECK(loaded.records[i].episode_return == metrics.records[i].episode_return);
    CHECK(loaded.records[i].success == metrics.records[i].success);
    CHECK(loaded.records[i].distance == metrics.records[i].distance);
  }

  const std::string again = dir.file("metrics2.csv");
  save_metrics_csv(again, metrics);
  CHECK(slurp(path) == slurp(again));

  const std::string contrib = dir.file("contrib.csv");
  save_contributions_csv(contrib, metrics);
  std::vector<std::uint64_t> steps;
  const Matrix table = load_contributions_csv(contrib, &steps);
  CHECK(steps == std::vector<std::uint64_t>{60, 120, 180});
  REQUIRE(table.rows() == 3);
  REQUIRE(table.cols() == 2);
  CHECK(table(1, 1) == 2.0 / 3.0);

  RunMetrics mismatched = metrics;
  mismatched.contributions = Matrix(2, 2);
  CHECK(testutil::thrown_kind([&] {
          save_contributions_csv(dir.file("bad.csv"), mismatched);
        }) == ErrorKind::kArgument);
}

TEST_CASE("play phase logs squashed excitations deterministically") {
  ExperimentConfig config = tiny_pendulum_config();
  config.play_env = {{"name", "reach"}};  // fixed 50-step episodes, 6 actuators
  config.play_steps = 250;
  config.log_episodes = 3;

  const auto first = run_play_phase(config, 5);
  CHECK(first.metrics.condition == "play");
  CHECK(first.metrics.seed == 5);
  CHECK(!first.metrics.hash.empty());
  CHECK(first.metrics.records.size() == 250 / 50);
  CHECK(first.metrics.records.back().step == 250);

  // Reach episodes never end early, so the log is exactly episodes x length.
  CHECK(first.log.timesteps() == 3 * 50);
  CHECK(first.log.actuator_dim() == 6);
  for (std::size_t r = 0; r < first.log.timesteps(); ++r) {
    for (std::size_t c = 0; c < first.log.actuator_dim(); ++c) {
      CHECK(first.log.samples(r, c) > 0.0);
      CHECK(first.log.samples(r, c) < 1.0);
    }
  }

  const auto second = run_play_phase(config, 5);
  REQUIRE(second.log.timesteps() == first.log.timesteps());
  bool identical = true;
  for (std::size_t r = 0; r < first.log.timesteps(); ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      identical = identical && first.log.samples(r, c) == second.log.samples(r, c);
    }
  }
  CHECK(identical);

  const auto other_seed = run_play_phase(config, 6);
  bool differs = other_seed.log.timesteps() != first.log.timesteps();
  if (!differs) {
    for (std::size_t r = 0; r < first.log.timesteps() && !differs; ++r) {
      for (std::size_t c = 0; c < 6 && !differs; ++c) {
        differs = first.log.samples(r, c) != other_seed.log.samples(r, c);
      }
    }
  }
  CHECK(differs);
}

TEST_CASE("conditions share one budget and one step axis") {
  const ExperimentConfig config = tiny_pendulum_config();
  const auto play = run_play_phase(config, 3);
  const auto sar = fit_sar(play.log, 1, 3);

  ConditionInputs sar_inputs;
  sar_inputs.sar = &sar;
  const auto sar_rl = run_condition(config, Condition::kSarRl, 3, sar_inputs);
  CHECK(sar_rl.metrics.condition == "sar-rl");
  CHECK(sar_rl.metrics.records.size() == 360 / 60);
  // The curve begins after the play budget it was charged for.
  CHECK(sar_rl.metrics.records.front().step == 240 + 60);
  CHECK(sar_rl.metrics.records.back().step == 600);
  CHECK(sar_rl.head.raw_dim() == 1 + 2);

  // Contribution shares: one row per episode, each summing to one.
  REQUIRE(sar_rl.metrics.contributions.rows() == sar_rl.metrics.records.size());
  REQUIRE(sar_rl.metrics.contributions.cols() == 1);
  for (std::size_t r = 0; r < sar_rl.metrics.contributions.rows(); ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < sar_rl.metrics.contributions.cols(); ++c) {
      total += sar_rl.metrics.contributions(r, c);
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }

  ConditionInputs curr_inputs;
  curr_inputs.play_agent = &play.agent;
  const auto curriculum = run_condition(config, Condition::kRlCurriculum, 3, curr_inputs);
  CHECK(curriculum.metrics.records.size() == 360 / 60);
  CHECK(curriculum.metrics.records.front().step == 300);
  CHECK(curriculum.metrics.records.back().step == 600);
  CHECK(curriculum.metrics.contributions.rows() == 0);

  const auto end_to_end = run_condition(config, Condition::kRlEndToEnd, 3, {});
  CHECK(end_to_end.metrics.records.size() == 600 / 60);
  CHECK(end_to_end.metrics.records.front().step == 60);
  CHECK(end_to_end.metrics.records.back().step == 600);

  // Budget parity: every condition's axis ends at the same total.
  CHECK(sar_rl.metrics.records.back().step ==
        end_to_end.metrics.records.back().step);
  CHECK(curriculum.metrics.records.back().step ==
        end_to_end.metrics.records.back().step);

  // Missing prerequisites are configuration errors.
  CHECK(testutil::thrown_kind([&] {
          run_condition(config, Condition::kSarRl, 3, {});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([&] {
          run_condition(config, Condition::kRlCurriculum, 3, {});
        }) == ErrorKind::kConfiguration);

  // Identical seeds and inputs reproduce the metric stream exactly.
  const auto replay = run_condition(config, Condition::kSarRl, 3, sar_inputs);
  REQUIRE(replay.metrics.records.size() == sar_rl.metrics.records.size());
  for (std::size_t i = 0; i < replay.metrics.records.size(); ++i) {
    CHECK(replay.metrics.records[i].episode_return ==
          sar_rl.metrics.records[i].episode_return);
  }
}

TEST_CASE("zero-shot evaluation reads but never writes the policy") {
  const ExperimentConfig config = tiny_pendulum_config();
  const auto play = run_play_phase(config, 4);

  const auto head = rl::PolicyHead::plain(play.agent.act_dim());
  const auto params_before = play.agent.actor().parameters();
  const auto rows = run_zero_shot(config, head, play.agent, 4);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].set_name == "in");  // name order
  CHECK(rows[1].set_name == "shifted");
  for (const auto& row : rows) {
    CHECK(row.episodes == config.eval_episodes);
    CHECK(std::isfinite(row.mean_return));
  }
  CHECK(params_before == play.agent.actor().parameters());

  testutil::TempDir dir("zero-shot");
  const std::string path = dir.file("zs.csv");
  save_zero_shot_csv(path, rows, "feedface00000000", 4, "play");
  const auto loaded = load_zero_shot_csv(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].set_name == "in");
  CHECK(loaded[0].success_rate == rows[0].success_rate);
  CHECK(loaded[1].mean_return == rows[1].mean_return);
}

TEST_CASE("transfer trains both arms per terrain without touching the sar") {
  ExperimentConfig config = tiny_pendulum_config();
  config.train_env = {{"name", "locomotion"}, {"episode_steps", 25}, {"muscles", 12}};
  config.play_steps = 150;
  config.train_steps = 150;
  config.eval_envs = nlohmann::json::object();

  auto env_probe = envs::make_env(config.train_env);
  const auto sar = random_representation(env_probe->action_dim(), 4, 9);
  const auto sar_copy = sar;

  const auto outcomes = run_transfer(config, sar, {"hilly", "stairs"}, 11);
  REQUIRE(outcomes.size() == 4);
  CHECK(outcomes[0].terrain == "hilly");
  CHECK(outcomes[0].arm == "sar");
  CHECK(outcomes[0].metrics.condition == "sar-hilly");
  CHECK(outcomes[1].arm == "e2e");
  CHECK(outcomes[1].metrics.condition == "e2e-hilly");
  CHECK(outcomes[2].metrics.condition == "sar-stairs");
  CHECK(outcomes[3].metrics.condition == "e2e-stairs");

  // Equal total budgets on a shared axis: the synergy arm starts reporting
  // after the play steps it was charged for, and neither arm records past
  // the shared total. Falls end episodes early, so exact endpoints vary.
  for (const auto& outcome : outcomes) {
    REQUIRE(!outcome.metrics.records.empty());
    CHECK(outcome.metrics.records.back().step <= 300);
  }
  CHECK(outcomes[0].metrics.records.front().step > 150);
  CHECK(outcomes[1].metrics.records.front().step <= 150);

  // Contribution shares cover the full synergy set and sum to one.
  const Matrix& shares = outcomes[0].metrics.contributions;
  REQUIRE(shares.rows() == outcomes[0].metrics.records.size());
  REQUIRE(shares.cols() == 4);
  for (std::size_t r = 0; r < shares.rows(); ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < shares.cols(); ++c) total += shares(r, c);
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }

  // The representation object was used read-only.
  for (std::size_t r = 0; r < sar.decode_matrix.rows(); ++r) {
    for (std::size_t c = 0; c < sar.decode_matrix.cols(); ++c) {
      CHECK(sar.decode_matrix(r, c) == sar_copy.decode_matrix(r, c));
    }
  }

  // The few-shot variant narrows the synergy slice of the head.
  config.few_shot_k = 2;
  const auto few = run_transfer(config, sar, {"hilly"}, 11);
  CHECK(few[0].metrics.contributions.cols() == 2);
}

TEST_CASE("ablations: grids, controls, and the post-hoc override") {
  CHECK(testutil::thrown_kind([] { ablation_kind_from_string("nope"); }) ==
        ErrorKind::kArgument);
  for (const char* name : {"blend-weight", "synergy-subset", "random-sar",
                           "post-hoc-blend"}) {
    CHECK(ablation_kind_name(ablation_kind_from_string(name)) == std::string(name));
  }
  const auto grid = blend_weight_grid();
  CHECK(std::count(grid.begin(), grid.end(), 0.66) == 1);

  ExperimentConfig config = tiny_pendulum_config();
  config.eval_envs = nlohmann::json::object();
  const auto sar = random_representation(2, 2, 5);
  AblationInputs inputs;
  inputs.sar = &sar;

  const auto weight_rows = ablate(AblationKind::kBlendWeight, config, 2, inputs);
  REQUIRE(weight_rows.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(weight_rows[i].variant == "phi");
    CHECK(weight_rows[i].value == grid[i]);
    CHECK(weight_rows[i].summary.episodes > 0);
  }

  config.few_shot_k = 1;
  const auto subset_rows = ablate(AblationKind::kSynergySubset, config, 2, inputs);
  REQUIRE(subset_rows.size() == 2);
  CHECK(subset_rows[0].variant == "most-k");
  CHECK(subset_rows[1].variant == "least-k");
  CHECK(subset_rows[0].value == 1.0);

  const auto random_rows = ablate(AblationKind::kRandomSar, config, 2, inputs);
  REQUIRE(random_rows.size() == 2);
  CHECK(random_rows[0].variant == "fitted");
  CHECK(random_rows[1].variant == "random");

  // Post-hoc: evaluate a trained blended policy under overridden weights.
  ConditionInputs train_inputs;
  train_inputs.sar = &sar;
  const auto trained = run_condition(config, Condition::kSarRl, 2, train_inputs);
  AblationInputs post_inputs;
  post_inputs.agent = &trained.agent;
  post_inputs.head = &trained.head;
  const auto post_rows = ablate(AblationKind::kPostHocBlend, config, 2, post_inputs);
  REQUIRE(post_rows.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(post_rows[i].variant == "override");
    CHECK(post_rows[i].value == grid[i]);
    // Actions move exactly when the override deviates from the training
    // weight (0.66).
    CHECK(post_rows[i].actions_changed == (grid[i] != 0.66));
    CHECK(post_rows[i].summary.episodes == config.eval_episodes);
  }

  CHECK(testutil::thrown_kind([&] {
          ablate(AblationKind::kBlendWeight, config, 2, {});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([&] {
          ablate(AblationKind::kPostHocBlend, config, 2, {});
        }) == ErrorKind::kConfiguration);

  testutil::TempDir dir("ablate-csv");
  const std::string path = dir.file("rows.csv");
  save_ablation_csv(path, AblationKind::kPostHocBlend, post_rows, "aa00bb11cc22dd33");
  const auto loaded = load_ablation_csv(path);
  REQUIRE(loaded.size() == post_rows.size());
  CHECK(loaded[2].value == post_rows[2].value);
  CHECK(loaded[2].actions_changed == post_rows[2].actions_changed);
  CHECK(loaded[2].summary.mean_return == post_rows[2].summary.mean_return);
}

TEST_CASE("command pipeline produces a reproducible results tree") {
  testutil::TempDir dir("pipeline");
  ExperimentConfig config = tiny_pendulum_config();
  config.seeds = {1, 2};
  config.workers = 2;

  const ArtifactPaths paths(dir.file("run"));
  cmd_play(config, paths);
  for (const std::uint64_t seed : config.seeds) {
    CHECK(std::filesystem::exists(paths.play_checkpoint(seed)));
    CHECK(std::filesystem::exists(paths.play_log(seed)));
    CHECK(std::filesystem::exists(paths.play_metrics(seed)));
  }
  CHECK(std::filesystem::exists(paths.manifest()));

  cmd_fit(config, paths);
  for (const std::uint64_t seed : config.seeds) {
    const auto sar = load_sar(paths.sar_file(seed));
    CHECK(sar.actuator_dim == 2);
    CHECK(sar.n_syn == 1);  // default: half the actuators, rounded up
    CHECK(sar.seed == seed);
    CHECK(sar.config_hash == config_hash(experiment_to_json(config)));
  }

  cmd_train(config, all_conditions(), paths);
  for (const Condition condition : all_conditions()) {
    const std::string name = condition_name(condition);
    for (const std::uint64_t seed : config.seeds) {
      CHECK(std::filesystem::exists(paths.condition_metrics(name, seed)));
      CHECK(std::filesystem::exists(paths.condition_checkpoint(name, seed)));
    }
  }
  CHECK(std::filesystem::exists(paths.contributions("sar-rl", 1)));

  // Reruns overwrite with identical bytes (workers > 1 included).
  const std::string snapshot = slurp(paths.condition_metrics("sar-rl", 1));
  const std::string snapshot_play = slurp(paths.play_metrics(2));
  cmd_train(config, all_conditions(), paths);
  CHECK(slurp(paths.condition_metrics("sar-rl", 1)) == snapshot);
  cmd_play(config, paths);
  CHECK(slurp(paths.play_metrics(2)) == snapshot_play);

  cmd_eval(config, all_conditions(), paths);
  for (const Condition condition : all_conditions()) {
    const auto rows =
        load_zero_shot_csv(paths.zero_shot(condition_name(condition), 1));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].set_name == "in");
  }

  // The trained checkpoint is a loadable policy.
  const Checkpoint restored = load_checkpoint(paths.condition_checkpoint("sar-rl", 1));
  CHECK(restored.condition == "sar-rl");
  CHECK(restored.head.mode() == rl::PolicyMode::kBlended);
  CHECK(restored.head.blend_weight() == 0.66);

  // Export aggregates the metrics directory into tables and plots.
  const ArtifactPaths out(dir.file("export"));
  cmd_export(paths.metrics_dir(), out);
  CHECK(std::filesystem::exists(out.root / "curves.csv"));
  CHECK(std::filesystem::exists(out.root / "final.csv"));
  CHECK(std::filesystem::exists(std::filesystem::path(out.plots_dir()) /
                                "curves_return.svg"));
  CHECK(std::filesystem::exists(out.root / "contributions_sar-rl.csv"));

  const std::string curves_before = slurp((out.root / "curves.csv").string());
  cmd_export(paths.metrics_dir(), out);
  CHECK(slurp((out.root / "curves.csv").string()) == curves_before);

  // Row count in the table equals point count in the plot, per condition.
  std::map<std::string, std::size_t> csv_rows;
  {
    std::istringstream in(curves_before);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      csv_rows[line.substr(0, line.find(','))]++;
    }
  }
  std::vector<std::size_t> polyline_points;
  {
    const std::string svg = slurp((std::filesystem::path(out.plots_dir()) /
                                   "curves_return.svg")
                                      .string());
    std::size_t at = 0;
    while ((at = svg.find("<polyline", at)) != std::string::npos) {
      const std::size_t start = svg.find("points=\"", at) + 8;
      const std::size_t end = svg.find('"', start);
      const std::string points = svg.substr(start, end - start);
      polyline_points.push_back(
          static_cast<std::size_t>(std::count(points.begin(), points.end(), ' ')));
      at = end;
    }
  }
  REQUIRE(polyline_points.size() == csv_rows.size());  // one line per condition
  std::size_t index = 0;
  for (const auto& [condition, rows] : csv_rows) {  // both orderings sorted
    CHECK(polyline_points[index++] == rows);
  }

  // Missing prerequisites name the missing file.
  const ArtifactPaths fresh(dir.file("fresh"));
  try {
    cmd_train(config, {Condition::kSarRl}, fresh);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfiguration);
    CHECK(std::string(e.what()).find(fresh.sar_file(1)) != std::string::npos);
  }
  try {
    cmd_ablate(config, AblationKind::kPostHocBlend, fresh);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfiguration);
    CHECK(std::string(e.what()).find("sar-rl") != std::string::npos);
  }

  // Ablations run off the trained artifacts.
  ExperimentConfig ablate_config = config;
  ablate_config.seeds = {1};
  cmd_ablate(ablate_config, AblationKind::kPostHocBlend, paths);
  const auto post = load_ablation_csv(paths.ablation_table("post-hoc-blend", 1));
  CHECK(post.size() == blend_weight_grid().size());
}

TEST_CASE("parallel runner executes every job and reports the first failure") {
  std::atomic<int> ran{0};
  std::vector<std::function<void()>> jobs;
  for (int i = 0; i < 7; ++i) {
    jobs.push_back([&ran] { ran.fetch_add(1); });
  }
  run_parallel(std::move(jobs), 3);
  CHECK(ran.load() == 7);

  std::atomic<int> survivors{0};
  std::vector<std::function<void()>> mixed;
  mixed.push_back([&survivors] { survivors.fetch_add(1); });
  mixed.push_back([] { throw_error(ErrorKind::kConvergence, "boom"); });
  mixed.push_back([&survivors] { survivors.fetch_add(1); });
  CHECK(testutil::thrown_kind([&] { run_parallel(std::move(mixed), 2); }) ==
        ErrorKind::kConvergence);
  CHECK(survivors.load() == 2);
}

}  // TEST_SUITE
