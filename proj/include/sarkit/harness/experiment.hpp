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

#ifndef SARKIT_HARNESS_EXPERIMENT_HPP_
#define SARKIT_HARNESS_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlohmann/json.hpp"
#include "sarkit/matrix.hpp"
#include "sarkit/rl/sac.hpp"

namespace sarkit::harness {

// The three ways of spending one training budget on a target task, compared
// against each other throughout:
//   sar-rl   fresh policy over blended synergy+direct actions
//   rl-curr  the play-phase policy resumed directly on the target task
//   rl-e2e   fresh policy over direct actions, given the full combined budget
enum class Condition { kSarRl, kRlCurriculum, kRlEndToEnd };

const char* condition_name(Condition condition);
Condition condition_from_string(const std::string& name);
std::vector<Condition> all_conditions();

// One experiment = a play task, a target task, a shared step budget, and the
// seeds over which every condition is repeated. All conditions consume
// exactly play_steps + train_steps environment steps.
struct ExperimentConfig {
  std::string name = "experiment";
  nlohmann::json play_env = {{"name", "reach"}};   // env spec with a "name" key
  nlohmann::json train_env = {{"name", "reach"}};  // target-task spec
  nlohmann::json eval_envs = nlohmann::json::object();  // set name -> spec
  std::uint64_t play_steps = 50000;
  std::uint64_t train_steps = 150000;
  std::size_t n_syn = 0;  // 0 = half the actuator count, rounded up
  double blend_weight = 0.66;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::size_t log_episodes = 40;   // rollouts recorded for synergy fitting
  bool stochastic_log = false;     // sample the policy while logging
  std::size_t eval_episodes = 40;  // rollouts per evaluation set
  std::size_t workers = 1;         // parallel (condition x seed) runs
  std::size_t few_shot_k = 0;      // transfer: keep only the top-k synergies
  rl::SacConfig sac;               // total_steps is derived per condition

  std::uint64_t total_steps() const { return play_steps + train_steps; }
  void validate() const;  // raises kConfiguration
};

// Built-in defaults overridden by whatever keys the document provides;
// unknown keys raise kConfiguration.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentConfig& config);

// 64-bit FNV-1a over raw bytes; the provenance hash is its hex form over the
// canonical serialization of a config document.
std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const nlohmann::json& config);

// One completed episode on a shared step axis (pretrained conditions are
// charged for their play steps, so curves line up across conditions).
struct EpisodeRow {
  std::uint64_t step = 0;
  double episode_return = 0.0;
  bool success = false;
  double distance = 0.0;
};

// Aggregate over the final tenth of a run's episodes.
struct Summary {
  std::size_t episodes = 0;  // window size the stats were computed over
  double success_rate = 0.0;
  double mean_return = 0.0;
  double return_stddev = 0.0;
  double mean_distance = 0.0;
  double distance_stddev = 0.0;
};

// Everything recorded while one (condition, seed) run trained.
struct RunMetrics {
  std::string condition;
  std::uint64_t seed = 0;
  std::string hash;  // experiment config hash, for provenance
  std::vector<EpisodeRow> records;
  // One row per episode: each synergy's share of the commanded activity
  // (rows sum to 1). Empty for runs without a synergy space.
  Matrix contributions;

  // Recomputable from `records` exactly: the last ceil(n/10) episodes.
  Summary final_decile() const;
};

Summary summarize_rows(const std::vector<EpisodeRow>& rows);

// CSV layout: a provenance comment, a header, then
// step,return,success,distance,condition,seed per episode. Reruns from the
// same inputs produce byte-identical files.
void save_metrics_csv(const std::string& path, const RunMetrics& metrics);
RunMetrics load_metrics_csv(const std::string& path);

// Companion table for synergy-space runs: step,share0..share{n-1}.
void save_contributions_csv(const std::string& path, const RunMetrics& metrics);
Matrix load_contributions_csv(const std::string& path,
                              std::vector<std::uint64_t>* steps = nullptr);

}  // namespace sarkit::harness

#endif  // SARKIT_HARNESS_EXPERIMENT_HPP_
