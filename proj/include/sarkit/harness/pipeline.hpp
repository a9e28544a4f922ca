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

#ifndef SARKIT_HARNESS_PIPELINE_HPP_
#define SARKIT_HARNESS_PIPELINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sarkit/harness/experiment.hpp"
#include "sarkit/rl/policy_head.hpp"
#include "sarkit/rl/sac.hpp"
#include "sarkit/synergy.hpp"

namespace sarkit::harness {

// ---------------------------------------------------------------------------
// Phase 1: play. Train a direct-action policy on the simple task, then roll
// it out and record the squashed actuator excitations it commands.
// ---------------------------------------------------------------------------

struct PlayResult {
  rl::SacAgent agent;  // the play policy, resumable by the curriculum arm
  ActivationLog log;   // row per rollout step, column per actuator, in [0,1]
  RunMetrics metrics;  // condition "play"
};

PlayResult run_play_phase(const ExperimentConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Phase 2: one (condition, seed) training run on the target task. Every
// condition consumes exactly play_steps + train_steps environment steps in
// total; pretrained arms were already charged play_steps during phase 1 and
// their episode records are shifted accordingly so curves share an x-axis.
// ---------------------------------------------------------------------------

struct ConditionInputs {
  const SynergyRepresentation* sar = nullptr;  // required by sar-rl
  const rl::SacAgent* play_agent = nullptr;    // required by rl-curr
};

struct ConditionResult {
  RunMetrics metrics;
  rl::SacAgent agent;
  rl::PolicyHead head;
};

ConditionResult run_condition(const ExperimentConfig& config, Condition condition,
                              std::uint64_t seed, const ConditionInputs& inputs);

// ---------------------------------------------------------------------------
// Phase 3: test. Deterministic rollouts on held-out evaluation sets; never
// updates a parameter.
// ---------------------------------------------------------------------------

struct ZeroShotRow {
  std::string set_name;
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double mean_distance = 0.0;
  double mean_return = 0.0;
};

// One row per entry of config.eval_envs, in name order.
std::vector<ZeroShotRow> run_zero_shot(const ExperimentConfig& config,
                                       const rl::PolicyHead& head,
                                       const rl::SacAgent& agent,
                                       std::uint64_t seed);

void save_zero_shot_csv(const std::string& path,
                        const std::vector<ZeroShotRow>& rows,
                        const std::string& hash, std::uint64_t seed,
                        const std::string& condition);
std::vector<ZeroShotRow> load_zero_shot_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Representation reuse: train fresh policies on variants of the target task
// while keeping the already-fitted representation frozen. For each terrain
// the synergy arm is compared against a from-scratch direct-action arm with
// the same total budget.
// ---------------------------------------------------------------------------

struct TransferOutcome {
  std::string terrain;
  std::string arm;  // "sar" or "e2e"
  RunMetrics metrics;
};

std::vector<TransferOutcome> run_transfer(const ExperimentConfig& config,
                                          const SynergyRepresentation& sar,
                                          const std::vector<std::string>& terrains,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ablations.
// ---------------------------------------------------------------------------

enum class AblationKind {
  kBlendWeight,    // retrain across the blend-weight grid
  kSynergySubset,  // most- vs least-informative k synergies
  kRandomSar,      // fitted representation vs a random one of equal shape
  kPostHocBlend,   // evaluate a trained policy under an overridden weight
};

const char* ablation_kind_name(AblationKind kind);
// Unknown names raise kArgument (they arrive from the command line).
AblationKind ablation_kind_from_string(const std::string& name);

// The blend-weight grid used by both the retraining and post-hoc ablations.
std::vector<double> blend_weight_grid();

struct AblationRow {
  std::string variant;          // e.g. "phi", "most-k", "fitted", "override"
  double value = 0.0;           // grid value or subset size
  std::uint64_t seed = 0;
  bool actions_changed = false; // post-hoc only: differs from the base policy
  Summary summary;
};

struct AblationInputs {
  const SynergyRepresentation* sar = nullptr;  // all kinds except post-hoc
  const rl::SacAgent* agent = nullptr;         // post-hoc: trained policy
  const rl::PolicyHead* head = nullptr;        // post-hoc: its blended head
};

std::vector<AblationRow> ablate(AblationKind kind, const ExperimentConfig& config,
                                std::uint64_t seed, const AblationInputs& inputs);

void save_ablation_csv(const std::string& path, AblationKind kind,
                       const std::vector<AblationRow>& rows,
                       const std::string& hash);
std::vector<AblationRow> load_ablation_csv(const std::string& path);

}  // namespace sarkit::harness

#endif  // SARKIT_HARNESS_PIPELINE_HPP_
