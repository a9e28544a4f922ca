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

#ifndef SARKIT_RL_TRAIN_HPP_
#define SARKIT_RL_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "sarkit/envs/env.hpp"
#include "sarkit/rl/policy_head.hpp"
#include "sarkit/rl/replay.hpp"
#include "sarkit/rl/sac.hpp"

namespace sarkit::rl {

struct EpisodeRecord {
  std::uint64_t end_step = 0;  // global env-step index when the episode closed
  double episode_return = 0.0;
  bool success = false;
  double distance = 0.0;  // task scalar at the final step
};

struct TrainMetrics {
  std::uint64_t steps = 0;    // env steps taken during this call
  std::uint64_t updates = 0;  // gradient updates performed
  std::vector<EpisodeRecord> episodes;
};

struct TrainOptions {
  std::uint64_t steps = 0;        // env steps to run in this call
  std::uint64_t step_offset = 0;  // global step the call starts at (for the
                                  // learning-rate schedule and episode records)
  // Extra shift applied to recorded episode steps only, not to the schedule:
  // lets a freshly scheduled run be plotted on a shared x-axis that charges
  // it for steps consumed elsewhere (e.g. a pretraining phase).
  std::uint64_t report_offset = 0;
  // Act with the (stochastic) policy even while the buffer is below the
  // learning threshold — the right warmup for a resumed policy, where
  // uniform noise would throw away what it already knows.
  bool policy_warmup = false;
  // Invoked after every completed episode; useful for checkpoint cadence.
  std::function<void(const EpisodeRecord&)> on_episode = nullptr;
  // Invoked with the raw (pre-head) action taken at every env step.
  std::function<void(const std::vector<double>&)> on_raw_action = nullptr;
};

// The standard off-policy loop: act (uniform until start_learning, then
// stochastic policy), store the raw action, update once per env step once
// the buffer passes the threshold. The head translates raw actions into the
// environment's actuator space. Deterministic given the rng and env.
TrainMetrics train_sac(envs::Env& env, const PolicyHead& head, SacAgent& agent,
                       ReplayBuffer& buffer, const TrainOptions& options, Rng& rng);

struct EvalStats {
  double mean_return = 0.0;
  double return_stddev = 0.0;
  double success_rate = 0.0;
  double mean_distance = 0.0;  // mean of the final-step task scalar
  std::vector<EpisodeRecord> episodes;
};

// Runs `episodes` episodes with the deterministic policy (tanh of the mean
// head) and aggregates returns, success, and final distances.
EvalStats evaluate_policy(envs::Env& env, const PolicyHead& head,
                          const SacAgent& agent, std::size_t episodes, Rng& rng);

// Same rollout loop but with uniform random raw actions: the no-learning
// baseline that learned policies are measured against.
EvalStats evaluate_random(envs::Env& env, const PolicyHead& head,
                          std::size_t episodes, Rng& rng);

}  // namespace sarkit::rl

#endif  // SARKIT_RL_TRAIN_HPP_
