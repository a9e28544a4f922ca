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

#ifndef SARKIT_RL_SAC_HPP_
#define SARKIT_RL_SAC_HPP_

#include <cstdint>
#include <vector>

#include "nlohmann/json.hpp"
#include "sarkit/rl/mlp.hpp"
#include "sarkit/rl/optim.hpp"
#include "sarkit/rl/replay.hpp"
#include "sarkit/rng.hpp"

namespace sarkit::rl {

struct SacConfig {
  std::vector<std::size_t> hidden = {400, 300};
  double lr0 = 0.001;          // initial learning rate
  bool linear_schedule = true; // anneal to zero over total_steps
  std::uint64_t total_steps = 100000;  // schedule horizon
  std::size_t start_learning = 3000;   // env steps before updates begin
  std::size_t batch_size = 256;
  double tau = 0.02;   // Polyak rate for the target critics
  double gamma = 0.98;
  std::size_t replay_capacity = 200000;

  void validate() const;
};

// Complete round trip; used inside checkpoints and experiment manifests.
nlohmann::json sac_config_to_json(const SacConfig& config);
SacConfig sac_config_from_json(const nlohmann::json& j);

// One stochastic draw from the squashed-Gaussian policy, with everything a
// reparameterized gradient needs.
struct PolicySample {
  std::vector<double> action;   // tanh of the pre-squash sample, in (-1, 1)
  double log_prob = 0.0;        // density of `action` with the tanh correction
};

// Samples from the policy network `net`, whose output is [mean | log-std]
// per action dimension; log-std is clamped to [-20, 2].
PolicySample gaussian_policy_sample(const Mlp& net, const std::vector<double>& obs,
                                    Rng& rng);
// The deterministic evaluation action: tanh of the mean head.
std::vector<double> gaussian_policy_mean(const Mlp& net,
                                         const std::vector<double>& obs);

// Twin-critic soft actor-critic with automatic entropy-temperature tuning
// (target entropy = -action_dim, optimized in log space) and manually
// differentiated networks throughout.
class SacAgent {
 public:
  SacAgent(std::size_t obs_dim, std::size_t act_dim, SacConfig config,
           std::uint64_t seed);

  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }
  const SacConfig& config() const { return config_; }
  double alpha() const;
  double log_alpha() const { return log_alpha_; }

  std::vector<double> act_stochastic(const std::vector<double>& obs, Rng& rng) const;
  std::vector<double> act_deterministic(const std::vector<double>& obs) const;

  struct Losses {
    double critic1 = 0.0, critic2 = 0.0, actor = 0.0, alpha = 0.0;
    double mean_log_prob = 0.0;
  };

  // Bellman backup y = r + γ·not_terminal·(min target Q(s', a') − α·log π):
  // the target side of the critic regression, exposed for verification.
  std::vector<double> td_targets(const ReplayBuffer::Batch& batch, Rng& rng) const;

  // One gradient step on both critics, the actor, and the temperature from
  // one uniform batch, followed by the Polyak target update. Raises a
  // sequencing error until the buffer holds start_learning transitions and
  // a convergence error if any loss goes non-finite.
  Losses update(ReplayBuffer& buffer, double lr);

  // Low-level update on an explicit batch (size must equal config.batch_size).
  Losses update_batch(const ReplayBuffer::Batch& batch, double lr);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic1() const { return critic1_; }
  const Mlp& critic2() const { return critic2_; }
  const Mlp& target_critic1() const { return target1_; }
  const Mlp& target_critic2() const { return target2_; }
  Mlp& mutable_actor() { return actor_; }

  // Forces target weights to (1 − rate)·target + rate·online immediately.
  void sync_targets(double rate);

  nlohmann::json to_json() const;
  static SacAgent from_json(const nlohmann::json& j);

 private:
  SacAgent() = default;

  std::size_t obs_dim_ = 0, act_dim_ = 0;
  SacConfig config_;
  Mlp actor_, critic1_, critic2_, target1_, target2_;
  Adam actor_opt_, critic1_opt_, critic2_opt_, alpha_opt_;
  double log_alpha_ = 0.0;
  double target_entropy_ = 0.0;
  Rng update_rng_{0};
};

}  // namespace sarkit::rl

#endif  // SARKIT_RL_SAC_HPP_
