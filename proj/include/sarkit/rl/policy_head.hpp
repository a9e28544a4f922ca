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

#ifndef SARKIT_RL_POLICY_HEAD_HPP_
#define SARKIT_RL_POLICY_HEAD_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sarkit/synergy.hpp"

namespace sarkit::rl {

enum class PolicyMode { kPlain, kBlended, kPureSar };

const char* policy_mode_name(PolicyMode mode);
PolicyMode policy_mode_from_string(const std::string& name);

// Maps the agent's raw action vector to the environment's actuator space.
//
//   plain    raw = a^O (actuator_dim entries), passed through unchanged.
//   blended  raw = [a^N | a^O]: the first N entries are synergy coordinates
//            decoded through the representation, the rest act directly;
//            the env action is the convex blend weight·decoded +
//            (1−weight)·direct.
//   pure-sar raw = a^N, fully decoded.
class PolicyHead {
 public:
  static PolicyHead plain(std::size_t actuator_dim);
  static PolicyHead blended(SynergyRepresentation sar, double weight);
  static PolicyHead pure_sar(SynergyRepresentation sar);

  PolicyMode mode() const { return mode_; }
  double blend_weight() const { return weight_; }
  // Length of the raw vector the agent must produce: O, N+O, or N.
  std::size_t raw_dim() const;
  // Length of the action handed to the environment (the actuator count).
  std::size_t env_dim() const { return actuator_dim_; }
  bool has_sar() const { return mode_ != PolicyMode::kPlain; }
  const SynergyRepresentation& sar() const;

  std::vector<double> to_env_action(const std::vector<double>& raw) const;

  nlohmann::json to_json() const;
  static PolicyHead from_json(const nlohmann::json& j);

 private:
  PolicyHead() = default;

  PolicyMode mode_ = PolicyMode::kPlain;
  std::size_t actuator_dim_ = 0;
  double weight_ = 1.0;
  SynergyRepresentation sar_;
};

}  // namespace sarkit::rl

#endif  // SARKIT_RL_POLICY_HEAD_HPP_
