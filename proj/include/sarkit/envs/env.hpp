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

#ifndef SARKIT_ENVS_ENV_HPP_
#define SARKIT_ENVS_ENV_HPP_

#include <string>
#include <vector>

#include "sarkit/error.hpp"
#include "sarkit/rng.hpp"

namespace sarkit::envs {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;     // episode over (time limit, success, or failure)
  bool terminal = false; // done because the state is absorbing (drop, fall);
                         // false for time limits, so TD backups still bootstrap
  bool success = false;  // task-specific success flag, meaningful when done
  double distance = 0.0; // task progress scalar (error or metres, per env)
};

// Episodic muscle-driven environment. Implementations are deterministic
// given the reset rng stream and the action sequence.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string name() const = 0;
  virtual std::size_t observation_dim() const = 0;
  // Actions live in [-1, 1]^action_dim; entries map to muscle excitations
  // through the excitation squash.
  virtual std::size_t action_dim() const = 0;

  virtual std::vector<double> reset(Rng& rng) = 0;

  // Advances one control step. Raises kSequencing before the first reset or
  // after done, kArgument on a malformed action vector, and kContract when
  // any action component leaves [-1, 1].
  virtual StepResult step(const std::vector<double>& action) = 0;

  // Excitations fed to the muscles at the last step (post-squash commands,
  // each in (0, 1)); this is what activity logging records.
  virtual const std::vector<double>& last_excitation() const = 0;
};

// Shared argument checks for every env's step().
void check_action(const std::vector<double>& action, std::size_t dim,
                  bool episode_active);

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_ENV_HPP_
