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

#ifndef SARKIT_RL_REPLAY_HPP_
#define SARKIT_RL_REPLAY_HPP_

#include <cstddef>
#include <vector>

#include "sarkit/matrix.hpp"
#include "sarkit/rng.hpp"

namespace sarkit::rl {

// Ring buffer of transitions with uniform sampling. Once full, the oldest
// entries are overwritten first.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t act_dim);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }

  // `terminal` marks absorbing ends (no bootstrapping); time-limit ends
  // should be stored with terminal = false.
  void add(const std::vector<double>& obs, const std::vector<double>& action,
           double reward, const std::vector<double>& next_obs, bool terminal);

  struct Batch {
    Matrix obs, actions, next_obs;       // rows are transitions
    std::vector<double> rewards;
    std::vector<double> not_terminal;    // 1.0 bootstrap, 0.0 absorbing
  };

  // Uniform draw with replacement. Raises a sequencing error when fewer
  // than `batch` transitions have been stored.
  Batch sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_, obs_dim_, act_dim_;
  std::size_t size_ = 0, cursor_ = 0;
  std::vector<double> obs_, actions_, next_obs_, rewards_, not_terminal_;
};

}  // namespace sarkit::rl

#endif  // SARKIT_RL_REPLAY_HPP_
