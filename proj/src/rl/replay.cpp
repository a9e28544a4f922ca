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

#include "sarkit/rl/replay.hpp"

#include <algorithm>
#include <cstring>

#include "sarkit/error.hpp"

namespace sarkit::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim,
                           std::size_t act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0 || obs_dim == 0 || act_dim == 0) {
    throw_error(ErrorKind::kArgument, "replay buffer dimensions must be positive");
  }
  obs_.resize(capacity * obs_dim);
  actions_.resize(capacity * act_dim);
  next_obs_.resize(capacity * obs_dim);
  rewards_.resize(capacity);
  not_terminal_.resize(capacity);
}

void ReplayBuffer::add(const std::vector<double>& obs,
                       const std::vector<double>& action, double reward,
                       const std::vector<double>& next_obs, bool terminal) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ ||
      action.size() != act_dim_) {
    throw_error(ErrorKind::kArgument, "transition shape does not match the buffer");
  }
  std::copy(obs.begin(), obs.end(), obs_.begin() + cursor_ * obs_dim_);
  std::copy(action.begin(), action.end(), actions_.begin() + cursor_ * act_dim_);
  std::copy(next_obs.begin(), next_obs.end(),
            next_obs_.begin() + cursor_ * obs_dim_);
  rewards_[cursor_] = reward;
  not_terminal_[cursor_] = terminal ? 0.0 : 1.0;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch == 0) throw_error(ErrorKind::kArgument, "batch size must be positive");
  if (size_ < batch) {
    throw_error(ErrorKind::kSequencing,
                "replay buffer holds fewer transitions than one batch");
  }
  Batch out;
  out.obs = Matrix(batch, obs_dim_);
  out.actions = Matrix(batch, act_dim_);
  out.next_obs = Matrix(batch, obs_dim_);
  out.rewards.resize(batch);
  out.not_terminal.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t idx = static_cast<std::size_t>(rng.integer(size_));
    std::memcpy(out.obs.row_ptr(b), obs_.data() + idx * obs_dim_,
                obs_dim_ * sizeof(double));
    std::memcpy(out.actions.row_ptr(b), actions_.data() + idx * act_dim_,
                act_dim_ * sizeof(double));
    std::memcpy(out.next_obs.row_ptr(b), next_obs_.data() + idx * obs_dim_,
                obs_dim_ * sizeof(double));
    out.rewards[b] = rewards_[idx];
    out.not_terminal[b] = not_terminal_[idx];
  }
  return out;
}

}  // namespace sarkit::rl
