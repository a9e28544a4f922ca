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

#ifndef SARKIT_RL_OPTIM_HPP_
#define SARKIT_RL_OPTIM_HPP_

#include <cstdint>
#include <vector>

namespace sarkit::rl {

// Adaptive moment estimation with the standard defaults
// (β₁ = 0.9, β₂ = 0.999, ε = 1e-8) and bias correction.
class Adam {
 public:
  Adam() = default;
  explicit Adam(std::size_t size) : m_(size, 0.0), v_(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr);

  std::uint64_t updates() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  void restore(std::vector<double> m, std::vector<double> v, std::uint64_t t);

 private:
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

// lr₀ × (1 − step/total), floored at zero once step passes total.
double linear_lr(double lr0, std::uint64_t step, std::uint64_t total);

}  // namespace sarkit::rl

#endif  // SARKIT_RL_OPTIM_HPP_
