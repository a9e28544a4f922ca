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

#include "sarkit/rl/optim.hpp"

#include <cmath>

#include "sarkit/error.hpp"

namespace sarkit::rl {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;
}  // namespace

void Adam::step(std::vector<double>& params, const std::vector<double>& grad,
                double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw_error(ErrorKind::kArgument, "optimizer state does not match parameters");
  }
  ++t_;
  const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + kEpsilon);
  }
}

void Adam::restore(std::vector<double> m, std::vector<double> v, std::uint64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw_error(ErrorKind::kArgument, "restored optimizer state has the wrong size");
  }
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

double linear_lr(double lr0, std::uint64_t step, std::uint64_t total) {
  if (total == 0 || step >= total) return 0.0;
  const double progress =
      static_cast<double>(step) / static_cast<double>(total);
  return lr0 * (1.0 - progress);
}

}  // namespace sarkit::rl
