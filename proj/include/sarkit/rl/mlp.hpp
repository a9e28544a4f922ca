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

#ifndef SARKIT_RL_MLP_HPP_
#define SARKIT_RL_MLP_HPP_

#include <cstddef>
#include <vector>

#include "sarkit/matrix.hpp"
#include "sarkit/rng.hpp"

namespace sarkit::rl {

// Fully connected network with ReLU hidden layers and a linear output,
// differentiated by hand. Parameters live in one flat vector (per layer:
// weights in fan-in × fan-out order, then biases) so optimizers, Polyak
// averaging, and checkpoints can treat the whole net as a single array.
class Mlp {
 public:
  Mlp() = default;
  // sizes = [input, hidden..., output], at least two entries, all positive.
  // Initial weights are uniform in ±1/√fan_in; the final layer is scaled by
  // final_scale (small values give near-zero initial outputs).
  Mlp(std::vector<std::size_t> sizes, Rng& rng, double final_scale = 1.0);

  static std::size_t parameter_count(const std::vector<std::size_t>& sizes);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  // Everything backward needs: the input to each affine layer (post-ReLU of
  // the previous one) and each layer's pre-activation output.
  struct Workspace {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre_activations;
  };

  // Batched forward pass; rows are samples. Pass a workspace to enable a
  // later backward call.
  Matrix forward(const Matrix& input, Workspace* ws = nullptr) const;

  // Accumulates dLoss/dParameters into `grad` (same layout and length as
  // parameters(); caller zeroes it) given dLoss/dOutput, and returns
  // dLoss/dInput. The workspace must come from a forward call on this net
  // with the current parameter values.
  Matrix backward(const Workspace& ws, const Matrix& grad_output,
                  std::vector<double>& grad) const;

  // target = (1 - rate) * target + rate * online, elementwise; rate = 1
  // copies exactly.
  static void polyak_update(Mlp& target, const Mlp& online, double rate);

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> params_;
  std::vector<std::size_t> layer_offset_;  // start of each layer's weights
};

}  // namespace sarkit::rl

#endif  // SARKIT_RL_MLP_HPP_
