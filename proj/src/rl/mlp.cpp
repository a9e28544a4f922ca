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

#include "sarkit/rl/mlp.hpp"

#include <cmath>

#include "sarkit/error.hpp"

namespace sarkit::rl {

Mlp::Mlp(std::vector<std::size_t> sizes, Rng& rng, double final_scale)
    : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) {
    throw_error(ErrorKind::kArgument, "network needs at least input and output sizes");
  }
  for (std::size_t s : sizes_) {
    if (s == 0) throw_error(ErrorKind::kArgument, "layer sizes must be positive");
  }
  params_.resize(parameter_count(sizes_));
  layer_offset_.resize(sizes_.size() - 1);

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layer_offset_[l] = offset;
    const std::size_t fan_in = sizes_[l];
    const std::size_t fan_out = sizes_[l + 1];
    const bool last = l + 2 == sizes_.size();
    const double bound =
        (last ? final_scale : 1.0) / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < fan_in * fan_out; ++i) {
      params_[offset + i] = rng.uniform(-bound, bound);
    }
    // Biases start at zero.
    offset += fan_in * fan_out + fan_out;
  }
}

std::size_t Mlp::parameter_count(const std::vector<std::size_t>& sizes) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    total += (sizes[l] + 1) * sizes[l + 1];
  }
  return total;
}

Matrix Mlp::forward(const Matrix& input, Workspace* ws) const {
  if (input.cols() != input_dim()) {
    throw_error(ErrorKind::kArgument, "forward input width does not match the network");
  }
  if (ws != nullptr) {
    ws->inputs.clear();
    ws->pre_activations.clear();
  }

  Matrix h = input;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::size_t fan_in = sizes_[l];
    const std::size_t fan_out = sizes_[l + 1];
    const double* w = params_.data() + layer_offset_[l];
    const double* bias = w + fan_in * fan_out;
    const bool last = l + 2 == sizes_.size();

    if (ws != nullptr) ws->inputs.push_back(h);

    Matrix z(h.rows(), fan_out);
    for (std::size_t r = 0; r < h.rows(); ++r) {
      const double* in = h.row_ptr(r);
      double* out = z.row_ptr(r);
      for (std::size_t o = 0; o < fan_out; ++o) out[o] = bias[o];
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double x = in[i];
        if (x == 0.0) continue;
        const double* wrow = w + i * fan_out;
        for (std::size_t o = 0; o < fan_out; ++o) out[o] += x * wrow[o];
      }
    }
    if (ws != nullptr) ws->pre_activations.push_back(z);

    if (!last) {
      for (std::size_t r = 0; r < z.rows(); ++r) {
        double* row = z.row_ptr(r);
        for (std::size_t o = 0; o < fan_out; ++o) row[o] = row[o] > 0.0 ? row[o] : 0.0;
      }
    }
    h = std::move(z);
  }
  return h;
}

Matrix Mlp::backward(const Workspace& ws, const Matrix& grad_output,
                     std::vector<double>& grad) const {
  const std::size_t layers = sizes_.size() - 1;
  if (ws.inputs.size() != layers || ws.pre_activations.size() != layers) {
    throw_error(ErrorKind::kArgument, "workspace does not match the network depth");
  }
  if (grad.size() != params_.size()) {
    throw_error(ErrorKind::kArgument, "gradient buffer length mismatch");
  }
  if (grad_output.rows() != ws.inputs[0].rows() ||
      grad_output.cols() != output_dim()) {
    throw_error(ErrorKind::kArgument, "grad_output shape mismatch");
  }

  Matrix dz = grad_output;  // the output layer is linear
  for (std::size_t li = layers; li-- > 0;) {
    const std::size_t fan_in = sizes_[li];
    const std::size_t fan_out = sizes_[li + 1];
    const double* w = params_.data() + layer_offset_[li];
    double* dw = grad.data() + layer_offset_[li];
    double* db = dw + fan_in * fan_out;
    const Matrix& x = ws.inputs[li];

    for (std::size_t r = 0; r < dz.rows(); ++r) {
      const double* drow = dz.row_ptr(r);
      const double* xrow = x.row_ptr(r);
      for (std::size_t o = 0; o < fan_out; ++o) db[o] += drow[o];
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double xv = xrow[i];
        if (xv == 0.0) continue;
        double* dwrow = dw + i * fan_out;
        for (std::size_t o = 0; o < fan_out; ++o) dwrow[o] += xv * drow[o];
      }
    }

    Matrix dx(dz.rows(), fan_in);
    for (std::size_t r = 0; r < dz.rows(); ++r) {
      const double* drow = dz.row_ptr(r);
      double* dxrow = dx.row_ptr(r);
      for (std::size_t i = 0; i < fan_in; ++i) {
        const double* wrow = w + i * fan_out;
        double acc = 0.0;
        for (std::size_t o = 0; o < fan_out; ++o) acc += drow[o] * wrow[o];
        dxrow[i] = acc;
      }
    }

    if (li > 0) {
      // Gate through the previous layer's ReLU.
      const Matrix& z_prev = ws.pre_activations[li - 1];
      for (std::size_t r = 0; r < dx.rows(); ++r) {
        double* dxrow = dx.row_ptr(r);
        const double* zrow = z_prev.row_ptr(r);
        for (std::size_t i = 0; i < fan_in; ++i) {
          if (zrow[i] <= 0.0) dxrow[i] = 0.0;
        }
      }
    }
    dz = std::move(dx);
  }
  return dz;
}

void Mlp::polyak_update(Mlp& target, const Mlp& online, double rate) {
  if (target.params_.size() != online.params_.size()) {
    throw_error(ErrorKind::kArgument, "polyak update across mismatched networks");
  }
  const double keep = 1.0 - rate;
  for (std::size_t i = 0; i < target.params_.size(); ++i) {
    target.params_[i] = keep * target.params_[i] + rate * online.params_[i];
  }
}

}  // namespace sarkit::rl
