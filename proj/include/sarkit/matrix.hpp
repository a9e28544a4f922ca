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

#ifndef SARKIT_MATRIX_HPP_
#define SARKIT_MATRIX_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "sarkit/error.hpp"

namespace sarkit {

// Dense row-major matrix of doubles. Deliberately minimal: shape, element
// access, and the handful of products the pipeline needs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
  const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a (r×k) times b (k×c); throws kArgument on a shape mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// aᵀ b without forming the transpose: a is (k×r), result is (r×c).
Matrix matmul_at_b(const Matrix& a, const Matrix& b);

// a bᵀ without forming the transpose: b is (c×k), result is (r×c).
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// m (r×c) times v (length c).
std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& v);

// Formats a double so that parsing it back recovers the identical bits
// (printf "%.17g"); shared by every text format the library writes.
std::string format_double(double value);

// Writes one data row per matrix row, comma separated, "%.17g" formatting.
// When `header` is nonempty it is written verbatim as the first line.
void save_matrix_csv(const std::string& path, const Matrix& m,
                     const std::vector<std::string>& header = {});

// Reads a comma-separated numeric matrix. A first line containing any token
// that does not parse as a number is treated as a header and skipped. Ragged
// rows or unparsable cells raise kIo.
Matrix load_matrix_csv(const std::string& path);

}  // namespace sarkit

#endif  // SARKIT_MATRIX_HPP_
