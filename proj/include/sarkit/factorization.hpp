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

#ifndef SARKIT_FACTORIZATION_HPP_
#define SARKIT_FACTORIZATION_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "sarkit/matrix.hpp"

namespace sarkit {

// Subtracts the per-column mean. Returns the centered matrix and the mean
// vector. Requires at least two rows (a single sample centers to zero and
// carries no variance information).
std::pair<Matrix, std::vector<double>> mean_center(const Matrix& m);

struct EigResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i is the unit eigenvector for values[i]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Symmetry is checked
// to 1e-9 (kContract on violation); failure to reach the off-diagonal
// threshold within the sweep cap raises kConvergence.
EigResult sym_eig(const Matrix& a, double rel_threshold = 1e-12,
                  int max_sweeps = 100);

struct PcaModel {
  std::vector<double> mean;                // per input column
  Matrix components;                       // k×d, orthonormal rows
  std::vector<double> explained_variance;  // k eigenvalues, descending
};

// Principal components of the rows of m via eigendecomposition of the sample
// covariance (n-1 denominator). Each component row is sign-fixed so its
// largest-magnitude entry is positive. n_components must be in [1, cols].
PcaModel pca_fit(const Matrix& m, std::size_t n_components);

// Projects rows of m onto the model's components and rescales each projection
// to unit variance. Raises kDegenerateInput if any used eigenvalue is below
// 1e-12 (the direction carries no variance to normalize by).
Matrix whiten(const Matrix& m, const PcaModel& model);

struct IcaModel {
  Matrix unmixing;  // k×k, rows are unmixing vectors: s = unmixing · z
  Matrix mixing;    // k×k, inverse of unmixing: z = mixing · s
  int iterations = 0;
};

// FastICA with the log-cosh contrast and symmetric decorrelation, operating
// on whitened data (rows are samples). Initialization is a seeded
// standard-normal matrix, so results are deterministic per seed. Raises
// kConvergence if the tolerance is not met within max_iter iterations and
// kContract if the input is not whitened.
IcaModel fastica(const Matrix& whitened, std::size_t n_components,
                 double tol = 1e-5, int max_iter = 500, std::uint64_t seed = 0);

// Fraction of total variance of m accounted for by the first k components of
// the model, in [0, 1]. k must not exceed the number of fitted components.
double vaf(const Matrix& m, const PcaModel& model, std::size_t k);

}  // namespace sarkit

#endif  // SARKIT_FACTORIZATION_HPP_
