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

#include "sarkit/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sarkit/rng.hpp"

namespace sarkit {

std::pair<Matrix, std::vector<double>> mean_center(const Matrix& m) {
  if (!all_finite(m)) throw_error(ErrorKind::kArgument, "mean_center: non-finite input");
  if (m.rows() < 2) {
    throw_error(ErrorKind::kDegenerateInput,
                "mean_center: need at least 2 rows, got " + std::to_string(m.rows()));
  }
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(m.rows());
  Matrix centered(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* src = m.row_ptr(i);
    double* dst = centered.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j] - mean[j];
  }
  return {std::move(centered), std::move(mean)};
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

}  // namespace

EigResult sym_eig(const Matrix& a, double rel_threshold, int max_sweeps) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw_error(ErrorKind::kArgument, "sym_eig: matrix must be square and nonempty");
  }
  if (!all_finite(a)) throw_error(ErrorKind::kArgument, "sym_eig: non-finite input");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-9) {
        throw_error(ErrorKind::kContract, "sym_eig: matrix is not symmetric at (" +
                                              std::to_string(i) + "," + std::to_string(j) + ")");
      }

  Matrix work = a;
  // Average the halves so roundoff asymmetry below the check tolerance
  // cannot drift the iteration.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (work(i, j) + work(j, i));
      work(i, j) = v;
      work(j, i) = v;
    }
  Matrix vecs = Matrix::identity(n);  // columns accumulate the eigenvectors

  // The stated threshold is absolute for order-one inputs; scaling by the
  // Frobenius norm keeps it meaningful for large-norm matrices too.
  const double threshold = rel_threshold * std::max(1.0, frobenius_norm(work));

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(work) <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = work(p, q);
        const double scale = 100.0 * std::fabs(apq);
        // Entry already negligible against its diagonal: flush to zero.
        if (std::fabs(work(p, p)) + scale == std::fabs(work(p, p)) &&
            std::fabs(work(q, q)) + scale == std::fabs(work(q, q))) {
          work(p, q) = 0.0;
          work(q, p) = 0.0;
          continue;
        }
        if (apq == 0.0) continue;

        const double theta = (work(q, q) - work(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        work(p, p) -= t * apq;
        work(q, q) += t * apq;
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = work(i, p);
          const double aiq = work(i, q);
          work(i, p) = aip - s * (aiq + aip * tau);
          work(i, q) = aiq + s * (aip - aiq * tau);
          work(p, i) = work(i, p);
          work(q, i) = work(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = vecs(i, p);
          const double viq = vecs(i, q);
          vecs(i, p) = vip - s * (viq + vip * tau);
          vecs(i, q) = viq + s * (vip - viq * tau);
        }
      }
    }
  }
  if (!converged && off_diagonal_norm(work) > threshold) {
    throw_error(ErrorKind::kConvergence,
                "sym_eig: off-diagonal norm " + format_double(off_diagonal_norm(work)) +
                    " above threshold after " + std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return work(x, x) > work(y, y); });

  EigResult result;
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t src = order[r];
    result.values[r] = work(src, src);
    for (std::size_t i = 0; i < n; ++i) result.vectors(r, i) = vecs(i, src);
  }
  return result;
}

PcaModel pca_fit(const Matrix& m, std::size_t n_components) {
  if (n_components == 0 || n_components > m.cols()) {
    throw_error(ErrorKind::kArgument,
                "pca_fit: n_components " + std::to_string(n_components) +
                    " outside [1, " + std::to_string(m.cols()) + "]");
  }
  auto [centered, mean] = mean_center(m);

  Matrix cov = matmul_at_b(centered, centered);
  const double denom = static_cast<double>(m.rows() - 1);
  for (double& v : cov.data()) v /= denom;

  EigResult eig = sym_eig(cov);

  PcaModel model;
  model.mean = std::move(mean);
  model.components = Matrix(n_components, m.cols());
  model.explained_variance.resize(n_components);
  for (std::size_t i = 0; i < n_components; ++i) {
    model.explained_variance[i] = std::max(eig.values[i], 0.0);
    // Sign convention: the largest-magnitude entry of each component is
    // positive, which pins down the eigenvector sign ambiguity.
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double mag = std::fabs(eig.vectors(i, j));
      if (mag > best) {
        best = mag;
        arg = j;
      }
    }
    const double flip = eig.vectors(i, arg) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      model.components(i, j) = flip * eig.vectors(i, j);
  }
  return model;
}

Matrix whiten(const Matrix& m, const PcaModel& model) {
  if (m.cols() != model.mean.size()) {
    throw_error(ErrorKind::kArgument,
                "whiten: input has " + std::to_string(m.cols()) +
                    " columns but the model was fit on " +
                    std::to_string(model.mean.size()));
  }
  if (!all_finite(m)) throw_error(ErrorKind::kArgument, "whiten: non-finite input");
  const std::size_t k = model.components.rows();
  for (std::size_t i = 0; i < k; ++i) {
    if (model.explained_variance[i] < 1e-12) {
      throw_error(ErrorKind::kDegenerateInput,
                  "whiten: component " + std::to_string(i) +
                      " has variance below 1e-12; nothing to normalize");
    }
  }
  Matrix centered(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* src = m.row_ptr(i);
    double* dst = centered.row_ptr(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j] - model.mean[j];
  }
  Matrix projected = matmul_a_bt(centered, model.components);
  for (std::size_t j = 0; j < k; ++j) {
    const double inv_std = 1.0 / std::sqrt(model.explained_variance[j]);
    for (std::size_t i = 0; i < projected.rows(); ++i) projected(i, j) *= inv_std;
  }
  return projected;
}

namespace {

// B ← (B Bᵀ)^(-1/2) B, which makes the rows of B exactly orthonormal.
void symmetric_decorrelate(Matrix& b) {
  const std::size_t k = b.rows();
  Matrix gram = matmul_a_bt(b, b);
  EigResult eig = sym_eig(gram);
  for (double v : eig.values) {
    if (v < 1e-12) {
      throw_error(ErrorKind::kDegenerateInput,
                  "fastica: unmixing candidate is rank deficient");
    }
  }
  // (B Bᵀ)^(-1/2) = Eᵀ diag(1/sqrt(λ)) E with eigenvector rows E.
  Matrix scaled = eig.vectors;  // rows scaled by 1/sqrt(λ)
  for (std::size_t i = 0; i < k; ++i) {
    const double inv_sqrt = 1.0 / std::sqrt(eig.values[i]);
    for (std::size_t j = 0; j < k; ++j) scaled(i, j) *= inv_sqrt;
  }
  Matrix inv_sqrt_gram = matmul_at_b(eig.vectors, scaled);
  b = matmul(inv_sqrt_gram, b);
}

}  // namespace

IcaModel fastica(const Matrix& whitened, std::size_t n_components, double tol,
                 int max_iter, std::uint64_t seed) {
  if (n_components == 0 || n_components > whitened.cols()) {
    throw_error(ErrorKind::kArgument,
                "fastica: n_components " + std::to_string(n_components) +
                    " outside [1, " + std::to_string(whitened.cols()) + "]");
  }
  if (max_iter < 1) throw_error(ErrorKind::kArgument, "fastica: max_iter must be >= 1");
  if (!all_finite(whitened)) throw_error(ErrorKind::kArgument, "fastica: non-finite input");
  if (whitened.rows() < 2) {
    throw_error(ErrorKind::kDegenerateInput, "fastica: need at least 2 samples");
  }

  const std::size_t k = n_components;
  const std::size_t t_samples = whitened.rows();

  Matrix z(t_samples, k);
  for (std::size_t i = 0; i < t_samples; ++i)
    for (std::size_t j = 0; j < k; ++j) z(i, j) = whitened(i, j);

  // Whiteness precondition: sample covariance of the used columns must be
  // the identity.
  {
    Matrix cov = matmul_at_b(z, z);
    const double denom = static_cast<double>(t_samples - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double expect = i == j ? 1.0 : 0.0;
        worst = std::max(worst, std::fabs(cov(i, j) / denom - expect));
      }
    if (worst > 1e-6) {
      throw_error(ErrorKind::kContract,
                  "fastica: input is not whitened (covariance deviates from "
                  "identity by " + format_double(worst) + ")");
    }
  }

  Rng rng(seed);
  Matrix b(k, k);
  for (double& v : b.data()) v = rng.normal();
  symmetric_decorrelate(b);

  const double inv_t = 1.0 / static_cast<double>(t_samples);
  for (int iter = 1; iter <= max_iter; ++iter) {
    // One fixed-point step with g = tanh (log-cosh contrast):
    //   B₁ = E[g(B z) zᵀ] − diag(E[g'(B z)]) B
    Matrix y = matmul_a_bt(z, b);  // t×k source estimates
    Matrix g(t_samples, k);
    std::vector<double> gprime_mean(k, 0.0);
    for (std::size_t i = 0; i < t_samples; ++i) {
      const double* y_row = y.row_ptr(i);
      double* g_row = g.row_ptr(i);
      for (std::size_t j = 0; j < k; ++j) {
        const double th = std::tanh(y_row[j]);
        g_row[j] = th;
        gprime_mean[j] += 1.0 - th * th;
      }
    }
    for (double& v : gprime_mean) v *= inv_t;

    Matrix b_next = matmul_at_b(g, z);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        b_next(i, j) = b_next(i, j) * inv_t - gprime_mean[i] * b(i, j);
    symmetric_decorrelate(b_next);

    // Rows are unit norm, so |<new, old>| = 1 means the direction is fixed
    // (sign flips count as converged).
    double delta = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < k; ++j) d += b_next(i, j) * b(i, j);
      delta = std::max(delta, std::fabs(1.0 - std::fabs(d)));
    }
    b = std::move(b_next);
    if (delta < tol) {
      IcaModel model;
      model.unmixing = b;
      model.mixing = transpose(b);  // rows orthonormal, so inverse = transpose
      model.iterations = iter;
      return model;
    }
  }
  throw_error(ErrorKind::kConvergence,
              "fastica: not converged after " + std::to_string(max_iter) + " iterations");
}

double vaf(const Matrix& m, const PcaModel& model, std::size_t k) {
  if (k > model.components.rows()) {
    throw_error(ErrorKind::kArgument,
                "vaf: k " + std::to_string(k) + " exceeds fitted components " +
                    std::to_string(model.components.rows()));
  }
  if (k == 0) return 0.0;
  auto [centered, mean] = mean_center(m);
  (void)mean;
  double total = 0.0;
  for (double v : centered.data()) total += v * v;
  total /= static_cast<double>(m.rows() - 1);
  // A constant matrix has no variance to explain; by convention any
  // nonempty basis accounts for all of it.
  if (total < 1e-300) return 1.0;
  double captured = 0.0;
  for (std::size_t i = 0; i < k; ++i) captured += model.explained_variance[i];
  return std::clamp(captured / total, 0.0, 1.0);
}

}  // namespace sarkit
