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

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "sarkit/factorization.hpp"
#include "sarkit/matrix.hpp"
#include "sarkit/rng.hpp"
#include "test_util.hpp"

using sarkit::ErrorKind;
using sarkit::Matrix;
using sarkit::Rng;
using testutil::thrown_kind;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

// Orthogonal matrix built as a product of random Givens rotations — an
// oracle construction that does not rely on any library decomposition.
Matrix random_orthogonal(std::size_t n, Rng& rng) {
  Matrix q = Matrix::identity(n);
  for (int rep = 0; rep < static_cast<int>(4 * n); ++rep) {
    std::size_t p = rng.integer(n);
    std::size_t r = rng.integer(n - 1);
    if (r >= p) ++r;
    double angle = rng.uniform(0.0, 6.283185307179586);
    double c = std::cos(angle), s = std::sin(angle);
    for (std::size_t j = 0; j < n; ++j) {
      double qp = q(p, j), qr = q(r, j);
      q(p, j) = c * qp - s * qr;
      q(r, j) = s * qp + c * qr;
    }
  }
  return q;
}

double column_mean(const Matrix& m, std::size_t j) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) acc += m(i, j);
  return acc / static_cast<double>(m.rows());
}

// Pearson correlation between column a of x and column b of y.
double column_corr(const Matrix& x, std::size_t a, const Matrix& y, std::size_t b) {
  double mx = column_mean(x, a), my = column_mean(y, b);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double dx = x(i, a) - mx, dy = y(i, b) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("rng: identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
  }
  Rng c(43);
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 16; ++i) differs = differs || (a2.raw() != c.raw());
  CHECK(differs);
}

TEST_CASE("rng: uniform stays in [0,1) and has sane moments") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.01);
}

TEST_CASE("rng: normal moments match a standard gaussian") {
  Rng rng(11);
  const int n = 50000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("rng: forked substreams are decorrelated") {
  Rng base(5);
  Rng f0 = base.fork(0);
  Rng f1 = base.fork(1);
  double corr = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) corr += (f0.uniform() - 0.5) * (f1.uniform() - 0.5);
  corr /= n * (1.0 / 12.0);  // normalize by uniform variance
  CHECK(std::fabs(corr) < 0.05);
}

TEST_CASE("matrix: matmul matches a hand-computed product") {
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
  Matrix b(3, 2);
  b(0, 0) = 7; b(0, 1) = 8;
  b(1, 0) = 9; b(1, 1) = 10;
  b(2, 0) = 11; b(2, 1) = 12;
  Matrix c = sarkit::matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(58));
  CHECK(c(0, 1) == doctest::Approx(64));
  CHECK(c(1, 0) == doctest::Approx(139));
  CHECK(c(1, 1) == doctest::Approx(154));
  CHECK(thrown_kind([&] { sarkit::matmul(a, a); }) == ErrorKind::kArgument);
}

TEST_CASE("matrix: fused transpose products agree with explicit transposes") {
  Rng rng(3);
  Matrix a = random_matrix(7, 4, rng);
  Matrix b = random_matrix(7, 5, rng);
  Matrix c = random_matrix(6, 4, rng);
  CHECK(sarkit::max_abs_diff(sarkit::matmul_at_b(a, b),
                             sarkit::matmul(sarkit::transpose(a), b)) < 1e-12);
  CHECK(sarkit::max_abs_diff(sarkit::matmul_a_bt(a, c),
                             sarkit::matmul(a, sarkit::transpose(c))) < 1e-12);
}

TEST_CASE("matrix: csv round trip is bit exact") {
  testutil::TempDir dir("sarkit-csv");
  Rng rng(9);
  Matrix m = random_matrix(13, 5, rng);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  m(2, 2) = 12345678901234567.0;
  sarkit::save_matrix_csv(dir.file("m.csv"), m, {"a", "b", "c", "d", "e"});
  Matrix back = sarkit::load_matrix_csv(dir.file("m.csv"));
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK(std::memcmp(back.data().data(), m.data().data(),
                    m.size() * sizeof(double)) == 0);
}

TEST_CASE("matrix: csv loader rejects ragged and non-numeric bodies") {
  testutil::TempDir dir("sarkit-csv-bad");
  {
    std::ofstream out(dir.file("ragged.csv"));
    out << "1,2,3\n4,5\n";
  }
  CHECK(thrown_kind([&] { sarkit::load_matrix_csv(dir.file("ragged.csv")); }) ==
        ErrorKind::kIo);
  {
    std::ofstream out(dir.file("bad.csv"));
    out << "1,2\n3,oops\n";
  }
  CHECK(thrown_kind([&] { sarkit::load_matrix_csv(dir.file("bad.csv")); }) ==
        ErrorKind::kIo);
  CHECK(thrown_kind([&] { sarkit::load_matrix_csv(dir.file("missing.csv")); }) ==
        ErrorKind::kIo);
}

TEST_CASE("mean_center: subtracts column means exactly") {
  Matrix m(3, 2);
  m(0, 0) = 1; m(0, 1) = 2;
  m(1, 0) = 3; m(1, 1) = 4;
  m(2, 0) = 5; m(2, 1) = 6;
  auto [centered, mean] = sarkit::mean_center(m);
  CHECK(mean[0] == doctest::Approx(3.0));
  CHECK(mean[1] == doctest::Approx(4.0));
  CHECK(centered(0, 0) == doctest::Approx(-2.0));
  CHECK(centered(2, 1) == doctest::Approx(2.0));
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += centered(i, j);
    CHECK(std::fabs(s) < 1e-12);
  }
  Matrix one_row(1, 2);
  CHECK(thrown_kind([&] { sarkit::mean_center(one_row); }) == ErrorKind::kDegenerateInput);
}

TEST_CASE("sym_eig: analytic 2x2 cases") {
  // diag(3, 1): eigenvalues in descending order with axis eigenvectors.
  Matrix d(2, 2);
  d(0, 0) = 3; d(1, 1) = 1;
  auto eig = sarkit::sym_eig(d);
  CHECK(eig.values[0] == doctest::Approx(3.0));
  CHECK(eig.values[1] == doctest::Approx(1.0));
  CHECK(std::fabs(std::fabs(eig.vectors(0, 0)) - 1.0) < 1e-12);
  CHECK(std::fabs(eig.vectors(0, 1)) < 1e-12);

  // [[2,1],[1,2]]: eigenvalues 3 and 1, eigenvectors along (1,1) and (1,-1).
  Matrix a(2, 2);
  a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
  eig = sarkit::sym_eig(a);
  CHECK(eig.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  const double inv_sqrt2 = 0.70710678118654752;
  CHECK(std::fabs(std::fabs(eig.vectors(0, 0)) - inv_sqrt2) < 1e-12);
  CHECK(std::fabs(eig.vectors(0, 0) - eig.vectors(0, 1)) < 1e-12);
}

TEST_CASE("sym_eig: recovers a planted spectrum") {
  // Oracle: A = Qᵀ diag(λ) Q with Q from random Givens rotations, so the true
  // spectrum is known before the solver ever runs.
  Rng rng(21);
  const std::size_t n = 8;
  std::vector<double> planted = {9.5, 4.0, 2.5, 1.0, 0.5, 0.25, -1.0, -3.0};
  Matrix q = random_orthogonal(n, rng);
  Matrix lam_q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lam_q(i, j) = planted[i] * q(i, j);
  Matrix a = sarkit::matmul_at_b(q, lam_q);
  // Symmetrize the last bits of roundoff.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }

  auto eig = sarkit::sym_eig(a);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(eig.values[i] == doctest::Approx(planted[i]).epsilon(1e-10));

  // Eigen equation and orthonormality.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = eig.vectors(i, j);
    auto av = sarkit::matvec(a, v);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::fabs(av[j] - eig.values[i] * v[j]) < 1e-9);
    for (std::size_t r = 0; r < n; ++r) {
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) d += eig.vectors(i, j) * eig.vectors(r, j);
      CHECK(std::fabs(d - (i == r ? 1.0 : 0.0)) < 1e-10);
    }
  }

  // Reconstruction A = Σ λᵢ vᵢ vᵢᵀ.
  Matrix recon(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        recon(r, c) += eig.values[i] * eig.vectors(i, r) * eig.vectors(i, c);
  CHECK(sarkit::max_abs_diff(recon, a) < 1e-9);
}

TEST_CASE("sym_eig: rejects non-square and non-symmetric inputs") {
  Matrix rect(2, 3);
  CHECK(thrown_kind([&] { sarkit::sym_eig(rect); }) == ErrorKind::kArgument);
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  asym(1, 0) = 0.5;
  CHECK(thrown_kind([&] { sarkit::sym_eig(asym); }) == ErrorKind::kContract);
}

TEST_CASE("pca_fit: the y = x line yields the diagonal component") {
  Matrix m(5, 2);
  double ts[5] = {-2, -1, 0, 1, 2};
  for (int i = 0; i < 5; ++i) {
    m(i, 0) = ts[i];
    m(i, 1) = ts[i];
  }
  auto model = sarkit::pca_fit(m, 2);
  const double inv_sqrt2 = 0.70710678118654752;
  CHECK(model.components(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
  CHECK(model.components(0, 1) == doctest::Approx(inv_sqrt2).epsilon(1e-10));
  // Projection variance: points map to t·√2, variance = 2·Σt²/(n−1) = 5.
  CHECK(model.explained_variance[0] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(model.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(sarkit::vaf(m, model, 1) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pca_fit: sign convention and argument checks") {
  Rng rng(33);
  Matrix m = random_matrix(40, 6, rng);
  auto model = sarkit::pca_fit(m, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < 6; ++j)
      if (std::fabs(model.components(i, j)) > best) {
        best = std::fabs(model.components(i, j));
        arg = j;
      }
    CHECK(model.components(i, arg) > 0.0);
  }
  for (std::size_t i = 1; i < 6; ++i)
    CHECK(model.explained_variance[i] <= model.explained_variance[i - 1] + 1e-12);
  CHECK(thrown_kind([&] { sarkit::pca_fit(m, 0); }) == ErrorKind::kArgument);
  CHECK(thrown_kind([&] { sarkit::pca_fit(m, 7); }) == ErrorKind::kArgument);
}

TEST_CASE("pca_fit: full-rank fit reconstructs the data") {
  Rng rng(17);
  Matrix m = random_matrix(30, 5, rng);
  auto model = sarkit::pca_fit(m, 5);
  // Reconstruct: x ≈ mean + Σᵢ (x−mean)·cᵢ cᵢ.
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<double> recon(5);
    for (std::size_t j = 0; j < 5; ++j) recon[j] = model.mean[j];
    for (std::size_t i = 0; i < 5; ++i) {
      double proj = 0.0;
      for (std::size_t j = 0; j < 5; ++j)
        proj += (m(r, j) - model.mean[j]) * model.components(i, j);
      for (std::size_t j = 0; j < 5; ++j) recon[j] += proj * model.components(i, j);
    }
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::fabs(recon[j] - m(r, j)) < 1e-9);
  }
}

TEST_CASE("whiten: output covariance is the identity") {
  Rng rng(19);
  // Anisotropic data: stretch one axis hard.
  Matrix m = random_matrix(500, 4, rng);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    m(i, 0) *= 6.0;
    m(i, 2) *= 0.3;
    m(i, 3) += 0.5 * m(i, 0);
  }
  auto model = sarkit::pca_fit(m, 4);
  Matrix z = sarkit::whiten(m, model);
  REQUIRE(z.rows() == m.rows());
  REQUIRE(z.cols() == 4);
  Matrix cov = sarkit::matmul_at_b(z, z);
  const double denom = static_cast<double>(z.rows() - 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::fabs(cov(i, j) / denom - (i == j ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("whiten: rank-deficient directions raise degenerate-input") {
  Rng rng(23);
  Matrix m(60, 3);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double t = rng.normal();
    double u = rng.normal();
    m(i, 0) = t;
    m(i, 1) = u;
    m(i, 2) = t + u;  // exactly dependent third column
  }
  auto model = sarkit::pca_fit(m, 3);
  CHECK(thrown_kind([&] { sarkit::whiten(m, model); }) == ErrorKind::kDegenerateInput);
  // Dropping the dead direction makes it valid again.
  auto model2 = sarkit::pca_fit(m, 2);
  Matrix z = sarkit::whiten(m, model2);
  CHECK(z.cols() == 2);
}

TEST_CASE("fastica: recovers planted independent sources from a mixture") {
  Rng rng(101);
  const std::size_t t_samples = 4000;
  Matrix sources(t_samples, 3);
  for (std::size_t i = 0; i < t_samples; ++i) {
    sources(i, 0) = rng.uniform(-1.7320508075688772, 1.7320508075688772);
    // Laplace via inverse CDF: sign(u−.5)·ln(1−2|u−.5|)/(−√2).
    double u = rng.uniform() - 0.5;
    sources(i, 1) = (u >= 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::fabs(u)) /
                    1.4142135623730951;
    // Bimodal: ±1 with light jitter.
    sources(i, 2) = (rng.uniform() < 0.5 ? -1.0 : 1.0) + 0.1 * rng.normal();
  }
  // Fixed non-singular mixing matrix.
  Matrix mix(3, 3);
  mix(0, 0) = 0.9;  mix(0, 1) = 0.3;  mix(0, 2) = -0.2;
  mix(1, 0) = -0.4; mix(1, 1) = 1.1;  mix(1, 2) = 0.5;
  mix(2, 0) = 0.2;  mix(2, 1) = -0.6; mix(2, 2) = 0.8;
  Matrix x = sarkit::matmul_a_bt(sources, mix);

  auto pca = sarkit::pca_fit(x, 3);
  Matrix z = sarkit::whiten(x, pca);
  auto ica = sarkit::fastica(z, 3, 1e-5, 500, 7);
  CHECK(ica.iterations >= 1);
  CHECK(ica.iterations <= 500);

  // unmixing · mixing = I.
  Matrix prod = sarkit::matmul(ica.unmixing, ica.mixing);
  CHECK(sarkit::max_abs_diff(prod, Matrix::identity(3)) < 1e-9);

  // Each recovered source must line up with exactly one planted source
  // (up to sign and permutation).
  Matrix recovered = sarkit::matmul_a_bt(z, ica.unmixing);
  std::vector<bool> used(3, false);
  for (std::size_t i = 0; i < 3; ++i) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      double c = std::fabs(column_corr(recovered, i, sources, j));
      if (c > best) {
        best = c;
        arg = j;
      }
    }
    CHECK(best > 0.95);
    CHECK_FALSE(used[arg]);
    used[arg] = true;
  }
}

TEST_CASE("fastica: same seed reproduces, non-white input is rejected") {
  Rng rng(55);
  // All columns non-Gaussian: ICA can separate at most one Gaussian source.
  Matrix x(800, 3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.uniform(-1.0, 1.0);
    x(i, 1) = std::pow(rng.normal(), 3) * 0.4;
    x(i, 2) = (rng.uniform() < 0.5 ? -1.0 : 1.0) + 0.2 * rng.normal();
    x(i, 1) += 0.5 * x(i, 0);  // mild mixing so separation is nontrivial
  }
  auto pca = sarkit::pca_fit(x, 3);
  Matrix z = sarkit::whiten(x, pca);
  auto a = sarkit::fastica(z, 3, 1e-5, 500, 12);
  auto b = sarkit::fastica(z, 3, 1e-5, 500, 12);
  CHECK(sarkit::max_abs_diff(a.unmixing, b.unmixing) == 0.0);

  CHECK(thrown_kind([&] { sarkit::fastica(x, 3); }) == ErrorKind::kContract);
  CHECK(thrown_kind([&] { sarkit::fastica(z, 0); }) == ErrorKind::kArgument);
  CHECK(thrown_kind([&] { sarkit::fastica(z, 4); }) == ErrorKind::kArgument);
}

TEST_CASE("fastica: zero tolerance can never converge") {
  Rng rng(77);
  Matrix x(300, 2);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    x(i, 0) = std::pow(rng.normal(), 3) * 0.5;
    x(i, 1) = rng.uniform(-1.0, 1.0) + 0.3 * x(i, 0);
  }
  auto pca = sarkit::pca_fit(x, 2);
  Matrix z = sarkit::whiten(x, pca);
  CHECK(thrown_kind([&] { sarkit::fastica(z, 2, 0.0, 50, 1); }) ==
        ErrorKind::kConvergence);
}

TEST_CASE("vaf: rank-1 data is fully explained by one component") {
  Rng rng(88);
  Matrix m(40, 3);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double t = rng.normal();
    m(i, 0) = t;
    m(i, 1) = 2.0 * t;
    m(i, 2) = -t;
  }
  auto model = sarkit::pca_fit(m, 3);
  CHECK(sarkit::vaf(m, model, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sarkit::vaf(m, model, 0) == 0.0);
  CHECK(thrown_kind([&] { sarkit::vaf(m, model, 4); }) == ErrorKind::kArgument);
}

TEST_CASE("vaf: monotone in k and bounded in [0,1]") {
  Rng rng(99);
  Matrix m = random_matrix(120, 5, rng);
  auto model = sarkit::pca_fit(m, 5);
  double prev = 0.0;
  for (std::size_t k = 0; k <= 5; ++k) {
    double v = sarkit::vaf(m, model, k);
    CHECK(v >= prev - 1e-12);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(sarkit::vaf(m, model, 5) == doctest::Approx(1.0).epsilon(1e-9));
}

}  // TEST_SUITE
