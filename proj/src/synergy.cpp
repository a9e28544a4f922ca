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

#include "sarkit/synergy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sarkit/factorization.hpp"
#include "sarkit/json_io.hpp"
#include "sarkit/rng.hpp"

namespace sarkit {

void validate_for_fitting(const ActivationLog& log) {
  if (log.samples.empty()) {
    throw_error(ErrorKind::kArgument, "activation log is empty");
  }
  if (!all_finite(log.samples)) {
    throw_error(ErrorKind::kArgument, "activation log has non-finite entries");
  }
  for (double v : log.samples.data()) {
    if (v < 0.0 || v > 1.0) {
      throw_error(ErrorKind::kContract,
                  "activation log entry " + format_double(v) + " outside [0,1]");
    }
  }
  if (log.timesteps() < 10 * log.actuator_dim()) {
    throw_error(ErrorKind::kContract,
                "activation log has " + std::to_string(log.timesteps()) +
                    " samples; fitting needs at least 10 per actuator (" +
                    std::to_string(10 * log.actuator_dim()) + ")");
  }
}

void save_activation_log(const std::string& path, const ActivationLog& log) {
  std::vector<std::string> header;
  header.reserve(log.actuator_dim());
  for (std::size_t j = 0; j < log.actuator_dim(); ++j)
    header.push_back("act_" + std::to_string(j));
  save_matrix_csv(path, log.samples, header);
}

ActivationLog load_activation_log(const std::string& path) {
  return ActivationLog{load_matrix_csv(path)};
}

void validate(const SynergyRepresentation& sar) {
  if (sar.actuator_dim == 0 || sar.n_syn == 0 || sar.n_syn > sar.actuator_dim) {
    throw_error(ErrorKind::kContract,
                "representation dimensions invalid (actuators=" +
                    std::to_string(sar.actuator_dim) +
                    ", synergies=" + std::to_string(sar.n_syn) + ")");
  }
  if (sar.decode_matrix.rows() != sar.actuator_dim ||
      sar.decode_matrix.cols() != sar.n_syn) {
    throw_error(ErrorKind::kContract, "decode matrix shape mismatch");
  }
  if (sar.column_scale.size() != sar.n_syn ||
      sar.component_variance.size() != sar.n_syn ||
      sar.mean.size() != sar.actuator_dim) {
    throw_error(ErrorKind::kContract, "representation metadata length mismatch");
  }
  if (!all_finite(sar.decode_matrix)) {
    throw_error(ErrorKind::kContract, "decode matrix has non-finite entries");
  }
  for (double v : sar.mean)
    if (!std::isfinite(v)) throw_error(ErrorKind::kContract, "mean has non-finite entries");
  for (std::size_t j = 0; j < sar.n_syn; ++j) {
    if (!(sar.column_scale[j] > 0.0) || !std::isfinite(sar.column_scale[j])) {
      throw_error(ErrorKind::kContract,
                  "column scale " + std::to_string(j) + " must be positive");
    }
    double col_max = 0.0;
    for (std::size_t i = 0; i < sar.actuator_dim; ++i)
      col_max = std::max(col_max, std::fabs(sar.decode_matrix(i, j)));
    if (std::fabs(col_max - 1.0) > 1e-9) {
      throw_error(ErrorKind::kContract,
                  "decode column " + std::to_string(j) +
                      " is not max-abs normalized (max " + format_double(col_max) + ")");
    }
  }
}

SynergyRepresentation fit_sar(const ActivationLog& log, std::size_t n_syn,
                              std::uint64_t seed) {
  validate_for_fitting(log);
  const std::size_t dim = log.actuator_dim();
  if (n_syn == 0 || n_syn > dim) {
    throw_error(ErrorKind::kArgument,
                "n_syn " + std::to_string(n_syn) + " outside [1, " +
                    std::to_string(dim) + "]");
  }

  PcaModel pca = pca_fit(log.samples, n_syn);
  if (pca.explained_variance[n_syn - 1] < 1e-12) {
    throw_error(ErrorKind::kDegenerateInput,
                "log rank is below n_syn; direction " + std::to_string(n_syn - 1) +
                    " carries no variance");
  }
  Matrix z = whiten(log.samples, pca);

  // Symmetric FastICA can orbit indefinitely from an unlucky start, so retry
  // from fresh deterministic starting points before giving up. The first
  // attempt uses the caller's seed unchanged, keeping previously converging
  // fits bit-identical.
  IcaModel ica;
  constexpr int kIcaAttempts = 5;
  for (int attempt = 0;; ++attempt) {
    try {
      ica = fastica(z, n_syn, 1e-5, 500,
                    seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt));
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kConvergence || attempt + 1 == kIcaAttempts) throw;
    }
  }

  // Compose the decode map from independent coordinates back to actuator
  // space: componentsᵀ · diag(sqrt(variance)) · mixing.
  Matrix scaled_mixing = ica.mixing;
  for (std::size_t i = 0; i < n_syn; ++i) {
    const double s = std::sqrt(pca.explained_variance[i]);
    for (std::size_t j = 0; j < n_syn; ++j) scaled_mixing(i, j) *= s;
  }
  Matrix decode_raw = matmul_at_b(pca.components, scaled_mixing);  // dim × n_syn

  // Unit-variance sources mean each column's squared norm is exactly the
  // variance that synergy contributes; order columns by it, descending.
  std::vector<double> col_var(n_syn, 0.0);
  for (std::size_t j = 0; j < n_syn; ++j)
    for (std::size_t i = 0; i < dim; ++i)
      col_var[j] += decode_raw(i, j) * decode_raw(i, j);
  std::vector<std::size_t> order(n_syn);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return col_var[a] > col_var[b]; });

  SynergyRepresentation sar;
  sar.actuator_dim = dim;
  sar.n_syn = n_syn;
  sar.decode_matrix = Matrix(dim, n_syn);
  sar.column_scale.resize(n_syn);
  sar.component_variance.resize(n_syn);
  sar.mean = pca.mean;
  sar.seed = seed;
  for (std::size_t jj = 0; jj < n_syn; ++jj) {
    const std::size_t src = order[jj];
    double scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      scale = std::max(scale, std::fabs(decode_raw(i, src)));
    if (scale < 1e-300) {
      throw_error(ErrorKind::kDegenerateInput,
                  "synergy column " + std::to_string(jj) + " is identically zero");
    }
    for (std::size_t i = 0; i < dim; ++i)
      sar.decode_matrix(i, jj) = decode_raw(i, src) / scale;
    sar.column_scale[jj] = scale;
    sar.component_variance[jj] = col_var[src];
  }
  validate(sar);
  return sar;
}

std::vector<double> decode(const SynergyRepresentation& sar,
                           const std::vector<double>& syn_action) {
  if (syn_action.size() != sar.n_syn) {
    throw_error(ErrorKind::kArgument,
                "synergy action length " + std::to_string(syn_action.size()) +
                    " does not match n_syn " + std::to_string(sar.n_syn));
  }
  for (double v : syn_action) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw_error(ErrorKind::kArgument,
                  "synergy action component " + format_double(v) + " outside [-1,1]");
    }
  }
  std::vector<double> out = matvec(sar.decode_matrix, syn_action);
  for (double& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

std::vector<double> blend(const std::vector<double>& primary,
                          const std::vector<double>& secondary, double weight) {
  if (primary.size() != secondary.size()) {
    throw_error(ErrorKind::kArgument, "blend inputs have different lengths");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw_error(ErrorKind::kArgument,
                "blend weight " + format_double(weight) + " outside [0,1]");
  }
  // The endpoints must be exact, not merely within roundoff.
  if (weight == 1.0) return primary;
  if (weight == 0.0) return secondary;
  std::vector<double> out(primary.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = weight * primary[i] + (1.0 - weight) * secondary[i];
  return out;
}

double muscle_squash(double a) { return 1.0 / (1.0 + std::exp(-5.0 * (a - 0.5))); }

std::vector<double> muscle_squash(const std::vector<double>& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = muscle_squash(a[i]);
  return out;
}

SynergyRepresentation select_synergies(const SynergyRepresentation& sar,
                                       std::size_t k, SynergySubset subset) {
  validate(sar);
  if (k == 0 || k > sar.n_syn) {
    throw_error(ErrorKind::kArgument,
                "subset size " + std::to_string(k) + " outside [1, " +
                    std::to_string(sar.n_syn) + "]");
  }
  const std::size_t start = subset == SynergySubset::kMostInformative ? 0 : sar.n_syn - k;
  SynergyRepresentation out;
  out.actuator_dim = sar.actuator_dim;
  out.n_syn = k;
  out.decode_matrix = Matrix(sar.actuator_dim, k);
  out.column_scale.resize(k);
  out.component_variance.resize(k);
  out.mean = sar.mean;
  out.seed = sar.seed;
  out.config_hash = sar.config_hash;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < sar.actuator_dim; ++i)
      out.decode_matrix(i, j) = sar.decode_matrix(i, start + j);
    out.column_scale[j] = sar.column_scale[start + j];
    out.component_variance[j] = sar.component_variance[start + j];
  }
  return out;
}

SynergyRepresentation random_representation(std::size_t actuator_dim,
                                            std::size_t n_syn, std::uint64_t seed) {
  if (actuator_dim == 0 || n_syn == 0 || n_syn > actuator_dim) {
    throw_error(ErrorKind::kArgument,
                "random representation dimensions invalid (actuators=" +
                    std::to_string(actuator_dim) +
                    ", synergies=" + std::to_string(n_syn) + ")");
  }
  Rng rng(seed);
  SynergyRepresentation sar;
  sar.actuator_dim = actuator_dim;
  sar.n_syn = n_syn;
  sar.decode_matrix = Matrix(actuator_dim, n_syn);
  sar.column_scale.resize(n_syn);
  sar.component_variance.resize(n_syn);
  sar.mean.assign(actuator_dim, 0.0);
  sar.seed = seed;
  for (std::size_t j = 0; j < n_syn; ++j) {
    std::vector<double> col(actuator_dim);
    double scale = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < actuator_dim; ++i) {
      col[i] = rng.normal();
      scale = std::max(scale, std::fabs(col[i]));
      sq += col[i] * col[i];
    }
    for (std::size_t i = 0; i < actuator_dim; ++i)
      sar.decode_matrix(i, j) = col[i] / scale;
    sar.column_scale[j] = scale;
    sar.component_variance[j] = sq;
  }
  validate(sar);
  return sar;
}

std::vector<double> synergy_contributions(const Matrix& syn_actions) {
  if (syn_actions.empty()) {
    throw_error(ErrorKind::kArgument, "synergy action log is empty");
  }
  if (!all_finite(syn_actions)) {
    throw_error(ErrorKind::kArgument, "synergy action log has non-finite entries");
  }
  const std::size_t n = syn_actions.cols();
  std::vector<double> share(n, 0.0);
  for (std::size_t i = 0; i < syn_actions.rows(); ++i) {
    const double* row = syn_actions.row_ptr(i);
    for (std::size_t j = 0; j < n; ++j) share[j] += std::fabs(row[j]);
  }
  double total = std::accumulate(share.begin(), share.end(), 0.0);
  if (total < 1e-300) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  for (double& v : share) v /= total;
  return share;
}

nlohmann::json sar_to_json(const SynergyRepresentation& sar) {
  validate(sar);
  nlohmann::json j;
  j["format"] = "sar-representation";
  j["version"] = 1;
  j["actuator_dim"] = sar.actuator_dim;
  j["n_syn"] = sar.n_syn;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < sar.actuator_dim; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < sar.n_syn; ++c) row.push_back(sar.decode_matrix(i, c));
    rows.push_back(std::move(row));
  }
  j["decode_matrix"] = std::move(rows);
  j["column_scale"] = sar.column_scale;
  j["mean"] = sar.mean;
  j["component_variance"] = sar.component_variance;
  j["provenance"] = {{"seed", sar.seed}, {"config_hash", sar.config_hash}};
  return j;
}

SynergyRepresentation sar_from_json(const nlohmann::json& j,
                                    const std::string& context) {
  SynergyRepresentation sar;
  try {
    if (j.at("format").get<std::string>() != "sar-representation") {
      throw_error(ErrorKind::kIo, context + ": not a representation file");
    }
    sar.actuator_dim = j.at("actuator_dim").get<std::size_t>();
    sar.n_syn = j.at("n_syn").get<std::size_t>();
    const auto& rows = j.at("decode_matrix");
    sar.decode_matrix = Matrix(sar.actuator_dim, sar.n_syn);
    if (rows.size() != sar.actuator_dim) {
      throw_error(ErrorKind::kContract, context + ": decode matrix row count mismatch");
    }
    for (std::size_t i = 0; i < sar.actuator_dim; ++i) {
      if (rows[i].size() != sar.n_syn) {
        throw_error(ErrorKind::kContract,
                    context + ": decode matrix column count mismatch");
      }
      for (std::size_t c = 0; c < sar.n_syn; ++c)
        sar.decode_matrix(i, c) = rows[i][c].get<double>();
    }
    sar.column_scale = j.at("column_scale").get<std::vector<double>>();
    sar.mean = j.at("mean").get<std::vector<double>>();
    sar.component_variance = j.at("component_variance").get<std::vector<double>>();
    if (j.contains("provenance")) {
      sar.seed = j["provenance"].value("seed", std::uint64_t{0});
      sar.config_hash = j["provenance"].value("config_hash", std::string{});
    }
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::kIo, context + ": malformed representation file (" +
                                    std::string(e.what()) + ")");
  }
  validate(sar);
  return sar;
}

void save_sar(const std::string& path, const SynergyRepresentation& sar) {
  save_json_file(path, sar_to_json(sar));
}

SynergyRepresentation load_sar(const std::string& path) {
  return sar_from_json(load_json_file(path), path);
}

}  // namespace sarkit
