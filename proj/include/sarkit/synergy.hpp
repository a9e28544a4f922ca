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

#ifndef SARKIT_SYNERGY_HPP_
#define SARKIT_SYNERGY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sarkit/matrix.hpp"

namespace sarkit {

// Record of actuator activity gathered while a policy interacts with an
// environment: one row per timestep, one column per actuator, entries in
// [0, 1]. Fitting requires at least 10 rows per column.
struct ActivationLog {
  Matrix samples;

  std::size_t timesteps() const { return samples.rows(); }
  std::size_t actuator_dim() const { return samples.cols(); }
};

// Raises kContract if entries leave [0,1] or the sample count is below
// 10× the actuator dimension; kArgument on an empty or non-finite log.
void validate_for_fitting(const ActivationLog& log);

void save_activation_log(const std::string& path, const ActivationLog& log);
ActivationLog load_activation_log(const std::string& path);

// A linear map from a low-dimensional coordination space to the full
// actuator space, extracted from logged activity. Columns of decode_matrix
// are the coordination patterns, ordered by decreasing share of the data
// variance they carry, each rescaled so its largest-magnitude entry is ±1.
struct SynergyRepresentation {
  std::size_t actuator_dim = 0;
  std::size_t n_syn = 0;
  Matrix decode_matrix;                    // actuator_dim × n_syn
  std::vector<double> column_scale;        // per column, pre-normalization max-abs
  std::vector<double> mean;                // actuator-space mean of the source log
  std::vector<double> component_variance;  // per column, descending
  std::uint64_t seed = 0;                  // seed used during extraction
  std::string config_hash;                 // provenance tag, empty for API fits
};

// Checks every structural invariant of a representation (shapes, finiteness,
// per-column max-abs normalization within 1e-9). Raises kContract.
void validate(const SynergyRepresentation& sar);

// Default coordination-space size used by the toy environments.
inline std::size_t default_n_syn(std::size_t actuator_dim) {
  return (actuator_dim + 1) / 2;
}

// Extracts a representation from logged activity: center, keep the top
// n_syn principal directions, normalize their variance, then rotate to
// statistically independent coordinates. Deterministic per seed.
SynergyRepresentation fit_sar(const ActivationLog& log, std::size_t n_syn,
                              std::uint64_t seed);

// Maps coordination-space coordinates (each in [-1, 1]) to a full actuator
// command, clamped to [-1, 1]. The stored mean is provenance only; it does
// not shift the output.
std::vector<double> decode(const SynergyRepresentation& sar,
                           const std::vector<double>& syn_action);

// Convex combination a = weight·primary + (1-weight)·secondary, elementwise.
// weight must lie in [0, 1]; the endpoints return the inputs bit-for-bit.
std::vector<double> blend(const std::vector<double>& primary,
                          const std::vector<double>& secondary, double weight);

// Elementwise squash from policy range to muscle excitation (0, 1):
// 1 / (1 + exp(-5 (a - 0.5))).
double muscle_squash(double a);
std::vector<double> muscle_squash(const std::vector<double>& a);

enum class SynergySubset { kMostInformative, kLeastInformative };

// Keeps the k highest- or lowest-variance columns (they are stored in
// descending order), preserving their relative order and all per-column
// metadata. k must lie in [1, n_syn].
SynergyRepresentation select_synergies(const SynergyRepresentation& sar,
                                       std::size_t k, SynergySubset subset);

// Control representation: seeded standard-normal columns, max-abs
// normalized, zero mean vector. Matches the real representation in shape
// and scaling but encodes no structure from data.
SynergyRepresentation random_representation(std::size_t actuator_dim,
                                            std::size_t n_syn, std::uint64_t seed);

// Per-synergy share of mean absolute command over a rollout of
// coordination-space actions (rows = timesteps). Shares sum to 1; an
// all-zero log yields the uniform distribution.
std::vector<double> synergy_contributions(const Matrix& syn_actions);

// JSON form used by the standalone files and by embedded copies inside
// checkpoints; `context` labels error messages (usually a path).
nlohmann::json sar_to_json(const SynergyRepresentation& sar);
SynergyRepresentation sar_from_json(const nlohmann::json& j,
                                    const std::string& context);

void save_sar(const std::string& path, const SynergyRepresentation& sar);
SynergyRepresentation load_sar(const std::string& path);

}  // namespace sarkit

#endif  // SARKIT_SYNERGY_HPP_
