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

#ifndef SARKIT_HARNESS_COMMANDS_HPP_
#define SARKIT_HARNESS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sarkit/harness/pipeline.hpp"

namespace sarkit::harness {

// Fixed layout of one results directory. Every artifact name is derived
// from (kind, condition, seed) so reruns land on the same files.
struct ArtifactPaths {
  std::filesystem::path root;

  explicit ArtifactPaths(const std::string& root_dir) : root(root_dir) {}

  void ensure() const;  // creates root and its subdirectories

  std::string manifest() const { return (root / "manifest.json").string(); }
  std::string metrics_dir() const { return (root / "metrics").string(); }
  std::string plots_dir() const { return (root / "plots").string(); }

  std::string play_checkpoint(std::uint64_t seed) const;
  std::string play_log(std::uint64_t seed) const;
  std::string play_metrics(std::uint64_t seed) const;
  std::string sar_file(std::uint64_t seed) const;
  std::string condition_checkpoint(const std::string& condition,
                                   std::uint64_t seed) const;
  std::string condition_metrics(const std::string& condition,
                                std::uint64_t seed) const;
  std::string contributions(const std::string& condition, std::uint64_t seed) const;
  std::string zero_shot(const std::string& condition, std::uint64_t seed) const;
  std::string ablation_table(const std::string& kind, std::uint64_t seed) const;
};

// A trained policy with everything needed to act: the agent and the head
// that maps its raw actions into actuator space.
struct Checkpoint {
  rl::SacAgent agent;
  rl::PolicyHead head;
  std::string hash;
  std::uint64_t seed = 0;
  std::string condition;
};

void save_checkpoint(const std::string& path, const rl::SacAgent& agent,
                     const rl::PolicyHead& head, const std::string& hash,
                     std::uint64_t seed, const std::string& condition);
Checkpoint load_checkpoint(const std::string& path);

// Runs independent jobs on at most `workers` threads; each job must write
// to its own files. The first failure (in job order) is rethrown after all
// workers drain.
void run_parallel(std::vector<std::function<void()>> jobs, std::size_t workers);

// Subcommand bodies, shared between the command-line tool and the test
// drivers. Each writes its artifacts under `paths` and refreshes the
// manifest.
void cmd_play(const ExperimentConfig& config, const ArtifactPaths& paths);
void cmd_fit(const ExperimentConfig& config, const ArtifactPaths& paths);
void cmd_train(const ExperimentConfig& config,
               const std::vector<Condition>& conditions, const ArtifactPaths& paths);
void cmd_eval(const ExperimentConfig& config,
              const std::vector<Condition>& conditions, const ArtifactPaths& paths);
void cmd_transfer(const ExperimentConfig& config,
                  const std::vector<std::string>& terrains,
                  const ArtifactPaths& paths);
void cmd_ablate(const ExperimentConfig& config, AblationKind kind,
                const ArtifactPaths& paths);
void cmd_export(const std::string& metrics_dir, const ArtifactPaths& paths);

// Single-file fit used by the command line's --log mode.
SynergyRepresentation fit_from_log_file(const std::string& log_path,
                                        std::size_t n_syn, std::uint64_t seed);

// Rewrites manifest.json: config echo + hash, seeds, wall time, and the
// sorted list of files currently under the results root.
void write_manifest(const ArtifactPaths& paths, const ExperimentConfig& config,
                    double wall_seconds);

}  // namespace sarkit::harness

#endif  // SARKIT_HARNESS_COMMANDS_HPP_
