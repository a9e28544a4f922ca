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

#include "sarkit/harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "sarkit/envs/factory.hpp"
#include "sarkit/error.hpp"
#include "sarkit/json_io.hpp"

namespace sarkit::harness {

namespace fs = std::filesystem;

namespace {

std::string seed_file(const std::string& stem, std::uint64_t seed,
                      const std::string& extension) {
  return stem + "_seed" + std::to_string(seed) + extension;
}

void require_file(const std::string& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw_error(ErrorKind::kConfiguration,
                "missing required artifact: " + path + " (" + hint + ")");
  }
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64(buffer.str());
}

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

void ArtifactPaths::ensure() const {
  for (const char* sub : {"", "metrics", "plots", "checkpoints", "sar", "logs"}) {
    fs::create_directories(root / sub);
  }
}

std::string ArtifactPaths::play_checkpoint(std::uint64_t seed) const {
  return (root / "checkpoints" / seed_file("play", seed, ".json")).string();
}

std::string ArtifactPaths::play_log(std::uint64_t seed) const {
  return (root / "logs" / seed_file("play", seed, ".csv")).string();
}

std::string ArtifactPaths::play_metrics(std::uint64_t seed) const {
  return (root / "metrics" / seed_file("play", seed, ".csv")).string();
}

std::string ArtifactPaths::sar_file(std::uint64_t seed) const {
  return (root / "sar" / seed_file("sar", seed, ".json")).string();
}

std::string ArtifactPaths::condition_checkpoint(const std::string& condition,
                                                std::uint64_t seed) const {
  return (root / "checkpoints" / seed_file(condition, seed, ".json")).string();
}

std::string ArtifactPaths::condition_metrics(const std::string& condition,
                                             std::uint64_t seed) const {
  return (root / "metrics" / seed_file(condition, seed, ".csv")).string();
}

std::string ArtifactPaths::contributions(const std::string& condition,
                                         std::uint64_t seed) const {
  return (root / "metrics" / seed_file("contrib_" + condition, seed, ".csv")).string();
}

std::string ArtifactPaths::zero_shot(const std::string& condition,
                                     std::uint64_t seed) const {
  return (root / "metrics" / seed_file("zero_shot_" + condition, seed, ".csv")).string();
}

std::string ArtifactPaths::ablation_table(const std::string& kind,
                                          std::uint64_t seed) const {
  return (root / "metrics" / seed_file("ablate_" + kind, seed, ".csv")).string();
}

void save_checkpoint(const std::string& path, const rl::SacAgent& agent,
                     const rl::PolicyHead& head, const std::string& hash,
                     std::uint64_t seed, const std::string& condition) {
  nlohmann::json j;
  j["format"] = "policy-checkpoint";
  j["version"] = 1;
  j["config"] = hash;
  j["seed"] = seed;
  j["condition"] = condition;
  j["agent"] = agent.to_json();
  j["head"] = head.to_json();
  save_json_file(path, j);
}

Checkpoint load_checkpoint(const std::string& path) {
  const nlohmann::json j = load_json_file(path);
  try {
    if (j.at("format").get<std::string>() != "policy-checkpoint") {
      throw_error(ErrorKind::kIo, "not a policy checkpoint: " + path);
    }
    return Checkpoint{rl::SacAgent::from_json(j.at("agent")),
                      rl::PolicyHead::from_json(j.at("head")),
                      j.at("config").get<std::string>(),
                      j.at("seed").get<std::uint64_t>(),
                      j.at("condition").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::kIo,
                "malformed checkpoint " + path + " (" + std::string(e.what()) + ")");
  }
}

void run_parallel(std::vector<std::function<void()>> jobs, std::size_t workers) {
  const std::size_t n = jobs.size();
  if (n == 0) return;
  const std::size_t pool_size = std::min(workers == 0 ? 1 : workers, n);
  if (pool_size <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(pool_size);
  for (std::size_t w = 0; w < pool_size; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& thread : pool) thread.join();
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

void cmd_play(const ExperimentConfig& config, const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;
  const std::string hash = config_hash(experiment_to_json(config));

  std::vector<std::function<void()>> jobs;
  for (const std::uint64_t seed : config.seeds) {
    jobs.push_back([&, seed] {
      auto result = run_play_phase(config, seed);
      save_checkpoint(paths.play_checkpoint(seed), result.agent,
                      rl::PolicyHead::plain(result.agent.act_dim()), hash, seed,
                      "play");
      save_activation_log(paths.play_log(seed), result.log);
      save_metrics_csv(paths.play_metrics(seed), result.metrics);
    });
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

SynergyRepresentation fit_from_log_file(const std::string& log_path,
                                        std::size_t n_syn, std::uint64_t seed) {
  require_file(log_path, "record one with the play command first");
  const ActivationLog log = load_activation_log(log_path);
  const std::size_t n = n_syn > 0 ? n_syn : default_n_syn(log.actuator_dim());
  return fit_sar(log, n, seed);
}

void cmd_fit(const ExperimentConfig& config, const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;
  const std::string hash = config_hash(experiment_to_json(config));

  for (const std::uint64_t seed : config.seeds) {
    require_file(paths.play_log(seed), "run the play command first");
  }
  std::vector<std::function<void()>> jobs;
  for (const std::uint64_t seed : config.seeds) {
    jobs.push_back([&, seed] {
      SynergyRepresentation sar =
          fit_from_log_file(paths.play_log(seed), config.n_syn, seed);
      sar.config_hash = hash;
      save_sar(paths.sar_file(seed), sar);
    });
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

void cmd_train(const ExperimentConfig& config,
               const std::vector<Condition>& conditions,
               const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;
  const std::string hash = config_hash(experiment_to_json(config));

  // Check every prerequisite up front so the first missing file is named
  // before any compute is spent.
  for (const Condition condition : conditions) {
    for (const std::uint64_t seed : config.seeds) {
      if (condition == Condition::kSarRl) {
        require_file(paths.sar_file(seed), "run the fit-sar command first");
      } else if (condition == Condition::kRlCurriculum) {
        require_file(paths.play_checkpoint(seed), "run the play command first");
      }
    }
  }

  std::vector<std::function<void()>> jobs;
  for (const Condition condition : conditions) {
    for (const std::uint64_t seed : config.seeds) {
      jobs.push_back([&, condition, seed] {
        ConditionInputs inputs;
        SynergyRepresentation sar;
        std::optional<Checkpoint> play;
        if (condition == Condition::kSarRl) {
          sar = load_sar(paths.sar_file(seed));
          inputs.sar = &sar;
        } else if (condition == Condition::kRlCurriculum) {
          play.emplace(load_checkpoint(paths.play_checkpoint(seed)));
          inputs.play_agent = &play->agent;
        }
        auto result = run_condition(config, condition, seed, inputs);
        const std::string name = condition_name(condition);
        save_metrics_csv(paths.condition_metrics(name, seed), result.metrics);
        if (result.metrics.contributions.rows() > 0) {
          save_contributions_csv(paths.contributions(name, seed), result.metrics);
        }
        save_checkpoint(paths.condition_checkpoint(name, seed), result.agent,
                        result.head, hash, seed, name);
      });
    }
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

void cmd_eval(const ExperimentConfig& config,
              const std::vector<Condition>& conditions,
              const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;
  const std::string hash = config_hash(experiment_to_json(config));

  for (const Condition condition : conditions) {
    for (const std::uint64_t seed : config.seeds) {
      require_file(paths.condition_checkpoint(condition_name(condition), seed),
                   "run the train command first");
    }
  }
  std::vector<std::function<void()>> jobs;
  for (const Condition condition : conditions) {
    for (const std::uint64_t seed : config.seeds) {
      jobs.push_back([&, condition, seed] {
        const std::string name = condition_name(condition);
        const std::string checkpoint_path = paths.condition_checkpoint(name, seed);
        const std::uint64_t before = file_hash(checkpoint_path);
        const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
        const auto rows = run_zero_shot(config, checkpoint.head, checkpoint.agent, seed);
        save_zero_shot_csv(paths.zero_shot(name, seed), rows, hash, seed, name);
        if (file_hash(checkpoint_path) != before) {
          throw_error(ErrorKind::kContract,
                      "evaluation must not modify " + checkpoint_path);
        }
      });
    }
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

void cmd_transfer(const ExperimentConfig& config,
                  const std::vector<std::string>& terrains,
                  const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;

  for (const std::uint64_t seed : config.seeds) {
    require_file(paths.sar_file(seed), "run the fit-sar command first");
  }
  std::vector<std::function<void()>> jobs;
  for (const std::uint64_t seed : config.seeds) {
    jobs.push_back([&, seed] {
      const std::string sar_path = paths.sar_file(seed);
      const std::uint64_t before = file_hash(sar_path);
      const SynergyRepresentation sar = load_sar(sar_path);
      const auto outcomes = run_transfer(config, sar, terrains, seed);
      for (const auto& outcome : outcomes) {
        save_metrics_csv(paths.condition_metrics(outcome.metrics.condition, seed),
                         outcome.metrics);
        if (outcome.metrics.contributions.rows() > 0) {
          save_contributions_csv(
              paths.contributions(outcome.metrics.condition, seed),
              outcome.metrics);
        }
      }
      if (file_hash(sar_path) != before) {
        throw_error(ErrorKind::kContract,
                    "transfer must not modify " + sar_path);
      }
    });
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

void cmd_ablate(const ExperimentConfig& config, AblationKind kind,
                const ArtifactPaths& paths) {
  config.validate();
  paths.ensure();
  const WallClock clock;
  const std::string hash = config_hash(experiment_to_json(config));

  for (const std::uint64_t seed : config.seeds) {
    if (kind == AblationKind::kPostHocBlend) {
      require_file(paths.condition_checkpoint("sar-rl", seed),
                   "train the sar-rl condition first");
    } else {
      require_file(paths.sar_file(seed), "run the fit-sar command first");
    }
  }
  std::vector<std::function<void()>> jobs;
  for (const std::uint64_t seed : config.seeds) {
    jobs.push_back([&, seed] {
      AblationInputs inputs;
      SynergyRepresentation sar;
      std::optional<Checkpoint> checkpoint;
      if (kind == AblationKind::kPostHocBlend) {
        checkpoint.emplace(load_checkpoint(paths.condition_checkpoint("sar-rl", seed)));
        inputs.agent = &checkpoint->agent;
        inputs.head = &checkpoint->head;
      } else {
        sar = load_sar(paths.sar_file(seed));
        inputs.sar = &sar;
      }
      const auto rows = ablate(kind, config, seed, inputs);
      save_ablation_csv(paths.ablation_table(ablation_kind_name(kind), seed),
                        kind, rows, hash);
    });
  }
  run_parallel(std::move(jobs), config.workers);
  write_manifest(paths, config, clock.seconds());
}

void write_manifest(const ArtifactPaths& paths, const ExperimentConfig& config,
                    double wall_seconds) {
  const nlohmann::json echo = experiment_to_json(config);
  nlohmann::json j;
  j["format"] = "experiment-manifest";
  j["version"] = 1;
  j["name"] = config.name;
  j["config_hash"] = config_hash(echo);
  j["config"] = echo;
  j["seeds"] = config.seeds;
  j["wall_time_seconds"] = wall_seconds;

  std::vector<std::string> artifacts;
  for (const auto& entry : fs::recursive_directory_iterator(paths.root)) {
    if (!entry.is_regular_file()) continue;
    const std::string relative =
        fs::relative(entry.path(), paths.root).generic_string();
    if (relative == "manifest.json") continue;
    artifacts.push_back(relative);
  }
  std::sort(artifacts.begin(), artifacts.end());
  j["artifacts"] = artifacts;
  save_json_file(paths.manifest(), j);
}

}  // namespace sarkit::harness
