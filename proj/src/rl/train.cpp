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

#include "sarkit/rl/train.hpp"

#include <cmath>
#include <string>

#include "sarkit/error.hpp"
#include "sarkit/rl/optim.hpp"

namespace sarkit::rl {

namespace {

std::vector<double> uniform_raw_action(std::size_t dim, Rng& rng) {
  std::vector<double> raw(dim);
  for (double& x : raw) x = rng.uniform(-1.0, 1.0);
  return raw;
}

void check_compatible(const envs::Env& env, const PolicyHead& head,
                      const SacAgent& agent) {
  if (head.env_dim() != env.action_dim()) {
    throw_error(ErrorKind::kConfiguration,
                "policy head actuator count does not match the environment");
  }
  if (agent.act_dim() != head.raw_dim()) {
    throw_error(ErrorKind::kConfiguration,
                "agent action dimension does not match the policy head");
  }
  if (agent.obs_dim() != env.observation_dim()) {
    throw_error(ErrorKind::kConfiguration,
                "agent observation dimension does not match the environment");
  }
}

EvalStats summarize(std::vector<EpisodeRecord> episodes) {
  EvalStats stats;
  stats.episodes = std::move(episodes);
  if (stats.episodes.empty()) return stats;
  const double n = static_cast<double>(stats.episodes.size());
  for (const auto& e : stats.episodes) {
    stats.mean_return += e.episode_return;
    stats.success_rate += e.success ? 1.0 : 0.0;
    stats.mean_distance += e.distance;
  }
  stats.mean_return /= n;
  stats.success_rate /= n;
  stats.mean_distance /= n;
  double variance = 0.0;
  for (const auto& e : stats.episodes) {
    const double d = e.episode_return - stats.mean_return;
    variance += d * d;
  }
  stats.return_stddev = std::sqrt(variance / n);
  return stats;
}

// Shared rollout driver for both evaluation modes.
template <typename ActFn>
EvalStats run_episodes(envs::Env& env, const PolicyHead& head,
                       std::size_t episodes, Rng& rng, ActFn&& act) {
  std::vector<EpisodeRecord> records;
  records.reserve(episodes);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = env.reset(rng);
    EpisodeRecord record;
    bool done = false;
    while (!done) {
      const std::vector<double> raw = act(obs);
      const auto result = env.step(head.to_env_action(raw));
      record.episode_return += result.reward;
      record.success = result.success;
      record.distance = result.distance;
      done = result.done;
      obs = result.observation;
    }
    record.end_step = ep;
    records.push_back(record);
  }
  return summarize(std::move(records));
}

}  // namespace

TrainMetrics train_sac(envs::Env& env, const PolicyHead& head, SacAgent& agent,
                       ReplayBuffer& buffer, const TrainOptions& options,
                       Rng& rng) {
  check_compatible(env, head, agent);
  if (buffer.obs_dim() != agent.obs_dim() || buffer.act_dim() != agent.act_dim()) {
    throw_error(ErrorKind::kConfiguration, "replay buffer does not match the agent");
  }

  TrainMetrics metrics;
  const SacConfig& config = agent.config();

  std::vector<double> obs = env.reset(rng);
  EpisodeRecord episode;

  for (std::uint64_t step = 0; step < options.steps; ++step) {
    const std::uint64_t global_step = options.step_offset + step;

    const std::vector<double> raw =
        buffer.size() < config.start_learning && !options.policy_warmup
            ? uniform_raw_action(agent.act_dim(), rng)
            : agent.act_stochastic(obs, rng);
    const auto result = env.step(head.to_env_action(raw));
    if (options.on_raw_action) options.on_raw_action(raw);

    // Time-limit ends still bootstrap; only absorbing ends cut the backup.
    buffer.add(obs, raw, result.reward, result.observation, result.terminal);

    episode.episode_return += result.reward;
    if (result.done) {
      episode.end_step = options.report_offset + global_step + 1;
      episode.success = result.success;
      episode.distance = result.distance;
      metrics.episodes.push_back(episode);
      if (options.on_episode) options.on_episode(episode);
      episode = EpisodeRecord{};
      obs = env.reset(rng);
    } else {
      obs = result.observation;
    }

    if (buffer.size() >= config.start_learning) {
      const double lr = config.linear_schedule
                            ? linear_lr(config.lr0, global_step, config.total_steps)
                            : config.lr0;
      try {
        agent.update(buffer, lr);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kConvergence) {
          // Decorate the diagnostic with where training stood.
          throw_error(ErrorKind::kConvergence,
                      std::string(e.what()) + " at global step " +
                          std::to_string(global_step) + " after " +
                          std::to_string(metrics.updates) + " updates");
        }
        throw;
      }
      ++metrics.updates;
    }
  }
  metrics.steps = options.steps;
  return metrics;
}

EvalStats evaluate_policy(envs::Env& env, const PolicyHead& head,
                          const SacAgent& agent, std::size_t episodes, Rng& rng) {
  check_compatible(env, head, agent);
  return run_episodes(env, head, episodes, rng, [&](const std::vector<double>& obs) {
    return agent.act_deterministic(obs);
  });
}

EvalStats evaluate_random(envs::Env& env, const PolicyHead& head,
                          std::size_t episodes, Rng& rng) {
  if (head.env_dim() != env.action_dim()) {
    throw_error(ErrorKind::kConfiguration,
                "policy head actuator count does not match the environment");
  }
  return run_episodes(env, head, episodes, rng, [&](const std::vector<double>&) {
    return uniform_raw_action(head.raw_dim(), rng);
  });
}

}  // namespace sarkit::rl
