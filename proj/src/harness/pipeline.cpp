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

#include "sarkit/harness/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "sarkit/envs/factory.hpp"
#include "sarkit/error.hpp"
#include "sarkit/rl/train.hpp"

namespace sarkit::harness {

namespace {

// Seed discipline: every policy gets its own split-mixed seed and every
// rollout loop its own fork stream, so no two components ever share a
// generator within one (experiment, seed) cell.
std::uint64_t agent_seed(std::uint64_t seed, std::uint64_t role) {
  return Rng::split_mix64(seed + role);
}
constexpr std::uint64_t kPlayRole = 0x11;
constexpr std::uint64_t kSarRole = 0x22;
constexpr std::uint64_t kEndToEndRole = 0x33;
constexpr std::uint64_t kTransferSarRole = 0x40;   // + terrain index
constexpr std::uint64_t kTransferE2eRole = 0x60;   // + terrain index
constexpr std::uint64_t kAblationRole = 0x80;      // + variant index

std::vector<EpisodeRow> to_rows(const std::vector<rl::EpisodeRecord>& episodes) {
  std::vector<EpisodeRow> rows;
  rows.reserve(episodes.size());
  for (const auto& e : episodes) {
    rows.push_back({e.end_step, e.episode_return, e.success, e.distance});
  }
  return rows;
}

std::string experiment_hash(const ExperimentConfig& config) {
  return config_hash(experiment_to_json(config));
}

// Accumulates per-episode synergy-coordinate activity and reduces each
// episode to its contribution shares.
class ContributionTracker {
 public:
  explicit ContributionTracker(std::size_t n_syn) : n_syn_(n_syn) {}

  void on_raw_action(const std::vector<double>& raw) {
    current_.emplace_back(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(n_syn_));
  }

  void on_episode() {
    Matrix episode(current_.size(), n_syn_);
    for (std::size_t r = 0; r < current_.size(); ++r) {
      for (std::size_t c = 0; c < n_syn_; ++c) episode(r, c) = current_[r][c];
    }
    shares_.push_back(synergy_contributions(episode));
    current_.clear();
  }

  Matrix table() const {
    Matrix out(shares_.size(), n_syn_);
    for (std::size_t r = 0; r < shares_.size(); ++r) {
      for (std::size_t c = 0; c < n_syn_; ++c) out(r, c) = shares_[r][c];
    }
    return out;
  }

 private:
  std::size_t n_syn_;
  std::vector<std::vector<double>> current_;
  std::vector<std::vector<double>> shares_;
};

// Shared trainer for one fresh or resumed policy on one environment.
RunMetrics train_run(envs::Env& env, const rl::PolicyHead& head,
                     rl::SacAgent& agent, const std::string& condition,
                     std::uint64_t seed, const std::string& hash,
                     std::uint64_t steps, std::uint64_t step_offset,
                     std::uint64_t report_offset, bool policy_warmup, Rng& rng) {
  rl::ReplayBuffer buffer(agent.config().replay_capacity, agent.obs_dim(),
                          agent.act_dim());
  rl::TrainOptions options;
  options.steps = steps;
  options.step_offset = step_offset;
  options.report_offset = report_offset;
  options.policy_warmup = policy_warmup;

  ContributionTracker tracker(head.has_sar() ? head.sar().n_syn : 0);
  const bool track = head.mode() == rl::PolicyMode::kBlended ||
                     head.mode() == rl::PolicyMode::kPureSar;
  if (track) {
    options.on_raw_action = [&tracker](const std::vector<double>& raw) {
      tracker.on_raw_action(raw);
    };
    options.on_episode = [&tracker](const rl::EpisodeRecord&) { tracker.on_episode(); };
  }

  const auto train_metrics = rl::train_sac(env, head, agent, buffer, options, rng);

  RunMetrics metrics;
  metrics.condition = condition;
  metrics.seed = seed;
  metrics.hash = hash;
  metrics.records = to_rows(train_metrics.episodes);
  if (track) metrics.contributions = tracker.table();
  return metrics;
}

std::vector<EpisodeRow> eval_rows(const rl::EvalStats& stats) {
  return to_rows(stats.episodes);
}

}  // namespace

PlayResult run_play_phase(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const std::string hash = experiment_hash(config);
  auto env = envs::make_env(config.play_env);

  const auto head = rl::PolicyHead::plain(env->action_dim());
  rl::SacConfig sac = config.sac;
  // The play policy sits at the start of the curriculum arm's schedule, so
  // its learning-rate line spans the combined budget.
  sac.total_steps = config.total_steps();
  rl::SacAgent agent(env->observation_dim(), env->action_dim(), sac,
                     agent_seed(seed, kPlayRole));

  Rng train_rng = Rng(seed).fork(8);
  RunMetrics metrics;
  {
    rl::ReplayBuffer buffer(sac.replay_capacity, agent.obs_dim(), agent.act_dim());
    rl::TrainOptions options;
    options.steps = config.play_steps;
    const auto train_metrics = rl::train_sac(*env, head, agent, buffer, options, train_rng);
    metrics.condition = "play";
    metrics.seed = seed;
    metrics.hash = hash;
    metrics.records = to_rows(train_metrics.episodes);
  }

  // Roll the result out and log the squashed excitation each actuator
  // received; this is the corpus the representation is fitted on.
  Rng log_rng = Rng(seed).fork(12);
  std::vector<std::vector<double>> rows;
  for (std::size_t ep = 0; ep < config.log_episodes; ++ep) {
    std::vector<double> obs = env->reset(log_rng);
    bool done = false;
    while (!done) {
      const std::vector<double> raw = config.stochastic_log
                                          ? agent.act_stochastic(obs, log_rng)
                                          : agent.act_deterministic(obs);
      const auto action = head.to_env_action(raw);
      rows.push_back(muscle_squash(action));
      const auto result = env->step(action);
      done = result.done;
      obs = result.observation;
    }
  }
  ActivationLog log;
  log.samples = Matrix(rows.size(), env->action_dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) log.samples(r, c) = rows[r][c];
  }

  return PlayResult{std::move(agent), std::move(log), std::move(metrics)};
}

ConditionResult run_condition(const ExperimentConfig& config, Condition condition,
                              std::uint64_t seed, const ConditionInputs& inputs) {
  config.validate();
  const std::string hash = experiment_hash(config);
  auto env = envs::make_env(config.train_env);
  const std::string name = condition_name(condition);

  switch (condition) {
    case Condition::kSarRl: {
      if (inputs.sar == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "sar-rl requires a fitted synergy representation");
      }
      validate(*inputs.sar);
      if (inputs.sar->actuator_dim != env->action_dim()) {
        throw_error(ErrorKind::kConfiguration,
                    "synergy representation does not match the target actuators");
      }
      auto head = rl::PolicyHead::blended(*inputs.sar, config.blend_weight);
      rl::SacConfig sac = config.sac;
      sac.total_steps = config.train_steps;  // fresh policy, fresh schedule
      rl::SacAgent agent(env->observation_dim(), head.raw_dim(), sac,
                         agent_seed(seed, kSarRole));
      Rng rng = Rng(seed).fork(9);
      auto metrics = train_run(*env, head, agent, name, seed, hash,
                               config.train_steps, 0, config.play_steps,
                               /*policy_warmup=*/false, rng);
      return ConditionResult{std::move(metrics), std::move(agent), std::move(head)};
    }
    case Condition::kRlCurriculum: {
      if (inputs.play_agent == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "rl-curr requires the play-phase policy");
      }
      rl::SacAgent agent = *inputs.play_agent;  // resume where play stopped
      auto head = rl::PolicyHead::plain(env->action_dim());
      Rng rng = Rng(seed).fork(10);
      // The schedule continues mid-line; the replay buffer is fresh on the
      // new task, so the resumed policy itself (not noise) refills it.
      auto metrics = train_run(*env, head, agent, name, seed, hash,
                               config.train_steps, config.play_steps, 0,
                               /*policy_warmup=*/true, rng);
      return ConditionResult{std::move(metrics), std::move(agent), std::move(head)};
    }
    case Condition::kRlEndToEnd: {
      auto head = rl::PolicyHead::plain(env->action_dim());
      rl::SacConfig sac = config.sac;
      sac.total_steps = config.total_steps();
      rl::SacAgent agent(env->observation_dim(), env->action_dim(), sac,
                         agent_seed(seed, kEndToEndRole));
      Rng rng = Rng(seed).fork(11);
      // The full combined budget, spent entirely on the target task.
      auto metrics = train_run(*env, head, agent, name, seed, hash,
                               config.total_steps(), 0, 0,
                               /*policy_warmup=*/false, rng);
      return ConditionResult{std::move(metrics), std::move(agent), std::move(head)};
    }
  }
  throw_error(ErrorKind::kArgument, "unhandled condition");
}

std::vector<ZeroShotRow> run_zero_shot(const ExperimentConfig& config,
                                       const rl::PolicyHead& head,
                                       const rl::SacAgent& agent,
                                       std::uint64_t seed) {
  config.validate();
  std::vector<ZeroShotRow> rows;
  std::size_t index = 0;
  for (const auto& [set_name, spec] : config.eval_envs.items()) {
    auto env = envs::make_env(spec);
    Rng rng = Rng(seed).fork(16 + index++);
    const auto stats =
        rl::evaluate_policy(*env, head, agent, config.eval_episodes, rng);
    rows.push_back({set_name, config.eval_episodes, stats.success_rate,
                    stats.mean_distance, stats.mean_return});
  }
  return rows;
}

void save_zero_shot_csv(const std::string& path,
                        const std::vector<ZeroShotRow>& rows,
                        const std::string& hash, std::uint64_t seed,
                        const std::string& condition) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << "# config=" << (hash.empty() ? "none" : hash) << " seed=" << seed
      << " condition=" << condition << '\n';
  out << "set,episodes,success_rate,mean_distance,mean_return\n";
  for (const auto& row : rows) {
    out << row.set_name << ',' << row.episodes << ','
        << format_double(row.success_rate) << ','
        << format_double(row.mean_distance) << ','
        << format_double(row.mean_return) << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

std::vector<ZeroShotRow> load_zero_shot_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  std::string line;
  std::getline(in, line);  // provenance
  std::getline(in, line);  // header
  std::vector<ZeroShotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    ZeroShotRow row;
    std::string field;
    std::getline(fields, row.set_name, ',');
    std::getline(fields, field, ',');
    row.episodes = static_cast<std::size_t>(std::stoull(field));
    std::getline(fields, field, ',');
    row.success_rate = std::stod(field);
    std::getline(fields, field, ',');
    row.mean_distance = std::stod(field);
    std::getline(fields, field, ',');
    row.mean_return = std::stod(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TransferOutcome> run_transfer(const ExperimentConfig& config,
                                          const SynergyRepresentation& sar,
                                          const std::vector<std::string>& terrains,
                                          std::uint64_t seed) {
  config.validate();
  validate(sar);
  const std::string hash = experiment_hash(config);

  SynergyRepresentation used = sar;
  if (config.few_shot_k > 0) {
    used = select_synergies(sar, config.few_shot_k, SynergySubset::kMostInformative);
  }

  std::vector<TransferOutcome> outcomes;
  for (std::size_t t = 0; t < terrains.size(); ++t) {
    nlohmann::json spec = config.train_env;
    spec["terrain"] = terrains[t];

    {  // Synergy arm: fresh blended policy reusing the frozen representation.
      auto env = envs::make_env(spec);
      auto head = rl::PolicyHead::blended(used, config.blend_weight);
      rl::SacConfig sac = config.sac;
      sac.total_steps = config.train_steps;
      rl::SacAgent agent(env->observation_dim(), head.raw_dim(), sac,
                         agent_seed(seed, kTransferSarRole + t));
      Rng rng = Rng(seed).fork(32 + 2 * t);
      auto metrics = train_run(*env, head, agent, "sar-" + terrains[t], seed,
                               hash, config.train_steps, 0, config.play_steps,
                               /*policy_warmup=*/false, rng);
      outcomes.push_back({terrains[t], "sar", std::move(metrics)});
    }
    {  // From-scratch arm with the same total budget.
      auto env = envs::make_env(spec);
      auto head = rl::PolicyHead::plain(env->action_dim());
      rl::SacConfig sac = config.sac;
      sac.total_steps = config.total_steps();
      rl::SacAgent agent(env->observation_dim(), env->action_dim(), sac,
                         agent_seed(seed, kTransferE2eRole + t));
      Rng rng = Rng(seed).fork(33 + 2 * t);
      auto metrics = train_run(*env, head, agent, "e2e-" + terrains[t], seed,
                               hash, config.total_steps(), 0, 0,
                               /*policy_warmup=*/false, rng);
      outcomes.push_back({terrains[t], "e2e", std::move(metrics)});
    }
  }
  return outcomes;
}

const char* ablation_kind_name(AblationKind kind) {
  switch (kind) {
    case AblationKind::kBlendWeight: return "blend-weight";
    case AblationKind::kSynergySubset: return "synergy-subset";
    case AblationKind::kRandomSar: return "random-sar";
    case AblationKind::kPostHocBlend: return "post-hoc-blend";
  }
  return "unknown";
}

AblationKind ablation_kind_from_string(const std::string& name) {
  if (name == "blend-weight") return AblationKind::kBlendWeight;
  if (name == "synergy-subset") return AblationKind::kSynergySubset;
  if (name == "random-sar") return AblationKind::kRandomSar;
  if (name == "post-hoc-blend") return AblationKind::kPostHocBlend;
  throw_error(ErrorKind::kArgument,
              "unknown ablation kind '" + name +
                  "' (want blend-weight, synergy-subset, random-sar, or "
                  "post-hoc-blend)");
}

std::vector<double> blend_weight_grid() { return {0.0, 0.2, 0.4, 0.66, 0.8, 1.0}; }

namespace {

// One retrained ablation variant: a blended policy under `sar` at `weight`.
AblationRow train_variant(const ExperimentConfig& config, std::uint64_t seed,
                          const SynergyRepresentation& sar, double weight,
                          const std::string& variant, double value,
                          std::size_t variant_index, const std::string& hash) {
  auto env = envs::make_env(config.train_env);
  auto head = rl::PolicyHead::blended(sar, weight);
  rl::SacConfig sac = config.sac;
  sac.total_steps = config.train_steps;
  rl::SacAgent agent(env->observation_dim(), head.raw_dim(), sac,
                     agent_seed(seed, kAblationRole + variant_index));
  Rng rng = Rng(seed).fork(64 + variant_index);
  const auto metrics = train_run(*env, head, agent, variant, seed, hash,
                                 config.train_steps, 0, config.play_steps,
                                 /*policy_warmup=*/false, rng);
  AblationRow row;
  row.variant = variant;
  row.value = value;
  row.seed = seed;
  row.summary = metrics.final_decile();
  return row;
}

}  // namespace

std::vector<AblationRow> ablate(AblationKind kind, const ExperimentConfig& config,
                                std::uint64_t seed, const AblationInputs& inputs) {
  config.validate();
  const std::string hash = experiment_hash(config);
  std::vector<AblationRow> rows;

  switch (kind) {
    case AblationKind::kBlendWeight: {
      if (inputs.sar == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "blend-weight ablation requires a fitted representation");
      }
      const auto grid = blend_weight_grid();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back(train_variant(config, seed, *inputs.sar, grid[i], "phi",
                                     grid[i], i, hash));
      }
      return rows;
    }
    case AblationKind::kSynergySubset: {
      if (inputs.sar == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "synergy-subset ablation requires a fitted representation");
      }
      const std::size_t k = config.few_shot_k > 0 ? config.few_shot_k : 8;
      const auto most =
          select_synergies(*inputs.sar, k, SynergySubset::kMostInformative);
      const auto least =
          select_synergies(*inputs.sar, k, SynergySubset::kLeastInformative);
      rows.push_back(train_variant(config, seed, most, config.blend_weight,
                                   "most-k", static_cast<double>(k), 0, hash));
      rows.push_back(train_variant(config, seed, least, config.blend_weight,
                                   "least-k", static_cast<double>(k), 1, hash));
      return rows;
    }
    case AblationKind::kRandomSar: {
      if (inputs.sar == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "random-sar ablation requires a fitted representation");
      }
      const auto random = random_representation(inputs.sar->actuator_dim,
                                                inputs.sar->n_syn, seed);
      rows.push_back(train_variant(config, seed, *inputs.sar, config.blend_weight,
                                   "fitted", 0.0, 0, hash));
      rows.push_back(train_variant(config, seed, random, config.blend_weight,
                                   "random", 1.0, 1, hash));
      return rows;
    }
    case AblationKind::kPostHocBlend: {
      if (inputs.agent == nullptr || inputs.head == nullptr) {
        throw_error(ErrorKind::kConfiguration,
                    "post-hoc ablation requires a trained blended policy");
      }
      if (inputs.head->mode() != rl::PolicyMode::kBlended) {
        throw_error(ErrorKind::kConfiguration,
                    "post-hoc ablation requires a blended policy head");
      }
      // Probe observations for the did-the-actions-change column.
      std::vector<std::vector<double>> probes;
      {
        auto env = envs::make_env(config.train_env);
        Rng probe_rng = Rng(seed).fork(62);
        for (int i = 0; i < 16; ++i) probes.push_back(env->reset(probe_rng));
      }
      const auto grid = blend_weight_grid();
      for (double value : grid) {
        auto head = rl::PolicyHead::blended(inputs.head->sar(), value);
        bool changed = false;
        for (const auto& obs : probes) {
          const auto raw = inputs.agent->act_deterministic(obs);
          const auto base_action = inputs.head->to_env_action(raw);
          const auto new_action = head.to_env_action(raw);
          for (std::size_t i = 0; i < base_action.size(); ++i) {
            if (std::fabs(base_action[i] - new_action[i]) > 0.0) changed = true;
          }
        }
        auto env = envs::make_env(config.train_env);
        Rng eval_rng = Rng(seed).fork(63);  // same stream for every override
        const auto stats = rl::evaluate_policy(*env, head, *inputs.agent,
                                               config.eval_episodes, eval_rng);
        AblationRow row;
        row.variant = "override";
        row.value = value;
        row.seed = seed;
        row.actions_changed = changed;
        row.summary = summarize_rows(eval_rows(stats));
        rows.push_back(std::move(row));
      }
      return rows;
    }
  }
  throw_error(ErrorKind::kArgument, "unhandled ablation kind");
}

void save_ablation_csv(const std::string& path, AblationKind kind,
                       const std::vector<AblationRow>& rows,
                       const std::string& hash) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << "# config=" << (hash.empty() ? "none" : hash)
      << " seed=0 condition=" << ablation_kind_name(kind) << '\n';
  out << "variant,value,seed,actions_changed,episodes,success_rate,"
         "mean_return,return_stddev,mean_distance,distance_stddev\n";
  for (const auto& row : rows) {
    out << row.variant << ',' << format_double(row.value) << ',' << row.seed
        << ',' << (row.actions_changed ? 1 : 0) << ',' << row.summary.episodes
        << ',' << format_double(row.summary.success_rate) << ','
        << format_double(row.summary.mean_return) << ','
        << format_double(row.summary.return_stddev) << ','
        << format_double(row.summary.mean_distance) << ','
        << format_double(row.summary.distance_stddev) << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

std::vector<AblationRow> load_ablation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  std::string line;
  std::getline(in, line);  // provenance
  std::getline(in, line);  // header
  std::vector<AblationRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    AblationRow row;
    std::string field;
    std::getline(fields, row.variant, ',');
    std::getline(fields, field, ',');
    row.value = std::stod(field);
    std::getline(fields, field, ',');
    row.seed = std::stoull(field);
    std::getline(fields, field, ',');
    row.actions_changed = field == "1";
    std::getline(fields, field, ',');
    row.summary.episodes = static_cast<std::size_t>(std::stoull(field));
    std::getline(fields, field, ',');
    row.summary.success_rate = std::stod(field);
    std::getline(fields, field, ',');
    row.summary.mean_return = std::stod(field);
    std::getline(fields, field, ',');
    row.summary.return_stddev = std::stod(field);
    std::getline(fields, field, ',');
    row.summary.mean_distance = std::stod(field);
    std::getline(fields, field, ',');
    row.summary.distance_stddev = std::stod(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sarkit::harness
