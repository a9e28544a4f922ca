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

#include "sarkit/harness/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sarkit/error.hpp"

namespace sarkit::harness {

namespace {

// Splits one CSV line on commas; the files are plain enough that quoting
// never arises.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw_error(ErrorKind::kIo, "bad numeric field '" + s + "' in " + path);
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw_error(ErrorKind::kIo, "bad integer field '" + s + "' in " + path);
  }
}

// Provenance comment shared by every CSV artifact.
std::string provenance_line(const std::string& hash, std::uint64_t seed,
                            const std::string& condition) {
  return "# config=" + (hash.empty() ? std::string("none") : hash) +
         " seed=" + std::to_string(seed) + " condition=" + condition;
}

void parse_provenance(const std::string& line, const std::string& path,
                      std::string* hash, std::uint64_t* seed,
                      std::string* condition) {
  std::istringstream in(line);
  std::string marker, field;
  in >> marker;
  if (marker != "#") throw_error(ErrorKind::kIo, "missing provenance line in " + path);
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "config") {
      *hash = value == "none" ? std::string() : value;
    } else if (key == "seed") {
      *seed = parse_u64(value, path);
    } else if (key == "condition") {
      *condition = value;
    }
  }
}

void require_object_with_name(const nlohmann::json& spec, const char* which) {
  if (!spec.is_object() || !spec.contains("name") || !spec["name"].is_string()) {
    throw_error(ErrorKind::kConfiguration,
                std::string(which) + " must be an object with a \"name\" key");
  }
}

std::uint64_t take_u64(nlohmann::json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json v = j[key];
  j.erase(key);
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<long long>() >= 0))) {
    throw_error(ErrorKind::kConfiguration,
                std::string("key '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double take_number(nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json v = j[key];
  j.erase(key);
  if (!v.is_number()) {
    throw_error(ErrorKind::kConfiguration,
                std::string("key '") + key + "' must be a number");
  }
  return v.get<double>();
}

bool take_flag(nlohmann::json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json v = j[key];
  j.erase(key);
  if (!v.is_boolean()) {
    throw_error(ErrorKind::kConfiguration,
                std::string("key '") + key + "' must be a boolean");
  }
  return v.get<bool>();
}

// Partial override of the agent settings: only the keys present change.
void apply_sac_overrides(rl::SacConfig& config, nlohmann::json j) {
  if (j.contains("hidden")) {
    const nlohmann::json v = j["hidden"];
    j.erase("hidden");
    if (!v.is_array() || v.empty()) {
      throw_error(ErrorKind::kConfiguration, "sac.hidden must be a nonempty array");
    }
    config.hidden.clear();
    for (const auto& e : v) {
      if (!(e.is_number_unsigned() ||
            (e.is_number_integer() && e.get<long long>() > 0))) {
        throw_error(ErrorKind::kConfiguration, "sac.hidden entries must be positive");
      }
      config.hidden.push_back(e.get<std::size_t>());
    }
  }
  config.lr0 = take_number(j, "lr0", config.lr0);
  config.linear_schedule = take_flag(j, "linear_schedule", config.linear_schedule);
  config.total_steps = take_u64(j, "total_steps", config.total_steps);
  config.start_learning =
      static_cast<std::size_t>(take_u64(j, "start_learning", config.start_learning));
  config.batch_size =
      static_cast<std::size_t>(take_u64(j, "batch_size", config.batch_size));
  config.tau = take_number(j, "tau", config.tau);
  config.gamma = take_number(j, "gamma", config.gamma);
  config.replay_capacity = static_cast<std::size_t>(
      take_u64(j, "replay_capacity", config.replay_capacity));
  if (!j.empty()) {
    throw_error(ErrorKind::kConfiguration,
                "unknown agent setting: " + j.begin().key());
  }
}

}  // namespace

const char* condition_name(Condition condition) {
  switch (condition) {
    case Condition::kSarRl: return "sar-rl";
    case Condition::kRlCurriculum: return "rl-curr";
    case Condition::kRlEndToEnd: return "rl-e2e";
  }
  return "unknown";
}

Condition condition_from_string(const std::string& name) {
  if (name == "sar-rl") return Condition::kSarRl;
  if (name == "rl-curr") return Condition::kRlCurriculum;
  if (name == "rl-e2e") return Condition::kRlEndToEnd;
  throw_error(ErrorKind::kConfiguration,
              "unknown condition '" + name + "' (want sar-rl, rl-curr, or rl-e2e)");
}

std::vector<Condition> all_conditions() {
  return {Condition::kSarRl, Condition::kRlCurriculum, Condition::kRlEndToEnd};
}

void ExperimentConfig::validate() const {
  require_object_with_name(play_env, "play_env");
  require_object_with_name(train_env, "train_env");
  if (!eval_envs.is_object()) {
    throw_error(ErrorKind::kConfiguration, "eval_envs must be an object");
  }
  for (const auto& [set_name, spec] : eval_envs.items()) {
    require_object_with_name(spec, ("eval_envs." + set_name).c_str());
  }
  if (play_steps == 0 || train_steps == 0) {
    throw_error(ErrorKind::kConfiguration, "step budgets must be positive");
  }
  if (!(blend_weight >= 0.0 && blend_weight <= 1.0)) {
    throw_error(ErrorKind::kConfiguration, "blend_weight must lie in [0, 1]");
  }
  if (seeds.empty()) throw_error(ErrorKind::kConfiguration, "seeds must be nonempty");
  if (log_episodes == 0 || eval_episodes == 0) {
    throw_error(ErrorKind::kConfiguration, "episode counts must be positive");
  }
  if (workers == 0) throw_error(ErrorKind::kConfiguration, "workers must be >= 1");
  sac.validate();
}

ExperimentConfig experiment_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw_error(ErrorKind::kConfiguration, "experiment config must be an object");
  }
  nlohmann::json j = doc;
  ExperimentConfig config;

  if (j.contains("name")) {
    if (!j["name"].is_string()) {
      throw_error(ErrorKind::kConfiguration, "name must be a string");
    }
    config.name = j["name"].get<std::string>();
    j.erase("name");
  }
  for (const char* key : {"play_env", "train_env", "eval_envs"}) {
    if (!j.contains(key)) continue;
    nlohmann::json& slot = key == std::string("play_env")   ? config.play_env
                           : key == std::string("train_env") ? config.train_env
                                                             : config.eval_envs;
    slot = j[key];
    j.erase(key);
  }
  config.play_steps = take_u64(j, "play_steps", config.play_steps);
  config.train_steps = take_u64(j, "train_steps", config.train_steps);
  config.n_syn = static_cast<std::size_t>(take_u64(j, "n_syn", config.n_syn));
  config.blend_weight = take_number(j, "blend_weight", config.blend_weight);
  if (j.contains("seeds")) {
    const nlohmann::json v = j["seeds"];
    j.erase("seeds");
    if (!v.is_array() || v.empty()) {
      throw_error(ErrorKind::kConfiguration, "seeds must be a nonempty array");
    }
    config.seeds.clear();
    for (const auto& e : v) {
      if (!(e.is_number_unsigned() ||
            (e.is_number_integer() && e.get<long long>() >= 0))) {
        throw_error(ErrorKind::kConfiguration, "seeds must be nonnegative integers");
      }
      config.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  config.log_episodes =
      static_cast<std::size_t>(take_u64(j, "log_episodes", config.log_episodes));
  config.stochastic_log = take_flag(j, "stochastic_log", config.stochastic_log);
  config.eval_episodes =
      static_cast<std::size_t>(take_u64(j, "eval_episodes", config.eval_episodes));
  config.workers = static_cast<std::size_t>(take_u64(j, "workers", config.workers));
  config.few_shot_k =
      static_cast<std::size_t>(take_u64(j, "few_shot_k", config.few_shot_k));
  if (j.contains("sac")) {
    const nlohmann::json v = j["sac"];
    j.erase("sac");
    if (!v.is_object()) {
      throw_error(ErrorKind::kConfiguration, "sac must be an object");
    }
    apply_sac_overrides(config.sac, v);
  }
  if (!j.empty()) {
    throw_error(ErrorKind::kConfiguration,
                "unknown experiment setting: " + j.begin().key());
  }
  config.validate();
  return config;
}

nlohmann::json experiment_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["name"] = config.name;
  j["play_env"] = config.play_env;
  j["train_env"] = config.train_env;
  j["eval_envs"] = config.eval_envs;
  j["play_steps"] = config.play_steps;
  j["train_steps"] = config.train_steps;
  j["n_syn"] = config.n_syn;
  j["blend_weight"] = config.blend_weight;
  j["seeds"] = config.seeds;
  j["log_episodes"] = config.log_episodes;
  j["stochastic_log"] = config.stochastic_log;
  j["eval_episodes"] = config.eval_episodes;
  j["workers"] = config.workers;
  j["few_shot_k"] = config.few_shot_k;
  j["sac"] = rl::sac_config_to_json(config.sac);
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string config_hash(const nlohmann::json& config) {
  // dump() is canonical: keys are stored sorted and numbers print
  // shortest-round-trip, so equal configs hash equal.
  const std::string canonical = config.dump();
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return buffer;
}

Summary summarize_rows(const std::vector<EpisodeRow>& rows) {
  Summary summary;
  summary.episodes = rows.size();
  if (rows.empty()) return summary;
  const double n = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    summary.success_rate += row.success ? 1.0 : 0.0;
    summary.mean_return += row.episode_return;
    summary.mean_distance += row.distance;
  }
  summary.success_rate /= n;
  summary.mean_return /= n;
  summary.mean_distance /= n;
  double var_return = 0.0, var_distance = 0.0;
  for (const auto& row : rows) {
    const double dr = row.episode_return - summary.mean_return;
    const double dd = row.distance - summary.mean_distance;
    var_return += dr * dr;
    var_distance += dd * dd;
  }
  summary.return_stddev = std::sqrt(var_return / n);
  summary.distance_stddev = std::sqrt(var_distance / n);
  return summary;
}

Summary RunMetrics::final_decile() const {
  if (records.empty()) return Summary{};
  const std::size_t window = (records.size() + 9) / 10;  // ceil(n/10), >= 1
  const std::vector<EpisodeRow> tail(records.end() - static_cast<std::ptrdiff_t>(window),
                                     records.end());
  return summarize_rows(tail);
}

void save_metrics_csv(const std::string& path, const RunMetrics& metrics) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << provenance_line(metrics.hash, metrics.seed, metrics.condition) << '\n';
  out << "step,return,success,distance,condition,seed\n";
  for (const auto& row : metrics.records) {
    out << row.step << ',' << format_double(row.episode_return) << ','
        << (row.success ? 1 : 0) << ',' << format_double(row.distance) << ','
        << metrics.condition << ',' << metrics.seed << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

RunMetrics load_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  RunMetrics metrics;
  std::string line;
  if (!std::getline(in, line)) throw_error(ErrorKind::kIo, "empty file: " + path);
  parse_provenance(line, path, &metrics.hash, &metrics.seed, &metrics.condition);
  if (!std::getline(in, line) || split_csv(line).size() != 6) {
    throw_error(ErrorKind::kIo, "missing metrics header in " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6) {
      throw_error(ErrorKind::kIo, "malformed metrics row in " + path);
    }
    EpisodeRow row;
    row.step = parse_u64(fields[0], path);
    row.episode_return = parse_double(fields[1], path);
    row.success = fields[2] == "1";
    row.distance = parse_double(fields[3], path);
    metrics.records.push_back(row);
  }
  return metrics;
}

void save_contributions_csv(const std::string& path, const RunMetrics& metrics) {
  if (metrics.contributions.rows() != metrics.records.size()) {
    throw_error(ErrorKind::kArgument,
                "contribution rows do not match the episode records");
  }
  std::ofstream out(path);
  if (!out) throw_error(ErrorKind::kIo, "cannot open for writing: " + path);
  out << provenance_line(metrics.hash, metrics.seed, metrics.condition) << '\n';
  out << "step";
  for (std::size_t c = 0; c < metrics.contributions.cols(); ++c) out << ",share" << c;
  out << '\n';
  for (std::size_t r = 0; r < metrics.contributions.rows(); ++r) {
    out << metrics.records[r].step;
    for (std::size_t c = 0; c < metrics.contributions.cols(); ++c) {
      out << ',' << format_double(metrics.contributions(r, c));
    }
    out << '\n';
  }
  if (!out) throw_error(ErrorKind::kIo, "write failed: " + path);
}

Matrix load_contributions_csv(const std::string& path,
                              std::vector<std::uint64_t>* steps) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorKind::kIo, "cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw_error(ErrorKind::kIo, "empty file: " + path);
  std::string hash, condition;
  std::uint64_t seed = 0;
  parse_provenance(line, path, &hash, &seed, &condition);
  if (!std::getline(in, line)) throw_error(ErrorKind::kIo, "missing header: " + path);
  const std::size_t n_syn = split_csv(line).size() - 1;
  std::vector<std::vector<double>> rows;
  std::vector<std::uint64_t> row_steps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != n_syn + 1) {
      throw_error(ErrorKind::kIo, "malformed contribution row in " + path);
    }
    row_steps.push_back(parse_u64(fields[0], path));
    std::vector<double> row(n_syn);
    for (std::size_t c = 0; c < n_syn; ++c) row[c] = parse_double(fields[c + 1], path);
    rows.push_back(std::move(row));
  }
  Matrix out(rows.size(), n_syn);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < n_syn; ++c) out(r, c) = rows[r][c];
  }
  if (steps) *steps = std::move(row_steps);
  return out;
}

}  // namespace sarkit::harness
