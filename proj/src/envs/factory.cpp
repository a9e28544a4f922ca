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

#include "sarkit/envs/factory.hpp"

#include <set>

#include "sarkit/envs/arm.hpp"
#include "sarkit/envs/locomotion.hpp"
#include "sarkit/envs/reorient.hpp"

namespace sarkit::envs {

namespace {

// Pulls typed values out of a JSON object, remembers which keys were read,
// and rejects any leftovers — configs fail loudly on typos.
class ConfigReader {
 public:
  explicit ConfigReader(const nlohmann::json& j) : j_(j) {
    if (!j_.is_object()) {
      throw_error(ErrorKind::kConfiguration, "env config must be a JSON object");
    }
  }

  double number(const std::string& key, double fallback) {
    if (!j_.contains(key)) return fallback;
    seen_.insert(key);
    if (!j_[key].is_number()) {
      throw_error(ErrorKind::kConfiguration, "config key '" + key + "' must be a number");
    }
    return j_[key].get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(nonnegative(key, fallback));
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    return nonnegative(key, fallback);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!j_.contains(key)) return fallback;
    seen_.insert(key);
    if (!j_[key].is_string()) {
      throw_error(ErrorKind::kConfiguration, "config key '" + key + "' must be a string");
    }
    return j_[key].get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!j_.contains(key)) return fallback;
    seen_.insert(key);
    if (!j_[key].is_boolean()) {
      throw_error(ErrorKind::kConfiguration, "config key '" + key + "' must be a boolean");
    }
    return j_[key].get<bool>();
  }

  std::uint64_t nonnegative(const std::string& key, std::uint64_t fallback) {
    if (!j_.contains(key)) return fallback;
    seen_.insert(key);
    const auto& v = j_[key];
    // JSON integer literals parse as signed; accept them when nonnegative.
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw_error(ErrorKind::kConfiguration,
                "config key '" + key + "' must be a nonnegative integer");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw_error(ErrorKind::kConfiguration, "unknown config key '" + key + "'");
      }
    }
  }

 private:
  nlohmann::json j_;
  std::set<std::string> seen_;
};

ObjectDomain object_domain_from_string(const std::string& name) {
  if (name == "pretrain") return ObjectDomain::kPretrain;
  if (name == "in") return ObjectDomain::kInDomain;
  if (name == "out") return ObjectDomain::kOutOfDomain;
  throw_error(ErrorKind::kConfiguration, "unknown object domain: " + name);
}

std::unique_ptr<Env> make_reach(ConfigReader& reader) {
  ReachConfig config;
  config.arm.muscles = reader.count("muscles", config.arm.muscles);
  config.arm.dt = reader.number("dt", config.arm.dt);
  config.episode_steps = reader.count("episode_steps", config.episode_steps);
  config.effort_weight = reader.number("effort_weight", config.effort_weight);
  config.reset_noise = reader.number("reset_noise", config.reset_noise);
  config.success_radius = reader.number("success_radius", config.success_radius);
  reader.finish();
  return std::make_unique<ReachEnv>(config);
}

std::unique_ptr<Env> make_pendulum(ConfigReader& reader) {
  PendulumHoldConfig config;
  config.arm.dt = reader.number("dt", config.arm.dt);
  config.episode_steps = reader.count("episode_steps", config.episode_steps);
  config.effort_weight = reader.number("effort_weight", config.effort_weight);
  config.reset_noise = reader.number("reset_noise", config.reset_noise);
  config.target_angle = reader.number("target_angle", config.target_angle);
  config.success_angle = reader.number("success_angle", config.success_angle);
  reader.finish();
  return std::make_unique<PendulumHoldEnv>(config);
}

std::unique_ptr<Env> make_reorient(ConfigReader& reader) {
  ReorientConfig config;
  config.arm.muscles = reader.count("muscles", config.arm.muscles);
  config.arm.dt = reader.number("dt", config.arm.dt);
  config.episode_steps = reader.count("episode_steps", config.episode_steps);
  config.w_pos = reader.number("w_pos", config.w_pos);
  config.w_ang = reader.number("w_ang", config.w_ang);
  config.w_drop = reader.number("w_drop", config.w_drop);
  config.w_effort = reader.number("w_effort", config.w_effort);
  config.w_loose = reader.number("w_loose", config.w_loose);
  config.w_tight = reader.number("w_tight", config.w_tight);
  config.resample_target = reader.flag("resample_target", config.resample_target);
  const std::string domain = reader.text("object_domain", "pretrain");
  const std::size_t object_count = reader.count("object_count", 8);
  const std::uint64_t object_seed = reader.seed("object_seed", 0);
  reader.finish();
  auto objects =
      make_object_set(object_domain_from_string(domain), object_count, object_seed);
  return std::make_unique<ReorientEnv>(config, std::move(objects));
}

std::unique_ptr<Env> make_locomotion(ConfigReader& reader) {
  LocomotionConfig config;
  config.muscles = reader.count("muscles", config.muscles);
  config.dt = reader.number("dt", config.dt);
  config.episode_steps = reader.count("episode_steps", config.episode_steps);
  config.terrain = terrain_kind_from_string(reader.text("terrain", "flat"));
  config.terrain_seed = reader.seed("terrain_seed", config.terrain_seed);
  config.w_velocity = reader.number("w_velocity", config.w_velocity);
  config.w_cyclic = reader.number("w_cyclic", config.w_cyclic);
  config.w_upright = reader.number("w_upright", config.w_upright);
  config.w_joint = reader.number("w_joint", config.w_joint);
  config.w_effort = reader.number("w_effort", config.w_effort);
  config.success_distance = reader.number("success_distance", config.success_distance);
  config.reset_noise = reader.number("reset_noise", config.reset_noise);
  reader.finish();
  return std::make_unique<LocomotionEnv>(config);
}

}  // namespace

std::unique_ptr<Env> make_env(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("name") || !config["name"].is_string()) {
    throw_error(ErrorKind::kConfiguration, "env config needs a string 'name' key");
  }
  const std::string name = config["name"].get<std::string>();
  nlohmann::json rest = config;
  rest.erase("name");
  ConfigReader reader(rest);
  if (name == "reach") return make_reach(reader);
  if (name == "pendulum_hold") return make_pendulum(reader);
  if (name == "reorient") return make_reorient(reader);
  if (name == "locomotion") return make_locomotion(reader);
  throw_error(ErrorKind::kConfiguration, "unknown env name: " + name);
}

nlohmann::json default_env_config(const std::string& name) {
  if (name == "reach") {
    ReachConfig c;
    return {{"name", "reach"},
            {"muscles", c.arm.muscles},
            {"dt", c.arm.dt},
            {"episode_steps", c.episode_steps},
            {"effort_weight", c.effort_weight},
            {"reset_noise", c.reset_noise},
            {"success_radius", c.success_radius}};
  }
  if (name == "pendulum_hold") {
    PendulumHoldConfig c;
    return {{"name", "pendulum_hold"},
            {"dt", c.arm.dt},
            {"episode_steps", c.episode_steps},
            {"effort_weight", c.effort_weight},
            {"reset_noise", c.reset_noise},
            {"target_angle", c.target_angle},
            {"success_angle", c.success_angle}};
  }
  if (name == "reorient") {
    ReorientConfig c;
    return {{"name", "reorient"},
            {"muscles", c.arm.muscles},
            {"dt", c.arm.dt},
            {"episode_steps", c.episode_steps},
            {"w_pos", c.w_pos},
            {"w_ang", c.w_ang},
            {"w_drop", c.w_drop},
            {"w_effort", c.w_effort},
            {"w_loose", c.w_loose},
            {"w_tight", c.w_tight},
            {"resample_target", c.resample_target},
            {"object_domain", "pretrain"},
            {"object_count", 8},
            {"object_seed", 0}};
  }
  if (name == "locomotion") {
    LocomotionConfig c;
    return {{"name", "locomotion"},
            {"muscles", c.muscles},
            {"dt", c.dt},
            {"episode_steps", c.episode_steps},
            {"terrain", "flat"},
            {"terrain_seed", c.terrain_seed},
            {"w_velocity", c.w_velocity},
            {"w_cyclic", c.w_cyclic},
            {"w_upright", c.w_upright},
            {"w_joint", c.w_joint},
            {"w_effort", c.w_effort},
            {"success_distance", c.success_distance},
            {"reset_noise", c.reset_noise}};
  }
  throw_error(ErrorKind::kConfiguration, "unknown env name: " + name);
}

}  // namespace sarkit::envs
