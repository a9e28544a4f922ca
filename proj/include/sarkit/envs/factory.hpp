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

#ifndef SARKIT_ENVS_FACTORY_HPP_
#define SARKIT_ENVS_FACTORY_HPP_

#include <memory>
#include <string>

#include "nlohmann/json.hpp"
#include "sarkit/envs/env.hpp"

namespace sarkit::envs {

// Builds an environment from a JSON config. The config must carry a "name"
// key ("reach", "pendulum_hold", "reorient", or "locomotion"); every other
// key overrides that environment's default. Unknown keys, wrong types, and
// out-of-range values raise kConfiguration.
std::unique_ptr<Env> make_env(const nlohmann::json& config);

// The full default config for an environment name, with every exposed key
// present — the base layer of the defaults < file < command-line overrides
// precedence chain.
nlohmann::json default_env_config(const std::string& name);

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_FACTORY_HPP_
