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

#include "sarkit/rl/policy_head.hpp"

#include "sarkit/error.hpp"

namespace sarkit::rl {

const char* policy_mode_name(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::kPlain: return "plain";
    case PolicyMode::kBlended: return "blended";
    case PolicyMode::kPureSar: return "pure-sar";
  }
  return "unknown";
}

PolicyMode policy_mode_from_string(const std::string& name) {
  if (name == "plain") return PolicyMode::kPlain;
  if (name == "blended") return PolicyMode::kBlended;
  if (name == "pure-sar") return PolicyMode::kPureSar;
  throw_error(ErrorKind::kConfiguration, "unknown policy mode: " + name);
}

PolicyHead PolicyHead::plain(std::size_t actuator_dim) {
  if (actuator_dim == 0) {
    throw_error(ErrorKind::kArgument, "actuator dimension must be positive");
  }
  PolicyHead head;
  head.mode_ = PolicyMode::kPlain;
  head.actuator_dim_ = actuator_dim;
  return head;
}

PolicyHead PolicyHead::blended(SynergyRepresentation sar, double weight) {
  validate(sar);
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw_error(ErrorKind::kArgument, "blend weight must lie in [0, 1]");
  }
  PolicyHead head;
  head.mode_ = PolicyMode::kBlended;
  head.actuator_dim_ = sar.actuator_dim;
  head.weight_ = weight;
  head.sar_ = std::move(sar);
  return head;
}

PolicyHead PolicyHead::pure_sar(SynergyRepresentation sar) {
  validate(sar);
  PolicyHead head;
  head.mode_ = PolicyMode::kPureSar;
  head.actuator_dim_ = sar.actuator_dim;
  head.weight_ = 1.0;
  head.sar_ = std::move(sar);
  return head;
}

std::size_t PolicyHead::raw_dim() const {
  switch (mode_) {
    case PolicyMode::kPlain: return actuator_dim_;
    case PolicyMode::kBlended: return sar_.n_syn + actuator_dim_;
    case PolicyMode::kPureSar: return sar_.n_syn;
  }
  return 0;
}

const SynergyRepresentation& PolicyHead::sar() const {
  if (mode_ == PolicyMode::kPlain) {
    throw_error(ErrorKind::kSequencing, "plain heads carry no representation");
  }
  return sar_;
}

std::vector<double> PolicyHead::to_env_action(const std::vector<double>& raw) const {
  if (raw.size() != raw_dim()) {
    throw_error(ErrorKind::kArgument, "raw action length does not match the head");
  }
  switch (mode_) {
    case PolicyMode::kPlain:
      return raw;
    case PolicyMode::kPureSar:
      return decode(sar_, raw);
    case PolicyMode::kBlended: {
      // Layout: synergy coordinates first, direct actuator commands after.
      const std::vector<double> coords(raw.begin(),
                                       raw.begin() + static_cast<long>(sar_.n_syn));
      const std::vector<double> direct(raw.begin() + static_cast<long>(sar_.n_syn),
                                       raw.end());
      return blend(decode(sar_, coords), direct, weight_);
    }
  }
  throw_error(ErrorKind::kContract, "unreachable policy mode");
}

nlohmann::json PolicyHead::to_json() const {
  nlohmann::json j;
  j["mode"] = policy_mode_name(mode_);
  j["actuator_dim"] = actuator_dim_;
  if (mode_ == PolicyMode::kBlended) j["blend_weight"] = weight_;
  if (mode_ != PolicyMode::kPlain) j["sar"] = sar_to_json(sar_);
  return j;
}

PolicyHead PolicyHead::from_json(const nlohmann::json& j) {
  try {
    const PolicyMode mode = policy_mode_from_string(j.at("mode").get<std::string>());
    const std::size_t actuator_dim = j.at("actuator_dim").get<std::size_t>();
    switch (mode) {
      case PolicyMode::kPlain:
        return plain(actuator_dim);
      case PolicyMode::kBlended:
        return blended(sar_from_json(j.at("sar"), "policy head"),
                       j.at("blend_weight").get<double>());
      case PolicyMode::kPureSar:
        return pure_sar(sar_from_json(j.at("sar"), "policy head"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorKind::kIo,
                "malformed policy head record (" + std::string(e.what()) + ")");
  }
  throw_error(ErrorKind::kContract, "unreachable policy mode");
}

}  // namespace sarkit::rl
