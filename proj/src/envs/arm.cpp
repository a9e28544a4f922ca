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

#include "sarkit/envs/arm.hpp"

#include <cmath>

#include "sarkit/synergy.hpp"

namespace sarkit::envs {

void check_action(const std::vector<double>& action, std::size_t dim,
                  bool episode_active) {
  if (!episode_active) {
    throw_error(ErrorKind::kSequencing, "step() called before reset() or after done");
  }
  if (action.size() != dim) {
    throw_error(ErrorKind::kArgument,
                "action length " + std::to_string(action.size()) +
                    " does not match action dimension " + std::to_string(dim));
  }
  for (double a : action) {
    if (!std::isfinite(a)) {
      throw_error(ErrorKind::kArgument, "action has non-finite entries");
    }
    if (a < -1.0 || a > 1.0) {
      throw_error(ErrorKind::kContract,
                  "action component " + format_double(a) + " outside [-1,1]");
    }
  }
}

namespace {

double effort_rms(const std::vector<double>& action) {
  double acc = 0.0;
  for (double a : action) acc += a * a;
  return std::sqrt(acc / static_cast<double>(action.size()));
}

void validate_arm_params(const ArmParams& p) {
  if (p.joints < 1 || p.joints > 2) {
    throw_error(ErrorKind::kConfiguration, "arm supports 1 or 2 joints");
  }
  if (p.muscles < 2 * p.joints || p.muscles % 2 != 0) {
    throw_error(ErrorKind::kConfiguration,
                "arm needs an even muscle count with at least one pair per joint");
  }
  if (p.link_length.size() != p.joints || p.rest_angle.size() != p.joints) {
    throw_error(ErrorKind::kConfiguration,
                "link_length and rest_angle must each have one entry per joint");
  }
  for (double l : p.link_length)
    if (!(l > 0.0)) throw_error(ErrorKind::kConfiguration, "link lengths must be positive");
  if (!(p.dt > 0.0) || !(p.inertia > 0.0) || p.damping < 0.0 || p.stiffness < 0.0) {
    throw_error(ErrorKind::kConfiguration, "arm dynamics parameters out of range");
  }
  if (!(p.joint_min < p.joint_max)) {
    throw_error(ErrorKind::kConfiguration, "joint_min must be below joint_max");
  }
  for (double r : p.rest_angle) {
    if (r < p.joint_min || r > p.joint_max) {
      throw_error(ErrorKind::kConfiguration, "rest angle outside joint limits");
    }
  }
}

}  // namespace

ArmModel::ArmModel(const ArmParams& params)
    : params_((validate_arm_params(params), params)),
      apparatus_(antagonist_routing(params.joints, params.muscles, params.base_arm),
                 params.muscle),
      angle_(params.rest_angle),
      velocity_(params.joints, 0.0) {
  sync_kinematics();
}

void ArmModel::reset(const std::vector<double>& angles) {
  if (angles.size() != params_.joints) {
    throw_error(ErrorKind::kArgument, "reset angle count does not match joints");
  }
  angle_ = angles;
  for (double& a : angle_) a = std::clamp(a, params_.joint_min, params_.joint_max);
  velocity_.assign(params_.joints, 0.0);
  apparatus_.reset();
  sync_kinematics();
}

void ArmModel::sync_kinematics() {
  std::vector<double> offset(params_.joints);
  for (std::size_t j = 0; j < params_.joints; ++j)
    offset[j] = angle_[j] - params_.rest_angle[j];
  apparatus_.set_kinematics(offset, velocity_);
}

void ArmModel::step(const std::vector<double>& excitation,
                    const std::array<double, 2>& tip_force) {
  apparatus_.step_activation(excitation, params_.dt);
  std::vector<double> torque = apparatus_.joint_torques();
  for (std::size_t j = 0; j < params_.joints; ++j) {
    torque[j] += -params_.damping * velocity_[j] -
                 params_.stiffness * (angle_[j] - params_.rest_angle[j]);
  }
  if (tip_force[0] != 0.0 || tip_force[1] != 0.0) {
    // τ += Jᵀ F with J the fingertip Jacobian; joint j moves every link at
    // and beyond it, so its column is the sum of the distal link tangents.
    double cum = 0.0;
    std::vector<std::array<double, 2>> tangent(params_.joints, {0.0, 0.0});
    for (std::size_t j = 0; j < params_.joints; ++j) {
      cum += angle_[j];
      const double dx = -params_.link_length[j] * std::sin(cum);
      const double dy = params_.link_length[j] * std::cos(cum);
      for (std::size_t r = 0; r <= j; ++r) {
        tangent[r][0] += dx;
        tangent[r][1] += dy;
      }
    }
    for (std::size_t j = 0; j < params_.joints; ++j)
      torque[j] += tangent[j][0] * tip_force[0] + tangent[j][1] * tip_force[1];
  }
  for (std::size_t j = 0; j < params_.joints; ++j) {
    velocity_[j] += params_.dt * torque[j] / params_.inertia;
    angle_[j] += params_.dt * velocity_[j];
    if (angle_[j] < params_.joint_min) {
      angle_[j] = params_.joint_min;
      if (velocity_[j] < 0.0) velocity_[j] = 0.0;
    } else if (angle_[j] > params_.joint_max) {
      angle_[j] = params_.joint_max;
      if (velocity_[j] > 0.0) velocity_[j] = 0.0;
    }
  }
  sync_kinematics();
}

std::array<double, 2> ArmModel::tip_position() const {
  return tip_position_for(angle_);
}

std::array<double, 2> ArmModel::tip_position_for(const std::vector<double>& angles) const {
  double x = 0.0, y = 0.0, cum = 0.0;
  for (std::size_t j = 0; j < params_.joints; ++j) {
    cum += angles[j];
    x += params_.link_length[j] * std::cos(cum);
    y += params_.link_length[j] * std::sin(cum);
  }
  return {x, y};
}

std::array<double, 2> ArmModel::tip_velocity() const {
  double vx = 0.0, vy = 0.0, cum = 0.0, rate = 0.0;
  for (std::size_t j = 0; j < params_.joints; ++j) {
    cum += angle_[j];
    rate += velocity_[j];
    vx += -params_.link_length[j] * std::sin(cum) * rate;
    vy += params_.link_length[j] * std::cos(cum) * rate;
  }
  return {vx, vy};
}

double ArmModel::mechanical_energy() const {
  double e = 0.0;
  for (std::size_t j = 0; j < params_.joints; ++j) {
    const double dev = angle_[j] - params_.rest_angle[j];
    e += 0.5 * params_.inertia * velocity_[j] * velocity_[j] +
         0.5 * params_.stiffness * dev * dev;
  }
  return e;
}

ReachEnv::ReachEnv(const ReachConfig& config)
    : config_(config), arm_(config.arm), excitation_(config.arm.muscles, 0.0) {
  if (config_.episode_steps == 0) {
    throw_error(ErrorKind::kConfiguration, "episode_steps must be positive");
  }
  if (config_.effort_weight < 0.0 || config_.reset_noise < 0.0) {
    throw_error(ErrorKind::kConfiguration, "reach weights must be nonnegative");
  }
}

std::vector<double> ReachEnv::reset(Rng& rng) {
  std::vector<double> start(config_.arm.joints);
  for (std::size_t j = 0; j < config_.arm.joints; ++j) {
    start[j] = config_.arm.rest_angle[j] +
               (config_.reset_noise > 0.0
                    ? rng.uniform(-config_.reset_noise, config_.reset_noise)
                    : 0.0);
  }
  arm_.reset(start);
  // Targets are fingertip positions of uniformly drawn joint configurations,
  // so every target is reachable by construction.
  std::vector<double> target_angles(config_.arm.joints);
  for (std::size_t j = 0; j < config_.arm.joints; ++j)
    target_angles[j] = rng.uniform(config_.arm.joint_min, config_.arm.joint_max);
  target_ = arm_.tip_position_for(target_angles);
  excitation_.assign(config_.arm.muscles, 0.0);
  steps_done_ = 0;
  episode_active_ = true;
  return observe();
}

StepResult ReachEnv::step(const std::vector<double>& action) {
  check_action(action, action_dim(), episode_active_);
  excitation_ = muscle_squash(action);
  arm_.step(excitation_);
  ++steps_done_;

  const auto tip = arm_.tip_position();
  const double dx = tip[0] - target_[0];
  const double dy = tip[1] - target_[1];
  const double dist = std::sqrt(dx * dx + dy * dy);

  StepResult result;
  result.reward = -dist - config_.effort_weight * effort_rms(action);
  result.distance = dist;
  result.done = steps_done_ >= config_.episode_steps;
  result.success = result.done && dist <= config_.success_radius;
  if (result.done) episode_active_ = false;
  result.observation = observe();
  return result;
}

std::vector<double> ReachEnv::observe() const {
  std::vector<double> obs;
  obs.reserve(observation_dim());
  arm_.append_muscle_observation(obs);
  return obs;
}

PendulumHoldEnv::PendulumHoldEnv(const PendulumHoldConfig& config)
    : config_(config), arm_(config.arm), excitation_(config.arm.muscles, 0.0) {
  if (config_.episode_steps == 0) {
    throw_error(ErrorKind::kConfiguration, "episode_steps must be positive");
  }
  if (config_.target_angle < config_.arm.joint_min ||
      config_.target_angle > config_.arm.joint_max) {
    throw_error(ErrorKind::kConfiguration, "target angle outside joint limits");
  }
}

std::vector<double> PendulumHoldEnv::reset(Rng& rng) {
  std::vector<double> start = config_.arm.rest_angle;
  if (config_.reset_noise > 0.0) {
    start[0] += rng.uniform(-config_.reset_noise, config_.reset_noise);
  }
  arm_.reset(start);
  excitation_.assign(config_.arm.muscles, 0.0);
  steps_done_ = 0;
  episode_active_ = true;
  std::vector<double> obs;
  arm_.append_muscle_observation(obs);
  return obs;
}

StepResult PendulumHoldEnv::step(const std::vector<double>& action) {
  check_action(action, action_dim(), episode_active_);
  excitation_ = muscle_squash(action);
  arm_.step(excitation_);
  ++steps_done_;

  const double err = std::fabs(arm_.angles()[0] - config_.target_angle);
  StepResult result;
  result.reward = -err - config_.effort_weight * effort_rms(action);
  result.distance = err;
  result.done = steps_done_ >= config_.episode_steps;
  result.success = result.done && err <= config_.success_angle;
  if (result.done) episode_active_ = false;
  result.observation.reserve(observation_dim());
  arm_.append_muscle_observation(result.observation);
  return result;
}

}  // namespace sarkit::envs
