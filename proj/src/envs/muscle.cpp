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

#include "sarkit/envs/muscle.hpp"

#include <cmath>

namespace sarkit::envs {

double force_length_factor(double length) {
  const double dev = (length - 1.0) / 0.5;
  return std::max(0.0, 1.0 - dev * dev);
}

double activation_step(double activation, double excitation, double dt,
                       const MuscleParams& params) {
  const double tau = excitation > activation ? params.tau_rise : params.tau_fall;
  return excitation + (activation - excitation) * std::exp(-dt / tau);
}

MuscleApparatus::MuscleApparatus(Matrix moment_arm, MuscleParams params)
    : moment_arm_(std::move(moment_arm)), params_(params) {
  if (moment_arm_.rows() == 0 || moment_arm_.cols() == 0) {
    throw_error(ErrorKind::kConfiguration, "moment arm matrix must be nonempty");
  }
  if (!all_finite(moment_arm_)) {
    throw_error(ErrorKind::kConfiguration, "moment arm matrix has non-finite entries");
  }
  if (params_.tau_rise <= 0.0 || params_.tau_fall <= 0.0 ||
      params_.max_force <= 0.0 || params_.length_ref <= 0.0) {
    throw_error(ErrorKind::kConfiguration, "muscle parameters must be positive");
  }
  muscles_.resize(moment_arm_.cols());
}

void MuscleApparatus::reset() {
  for (auto& m : muscles_) m = MuscleState{};
}

void MuscleApparatus::step_activation(const std::vector<double>& excitation, double dt) {
  if (excitation.size() != muscles_.size()) {
    throw_error(ErrorKind::kArgument, "excitation length does not match muscle count");
  }
  for (std::size_t i = 0; i < muscles_.size(); ++i) {
    const double u = std::clamp(excitation[i], 0.0, 1.0);
    muscles_[i].activation = activation_step(muscles_[i].activation, u, dt, params_);
    muscles_[i].force = muscles_[i].activation * force_length_factor(muscles_[i].length);
  }
}

void MuscleApparatus::set_kinematics(const std::vector<double>& joint_offset,
                                     const std::vector<double>& joint_velocity) {
  if (joint_offset.size() != joint_count() || joint_velocity.size() != joint_count()) {
    throw_error(ErrorKind::kArgument, "kinematics length does not match joint count");
  }
  for (std::size_t i = 0; i < muscles_.size(); ++i) {
    double excursion = 0.0, rate = 0.0;
    for (std::size_t j = 0; j < joint_count(); ++j) {
      excursion += moment_arm_(j, i) * joint_offset[j];
      rate += moment_arm_(j, i) * joint_velocity[j];
    }
    muscles_[i].length = 1.0 - excursion / params_.length_ref;
    muscles_[i].velocity = -rate / params_.length_ref;
    muscles_[i].force = muscles_[i].activation * force_length_factor(muscles_[i].length);
  }
}

std::vector<double> MuscleApparatus::joint_torques() const {
  std::vector<double> torque(joint_count(), 0.0);
  for (std::size_t j = 0; j < joint_count(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < muscles_.size(); ++i)
      acc += moment_arm_(j, i) * muscles_[i].force;
    torque[j] = acc * params_.max_force;
  }
  return torque;
}

void MuscleApparatus::append_observation(std::vector<double>& obs) const {
  for (const auto& m : muscles_) obs.push_back(m.activation);
  for (const auto& m : muscles_) obs.push_back(m.length);
  for (const auto& m : muscles_) obs.push_back(m.velocity);
  for (const auto& m : muscles_) obs.push_back(m.force);
}

Matrix antagonist_routing(std::size_t joint_count, std::size_t muscle_count,
                          double base_arm) {
  if (joint_count == 0) {
    throw_error(ErrorKind::kConfiguration, "routing needs at least one joint");
  }
  if (muscle_count < 2 || muscle_count % 2 != 0) {
    throw_error(ErrorKind::kConfiguration,
                "muscle count must be even and at least 2, got " +
                    std::to_string(muscle_count));
  }
  if (!(base_arm > 0.0)) {
    throw_error(ErrorKind::kConfiguration, "base moment arm must be positive");
  }
  // Groups: one per joint, plus one two-joint group when there are exactly
  // two joints (the classic biarticular routing).
  const std::size_t groups = joint_count == 2 ? 3 : joint_count;
  Matrix arm(joint_count, muscle_count);
  const std::size_t pairs = muscle_count / 2;
  for (std::size_t pair = 0; pair < pairs; ++pair) {
    const std::size_t group = pair % groups;
    // Successive pairs on the same group differ in arm length, so the
    // routing matrix never contains duplicate columns.
    const double scale = 1.0 + 0.15 * static_cast<double>(pair / groups);
    const double r = base_arm * scale;
    const std::size_t flexor = 2 * pair;
    const std::size_t extensor = 2 * pair + 1;
    if (group < joint_count) {
      arm(group, flexor) = r;
      arm(group, extensor) = -r;
    } else {
      // Two-joint muscle: full arm at the proximal joint, 70% at the distal.
      arm(0, flexor) = r;
      arm(1, flexor) = 0.7 * r;
      arm(0, extensor) = -r;
      arm(1, extensor) = -0.7 * r;
    }
  }
  return arm;
}

}  // namespace sarkit::envs
