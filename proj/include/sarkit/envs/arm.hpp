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

#ifndef SARKIT_ENVS_ARM_HPP_
#define SARKIT_ENVS_ARM_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include "sarkit/envs/env.hpp"
#include "sarkit/envs/muscle.hpp"

namespace sarkit::envs {

// Planar serial chain (one- or two-joint) driven by antagonist muscle pairs,
// with passive spring-damper joints and no gravity. Integration is
// semi-implicit Euler at a fixed dt.
struct ArmParams {
  std::size_t joints = 2;
  std::size_t muscles = 6;  // even; ≥ 2 per joint
  double dt = 0.01;
  std::vector<double> link_length = {0.12, 0.12};  // m
  double inertia = 0.02;    // kg·m² per joint
  double damping = 0.06;    // N·m·s/rad
  double stiffness = 0.8;   // N·m/rad toward the rest pose
  std::vector<double> rest_angle = {0.6, 0.9};  // rad
  double joint_min = -0.4;  // rad
  double joint_max = 2.4;   // rad
  double base_arm = 0.02;   // m
  MuscleParams muscle;
};

class ArmModel {
 public:
  explicit ArmModel(const ArmParams& params);

  void reset(const std::vector<double>& angles);
  // One step from muscle excitations plus an optional external force (N)
  // applied at the fingertip.
  void step(const std::vector<double>& excitation,
            const std::array<double, 2>& tip_force = {0.0, 0.0});

  const std::vector<double>& angles() const { return angle_; }
  const std::vector<double>& velocities() const { return velocity_; }
  const MuscleApparatus& apparatus() const { return apparatus_; }
  const ArmParams& params() const { return params_; }

  std::array<double, 2> tip_position() const;
  std::array<double, 2> tip_velocity() const;
  std::array<double, 2> tip_position_for(const std::vector<double>& angles) const;

  // Kinetic plus passive spring energy (no gravity term exists).
  double mechanical_energy() const;

  void append_muscle_observation(std::vector<double>& obs) const {
    apparatus_.append_observation(obs);
  }

 private:
  void sync_kinematics();

  ArmParams params_;
  MuscleApparatus apparatus_;
  std::vector<double> angle_;
  std::vector<double> velocity_;
};

// Fingertip reaching toward an episode-fixed target point. The observation
// is muscle state only (4 entries per muscle), so play-phase behaviour is
// shaped by dynamics rather than by target knowledge.
struct ReachConfig {
  ArmParams arm;
  std::size_t episode_steps = 50;
  double effort_weight = 0.05;
  double reset_noise = 0.0;      // rad around the rest pose
  double success_radius = 0.02;  // m
};

class ReachEnv : public Env {
 public:
  explicit ReachEnv(const ReachConfig& config);

  std::string name() const override { return "reach"; }
  std::size_t observation_dim() const override { return 4 * config_.arm.muscles; }
  std::size_t action_dim() const override { return config_.arm.muscles; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const std::vector<double>& action) override;
  const std::vector<double>& last_excitation() const override { return excitation_; }

  const std::array<double, 2>& target() const { return target_; }
  const ArmModel& arm() const { return arm_; }

 private:
  std::vector<double> observe() const;

  ReachConfig config_;
  ArmModel arm_;
  std::array<double, 2> target_ = {0.0, 0.0};
  std::vector<double> excitation_;
  std::size_t steps_done_ = 0;
  bool episode_active_ = false;
};

// One-joint chain holding a fixed configured angle against the passive
// spring. The target never changes, so the muscle-only observation is
// sufficient to solve the task.
struct PendulumHoldConfig {
  ArmParams arm;  // forced to 1 joint / 2 muscles in the constructor defaults
  std::size_t episode_steps = 60;
  double effort_weight = 0.05;
  double reset_noise = 0.3;     // rad
  double target_angle = 0.5;    // rad from the rest pose
  double success_angle = 0.05;  // rad

  PendulumHoldConfig() {
    arm.joints = 1;
    arm.muscles = 2;
    arm.link_length = {0.12};
    arm.rest_angle = {0.0};
    arm.joint_min = -1.2;
    arm.joint_max = 1.2;
  }
};

class PendulumHoldEnv : public Env {
 public:
  explicit PendulumHoldEnv(const PendulumHoldConfig& config);

  std::string name() const override { return "pendulum_hold"; }
  std::size_t observation_dim() const override { return 4 * config_.arm.muscles; }
  std::size_t action_dim() const override { return config_.arm.muscles; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const std::vector<double>& action) override;
  const std::vector<double>& last_excitation() const override { return excitation_; }

  const ArmModel& arm() const { return arm_; }

 private:
  PendulumHoldConfig config_;
  ArmModel arm_;
  std::vector<double> excitation_;
  std::size_t steps_done_ = 0;
  bool episode_active_ = false;
};

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_ARM_HPP_
