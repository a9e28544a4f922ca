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

#ifndef SARKIT_ENVS_LOCOMOTION_HPP_
#define SARKIT_ENVS_LOCOMOTION_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sarkit/envs/env.hpp"
#include "sarkit/envs/muscle.hpp"

namespace sarkit::envs {

enum class TerrainKind { kFlat, kHilly, kStairs, kUneven, kSlope };

const char* terrain_kind_name(TerrainKind kind);
TerrainKind terrain_kind_from_string(const std::string& name);

// Heightfield on a uniform grid. Every generator leaves the first stretch
// flat so episodes start on level ground.
struct TerrainProfile {
  TerrainKind kind = TerrainKind::kFlat;
  double pitch = 0.1;    // m between samples
  double origin = -4.0;  // x of heights.front()
  std::vector<double> heights;

  // Linear interpolation; clamps beyond either end.
  double height_at(double x) const;
};

TerrainProfile make_terrain(TerrainKind kind, std::uint64_t seed,
                            double length = 120.0, double pitch = 0.1);

// Sagittal-plane biped: a rigid torso under gravity carries two massless
// three-joint legs (hip, knee, ankle) with virtual rotational inertia at
// each joint. Muscles torque the joints; heel and toe points take
// spring-damper ground contact, transmitted to the torso as if the legs
// were rigid at that instant.
struct LocomotionConfig {
  std::size_t muscles = 16;  // divisible by 4; ≥ 12 (three joint pairs per leg)
  double dt = 0.01;
  std::size_t episode_steps = 1000;
  TerrainKind terrain = TerrainKind::kFlat;
  std::uint64_t terrain_seed = 0;

  double torso_mass = 10.0;      // kg
  double torso_inertia = 0.5;    // kg·m²
  double com_height = 0.3;       // m, COM above the hip along the torso
  double thigh = 0.40, shank = 0.40;           // m
  double foot_back = -0.04, foot_forward = 0.14, foot_drop = 0.06;  // m

  std::array<double, 3> joint_inertia = {0.10, 0.06, 0.03};  // hip, knee, ankle
  double joint_damping = 0.8;    // N·m·s/rad
  double limit_stiffness = 60.0; // N·m/rad beyond a limit
  std::array<double, 2> hip_range = {-0.9, 1.2};
  std::array<double, 2> knee_range = {-2.0, 0.05};
  std::array<double, 2> ankle_range = {-0.8, 0.8};
  std::array<double, 3> rest_pose = {0.05, -0.10, 0.0};  // hip, knee, ankle

  double ground_stiffness = 8000.0;  // N/m
  double ground_damping = 200.0;     // N·s/m
  double ground_friction = 400.0;    // N·s/m tangential
  double friction_mu = 1.0;          // Coulomb cap

  double max_force = 600.0;   // N per muscle
  double length_ref = 0.15;   // m
  double base_arm = 0.05;     // m

  double gait_frequency = 1.25;  // Hz
  double gait_amplitude = 0.35;  // rad

  // Reward weights: forward velocity, cyclic hip tracking, uprightness,
  // joint-limit penalty, effort.
  double w_velocity = 2.0, w_cyclic = 0.5, w_upright = 0.5;
  double w_joint = 0.5, w_effort = 0.1;

  double fall_height = 0.65;      // m of COM above terrain; below = fall
  double fall_pitch = 1.0;        // rad
  double probe_ahead = 0.25;      // m ahead of each foot
  double success_distance = 2.0;  // m
  double reset_noise = 0.02;      // rad on each joint
};

class LocomotionEnv : public Env {
 public:
  explicit LocomotionEnv(const LocomotionConfig& config);

  std::string name() const override { return "locomotion"; }
  std::size_t observation_dim() const override { return 4 * config_.muscles + 7; }
  std::size_t action_dim() const override { return config_.muscles; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const std::vector<double>& action) override;
  const std::vector<double>& last_excitation() const override { return excitation_; }

  const TerrainProfile& terrain() const { return terrain_; }
  double forward_distance() const { return com_[0] - start_x_; }
  double com_height_above_terrain() const;
  bool fallen() const { return fallen_; }

 private:
  struct LegPoints {
    std::array<double, 2> knee, ankle, heel, toe;
    std::array<double, 2> v_heel, v_toe;
  };

  LegPoints leg_points(std::size_t leg) const;
  std::array<double, 2> hip_point() const;
  std::array<double, 2> hip_velocity() const;
  std::vector<double> observe() const;
  double limit_overshoot(std::size_t joint_index) const;

  LocomotionConfig config_;
  TerrainProfile terrain_;
  MuscleApparatus apparatus_;

  // Torso state: COM position, velocity, pitch, pitch rate.
  std::array<double, 2> com_ = {0.0, 0.0};
  std::array<double, 2> com_vel_ = {0.0, 0.0};
  double pitch_ = 0.0;
  double pitch_rate_ = 0.0;
  // Leg joints: [leg][hip, knee, ankle].
  std::array<std::array<double, 3>, 2> q_{};
  std::array<std::array<double, 3>, 2> qd_{};

  std::vector<double> excitation_;
  double start_x_ = 0.0;
  std::size_t steps_done_ = 0;
  bool episode_active_ = false;
  bool fallen_ = false;
};

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_LOCOMOTION_HPP_
