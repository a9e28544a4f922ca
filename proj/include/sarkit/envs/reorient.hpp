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

#ifndef SARKIT_ENVS_REORIENT_HPP_
#define SARKIT_ENVS_REORIENT_HPP_

#include <array>
#include <string>
#include <vector>

#include "sarkit/envs/arm.hpp"
#include "sarkit/envs/env.hpp"

namespace sarkit::envs {

// A free-spinning dial the fingertip can rub against. Inertia and traction
// scale with radius, so radius is the primary difficulty axis.
struct ObjectSpec {
  double radius = 0.03;         // m
  double inertia = 0.0;         // kg·m²
  double friction_gain = 0.0;   // N·s/m of traction per N of normal force
  double target_angle = 0.0;    // rad, goal orientation for the episode
  std::string domain;           // "pretrain" | "in" | "out"
};

enum class ObjectDomain { kPretrain, kInDomain, kOutOfDomain };

const char* object_domain_name(ObjectDomain domain);

// Pretrain: one of exactly 8 fixed (radius, inertia, friction) combinations
// — two radii crossed with four dynamics classes. In-domain: radius uniform
// in [0.020, 0.045]. Out-of-domain: radius strictly outside that interval,
// in [0.015, 0.020) ∪ (0.045, 0.050]. Inertia and friction always scale
// with radius. The target angle is drawn fresh for every sample.
ObjectSpec sample_object(ObjectDomain domain, Rng& rng);

// Reproducible object list for a dataset seed.
std::vector<ObjectSpec> make_object_set(ObjectDomain domain, std::size_t count,
                                        std::uint64_t seed);

struct ReorientConfig {
  ArmParams arm;
  std::size_t episode_steps = 50;
  double tip_radius = 0.01;               // m
  std::array<double, 2> dial_offset = {0.065, 0.0};  // centre relative to rest tip
  double contact_stiffness = 400.0;       // N/m
  double contact_damping = 5.0;           // N·s/m
  double traction_cap = 1.5;              // |tangential| ≤ cap · normal
  double dial_damping_rate = 1.5;         // 1/s, spin-down rate × inertia
  // Return spring pulling the dial back to zero, N·m/rad at the reference
  // 0.03 m radius and scaling linearly with radius. Holding any goal angle
  // therefore needs sustained traction; an abandoned dial winds back.
  double return_stiffness = 0.012;
  std::size_t drop_steps = 10;            // lost-contact steps before a drop
  bool resample_target = true;            // fresh goal each episode
  // Thresholds: position gaps in metres, angles as fraction of a turn.
  double loose_pos = 0.02, loose_ang = 0.10;
  double tight_pos = 0.005, tight_ang = 0.05;
  // Reward weights: position error, angle error, drop, effort, loose bonus,
  // tight bonus.
  double w_pos = 1.0, w_ang = 1.0, w_drop = 2.0, w_effort = 0.05;
  double w_loose = 2.0, w_tight = 4.0;
  // Goal magnitude as a fraction of a turn; bounded away from the success
  // threshold so a do-nothing policy can never start solved.
  double target_min = 0.08, target_max = 0.35;
};

// Fingertip spins the dial to a goal orientation. Observation: muscle state
// (4 per muscle) followed by [dial angle, dial speed, goal angle, wrapped
// error fraction].
class ReorientEnv : public Env {
 public:
  ReorientEnv(const ReorientConfig& config, std::vector<ObjectSpec> objects);

  std::string name() const override { return "reorient"; }
  std::size_t observation_dim() const override { return 4 * config_.arm.muscles + 4; }
  std::size_t action_dim() const override { return config_.arm.muscles; }
  std::vector<double> reset(Rng& rng) override;
  StepResult step(const std::vector<double>& action) override;
  const std::vector<double>& last_excitation() const override { return excitation_; }

  const ObjectSpec& current_object() const { return object_; }
  double dial_angle() const { return dial_angle_; }
  const std::array<double, 2>& dial_center() const { return dial_center_; }
  bool in_contact() const { return contact_now_; }

 private:
  std::vector<double> observe() const;
  double wrapped_error_fraction() const;

  ReorientConfig config_;
  ArmModel arm_;
  std::vector<ObjectSpec> objects_;
  std::array<double, 2> dial_center_;

  ObjectSpec object_;
  double dial_angle_ = 0.0;
  double dial_speed_ = 0.0;
  double target_ = 0.0;
  std::vector<double> excitation_;
  std::size_t steps_done_ = 0;
  bool episode_active_ = false;
  bool touched_ = false;
  bool contact_now_ = false;
  std::size_t lost_contact_streak_ = 0;
};

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_REORIENT_HPP_
