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

#ifndef SARKIT_ENVS_MUSCLE_HPP_
#define SARKIT_ENVS_MUSCLE_HPP_

#include <cstddef>
#include <vector>

#include "sarkit/matrix.hpp"

namespace sarkit::envs {

// First-order activation state of one muscle-like actuator plus the
// kinematic quantities exposed to policies.
struct MuscleState {
  double activation = 0.0;  // [0, 1]
  double length = 1.0;      // normalized; 1 at the rest pose
  double velocity = 0.0;    // normalized length per second
  double force = 0.0;       // activation × force-length factor, in [0, 1]
};

struct MuscleParams {
  double tau_rise = 0.03;   // s, activation time constant when excitation > activation
  double tau_fall = 0.05;   // s, deactivation time constant
  double max_force = 40.0;  // N, peak isometric force
  double length_ref = 0.08; // m of fibre excursion mapped to one unit of length
};

// Clamped parabola peaking at the rest length: 1 − ((l−1)/0.5)², floored at 0.
double force_length_factor(double length);

// Exact one-step integral of τ ȧ = u − a over dt:
// a' = u + (a − u)·exp(−dt/τ), with τ chosen by the sign of (u − a).
double activation_step(double activation, double excitation, double dt,
                       const MuscleParams& params);

// A bundle of muscles routed over a set of joints by a signed moment-arm
// matrix (joints × muscles, metres). Positive entries mean the muscle
// shortens as the joint angle grows.
class MuscleApparatus {
 public:
  MuscleApparatus(Matrix moment_arm, MuscleParams params);

  std::size_t joint_count() const { return moment_arm_.rows(); }
  std::size_t muscle_count() const { return moment_arm_.cols(); }
  const std::vector<MuscleState>& muscles() const { return muscles_; }
  const MuscleParams& params() const { return params_; }

  // Back to rest: zero activation, unit length, zero velocity and force.
  void reset();

  // Advances activations one step from elementwise excitations in [0, 1].
  void step_activation(const std::vector<double>& excitation, double dt);

  // Recomputes lengths, velocities, and forces from joint offsets
  // (angle − rest angle) and joint velocities.
  void set_kinematics(const std::vector<double>& joint_offset,
                      const std::vector<double>& joint_velocity);

  // τ_j = Σ_i moment_arm(j,i) · max_force · force_i. Muscles only pull:
  // force_i ≥ 0 and direction comes entirely from the moment arm sign.
  std::vector<double> joint_torques() const;

  // Appends [all activations, all lengths, all velocities, all forces].
  void append_observation(std::vector<double>& obs) const;

 private:
  Matrix moment_arm_;
  MuscleParams params_;
  std::vector<MuscleState> muscles_;
};

// Signed moment-arm matrix for antagonist muscle pairs distributed
// cyclically over joint groups. For a two-joint arm the groups are
// {joint 0}, {joint 1}, and {both} (a two-joint muscle); a one-joint
// chain has a single group. Later pairs in the same group get slightly
// larger arms so no two pairs are redundant. muscle_count must be even
// and at least 2·(number of groups served) — at minimum one pair.
Matrix antagonist_routing(std::size_t joint_count, std::size_t muscle_count,
                          double base_arm);

}  // namespace sarkit::envs

#endif  // SARKIT_ENVS_MUSCLE_HPP_
