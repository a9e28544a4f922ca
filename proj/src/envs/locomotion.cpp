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

#include "sarkit/envs/locomotion.hpp"

#include <cmath>

#include "sarkit/synergy.hpp"

namespace sarkit::envs {

namespace {

constexpr double kGravity = 9.81;
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::array<double, 2> perp(const std::array<double, 2>& v) { return {-v[1], v[0]}; }

std::array<double, 2> rotate(const std::array<double, 2>& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {v[0] * c - v[1] * s, v[0] * s + v[1] * c};
}

double effort_rms(const std::vector<double>& action) {
  double acc = 0.0;
  for (double a : action) acc += a * a;
  return std::sqrt(acc / static_cast<double>(action.size()));
}

double smoothstep(double edge0, double edge1, double x) {
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Moment arms for two legs of three joints each (columns are muscles,
// rows are [leg0 hip, knee, ankle, leg1 hip, knee, ankle]). Muscle pairs on
// each leg cycle through hip, knee, ankle, and a hip-knee two-joint group.
Matrix leg_routing(std::size_t muscles, double base_arm) {
  if (muscles < 12 || muscles % 4 != 0) {
    throw_error(ErrorKind::kConfiguration,
                "locomotion needs a muscle count divisible by 4 and >= 12");
  }
  Matrix arm(6, muscles);
  const std::size_t per_leg_pairs = muscles / 4;
  const double joint_arm[3] = {base_arm, 0.8 * base_arm, 0.6 * base_arm};
  std::size_t col = 0;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    for (std::size_t pair = 0; pair < per_leg_pairs; ++pair) {
      const std::size_t group = pair % 4;
      const double scale = 1.0 + 0.15 * static_cast<double>(pair / 4);
      const std::size_t base_row = 3 * leg;
      for (int sign = 1; sign >= -1; sign -= 2) {
        if (group < 3) {
          arm(base_row + group, col) = sign * scale * joint_arm[group];
        } else {
          arm(base_row + 0, col) = sign * scale * joint_arm[0];
          arm(base_row + 1, col) = sign * scale * 0.7 * joint_arm[1];
        }
        ++col;
      }
    }
  }
  return arm;
}

}  // namespace

const char* terrain_kind_name(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kFlat: return "flat";
    case TerrainKind::kHilly: return "hilly";
    case TerrainKind::kStairs: return "stairs";
    case TerrainKind::kUneven: return "uneven";
    case TerrainKind::kSlope: return "slope";
  }
  return "unknown";
}

TerrainKind terrain_kind_from_string(const std::string& name) {
  if (name == "flat") return TerrainKind::kFlat;
  if (name == "hilly") return TerrainKind::kHilly;
  if (name == "stairs") return TerrainKind::kStairs;
  if (name == "uneven") return TerrainKind::kUneven;
  if (name == "slope") return TerrainKind::kSlope;
  throw_error(ErrorKind::kConfiguration, "unknown terrain kind: " + name);
}

double TerrainProfile::height_at(double x) const {
  if (heights.empty()) throw_error(ErrorKind::kConfiguration, "terrain has no samples");
  const double u = (x - origin) / pitch;
  if (u <= 0.0) return heights.front();
  const double last = static_cast<double>(heights.size() - 1);
  if (u >= last) return heights.back();
  const std::size_t i = static_cast<std::size_t>(u);
  const double frac = u - static_cast<double>(i);
  return heights[i] + frac * (heights[i + 1] - heights[i]);
}

TerrainProfile make_terrain(TerrainKind kind, std::uint64_t seed, double length,
                            double pitch) {
  if (!(pitch > 0.0) || !(length > 10.0 * pitch)) {
    throw_error(ErrorKind::kConfiguration, "terrain length/pitch out of range");
  }
  TerrainProfile profile;
  profile.kind = kind;
  profile.pitch = pitch;
  profile.origin = -4.0;
  const std::size_t count = static_cast<std::size_t>(length / pitch) + 1;
  profile.heights.assign(count, 0.0);
  Rng rng(Rng::split_mix64(seed ^ 0x7e22a1u) ^ static_cast<std::uint64_t>(kind));

  switch (kind) {
    case TerrainKind::kFlat:
      break;
    case TerrainKind::kHilly: {
      // Band-limited rolling hills: three incommensurate sinusoids faded in
      // after the flat start region.
      const double amp[3] = {0.05, 0.03, 0.02};
      const double wavelength[3] = {11.0, 5.3, 3.1};
      double phase[3];
      for (double& p : phase) p = rng.uniform(0.0, kTwoPi);
      for (std::size_t i = 0; i < count; ++i) {
        const double x = profile.origin + pitch * static_cast<double>(i);
        double h = 0.0;
        for (int k = 0; k < 3; ++k)
          h += amp[k] * std::sin(kTwoPi * x / wavelength[k] + phase[k]);
        profile.heights[i] = h * smoothstep(2.0, 6.0, x);
      }
      break;
    }
    case TerrainKind::kStairs: {
      // Uniform rises: every tread is exactly `rise` above the previous one.
      const double rise = 0.07, run = 1.0, start = 3.0;
      for (std::size_t i = 0; i < count; ++i) {
        const double x = profile.origin + pitch * static_cast<double>(i);
        if (x > start) {
          profile.heights[i] = rise * std::floor((x - start) / run + 1.0);
        }
      }
      break;
    }
    case TerrainKind::kUneven: {
      const double amp = 0.035;
      std::vector<double> noise(count);
      for (double& h : noise) h = rng.uniform(-amp, amp);
      // Two smoothing passes keep |h| ≤ amp while removing grid-scale spikes.
      for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> smoothed(count);
        for (std::size_t i = 0; i < count; ++i) {
          const double left = noise[i == 0 ? 0 : i - 1];
          const double right = noise[i + 1 == count ? i : i + 1];
          smoothed[i] = 0.25 * left + 0.5 * noise[i] + 0.25 * right;
        }
        noise.swap(smoothed);
      }
      for (std::size_t i = 0; i < count; ++i) {
        const double x = profile.origin + pitch * static_cast<double>(i);
        profile.heights[i] = noise[i] * smoothstep(2.0, 4.0, x);
      }
      break;
    }
    case TerrainKind::kSlope: {
      const double grade = 0.08, start = 3.0;
      for (std::size_t i = 0; i < count; ++i) {
        const double x = profile.origin + pitch * static_cast<double>(i);
        profile.heights[i] = x > start ? grade * (x - start) : 0.0;
      }
      break;
    }
  }
  return profile;
}

LocomotionEnv::LocomotionEnv(const LocomotionConfig& config)
    : config_(config),
      terrain_(make_terrain(config.terrain, config.terrain_seed)),
      apparatus_(leg_routing(config.muscles, config.base_arm),
                 MuscleParams{0.03, 0.05, config.max_force, config.length_ref}),
      excitation_(config.muscles, 0.0) {
  if (!(config_.dt > 0.0) || config_.episode_steps == 0) {
    throw_error(ErrorKind::kConfiguration, "locomotion time parameters out of range");
  }
  if (!(config_.torso_mass > 0.0) || !(config_.torso_inertia > 0.0)) {
    throw_error(ErrorKind::kConfiguration, "torso mass and inertia must be positive");
  }
}

std::array<double, 2> LocomotionEnv::hip_point() const {
  const auto offset = rotate({0.0, -config_.com_height}, pitch_);
  return {com_[0] + offset[0], com_[1] + offset[1]};
}

std::array<double, 2> LocomotionEnv::hip_velocity() const {
  const auto hip = hip_point();
  const std::array<double, 2> r = {hip[0] - com_[0], hip[1] - com_[1]};
  const auto pr = perp(r);
  return {com_vel_[0] + pitch_rate_ * pr[0], com_vel_[1] + pitch_rate_ * pr[1]};
}

LocomotionEnv::LegPoints LocomotionEnv::leg_points(std::size_t leg) const {
  LegPoints pts;
  const auto hip = hip_point();
  const auto hip_v = hip_velocity();
  const double a1 = pitch_ + q_[leg][0];
  const double a2 = a1 + q_[leg][1];
  const double a3 = a2 + q_[leg][2];
  pts.knee = {hip[0] + config_.thigh * std::sin(a1), hip[1] - config_.thigh * std::cos(a1)};
  pts.ankle = {pts.knee[0] + config_.shank * std::sin(a2),
               pts.knee[1] - config_.shank * std::cos(a2)};
  const auto heel_off = rotate({config_.foot_back, -config_.foot_drop}, a3);
  const auto toe_off = rotate({config_.foot_forward, -config_.foot_drop}, a3);
  pts.heel = {pts.ankle[0] + heel_off[0], pts.ankle[1] + heel_off[1]};
  pts.toe = {pts.ankle[0] + toe_off[0], pts.ankle[1] + toe_off[1]};

  auto point_velocity = [&](const std::array<double, 2>& p) {
    // Telescoped chain rates: the whole leg turns with (pitch rate + hip
    // rate) about the hip, plus knee and ankle rates about their joints.
    std::array<double, 2> v = hip_v;
    const auto r_hip = perp({p[0] - hip[0], p[1] - hip[1]});
    const auto r_knee = perp({p[0] - pts.knee[0], p[1] - pts.knee[1]});
    const auto r_ankle = perp({p[0] - pts.ankle[0], p[1] - pts.ankle[1]});
    const double w_hip = pitch_rate_ + qd_[leg][0];
    v[0] += w_hip * r_hip[0] + qd_[leg][1] * r_knee[0] + qd_[leg][2] * r_ankle[0];
    v[1] += w_hip * r_hip[1] + qd_[leg][1] * r_knee[1] + qd_[leg][2] * r_ankle[1];
    return v;
  };
  pts.v_heel = point_velocity(pts.heel);
  pts.v_toe = point_velocity(pts.toe);
  return pts;
}

double LocomotionEnv::limit_overshoot(std::size_t joint_index) const {
  const std::size_t leg = joint_index / 3;
  const std::size_t j = joint_index % 3;
  const std::array<double, 2>& range =
      j == 0 ? config_.hip_range : (j == 1 ? config_.knee_range : config_.ankle_range);
  const double q = q_[leg][j];
  if (q < range[0]) return range[0] - q;
  if (q > range[1]) return q - range[1];
  return 0.0;
}

std::vector<double> LocomotionEnv::reset(Rng& rng) {
  for (std::size_t leg = 0; leg < 2; ++leg)
    for (std::size_t j = 0; j < 3; ++j) {
      q_[leg][j] = config_.rest_pose[j] +
                   (config_.reset_noise > 0.0
                        ? rng.uniform(-config_.reset_noise, config_.reset_noise)
                        : 0.0);
      qd_[leg][j] = 0.0;
    }
  pitch_ = 0.0;
  pitch_rate_ = 0.0;
  com_vel_ = {0.0, 0.0};
  // Drop the torso so the lowest foot point rests 1 mm above the ground.
  com_ = {0.0, 0.0};
  double lowest = 1e9;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const auto pts = leg_points(leg);
    lowest = std::min({lowest, pts.heel[1], pts.toe[1]});
  }
  com_[1] = terrain_.height_at(0.0) + 0.001 - lowest;
  start_x_ = com_[0];
  apparatus_.reset();
  excitation_.assign(config_.muscles, 0.0);
  steps_done_ = 0;
  episode_active_ = true;
  fallen_ = false;
  return observe();
}

double LocomotionEnv::com_height_above_terrain() const {
  return com_[1] - terrain_.height_at(com_[0]);
}

StepResult LocomotionEnv::step(const std::vector<double>& action) {
  check_action(action, action_dim(), episode_active_);
  excitation_ = muscle_squash(action);
  apparatus_.step_activation(excitation_, config_.dt);
  std::vector<double> joint_torque = apparatus_.joint_torques();  // 6 entries

  // Ground contact at heel and toe of each leg.
  std::array<double, 2> force_total = {0.0, -config_.torso_mass * kGravity};
  double torso_torque = 0.0;
  const auto hip = hip_point();
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const auto pts = leg_points(leg);
    const std::array<const std::array<double, 2>*, 2> points = {&pts.heel, &pts.toe};
    const std::array<const std::array<double, 2>*, 2> vels = {&pts.v_heel, &pts.v_toe};
    for (int c = 0; c < 2; ++c) {
      const auto& p = *points[c];
      const auto& v = *vels[c];
      const double pen = terrain_.height_at(p[0]) - p[1];
      if (pen <= 0.0) continue;
      const double normal = std::max(
          0.0, config_.ground_stiffness * pen - config_.ground_damping * v[1]);
      double tangential = -config_.ground_friction * v[0];
      const double cap = config_.friction_mu * normal;
      tangential = std::clamp(tangential, -cap, cap);
      const std::array<double, 2> f = {tangential, normal};

      // Transmit to the torso as force plus moment about the COM.
      force_total[0] += f[0];
      force_total[1] += f[1];
      torso_torque += (p[0] - com_[0]) * f[1] - (p[1] - com_[1]) * f[0];

      // And to the leg joints through the point Jacobian.
      const auto j_hip = perp({p[0] - hip[0], p[1] - hip[1]});
      const auto j_knee = perp({p[0] - pts.knee[0], p[1] - pts.knee[1]});
      const auto j_ankle = perp({p[0] - pts.ankle[0], p[1] - pts.ankle[1]});
      joint_torque[3 * leg + 0] += j_hip[0] * f[0] + j_hip[1] * f[1];
      joint_torque[3 * leg + 1] += j_knee[0] * f[0] + j_knee[1] * f[1];
      joint_torque[3 * leg + 2] += j_ankle[0] * f[0] + j_ankle[1] * f[1];
    }
  }

  // Torso integration (semi-implicit Euler).
  com_vel_[0] += config_.dt * force_total[0] / config_.torso_mass;
  com_vel_[1] += config_.dt * force_total[1] / config_.torso_mass;
  pitch_rate_ += config_.dt * torso_torque / config_.torso_inertia;
  com_[0] += config_.dt * com_vel_[0];
  com_[1] += config_.dt * com_vel_[1];
  pitch_ += config_.dt * pitch_rate_;

  // Leg joints with damping, soft limits, and a hard safety clamp.
  for (std::size_t leg = 0; leg < 2; ++leg) {
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t idx = 3 * leg + j;
      const std::array<double, 2>& range =
          j == 0 ? config_.hip_range : (j == 1 ? config_.knee_range : config_.ankle_range);
      double tau = joint_torque[idx] - config_.joint_damping * qd_[leg][j];
      if (q_[leg][j] > range[1]) tau -= config_.limit_stiffness * (q_[leg][j] - range[1]);
      if (q_[leg][j] < range[0]) tau -= config_.limit_stiffness * (q_[leg][j] - range[0]);
      qd_[leg][j] += config_.dt * tau / config_.joint_inertia[j];
      qd_[leg][j] = std::clamp(qd_[leg][j], -30.0, 30.0);
      q_[leg][j] += config_.dt * qd_[leg][j];
      const double hard_lo = range[0] - 0.4, hard_hi = range[1] + 0.4;
      if (q_[leg][j] < hard_lo) {
        q_[leg][j] = hard_lo;
        if (qd_[leg][j] < 0.0) qd_[leg][j] = 0.0;
      } else if (q_[leg][j] > hard_hi) {
        q_[leg][j] = hard_hi;
        if (qd_[leg][j] > 0.0) qd_[leg][j] = 0.0;
      }
    }
  }

  // Refresh muscle kinematics from the new joint state.
  std::vector<double> offsets(6), rates(6);
  for (std::size_t leg = 0; leg < 2; ++leg)
    for (std::size_t j = 0; j < 3; ++j) {
      offsets[3 * leg + j] = q_[leg][j] - config_.rest_pose[j];
      rates[3 * leg + j] = qd_[leg][j];
    }
  apparatus_.set_kinematics(offsets, rates);

  ++steps_done_;
  const double t = static_cast<double>(steps_done_) * config_.dt;

  // Reward terms.
  double cyclic = 0.0;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const double ref = config_.gait_amplitude *
                       std::sin(kTwoPi * config_.gait_frequency * t +
                                (leg == 0 ? 0.0 : 3.14159265358979324));
    const double dev = q_[leg][0] - ref;
    cyclic += dev * dev;
  }
  cyclic *= 0.5;
  double joint_pen = 0.0;
  for (std::size_t idx = 0; idx < 6; ++idx) {
    const double over = limit_overshoot(idx);
    joint_pen += over * over;
  }
  joint_pen /= 6.0;

  StepResult result;
  result.reward = config_.w_velocity * com_vel_[0] - config_.w_cyclic * cyclic +
                  config_.w_upright * std::cos(pitch_) - config_.w_joint * joint_pen -
                  config_.w_effort * effort_rms(action);
  result.distance = forward_distance();

  fallen_ = com_height_above_terrain() < config_.fall_height ||
            std::fabs(pitch_) > config_.fall_pitch;
  result.done = fallen_ || steps_done_ >= config_.episode_steps;
  result.terminal = fallen_;
  result.success = result.done && result.distance >= config_.success_distance;
  if (result.done) episode_active_ = false;
  result.observation = observe();
  return result;
}

std::vector<double> LocomotionEnv::observe() const {
  std::vector<double> obs;
  obs.reserve(observation_dim());
  apparatus_.append_observation(obs);
  obs.push_back(com_height_above_terrain());
  obs.push_back(pitch_);
  obs.push_back(com_vel_[0]);
  obs.push_back(com_vel_[1]);
  obs.push_back(pitch_rate_);
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const auto pts = leg_points(leg);
    obs.push_back(terrain_.height_at(pts.toe[0] + config_.probe_ahead) -
                  terrain_.height_at(pts.toe[0]));
  }
  return obs;
}

}  // namespace sarkit::envs
