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

#include "sarkit/envs/reorient.hpp"

#include <cmath>

#include "sarkit/synergy.hpp"

namespace sarkit::envs {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Scaling laws shared by every domain: a solid disc of fixed density
// (inertia ∝ r⁴) whose traction grows linearly with radius.
double inertia_for_radius(double radius, double density_scale) {
  const double r2 = radius * radius;
  return 0.5 * 1500.0 * density_scale * r2 * r2;
}

double friction_for_radius(double radius, double friction_class) {
  return friction_class * (radius / 0.03);
}

double sample_target(Rng& rng, double min_frac, double max_frac) {
  const double magnitude = rng.uniform(min_frac, max_frac) * kTwoPi;
  return rng.uniform() < 0.5 ? -magnitude : magnitude;
}

double effort_rms(const std::vector<double>& action) {
  double acc = 0.0;
  for (double a : action) acc += a * a;
  return std::sqrt(acc / static_cast<double>(action.size()));
}

// The fixed pretrain geometry table: two radii × four (friction, density)
// classes, eight entries in total. The target angle is still drawn per call.
ObjectSpec pretrain_object(std::size_t index, Rng& rng) {
  static const double radii[2] = {0.025, 0.040};
  static const double friction_class[4] = {4.0, 4.0, 8.0, 8.0};
  static const double density_scale[4] = {0.7, 1.3, 0.7, 1.3};
  ObjectSpec spec;
  spec.domain = object_domain_name(ObjectDomain::kPretrain);
  spec.radius = radii[index / 4];
  spec.friction_gain = friction_for_radius(spec.radius, friction_class[index % 4]);
  spec.inertia = inertia_for_radius(spec.radius, density_scale[index % 4]);
  spec.target_angle = sample_target(rng, 0.08, 0.35);
  return spec;
}

}  // namespace

const char* object_domain_name(ObjectDomain domain) {
  switch (domain) {
    case ObjectDomain::kPretrain: return "pretrain";
    case ObjectDomain::kInDomain: return "in";
    case ObjectDomain::kOutOfDomain: return "out";
  }
  return "unknown";
}

ObjectSpec sample_object(ObjectDomain domain, Rng& rng) {
  ObjectSpec spec;
  spec.domain = object_domain_name(domain);
  switch (domain) {
    case ObjectDomain::kPretrain:
      return pretrain_object(static_cast<std::size_t>(rng.integer(8)), rng);
    case ObjectDomain::kInDomain: {
      spec.radius = rng.uniform(0.020, 0.045);
      spec.friction_gain = friction_for_radius(spec.radius, 6.0);
      spec.inertia = inertia_for_radius(spec.radius, 1.0);
      break;
    }
    case ObjectDomain::kOutOfDomain: {
      // Strictly outside [0.020, 0.045]: low branch [0.015, 0.020), high
      // branch (0.045, 0.050].
      if (rng.uniform() < 0.5) {
        spec.radius = rng.uniform(0.015, 0.020);
      } else {
        spec.radius = 0.050 - 0.005 * rng.uniform();
      }
      spec.friction_gain = friction_for_radius(spec.radius, 6.0);
      spec.inertia = inertia_for_radius(spec.radius, 1.0);
      break;
    }
  }
  spec.target_angle = sample_target(rng, 0.08, 0.35);
  return spec;
}

std::vector<ObjectSpec> make_object_set(ObjectDomain domain, std::size_t count,
                                        std::uint64_t seed) {
  if (count == 0) throw_error(ErrorKind::kArgument, "object set count must be positive");
  Rng rng(seed);
  std::vector<ObjectSpec> set;
  set.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Pretrain sets enumerate the fixed table instead of sampling it, so
    // count = 8 yields each geometry exactly once.
    if (domain == ObjectDomain::kPretrain) {
      set.push_back(pretrain_object(i % 8, rng));
    } else {
      set.push_back(sample_object(domain, rng));
    }
  }
  return set;
}

ReorientEnv::ReorientEnv(const ReorientConfig& config, std::vector<ObjectSpec> objects)
    : config_(config),
      arm_(config.arm),
      objects_(std::move(objects)),
      excitation_(config.arm.muscles, 0.0) {
  if (config_.arm.joints != 2) {
    throw_error(ErrorKind::kConfiguration, "reorient needs the two-joint arm");
  }
  if (objects_.empty()) {
    throw_error(ErrorKind::kConfiguration, "reorient needs a nonempty object set");
  }
  for (const auto& o : objects_) {
    if (!(o.radius > 0.0) || !(o.inertia > 0.0) || !(o.friction_gain > 0.0)) {
      throw_error(ErrorKind::kConfiguration, "object spec fields must be positive");
    }
  }
  if (config_.episode_steps == 0) {
    throw_error(ErrorKind::kConfiguration, "episode_steps must be positive");
  }
  const auto rest_tip = arm_.tip_position_for(config_.arm.rest_angle);
  dial_center_ = {rest_tip[0] + config_.dial_offset[0],
                  rest_tip[1] + config_.dial_offset[1]};
}

std::vector<double> ReorientEnv::reset(Rng& rng) {
  object_ = objects_[rng.integer(objects_.size())];
  target_ = config_.resample_target
                ? sample_target(rng, config_.target_min, config_.target_max)
                : object_.target_angle;
  arm_.reset(config_.arm.rest_angle);
  dial_angle_ = 0.0;
  dial_speed_ = 0.0;
  excitation_.assign(config_.arm.muscles, 0.0);
  steps_done_ = 0;
  episode_active_ = true;
  touched_ = false;
  contact_now_ = false;
  lost_contact_streak_ = 0;
  return observe();
}

double ReorientEnv::wrapped_error_fraction() const {
  const double diff = dial_angle_ - target_;
  return std::fabs(std::atan2(std::sin(diff), std::cos(diff))) / kTwoPi;
}

StepResult ReorientEnv::step(const std::vector<double>& action) {
  check_action(action, action_dim(), episode_active_);
  excitation_ = muscle_squash(action);

  // Contact force from the pre-step geometry, applied to both bodies.
  const auto tip = arm_.tip_position();
  const auto tipv = arm_.tip_velocity();
  const double rx = tip[0] - dial_center_[0];
  const double ry = tip[1] - dial_center_[1];
  const double dist = std::sqrt(rx * rx + ry * ry);
  std::array<double, 2> tip_force = {0.0, 0.0};
  double dial_torque = -config_.dial_damping_rate * object_.inertia * dial_speed_ -
                       config_.return_stiffness * (object_.radius / 0.03) * dial_angle_;
  if (dist > 1e-9) {
    const double nx = rx / dist, ny = ry / dist;
    const double penetration = (object_.radius + config_.tip_radius) - dist;
    if (penetration > 0.0) {
      const double v_normal = tipv[0] * nx + tipv[1] * ny;
      const double normal_force = std::max(
          0.0, config_.contact_stiffness * penetration - config_.contact_damping * v_normal);
      // Tangent is the counterclockwise direction around the dial; slip is
      // fingertip surface speed relative to the dial surface.
      const double tx = -ny, ty = nx;
      const double slip = (tipv[0] * tx + tipv[1] * ty) - dial_speed_ * object_.radius;
      double traction = object_.friction_gain * normal_force * slip;
      const double cap = config_.traction_cap * normal_force;
      traction = std::clamp(traction, -cap, cap);
      tip_force = {normal_force * nx - traction * tx,
                   normal_force * ny - traction * ty};
      dial_torque += object_.radius * traction;
    }
  }

  arm_.step(excitation_, tip_force);
  dial_speed_ += config_.arm.dt * dial_torque / object_.inertia;
  dial_angle_ += config_.arm.dt * dial_speed_;
  ++steps_done_;

  // Post-step geometry drives reward, contact bookkeeping, and termination.
  const auto tip2 = arm_.tip_position();
  const double gx = tip2[0] - dial_center_[0];
  const double gy = tip2[1] - dial_center_[1];
  const double gap =
      std::sqrt(gx * gx + gy * gy) - (object_.radius + config_.tip_radius);
  const double pos_err = std::max(0.0, gap);
  contact_now_ = gap <= 0.0;
  if (contact_now_) {
    touched_ = true;
    lost_contact_streak_ = 0;
  } else if (touched_) {
    ++lost_contact_streak_;
  }
  // Contact must be lost for strictly more than drop_steps consecutive steps
  // (counted only once the dial has been touched) to count as a drop.
  const bool dropped = touched_ && lost_contact_streak_ > config_.drop_steps;

  const double ang_err = wrapped_error_fraction();
  const bool loose = pos_err < config_.loose_pos && ang_err < config_.loose_ang;
  const bool tight = pos_err < config_.tight_pos && ang_err < config_.tight_ang;

  StepResult result;
  result.reward = -config_.w_pos * pos_err - config_.w_ang * ang_err -
                  config_.w_effort * effort_rms(action) +
                  (loose ? config_.w_loose : 0.0) + (tight ? config_.w_tight : 0.0) -
                  (dropped ? config_.w_drop : 0.0);
  result.distance = ang_err;
  result.done = dropped || steps_done_ >= config_.episode_steps;
  result.terminal = dropped;
  // Success demands holding the dial within tolerance through the full
  // episode; an early drop is always a failure even if the angle happened to
  // match when contact was lost.
  result.success =
      !dropped && steps_done_ >= config_.episode_steps && ang_err <= config_.tight_ang;
  if (result.done) episode_active_ = false;
  result.observation = observe();
  return result;
}

std::vector<double> ReorientEnv::observe() const {
  std::vector<double> obs;
  obs.reserve(observation_dim());
  arm_.append_muscle_observation(obs);
  obs.push_back(dial_angle_);
  obs.push_back(dial_speed_);
  obs.push_back(target_);
  obs.push_back(wrapped_error_fraction());
  return obs;
}

}  // namespace sarkit::envs
