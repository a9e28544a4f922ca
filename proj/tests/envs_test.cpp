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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "sarkit/envs/arm.hpp"
#include "sarkit/envs/factory.hpp"
#include "sarkit/envs/locomotion.hpp"
#include "sarkit/envs/muscle.hpp"
#include "sarkit/envs/reorient.hpp"
#include "sarkit/synergy.hpp"
#include "test_util.hpp"

using namespace sarkit;
using namespace sarkit::envs;

namespace {

// Runs `steps` zero-action steps and returns every step result.
std::vector<StepResult> run_zero_actions(Env& env, std::size_t steps) {
  std::vector<double> action(env.action_dim(), 0.0);
  std::vector<StepResult> results;
  for (std::size_t i = 0; i < steps; ++i) {
    results.push_back(env.step(action));
    if (results.back().done) break;
  }
  return results;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("envs") {

TEST_CASE("activation follows the exact first-order integral") {
  MuscleParams params;  // tau_rise 0.03, tau_fall 0.05

  // Rising step, closed-form oracle evaluated independently:
  // a' = u + (a - u)·exp(-dt/tau_rise).
  const double rise = activation_step(0.0, 1.0, 0.01, params);
  const double rise_oracle = 1.0 + (0.0 - 1.0) * std::exp(-0.01 / 0.03);
  CHECK(rise == doctest::Approx(rise_oracle).epsilon(1e-15));
  // The worked numeric value of that expression.
  CHECK(rise == doctest::Approx(0.2835).epsilon(2e-4));

  // Falling step uses the slower deactivation constant.
  const double fall = activation_step(1.0, 0.0, 0.01, params);
  CHECK(fall == doctest::Approx(std::exp(-0.01 / 0.05)).epsilon(1e-15));

  // Fixed point: already at the excitation level, nothing moves.
  CHECK(activation_step(0.4, 0.4, 0.01, params) == doctest::Approx(0.4));

  // Monotone approach: never overshoots the excitation.
  double a = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double next = activation_step(a, 0.8, 0.01, params);
    CHECK(next >= a);
    CHECK(next <= 0.8 + 1e-15);
    a = next;
  }
  CHECK(a == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("force-length factor is a clamped unit parabola") {
  CHECK(force_length_factor(1.0) == 1.0);
  CHECK(force_length_factor(1.5) == 0.0);
  CHECK(force_length_factor(0.5) == 0.0);
  CHECK(force_length_factor(2.0) == 0.0);   // clamped beyond the zero
  CHECK(force_length_factor(0.0) == 0.0);
  CHECK(force_length_factor(1.25) == doctest::Approx(0.75).epsilon(1e-15));
  // Symmetric about the rest length.
  for (double d : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    CHECK(force_length_factor(1.0 + d) ==
          doctest::Approx(force_length_factor(1.0 - d)).epsilon(1e-15));
  }
}

TEST_CASE("antagonist pairs cancel exactly at equal co-activation") {
  const Matrix routing = antagonist_routing(2, 6, 0.02);
  REQUIRE(routing.rows() == 2);
  REQUIRE(routing.cols() == 6);
  MuscleApparatus apparatus(routing, MuscleParams{});
  apparatus.reset();

  // At the rest pose every fibre has unit length; equal excitation then
  // yields equal forces, and the signed moment arms cancel in pairs.
  // Cancellation is exact up to contraction of the multiply-adds the
  // compiler may fuse; anything at rounding scale counts as zero.
  const std::vector<double> equal(6, 0.6);
  for (int i = 0; i < 20; ++i) apparatus.step_activation(equal, 0.01);
  const auto torques = apparatus.joint_torques();
  CHECK(std::fabs(torques[0]) < 1e-14);
  CHECK(std::fabs(torques[1]) < 1e-14);

  // Columns of a pair carry equal-magnitude, opposite-sign arms.
  for (std::size_t pair = 0; pair < 3; ++pair) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(routing(j, 2 * pair) == -routing(j, 2 * pair + 1));
    }
  }
}

TEST_CASE("zero action holds the rest pose") {
  ReachConfig config;  // reset_noise defaults to 0: reset lands exactly at rest
  ReachEnv env(config);
  Rng rng(3);
  env.reset(rng);
  const auto rest_tip = env.arm().tip_position();

  const auto results = run_zero_actions(env, config.episode_steps);
  REQUIRE(results.size() == config.episode_steps);
  const auto tip = env.arm().tip_position();
  CHECK(std::fabs(tip[0] - rest_tip[0]) < 1e-3);
  CHECK(std::fabs(tip[1] - rest_tip[1]) < 1e-3);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::fabs(env.arm().angles()[j] - config.arm.rest_angle[j]) < 1e-3);
  }
  for (const auto& r : results) {
    CHECK(std::isfinite(r.reward));
    CHECK(r.distance >= 0.0);
  }
  CHECK(results.back().done);
}

TEST_CASE("passive arm dissipates mechanical energy") {
  ArmParams params;
  ArmModel arm(params);
  arm.reset({params.rest_angle[0] + 0.3, params.rest_angle[1] - 0.2});

  const std::vector<double> slack(params.muscles, 0.0);
  double energy = arm.mechanical_energy();
  CHECK(energy > 0.0);
  for (int i = 0; i < 300; ++i) {
    arm.step(slack);
    const double next = arm.mechanical_energy();
    CHECK(next <= energy + 1e-9);
    energy = next;
  }
  // Damping has drained nearly everything by three seconds.
  CHECK(energy < 1e-4);
}

TEST_CASE("reach episodes are deterministic and targets reachable") {
  ReachConfig config;
  config.reset_noise = 0.1;
  ReachEnv a(config), b(config);
  Rng rng_a(11), rng_b(11);

  const auto obs_a = a.reset(rng_a);
  const auto obs_b = b.reset(rng_b);
  CHECK(bitwise_equal(obs_a, obs_b));

  // Targets come from forward kinematics of in-range joint angles, so they
  // always lie within the annulus the tip can reach.
  const double reach_max = config.arm.link_length[0] + config.arm.link_length[1];
  Rng target_rng(99);
  for (int i = 0; i < 50; ++i) {
    ReachEnv probe(config);
    Rng r(static_cast<std::uint64_t>(i) + 100);
    probe.reset(r);
    const auto& t = probe.target();
    CHECK(std::sqrt(t[0] * t[0] + t[1] * t[1]) <= reach_max + 1e-12);
  }

  // Identical seeds and identical action streams give bitwise-identical
  // trajectories.
  Rng action_rng(7);
  for (std::size_t i = 0; i < config.episode_steps; ++i) {
    std::vector<double> action(a.action_dim());
    for (double& x : action) x = action_rng.uniform(-1.0, 1.0);
    const auto ra = a.step(action);
    const auto rb = b.step(action);
    CHECK(bitwise_equal(ra.observation, rb.observation));
    CHECK(ra.reward == rb.reward);
    CHECK(ra.distance == rb.distance);
    CHECK(ra.done == rb.done);
  }
}

TEST_CASE("action validation raises typed errors") {
  ReachEnv env(ReachConfig{});
  std::vector<double> ok(env.action_dim(), 0.0);

  // Stepping before the first reset is a sequencing bug.
  CHECK(testutil::thrown_kind([&] { env.step(ok); }) == ErrorKind::kSequencing);

  Rng rng(1);
  env.reset(rng);
  std::vector<double> short_action(env.action_dim() - 1, 0.0);
  CHECK(testutil::thrown_kind([&] { env.step(short_action); }) == ErrorKind::kArgument);

  std::vector<double> nan_action = ok;
  nan_action[2] = std::nan("");
  CHECK(testutil::thrown_kind([&] { env.step(nan_action); }) == ErrorKind::kArgument);

  std::vector<double> big_action = ok;
  big_action[0] = 1.5;
  CHECK(testutil::thrown_kind([&] { env.step(big_action); }) == ErrorKind::kContract);

  // Boundary values are legal.
  std::vector<double> edge(env.action_dim(), 1.0);
  CHECK_NOTHROW(env.step(edge));

  // Run the episode out; stepping past done is sequencing again.
  while (!env.step(ok).done) {
  }
  CHECK(testutil::thrown_kind([&] { env.step(ok); }) == ErrorKind::kSequencing);
  CHECK_NOTHROW(env.reset(rng));
  CHECK_NOTHROW(env.step(ok));
}

TEST_CASE("observations expose four channels per muscle") {
  ReachEnv reach(ReachConfig{});
  CHECK(reach.observation_dim() == 24);
  CHECK(reach.action_dim() == 6);
  Rng rng(5);
  const auto obs = reach.reset(rng);
  REQUIRE(obs.size() == 24);
  // Layout: activations, lengths, velocities, forces. Fresh reset at the
  // rest pose: zero activation, unit length, zero velocity, zero force.
  for (std::size_t m = 0; m < 6; ++m) {
    CHECK(obs[m] == 0.0);
    CHECK(obs[6 + m] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(obs[12 + m] == 0.0);
    CHECK(obs[18 + m] == 0.0);
  }

  PendulumHoldEnv pendulum{PendulumHoldConfig{}};
  CHECK(pendulum.observation_dim() == 8);
  CHECK(pendulum.action_dim() == 2);

  ReorientConfig rc;
  ReorientEnv reorient(rc, make_object_set(ObjectDomain::kPretrain, 8, 0));
  CHECK(reorient.observation_dim() == 28);

  LocomotionConfig lc;
  LocomotionEnv walker(lc);
  CHECK(walker.observation_dim() == 4 * 16 + 7);
  CHECK(walker.action_dim() == 16);
}

TEST_CASE("pendulum hold is solvable from muscle-only observations") {
  PendulumHoldConfig config;
  PendulumHoldEnv env(config);
  Rng rng(17);
  env.reset(rng);

  // Reset noise must be visible in the observation (lengths shift away
  // from 1), otherwise the task would be partially observable.
  const auto obs = env.reset(rng);
  bool any_length_off = false;
  for (std::size_t m = 0; m < 2; ++m) {
    if (std::fabs(obs[2 + m] - 1.0) > 1e-6) any_length_off = true;
  }
  CHECK(any_length_off);

  // Saturating the flexor drives the angle toward positive territory.
  std::vector<double> flex = {1.0, -1.0};
  double angle_before = env.arm().angles()[0];
  for (int i = 0; i < 30; ++i) env.step(flex);
  CHECK(env.arm().angles()[0] > angle_before);
  CHECK(env.arm().angles()[0] > 0.3);
}

TEST_CASE("pretrain object set enumerates exactly eight distinct geometries") {
  const auto set = make_object_set(ObjectDomain::kPretrain, 8, 42);
  REQUIRE(set.size() == 8);

  // Independent oracle for the full table: two radii crossed with four
  // (friction class, density) pairs, inertia = ½·1500·density·r⁴ and
  // friction = class·(r/0.03). Compared sorted with a tolerance because the
  // oracle's r⁴ is evaluated differently from the implementation's.
  using Triple = std::tuple<double, double, double>;
  std::vector<Triple> expected;
  for (double radius : {0.025, 0.040}) {
    const double classes[4] = {4.0, 4.0, 8.0, 8.0};
    const double densities[4] = {0.7, 1.3, 0.7, 1.3};
    for (int k = 0; k < 4; ++k) {
      const double inertia = 0.5 * 1500.0 * densities[k] * std::pow(radius, 4);
      const double friction = classes[k] * (radius / 0.03);
      expected.push_back({radius, inertia, friction});
    }
  }
  std::sort(expected.begin(), expected.end());
  REQUIRE(std::adjacent_find(expected.begin(), expected.end()) == expected.end());

  auto collect_sorted = [](const std::vector<ObjectSpec>& objects) {
    std::set<Triple> unique;
    for (const auto& o : objects) unique.insert({o.radius, o.inertia, o.friction_gain});
    return std::vector<Triple>(unique.begin(), unique.end());
  };
  auto check_matches_table = [&](const std::vector<Triple>& got) {
    REQUIRE(got.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::get<0>(got[i]) == std::get<0>(expected[i]));
      CHECK(std::get<1>(got[i]) ==
            doctest::Approx(std::get<1>(expected[i])).epsilon(1e-14));
      CHECK(std::get<2>(got[i]) ==
            doctest::Approx(std::get<2>(expected[i])).epsilon(1e-14));
    }
  };

  check_matches_table(collect_sorted(set));
  for (const auto& o : set) {
    CHECK(o.domain == "pretrain");
    const double mag = std::fabs(o.target_angle) / 6.283185307179586;
    CHECK(mag >= 0.08);
    CHECK(mag <= 0.35);
  }

  // Larger sets cycle the same table; the geometry count stays at eight.
  check_matches_table(
      collect_sorted(make_object_set(ObjectDomain::kPretrain, 16, 42)));
}

TEST_CASE("domain sampling respects the radius intervals") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto spec = sample_object(ObjectDomain::kInDomain, rng);
    CHECK(spec.radius >= 0.020);
    CHECK(spec.radius <= 0.045);
    CHECK(spec.inertia > 0.0);
    CHECK(spec.friction_gain > 0.0);
  }
  bool saw_low = false, saw_high = false;
  for (int i = 0; i < 10000; ++i) {
    const auto spec = sample_object(ObjectDomain::kOutOfDomain, rng);
    const bool low = spec.radius >= 0.015 && spec.radius < 0.020;
    const bool high = spec.radius > 0.045 && spec.radius <= 0.050;
    CHECK((low || high));
    saw_low = saw_low || low;
    saw_high = saw_high || high;
  }
  CHECK(saw_low);
  CHECK(saw_high);
}

TEST_CASE("reorient: hands-off episodes neither touch nor drop") {
  ReorientConfig config;
  config.resample_target = false;
  auto objects = make_object_set(ObjectDomain::kPretrain, 8, 3);
  ReorientEnv env(config, objects);
  Rng rng(9);
  env.reset(rng);

  std::vector<double> zero(env.action_dim(), 0.0);
  std::size_t steps = 0;
  bool done = false;
  while (!done) {
    const auto r = env.step(zero);
    ++steps;
    CHECK_FALSE(env.in_contact());
    CHECK(std::isfinite(r.reward));
    done = r.done;
    if (done) {
      // The goal magnitude is bounded away from the success threshold, so a
      // do-nothing policy can never end solved.
      CHECK_FALSE(r.success);
      CHECK(r.distance >= 0.08 - 1e-12);
    }
  }
  CHECK(steps == config.episode_steps);
  CHECK(env.dial_angle() == 0.0);
}

TEST_CASE("reorient: losing an established grip ends the episode early") {
  ReorientConfig config;
  config.resample_target = false;
  // One oversized dial that overlaps the resting fingertip, so contact is
  // established immediately without any reaching policy.
  ObjectSpec big;
  big.radius = 0.06;
  big.inertia = 5e-4;
  big.friction_gain = 6.0;
  big.target_angle = 1.9;
  big.domain = "in";
  ReorientEnv env(config, {big});
  Rng rng(4);
  env.reset(rng);

  std::vector<double> hold(env.action_dim(), 0.0);
  env.step(hold);
  CHECK(env.in_contact());

  // Curl the arm hard: the fingertip sweeps away, the grip is lost, and
  // after the grace window the episode terminates as a drop.
  std::vector<double> curl = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  bool done = false;
  std::size_t steps = 1;
  double drop_step_reward = 0.0;
  while (!done && steps < config.episode_steps) {
    const auto r = env.step(curl);
    ++steps;
    done = r.done;
    drop_step_reward = r.reward;
  }
  CHECK(done);
  CHECK(steps < config.episode_steps);
  // The drop penalty dominates the final reward.
  CHECK(drop_step_reward < -config.w_drop + 1.0);
}

TEST_CASE("reorient: contact with a spinning policy moves the dial") {
  ReorientConfig config;
  config.resample_target = false;
  ObjectSpec big;
  big.radius = 0.06;
  big.inertia = 5e-4;
  big.friction_gain = 6.0;
  big.target_angle = 1.9;
  big.domain = "in";
  ReorientEnv env(config, {big});
  Rng rng(4);
  env.reset(rng);

  // Gentle asymmetric excitation rubs the fingertip along the rim.
  std::vector<double> rub = {0.4, -1.0, -0.2, -0.6, 0.0, -1.0};
  bool touched = false;
  for (std::size_t i = 0; i < config.episode_steps; ++i) {
    const auto r = env.step(rub);
    touched = touched || env.in_contact();
    if (r.done) break;
  }
  CHECK(touched);
  CHECK(env.dial_angle() != 0.0);
}

TEST_CASE("terrain generators honour their contracts") {
  const auto flat = make_terrain(TerrainKind::kFlat, 0);
  for (double h : flat.heights) CHECK(h == 0.0);

  // Stairs: flat before the first riser, then exact multiples of the rise
  // at every tread centre.
  const auto stairs = make_terrain(TerrainKind::kStairs, 0);
  CHECK(stairs.height_at(0.0) == 0.0);
  CHECK(stairs.height_at(2.9) == 0.0);
  for (int k = 1; k <= 20; ++k) {
    const double tread_mid = 3.0 + (static_cast<double>(k) - 0.5) * 1.0;
    CHECK(stairs.height_at(tread_mid) ==
          doctest::Approx(0.07 * k).epsilon(1e-12));
  }

  // Slope: linear beyond the break point.
  const auto slope = make_terrain(TerrainKind::kSlope, 0);
  CHECK(slope.height_at(1.0) == 0.0);
  CHECK(slope.height_at(10.0) == doctest::Approx(0.08 * 7.0).epsilon(1e-9));
  CHECK(slope.height_at(50.0) == doctest::Approx(0.08 * 47.0).epsilon(1e-9));

  // Uneven: bounded noise, flat start, deterministic per seed.
  const auto uneven_a = make_terrain(TerrainKind::kUneven, 12);
  const auto uneven_b = make_terrain(TerrainKind::kUneven, 12);
  const auto uneven_c = make_terrain(TerrainKind::kUneven, 13);
  CHECK(uneven_a.heights == uneven_b.heights);
  CHECK(uneven_a.heights != uneven_c.heights);
  CHECK(uneven_a.height_at(0.0) == 0.0);
  double max_abs = 0.0;
  for (double h : uneven_a.heights) max_abs = std::max(max_abs, std::fabs(h));
  CHECK(max_abs <= 0.035 + 1e-12);
  CHECK(max_abs > 0.0);

  // Hilly: bounded by the sum of the component amplitudes, flat start.
  const auto hilly = make_terrain(TerrainKind::kHilly, 3);
  CHECK(hilly.height_at(1.0) == 0.0);
  for (double h : hilly.heights) CHECK(std::fabs(h) <= 0.1 + 1e-12);
}

TEST_CASE("locomotion: reset settles above the ground and steps stay finite") {
  LocomotionConfig config;
  LocomotionEnv env(config);
  Rng rng(21);
  const auto obs = env.reset(rng);
  REQUIRE(obs.size() == env.observation_dim());
  for (double x : obs) CHECK(std::isfinite(x));
  CHECK(env.com_height_above_terrain() > 0.0);

  std::vector<double> zero(env.action_dim(), 0.0);
  std::size_t steps = 0;
  for (; steps < 30; ++steps) {
    const auto r = env.step(zero);
    CHECK(std::isfinite(r.reward));
    for (double x : r.observation) CHECK(std::isfinite(x));
    if (r.done) break;
  }
  // Standing start should survive at least a brief settling period.
  CHECK(steps >= 10);
}

TEST_CASE("locomotion: trajectories are reproducible across instances") {
  LocomotionConfig config;
  config.terrain = TerrainKind::kUneven;
  config.terrain_seed = 5;
  LocomotionEnv a(config), b(config);
  Rng ra(33), rb(33);
  CHECK(bitwise_equal(a.reset(ra), b.reset(rb)));

  Rng action_rng(8);
  for (int i = 0; i < 40; ++i) {
    std::vector<double> action(a.action_dim());
    for (double& x : action) x = action_rng.uniform(-1.0, 1.0);
    const auto sa = a.step(action);
    const auto sb = b.step(action);
    CHECK(bitwise_equal(sa.observation, sb.observation));
    CHECK(sa.reward == sb.reward);
    if (sa.done) break;
  }
}

TEST_CASE("factory builds every env and rejects bad configs") {
  for (const std::string name :
       {"reach", "pendulum_hold", "reorient", "locomotion"}) {
    const auto config = default_env_config(name);
    auto env = make_env(config);
    CHECK(env->name() == name);
    Rng rng(1);
    const auto obs = env->reset(rng);
    CHECK(obs.size() == env->observation_dim());
  }

  CHECK(make_env({{"name", "reach"}})->observation_dim() == 24);

  // Overrides are honoured.
  auto env = make_env({{"name", "reach"}, {"episode_steps", 7}});
  Rng rng(2);
  env->reset(rng);
  const auto results = run_zero_actions(*env, 100);
  CHECK(results.size() == 7);
  CHECK(results.back().done);

  using nlohmann::json;
  CHECK(testutil::thrown_kind([] { make_env(json{{"name", "flying"}}); }) ==
        ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          make_env(json{{"name", "reach"}, {"whoops", 1}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          make_env(json{{"name", "reach"}, {"muscles", -4}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] {
          make_env(json{{"name", "reach"}, {"episode_steps", "fifty"}});
        }) == ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] { make_env(json::array()); }) ==
        ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] { make_env(json{{"muscles", 6}}); }) ==
        ErrorKind::kConfiguration);
  CHECK(testutil::thrown_kind([] { default_env_config("hover"); }) ==
        ErrorKind::kConfiguration);

  // Every defaults object round-trips through the factory unchanged: each
  // key it mentions is an accepted key.
  for (const std::string name :
       {"reach", "pendulum_hold", "reorient", "locomotion"}) {
    CHECK_NOTHROW(make_env(default_env_config(name)));
  }
}

TEST_CASE("squashed actions land strictly inside the excitation range") {
  // The action-to-excitation map pins the centre and compresses the ends.
  CHECK(muscle_squash(0.5) == 0.5);
  CHECK(muscle_squash(1.0) == doctest::Approx(0.92414181997875655).epsilon(1e-15));
  CHECK(muscle_squash(-1.0) ==
        doctest::Approx(5.527786369235996e-4).epsilon(1e-12));
  for (double a : {-1.0, -0.5, 0.0, 0.25, 0.9, 1.0}) {
    const double e = muscle_squash(a);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
  }
}

}  // TEST_SUITE
