# Copyright 2026 The sarkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the Python bindings: every exposed operation is called
once with real inputs; numerical depth lives in the C++ test suites."""

import json
import math
import os

import numpy as np
import pytest

import sarkit

TINY_CONFIG = {
    "name": "py-smoke",
    "play_env": {"name": "pendulum_hold"},
    "train_env": {"name": "pendulum_hold"},
    "eval_envs": {"in": {"name": "pendulum_hold"}},
    "play_steps": 240,
    "train_steps": 360,
    "seeds": [1],
    "log_episodes": 3,
    "stochastic_log": True,
    "eval_episodes": 2,
    # Learning threshold above the whole budget: pipeline mechanics only.
    "sac": {"hidden": [8, 8], "start_learning": 100000, "batch_size": 16},
}


def test_muscle_squash_reference_points():
    assert sarkit.muscle_squash(0.5) == 0.5
    assert sarkit.muscle_squash(1.0) == pytest.approx(0.92414181997875655, abs=1e-15)
    vec = sarkit.muscle_squash([-1.0, 0.5, 1.0])
    assert vec[0] == pytest.approx(5.527786369235996e-4, abs=1e-18)
    assert vec[1] == 0.5


def test_fit_decode_and_blend():
    rng = np.random.default_rng(7)
    latents = rng.uniform(0.0, 1.0, size=(400, 2))
    mixing = np.array([[0.9, 0.1, 0.5, 0.2], [0.1, 0.8, 0.3, 0.6]])
    samples = np.clip(latents @ mixing, 0.0, 1.0)

    sar = sarkit.fit_sar(samples, n_syn=2, seed=3)
    assert sar.n_syn == 2
    assert sar.actuator_dim == 4
    assert sar.decode_matrix.shape == (4, 2)
    # Each coordination pattern is max-abs normalized.
    assert np.abs(sar.decode_matrix).max(axis=0) == pytest.approx([1.0, 1.0])
    # Variance ordering is descending.
    assert sar.component_variance == sorted(sar.component_variance, reverse=True)

    decoded = sarkit.decode(sar, [0.5, -0.2])
    assert len(decoded) == 4
    assert all(-1.0 <= value <= 1.0 for value in decoded)

    direct = [0.1, 0.2, 0.3, 0.4]
    assert sarkit.blend(decoded, direct, 1.0) == decoded
    assert sarkit.blend(decoded, direct, 0.0) == direct

    shares = sarkit.synergy_contributions(np.array([[0.5, 0.5], [1.0, 0.0]]))
    assert sum(shares) == pytest.approx(1.0, abs=1e-12)
    assert shares[0] == pytest.approx(0.75)

    default_n = sarkit.fit_sar(samples, seed=3)  # n_syn=0 -> half the actuators
    assert default_n.n_syn == 2

    control = sarkit.random_representation(4, 2, seed=11)
    assert control.decode_matrix.shape == (4, 2)
    subset = sarkit.select_synergies(sar, 1, most=True)
    assert subset.n_syn == 1


def test_activation_log_round_trip(tmp_path):
    samples = np.random.default_rng(3).uniform(0.1, 0.9, size=(30, 2))
    path = str(tmp_path / "log.csv")
    sarkit.save_activation_log(path, samples)
    back = sarkit.load_activation_log(path)
    assert back.shape == (30, 2)
    assert np.allclose(back, samples)


def test_env_step_contract():
    env = sarkit.make_env({"name": "pendulum_hold"})
    assert env.name == "pendulum_hold"
    assert env.action_dim == 2
    obs = env.reset(sarkit.Rng(5))
    assert len(obs) == env.observation_dim

    step = env.step([0.1, -0.1])
    assert len(step.observation) == env.observation_dim
    assert math.isfinite(step.reward)
    assert isinstance(step.done, bool)
    excitation = env.last_excitation()
    assert len(excitation) == env.action_dim
    assert all(0.0 < value < 1.0 for value in excitation)

    with pytest.raises(RuntimeError, match="argument|contract"):
        env.step([2.0, 0.0])  # actions live in [-1, 1]

    # Same seed, same trajectory.
    replay = sarkit.make_env({"name": "pendulum_hold"})
    assert replay.reset(sarkit.Rng(5)) == obs


def test_agent_act_train_evaluate_checkpoint():
    env = sarkit.make_env({"name": "pendulum_hold"})
    obs = env.reset(sarkit.Rng(5))
    agent = sarkit.SacAgent(
        env.observation_dim, env.action_dim,
        {"hidden": [8, 8], "start_learning": 100000, "batch_size": 16}, seed=1,
    )
    action = agent.act(obs)
    assert len(action) == env.action_dim
    assert all(-1.0 <= a <= 1.0 for a in action)
    draw = agent.act_stochastic(obs, sarkit.Rng(2))
    assert len(draw) == env.action_dim

    head = sarkit.PolicyHead.plain(env.action_dim)
    episodes = sarkit.train(env, head, agent, 240, seed=9)
    assert len(episodes) == 4  # 60-step episodes
    assert episodes[-1]["step"] == 240

    stats = sarkit.evaluate(env, head, agent, episodes=2, seed=4)
    assert math.isfinite(stats.mean_return)
    assert 0.0 <= stats.success_rate <= 1.0

    clone = sarkit.SacAgent.from_dict(agent.to_dict())
    assert clone.act(obs) == agent.act(obs)


def test_policy_head_modes():
    sar = sarkit.random_representation(4, 2, seed=11)
    blended = sarkit.PolicyHead.blended(sar, 0.66)
    assert blended.raw_dim == 2 + 4
    assert blended.env_dim == 4
    assert blended.blend_weight == pytest.approx(0.66)

    raw = [0.3, -0.2, 0.1, 0.1, 0.1, 0.1]
    action = blended.to_env_action(raw)
    expected = [
        0.66 * s + 0.34 * o
        for s, o in zip(sarkit.decode(sar, raw[:2]), raw[2:])
    ]
    assert action == pytest.approx(expected, abs=1e-12)

    pure = sarkit.PolicyHead.pure_sar(sar)
    assert pure.raw_dim == 2
    assert pure.to_env_action([0.3, -0.2]) == sarkit.decode(sar, [0.3, -0.2])


def test_pipeline_commands(tmp_path):
    out = str(tmp_path / "run")
    sarkit.commands.play(TINY_CONFIG, out)
    assert os.path.exists(os.path.join(out, "logs", "play_seed1.csv"))

    sarkit.commands.fit_sar(TINY_CONFIG, out)
    sar_path = os.path.join(out, "sar", "sar_seed1.json")
    loaded = sarkit.SynergyRepresentation.load(sar_path)
    assert loaded.actuator_dim == 2

    sarkit.commands.train(TINY_CONFIG, out, ["sar-rl", "rl-e2e"])
    metrics = os.path.join(out, "metrics")
    assert os.path.exists(os.path.join(metrics, "sar-rl_seed1.csv"))

    sarkit.commands.evaluate(TINY_CONFIG, out, ["sar-rl"])
    assert os.path.exists(os.path.join(metrics, "zero_shot_sar-rl_seed1.csv"))

    sarkit.commands.export_metrics(metrics, out)
    assert os.path.exists(os.path.join(out, "curves.csv"))
    assert os.path.exists(os.path.join(out, "plots", "curves_return.svg"))

    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert manifest["config"]["play_steps"] == TINY_CONFIG["play_steps"]
    # The recorded hash is canonical over the echoed effective config.
    assert manifest["config_hash"] == sarkit.config_hash(manifest["config"])

    with pytest.raises(RuntimeError, match="missing required artifact"):
        sarkit.commands.train(TINY_CONFIG, str(tmp_path / "fresh"), ["sar-rl"])


def test_errors_carry_their_kind():
    with pytest.raises(RuntimeError, match="configuration"):
        sarkit.make_env({"name": "teleport"})
    with pytest.raises(RuntimeError, match="argument"):
        sarkit.fit_sar(np.full((40, 3), np.nan))
