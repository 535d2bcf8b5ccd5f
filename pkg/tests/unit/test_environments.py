from __future__ import annotations

import numpy as np
import pytest

from src.environments import (
    CliffCorridor,
    Reach2D,
    available_environments,
    episode_reward,
    expert_policy,
    make_env,
    random_policy,
    run_episode,
)
from src.environments.abstract import Environment
from src.environments.cliff_corridor import CRUISE_THRUST
from src.environments.reach2d import CONTROL_COST, fingertip
from src.exceptions import ContractError, ShapeError

REACH2D_OBS_DIM = 8
CLIFF_OBS_DIM = 6
SUPERIORITY_EPISODES = 100
SUPERIORITY_MARGIN = 5.0
EXPERT_CHECK_RESETS = 100


def test_registry_names() -> None:
    assert available_environments() == ["cliffcorridor", "reach2d"]
    assert isinstance(make_env("reach2d"), Reach2D)
    with pytest.raises(ValueError, match="Unknown environment"):
        make_env("hopper")


def test_environments_satisfy_protocol(reach2d: Reach2D, cliff: CliffCorridor) -> None:
    assert isinstance(reach2d, Environment)
    assert isinstance(cliff, Environment)


def test_observation_lengths(reach2d: Reach2D, cliff: CliffCorridor, rng: np.random.Generator) -> None:
    assert reach2d.reset(rng).shape == (REACH2D_OBS_DIM,)
    assert cliff.reset(rng).shape == (CLIFF_OBS_DIM,)
    assert reach2d.spec.obs_dim == REACH2D_OBS_DIM
    assert cliff.spec.obs_dim == CLIFF_OBS_DIM


def test_reset_is_deterministic_per_seed(reach2d: Reach2D) -> None:
    first = reach2d.reset(np.random.default_rng(7))
    second = reach2d.reset(np.random.default_rng(7))
    np.testing.assert_array_equal(first, second)


def test_different_seeds_draw_different_targets(reach2d: Reach2D) -> None:
    first = reach2d.reset(np.random.default_rng(1))[6:]
    second = reach2d.reset(np.random.default_rng(2))[6:]
    assert not np.array_equal(first, second)


def test_horizon_override(rng: np.random.Generator) -> None:
    env = make_env("reach2d", horizon=7)
    assert run_episode(env, expert_policy(env), rng).length == 7


def test_zero_action_keeps_joints_and_costs_distance(reach2d: Reach2D, rng: np.random.Generator) -> None:
    reach2d.reset(rng)
    state = reach2d.get_state()
    result = reach2d.step(np.zeros(2))
    after = reach2d.get_state()
    np.testing.assert_array_equal(after[:4], state[:4])
    distance = np.linalg.norm(fingertip(state[:2]) - state[4:6])
    assert result.reward == pytest.approx(-distance)


def test_control_penalty(reach2d: Reach2D, rng: np.random.Generator) -> None:
    reach2d.reset(rng)
    state = reach2d.get_state()
    action = np.array([0.5, -0.5])
    result = reach2d.step(action)
    after = reach2d.get_state()
    distance = np.linalg.norm(fingertip(after[:2]) - state[4:6])
    assert result.reward == pytest.approx(-distance - CONTROL_COST * 0.5)


@pytest.mark.parametrize("name", ["reach2d", "cliffcorridor"])
def test_out_of_bounds_action_equals_clamped_action(name: str) -> None:
    a, b = make_env(name), make_env(name)
    a.reset(np.random.default_rng(3))
    b.reset(np.random.default_rng(3))
    wild = np.array([5.0, -7.0])
    np.testing.assert_array_equal(a.step(wild).observation, b.step(np.clip(wild, -1, 1)).observation)
    np.testing.assert_array_equal(a.get_state(), b.get_state())


def test_step_after_done_is_a_contract_error(rng: np.random.Generator) -> None:
    env = make_env("reach2d", horizon=1)
    env.reset(rng)
    assert env.step(np.zeros(2)).done
    with pytest.raises(ContractError):
        env.step(np.zeros(2))
    with pytest.raises(ContractError):
        env.expert_action()


def test_wrong_action_shape(reach2d: Reach2D, rng: np.random.Generator) -> None:
    reach2d.reset(rng)
    with pytest.raises(ShapeError):
        reach2d.step(np.zeros(3))


def test_reach2d_expert_is_zero_on_target(reach2d: Reach2D) -> None:
    q = np.array([0.3, -1.1])
    tip = fingertip(q)
    reach2d.set_state(np.concatenate([q, np.zeros(2), tip]))
    np.testing.assert_allclose(reach2d.expert_action(), np.zeros(2), atol=1e-12)


def test_cliff_expert_cruises_when_centered(cliff: CliffCorridor) -> None:
    cliff.set_state(np.array([0.0, 0.0, 1.0, 1.0, 0.0]))
    steer, thrust = cliff.expert_action()
    assert steer == pytest.approx(0.0)
    assert thrust == pytest.approx(CRUISE_THRUST)


def test_cliff_expert_never_falls(cliff: CliffCorridor) -> None:
    rng = np.random.default_rng(0)
    for _ in range(EXPERT_CHECK_RESETS):
        episode = run_episode(cliff, expert_policy(cliff), rng)
        assert not episode.failed
        assert episode.length == cliff.spec.max_steps


def test_cliff_full_throttle_falls_below_expert(cliff: CliffCorridor) -> None:
    episode = run_episode(cliff, lambda _: np.array([1.0, 1.0]), np.random.default_rng(4))
    assert episode.failed
    assert episode.length < cliff.spec.max_steps
    expert = episode_reward(cliff, expert_policy(cliff), np.random.default_rng(4))
    assert episode.total_reward < expert


def test_episode_reward_matches_manual_loop(reach2d: Reach2D) -> None:
    wrapped = episode_reward(reach2d, expert_policy(reach2d), np.random.default_rng(5))
    reach2d.reset(np.random.default_rng(5))
    total = 0.0
    while not reach2d.done:
        total += reach2d.step(reach2d.expert_action()).reward
    assert wrapped == total


@pytest.mark.parametrize("name", ["reach2d", "cliffcorridor"])
def test_rewards_stay_in_documented_range(name: str) -> None:
    env = make_env(name)
    low, high = env.spec.reward_range
    rng = np.random.default_rng(8)
    for _ in range(5):
        episode = run_episode(env, random_policy(env, rng), rng)
        assert all(low <= r <= high for r in episode.rewards)


@pytest.mark.parametrize("name", ["reach2d", "cliffcorridor"])
def test_expert_beats_random_policy(name: str) -> None:
    env = make_env(name)
    expert_rng, random_rng, action_rng = (np.random.default_rng(s) for s in (10, 10, 11))
    expert = np.array([episode_reward(env, expert_policy(env), expert_rng) for _ in range(SUPERIORITY_EPISODES)])
    uniform = random_policy(env, action_rng)
    rand = np.array([episode_reward(env, uniform, random_rng) for _ in range(SUPERIORITY_EPISODES)])
    standard_error = np.sqrt((expert.var(ddof=1) + rand.var(ddof=1)) / SUPERIORITY_EPISODES)
    assert expert.mean() - rand.mean() >= SUPERIORITY_MARGIN * standard_error


def test_state_roundtrip(reach2d: Reach2D, rng: np.random.Generator) -> None:
    reach2d.reset(rng)
    reach2d.step(np.array([0.2, 0.1]))
    state = reach2d.get_state()
    observation = reach2d.observation()
    other = Reach2D()
    np.testing.assert_array_equal(other.set_state(state, steps_taken=1), observation)
    np.testing.assert_array_equal(
        other.step(np.array([0.3, 0.3])).observation, reach2d.step(np.array([0.3, 0.3])).observation
    )
