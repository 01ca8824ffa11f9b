"""Vectorized batch engine: equivalence with the scalar reference,
auto-reset semantics, and the deterministic benchmark driver."""

import numpy as np
import pytest

from abstractsoccer.bench import run_bench
from abstractsoccer.engine import VecSoccerEnv
from abstractsoccer.env import SoccerEnv, build_observation, observation_size, reset
from abstractsoccer.model import get_preset

FULL = get_preset("full_marl")
EVAL = get_preset("eval_realistic")
NOISY = get_preset("with_observation_noise")


def assert_world_matches_scalar(vec, w, scalar_state, tol=1e-12):
    view = vec.world_state(w)
    for a, b in zip(view.robots, scalar_state.robots):
        assert a.pose.position.x == pytest.approx(b.pose.position.x, abs=tol)
        assert a.pose.position.y == pytest.approx(b.pose.position.y, abs=tol)
        assert a.pose.heading == pytest.approx(b.pose.heading, abs=tol)
        assert a.kick_timer == pytest.approx(b.kick_timer, abs=tol)
    assert view.ball.position.x == pytest.approx(scalar_state.ball.position.x, abs=tol)
    assert view.ball.position.y == pytest.approx(scalar_state.ball.position.y, abs=tol)
    assert view.ball.velocity.x == pytest.approx(scalar_state.ball.velocity.x, abs=tol)
    assert view.ball.velocity.y == pytest.approx(scalar_state.ball.velocity.y, abs=tol)


class TestScalarEquivalence:
    @pytest.mark.parametrize("config,scenario", [(FULL, "BS1"), (EVAL, "D1"), (FULL, "random_train")])
    def test_paired_rollout_matches(self, config, scenario):
        n = 4
        vec = VecSoccerEnv(config, n, scenario)
        vec.reset(100)
        envs = [SoccerEnv(config, scenario) for _ in range(n)]
        for w, env in enumerate(envs):
            env.reset(100 + w)
            assert_world_matches_scalar(vec, w, env.state)

        rng = np.random.default_rng(0)
        next_seed = 10_000
        for _ in range(300):
            actions = rng.uniform(-1, 1, (n, config.num_agents, 5))
            _, rewards, terminated, truncated, _ = vec.step(actions)
            for w, env in enumerate(envs):
                result = env.step(actions[w])
                assert rewards[w] == pytest.approx(result.reward, abs=1e-12)
                assert bool(terminated[w]) == result.terminated
                assert bool(truncated[w]) == result.truncated
                assert_world_matches_scalar(vec, w, env.state)
                if result.terminated or result.truncated:
                    env.reset(next_seed)
                    vec._reset_world(w, next_seed)
                    next_seed += 1

    def test_observations_match_scalar(self):
        config = NOISY
        vec = VecSoccerEnv(config, 3, "BS2")
        vec_obs = vec.reset(7)
        for w in range(3):
            state, scalar_obs, obs_rng = reset("BS2", config, 7 + w)
            for i in range(config.num_agents):
                assert vec_obs[w, i] == pytest.approx(scalar_obs[i], abs=1e-12)

    def test_obs_shape(self):
        vec = VecSoccerEnv(EVAL, 5, "BS1")
        obs = vec.reset(0)
        assert obs.shape == (5, EVAL.num_agents, observation_size(EVAL))


class TestAutoReset:
    def test_terminal_observation_surface(self):
        vec = VecSoccerEnv(EVAL, 2, "BS1", auto_reset=True)
        vec.reset(0)
        # place world 0's ball rolling into the goal mouth
        vec.ball_pos[0] = (EVAL.field.half_length - 0.05, 0.0)
        vec.ball_vel[0] = (2.0, 0.0)
        actions = np.zeros((2, 2, 5))
        obs, rewards, terminated, truncated, info = vec.step(actions)
        assert terminated[0] and not terminated[1]
        assert info["terminal_observations"][0] is not None
        assert info["terminal_observations"][1] is None
        # world 0 restarted: ball back at the scenario spot, clock at zero
        assert vec.ball_pos[0] == pytest.approx((0.0, 0.0))
        assert vec.steps[0] == 0

    def test_episodes_keep_flowing(self):
        vec = VecSoccerEnv(FULL, 8, "random_train", auto_reset=True)
        vec.reset(0)
        rng = np.random.default_rng(1)
        done_count = 0
        for _ in range(FULL.max_steps + 50):
            _, _, terminated, truncated, _ = vec.step(rng.uniform(-1, 1, (8, 2, 5)))
            done_count += int(terminated.sum() + truncated.sum())
        assert done_count >= 8  # every world hit at least one episode boundary
        assert np.all(vec.steps <= FULL.max_steps)

    def test_without_auto_reset_flags_stay_visible(self):
        vec = VecSoccerEnv(EVAL, 1, "BS1", auto_reset=False)
        vec.reset(0)
        vec.ball_pos[0] = (EVAL.field.half_length - 0.05, 0.0)
        vec.ball_vel[0] = (2.0, 0.0)
        _, _, terminated, _, info = vec.step(np.zeros((1, 2, 5)))
        assert terminated[0]
        assert "terminal_observations" not in info


class TestDefenderProbability:
    def test_zero_probability_never_spawns(self):
        vec = VecSoccerEnv(FULL, 32, "random_train", defender_prob=0.0)
        vec.reset(0)
        assert not vec.active[:, FULL.num_agents :].any()

    def test_unit_probability_always_spawns(self):
        vec = VecSoccerEnv(FULL, 32, "random_train", defender_prob=1.0)
        vec.reset(0)
        assert vec.active[:, FULL.num_agents :].all()


class TestBench:
    def test_fingerprints_deterministic(self):
        a = run_bench(FULL, n_steps=50, n_worlds=64, workers=1, chunk_size=16)
        b = run_bench(FULL, n_steps=50, n_worlds=64, workers=1, chunk_size=16)
        assert a.fingerprints == b.fingerprints

    def test_worker_count_invariance(self):
        a = run_bench(FULL, n_steps=50, n_worlds=64, workers=1, chunk_size=16)
        b = run_bench(FULL, n_steps=50, n_worlds=64, workers=4, chunk_size=16)
        assert a.fingerprints == b.fingerprints

    def test_throughput_accounting(self):
        result = run_bench(FULL, n_steps=20, n_worlds=32, workers=1, chunk_size=32)
        assert result.n_steps == 20 and result.n_worlds == 32
        assert result.steps_per_second > 0
        assert result.wall_seconds > 0
