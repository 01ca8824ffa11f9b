import math

import pytest
from hypothesis import given, strategies as st

from abstractsoccer.geometry import Vec2
from abstractsoccer.model import (
    FieldSpec,
    RobotSpec,
    SimConfig,
    PRESET_NAMES,
    config_from_dict,
    config_to_dict,
    get_preset,
    in_goal,
    load_config,
    out_of_bounds,
    save_config,
    semantic_diff,
)

FIELD = FieldSpec()


class TestValidation:
    def test_goal_width_must_fit(self):
        with pytest.raises(ValueError):
            FieldSpec(goal_width=7.0)

    def test_kick_range_reaches_past_body(self):
        with pytest.raises(ValueError):
            RobotSpec(body_length=1.2, body_width=1.2, kick_range=0.3)

    def test_default_kick_range_derived_from_body(self):
        spec = RobotSpec(body_length=0.3, body_width=0.3)
        assert spec.kick_range == pytest.approx(math.hypot(0.3, 0.3) / 2 + 0.1)

    def test_timeout_must_be_step_multiple(self):
        with pytest.raises(ValueError):
            SimConfig(dt=0.1, episode_timeout=60.05)

    def test_noise_ranges(self):
        with pytest.raises(ValueError):
            SimConfig(contact_noise_angle=2.0)
        with pytest.raises(ValueError):
            SimConfig(contact_noise_speed_frac=1.0)


class TestGoalPredicates:
    def test_goal_mouth_center(self):
        assert in_goal(FIELD, Vec2(FIELD.half_length + 0.01, 0.0), True)

    def test_outside_post(self):
        assert not in_goal(FIELD, Vec2(FIELD.half_length + 0.01, FIELD.goal_width / 2 + 0.01), True)

    def test_midfield_is_not_goal(self):
        assert not in_goal(FIELD, Vec2(0, 0), True)

    def test_midfield_in_bounds(self):
        assert not out_of_bounds(FIELD, Vec2(0, 0))

    def test_over_sideline(self):
        assert out_of_bounds(FIELD, Vec2(0, FIELD.half_width + 0.01))

    def test_goal_is_not_out_of_bounds(self):
        assert not out_of_bounds(FIELD, Vec2(FIELD.half_length + 0.01, 0.0))

    @given(
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
        st.booleans(),
    )
    def test_mutually_exclusive(self, x, y, attacking):
        ball = Vec2(x, y)
        assert not (in_goal(FIELD, ball, attacking) and out_of_bounds(FIELD, ball))


class TestPresets:
    def test_full_marl_definition(self):
        cfg = get_preset("full_marl")
        assert cfg.robot.body_length == pytest.approx(1.2)  # large training agents
        assert cfg.field.goal_width == pytest.approx(0.75)  # halved goals
        assert cfg.robot.kick_duration == 0.0  # no kicking time
        assert cfg.ball_contact_noise is True
        assert cfg.observation_noise is False

    def test_eval_realistic_definition(self):
        cfg = get_preset("eval_realistic")
        assert cfg.robot.body_length == pytest.approx(0.3)
        assert cfg.field.goal_width == pytest.approx(1.5)
        assert cfg.robot.kick_duration == pytest.approx(1.0)
        assert cfg.ball_contact_noise is True
        assert cfg.observation_noise is False

    EXPECTED_KNOB = {
        "large_displacement": "displacement",
        "small_displacement": "displacement",
        "large_angle_displacement": "angular_displacement",
        "realistic_agent_size": "agent_size",
        "realistic_goals": "goal_size",
        "kicking_time": "kick_delay",
        "no_ball_noise": "ball_contact_noise",
        "with_observation_noise": "observation_noise",
    }

    @pytest.mark.parametrize("name,knob", sorted(EXPECTED_KNOB.items()))
    def test_single_knob_ablations(self, name, knob):
        diff = semantic_diff(get_preset("full_marl"), get_preset(name))
        assert diff == [knob]

    def test_eval_realistic_knobs(self):
        diff = semantic_diff(get_preset("full_marl"), get_preset("eval_realistic"))
        assert diff == sorted(["agent_size", "goal_size", "kick_delay"])

    def test_displacement_scales(self):
        base = get_preset("full_marl").robot
        assert get_preset("large_displacement").robot.max_forward_speed == pytest.approx(
            2 * base.max_forward_speed
        )
        assert get_preset("small_displacement").robot.max_lateral_speed == pytest.approx(
            base.max_lateral_speed / 2
        )
        assert get_preset("large_angle_displacement").robot.max_angular_speed == pytest.approx(
            2 * base.max_angular_speed
        )

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset("nope")

    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_all_presets_valid(self, name):
        get_preset(name)  # constructor validation


class TestSerialization:
    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_round_trip(self, name, tmp_path):
        cfg = get_preset(name)
        path = tmp_path / f"{name}.json"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_schema_version_required(self):
        data = config_to_dict(get_preset("full_marl"))
        del data["schema_version"]
        with pytest.raises(ValueError, match="schema_version"):
            config_from_dict(data)

    def test_key_names_match_fields(self):
        data = config_to_dict(get_preset("full_marl"))
        assert set(data) >= {"field", "robot", "dt", "episode_timeout", "ball_contact_noise"}
        assert set(data["field"]) == {"length", "width", "goal_width", "goal_depth"}
