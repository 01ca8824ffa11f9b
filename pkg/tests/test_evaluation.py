import json

import numpy as np
import pytest

from abstractsoccer.evaluation import (
    MetricsSummary,
    ReplayError,
    export_replay,
    format_metrics_table,
    load_replay,
    run_suite,
    run_trial,
    save_metrics_report,
    summarize_trials,
    summary_to_dict,
    verify_replay,
)
from abstractsoccer.env import EpisodeOutcome
from abstractsoccer.evaluation import TrialResult
from abstractsoccer.model import get_preset
from abstractsoccer.policy import random_policy
from abstractsoccer.scripted import ScriptedKicker

EVAL = get_preset("eval_realistic")
NOISY = get_preset("with_observation_noise")


def trial(success, tts=None, seed=0):
    outcome = EpisodeOutcome(
        success=success,
        time_to_score=tts,
        failure_reason=None if success else "timeout",
    )
    return TrialResult(scenario="BS1", seed=seed, outcome=outcome, step_count=10)


class TestRunTrial:
    def test_scripted_succeeds_and_reports_time(self):
        result, _ = run_trial(ScriptedKicker(EVAL), "BS2", EVAL, 0)
        assert result.outcome.success
        assert result.outcome.time_to_score == pytest.approx(result.step_count * EVAL.dt)

    def test_random_policy_times_out(self):
        policy = random_policy(19, "ego-v1:a2d1", rng=np.random.default_rng(0))
        result, _ = run_trial(policy, "BS1", EVAL, 0)
        assert result.step_count <= EVAL.max_steps
        if not result.outcome.success:
            assert result.outcome.failure_reason in ("timeout", "out_of_bounds")

    def test_layout_mismatch_rejected(self):
        from abstractsoccer.policy import PolicyFormatError

        policy = random_policy(19, "ego-v9:a2d1")
        with pytest.raises(PolicyFormatError):
            run_trial(policy, "BS1", EVAL, 0)

    def test_deterministic_across_calls(self):
        a, _ = run_trial(ScriptedKicker(EVAL), "BS3", EVAL, 11)
        b, _ = run_trial(ScriptedKicker(EVAL), "BS3", EVAL, 11)
        assert a == b


class TestSummaries:
    def test_time_average_excludes_failures(self):
        # synthetic trials: failures must not drag the scoring-time average
        trials = [
            trial(True, 10.0, seed=0),
            trial(True, 20.0, seed=1),
            trial(False, seed=2),
            trial(False, seed=3),
        ]
        summary = summarize_trials("BS1", trials)
        assert summary.success_rate[0] == pytest.approx(0.5)
        assert summary.time_to_score[0] == pytest.approx(15.0)

    def test_zero_successes_yield_none(self):
        summary = summarize_trials("BS1", [trial(False, seed=s) for s in range(5)])
        assert summary.time_to_score is None
        assert summary_to_dict(summary)["time_to_score"] is None

    def test_seed_order_invariant(self):
        trials = [trial(True, 10.0, seed=2), trial(False, seed=0), trial(True, 30.0, seed=1)]
        assert summarize_trials("BS1", trials) == summarize_trials("BS1", trials[::-1])

    def test_run_suite_counts(self):
        summaries = run_suite(ScriptedKicker(EVAL), ["BS1", "BS2"], EVAL, 3)
        assert [s.scenario for s in summaries] == ["BS1", "BS2"]
        assert all(s.n_trials == 3 for s in summaries)

    def test_run_suite_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            run_suite(ScriptedKicker(EVAL), ["BS1"], EVAL, 0)


class TestReplay:
    def _record(self, tmp_path, config=EVAL, scenario="BS2", seed=0):
        _, trace = run_trial(ScriptedKicker(config), scenario, config, seed, record=True)
        path = tmp_path / "trace.jsonl"
        export_replay(trace, path)
        return path

    def test_round_trip_verifies(self, tmp_path):
        path = self._record(tmp_path)
        steps = verify_replay(path)
        assert steps > 0

    def test_verifies_with_observation_noise(self, tmp_path):
        path = self._record(tmp_path, config=NOISY, scenario="BS1", seed=3)
        assert verify_replay(path) > 0

    def test_tampered_state_detected(self, tmp_path):
        path = self._record(tmp_path)
        lines = path.read_text().splitlines()
        record = json.loads(lines[10])
        record["ball"][0] += 1e-9
        lines[10] = json.dumps(record)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ReplayError, match=f"step {record['step']}"):
            verify_replay(path)

    def test_tampered_action_detected(self, tmp_path):
        path = self._record(tmp_path)
        lines = path.read_text().splitlines()
        record = json.loads(lines[5])  # early step: the striker is walking
        record["actions"][0][0] = 0.123456
        lines[5] = json.dumps(record)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ReplayError):
            verify_replay(path)

    def test_corrupt_json_reported_with_line(self, tmp_path):
        path = self._record(tmp_path)
        path.write_text(path.read_text() + "{not json\n")
        with pytest.raises(ReplayError, match="corrupt"):
            load_replay(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text('{"kind": "replay"}\n')
        with pytest.raises(ReplayError, match="truncated"):
            load_replay(path)

    def test_unsupported_schema(self, tmp_path):
        path = self._record(tmp_path)
        lines = path.read_text().splitlines()
        header = json.loads(lines[0])
        header["schema_version"] = "99"
        lines[0] = json.dumps(header)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ReplayError, match="schema_version"):
            load_replay(path)

    def test_export_requires_trace(self, tmp_path):
        with pytest.raises(ReplayError):
            export_replay(None, tmp_path / "x.jsonl")


class TestReporting:
    def _summary(self, scenario, rate, tts):
        return MetricsSummary(
            scenario=scenario, n_trials=10, success_rate=rate, time_to_score=tts
        )

    def test_table_shows_na_for_zero_successes(self):
        table = format_metrics_table(
            {"run": [self._summary("BS1", (0.0, 0.0), None)]}
        )
        assert "N/A" in table
        assert "0.00 +- 0.0" in table

    def test_table_grid_layout(self):
        columns = {
            "a": [self._summary("BS1", (0.9, 0.2), (10.0, 1.0))],
            "b": [self._summary("BS2", (0.5, 0.4), (20.0, 2.0))],
        }
        table = format_metrics_table(columns)
        assert "BS1" in table and "BS2" in table
        assert "-" in table  # missing cells marked

    def test_report_file_round_trips(self, tmp_path):
        summaries = [self._summary("BS1", (0.9, 0.2262), (12.5, 3.0))]
        path = tmp_path / "report.json"
        save_metrics_report({"scripted": summaries}, path)
        data = json.loads(path.read_text())
        cell = data["columns"]["scripted"][0]
        assert cell["success_rate"]["mean"] == 0.9
        assert cell["success_rate"]["half_width"] == 0.2262
