import json

import pytest

from soccertrain.ablation import measure_kick_frequency, run_ablation_study
from soccertrain.hyperparams import PPOHyperparams

TINY = PPOHyperparams(
    total_env_steps=4_096,
    n_worlds=8,
    rollout_length=32,
    minibatch_size=128,
    epochs_per_update=1,
)


class TestStudy:
    def test_two_preset_smoke_study(self, tmp_path):
        result = run_ablation_study(
            ["full_marl", "no_ball_noise"], TINY, n_eval_trials=2, out_dir=tmp_path
        )
        assert result["failures"] == {}
        assert set(result["columns"]) == {"full_marl", "no_ball_noise"}
        # six scenario rows per preset column
        for summaries in result["columns"].values():
            assert [s.scenario for s in summaries] == [
                "BS1", "BS2", "BS3", "D1", "D2", "D3"
            ]
        assert (tmp_path / "grid.txt").exists()
        assert (tmp_path / "full_marl.pol").exists()
        grid = json.loads((tmp_path / "grid.json").read_text())
        assert set(grid["columns"]) == {"full_marl", "no_ball_noise"}
        study = json.loads((tmp_path / "study.json").read_text())
        assert study["failures"] == {}

    def test_failed_preset_recorded_and_study_continues(self, tmp_path):
        result = run_ablation_study(
            ["nope", "full_marl"], TINY, n_eval_trials=1, out_dir=tmp_path
        )
        assert "nope" in result["failures"]
        assert "full_marl" in result["columns"]

    def test_grid_cells_carry_confidence_intervals(self, tmp_path):
        result = run_ablation_study(
            ["full_marl"], TINY, n_eval_trials=3, out_dir=tmp_path
        )
        summary = result["columns"]["full_marl"][0]
        mean, half_width = summary.success_rate
        assert 0.0 <= mean <= 1.0 and half_width >= 0.0
        assert summary.n_trials == 3


class TestKickFrequency:
    def test_frequency_in_unit_range(self, tmp_path):
        run_ablation_study(["full_marl"], TINY, n_eval_trials=1, out_dir=tmp_path)
        freq = measure_kick_frequency(
            tmp_path / "full_marl.pol", ["BS1"], n_trials=2
        )
        assert 0.0 <= freq <= 1.0
