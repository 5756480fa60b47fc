import json
import os

import pytest

from regretmap.cli import main
from regretmap.io import load_archive


@pytest.fixture
def run_dir(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mode = targeted\n"
                   "iterations = 3\n"
                   "emitters = 1\n"
                   "n_ladder = 2\n"
                   "include_bots = false\n"
                   "init_levels_per_policy = 2\n"
                   "metrics_stride = 1\n"
                   "seed = 6\n")
    out = tmp_path / "results"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    return out


class TestValidate:
    def test_valid_config_prints_effective_settings(self, tmp_path, capsys):
        p = tmp_path / "c.cfg"
        p.write_text("seed = 4\n")
        assert main(["validate", "--config", str(p)]) == 0
        out = capsys.readouterr().out
        assert "iterations = 5000" in out and "seed = 4" in out

    def test_invalid_value_exits_2(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("iterations = 0\n")
        assert main(["validate", "--config", str(p)]) == 2

    def test_unknown_key_exits_2(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("horsepower = 9\n")
        assert main(["validate", "--config", str(p)]) == 2

    def test_missing_file_exits_2(self, tmp_path):
        assert main(["validate", "--config", str(tmp_path / "nope.cfg")]) == 2


class TestUsageErrors:
    def test_unknown_verb_exits_1(self):
        assert main(["conquer"]) == 1

    def test_missing_required_flag_exits_1(self):
        assert main(["run"]) == 1

    def test_help_exits_0(self):
        assert main(["--help"]) == 0


class TestRun:
    def test_run_writes_result_directory(self, run_dir):
        for name in ("config.txt", "archive.txt", "metrics.csv",
                     "policy_summary.csv", "provenance.txt"):
            assert (run_dir / name).exists()
        archive, policies, seed = load_archive(run_dir / "archive.txt")
        assert seed == 6
        assert len(policies) == 2
        assert len(archive) > 0

    def test_cli_overrides_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mode = targeted\niterations = 3\nemitters = 1\n"
                       "n_ladder = 1\ninclude_bots = false\n"
                       "init_levels_per_policy = 2\nmetrics_stride = 1\n")
        out = tmp_path / "o"
        assert main(["run", "--config", str(cfg), "--seed", "9",
                     "--iterations", "2", "--out", str(out)]) == 0
        text = (out / "config.txt").read_text()
        assert "seed = 9" in text and "iterations = 2" in text


class TestReport:
    def test_report_writes_heatmaps_per_policy(self, run_dir, capsys):
        assert main(["report", "--out", str(run_dir)]) == 0
        heat = run_dir / "heatmaps"
        files = sorted(os.listdir(heat))
        assert files == ["ladder01.csv", "ladder02.csv"]
        rows = (heat / "ladder01.csv").read_text().splitlines()
        assert len(rows) == 10 and all(len(r.split(",")) == 16 for r in rows)
        assert "ladder01" in capsys.readouterr().out

    def test_report_unknown_policy_exits_2(self, run_dir):
        assert main(["report", "--out", str(run_dir), "--policy", "ghost"]) == 2


class TestReplayVerb:
    def test_replay_round_trip(self, run_dir):
        archive, policies, _ = load_archive(run_dir / "archive.txt")
        key = sorted(archive.cells)[0]
        pid = policies[key.policy].id
        assert main(["replay", "--out", str(run_dir), "--policy", pid,
                     "--cell", f"{key.x},{key.y}"]) == 0
        path = run_dir / "replays" / f"{pid}_{key.x}_{key.y}.json"
        doc = json.loads(path.read_text())
        assert set(doc["traces"]) == {"xp", "sp"}
        assert doc["ref_id"] == pid

    def test_replay_empty_cell_exits_2(self, run_dir):
        archive, policies, _ = load_archive(run_dir / "archive.txt")
        empty = None
        for x in range(16):
            for y in range(10):
                if (0, x, y) not in archive.cells:
                    empty = (x, y)
                    break
            if empty:
                break
        assert main(["replay", "--out", str(run_dir), "--policy", policies[0].id,
                     "--cell", f"{empty[0]},{empty[1]}"]) == 2

    def test_replay_bad_cell_syntax_exits_2(self, run_dir):
        assert main(["replay", "--out", str(run_dir), "--policy", "ladder01",
                     "--cell", "northwest"]) == 2
