"""Command-line behavior: exit codes, determinism, rounding, worker caps."""

import json

import numpy as np
import pytest

from ezcrop import ManifestEntry, ranked_layer, read_plan, read_scores, write_manifest, write_tensor
from ezcrop.cli import main


@pytest.fixture()
def dumps(tmp_path):
    """Dump directory with two synthetic layers plus a keep spec."""
    root = tmp_path / "dumps"
    root.mkdir()
    entries = []
    for name, ranks, seed in [("conv1", [2, 6, 3, 8], 51), ("conv2", [1, 7, 4], 52)]:
        fm = ranked_layer(16, 16, ranks, batch=4, seed=seed)
        write_tensor(root / f"{name}.ezt", fm)
        entries.append(
            ManifestEntry(layer=name, file=f"{name}.ezt",
                          dims=(4, len(ranks), 16, 16), source="test")
        )
    write_manifest(root / "manifest.json", entries)
    keep = {"layers": [
        {"layer": "conv1", "ratio": 0.5},
        {"layer": "conv2", "count": 2},
    ]}
    (tmp_path / "keep.json").write_text(json.dumps(keep, indent=2) + "\n")
    return root


class TestAnalyze:
    def test_writes_scores(self, dumps, tmp_path):
        out = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "-o", str(out)]) == 0
        scores = read_scores(out)
        assert [s.layer for s in scores] == ["conv1", "conv2"]
        assert all(s.metric == "energy" for s in scores)
        assert all(s.batch == 4 for s in scores)

    def test_deterministic_output(self, dumps, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["analyze", str(dumps), "-o", str(a)]) == 0
        assert main(["analyze", str(dumps), "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_parallel_workers_do_not_change_output(self, dumps, tmp_path, monkeypatch):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        monkeypatch.setenv("EZCROP_THREADS", "1")
        assert main(["analyze", str(dumps), "-o", str(a)]) == 0
        monkeypatch.setenv("EZCROP_THREADS", "3")
        assert main(["analyze", str(dumps), "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_thread_env(self, dumps, tmp_path, monkeypatch):
        monkeypatch.setenv("EZCROP_THREADS", "zero")
        assert main(["analyze", str(dumps), "-o", str(tmp_path / "s.json")]) == 2

    def test_rank_and_circle_metrics(self, dumps, tmp_path):
        out = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "--metric", "rank", "-o", str(out)]) == 0
        assert all(s.metric == "rank" for s in read_scores(out))
        assert main(["analyze", str(dumps), "--metric", "circle",
                     "--fraction", "0.5", "-o", str(out)]) == 0
        assert all(s.metric == "circle" for s in read_scores(out))

    def test_batch_limit(self, dumps, tmp_path):
        out = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "--batch-limit", "2", "-o", str(out)]) == 0
        assert all(s.batch == 2 for s in read_scores(out))

    def test_missing_manifest_exits_2(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        out = tmp_path / "scores.json"
        assert main(["analyze", str(empty), "-o", str(out)]) == 2
        assert not out.exists()

    def test_no_partial_output_when_a_layer_fails(self, dumps, tmp_path):
        (dumps / "conv2.ezt").unlink()  # manifest still references it
        out = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "-o", str(out)]) == 2
        assert not out.exists()

    def test_bad_beta_exits_2(self, dumps, tmp_path):
        code = main(["analyze", str(dumps), "--beta", "1.5",
                     "-o", str(tmp_path / "s.json")])
        assert code == 2

    def test_unknown_metric_exits_2(self, dumps, tmp_path):
        code = main(["analyze", str(dumps), "--metric", "entropy",
                     "-o", str(tmp_path / "s.json")])
        assert code == 2


class TestPlan:
    def scores_path(self, dumps, tmp_path):
        out = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "-o", str(out)]) == 0
        return out

    def test_ratio_and_count(self, dumps, tmp_path):
        scores = self.scores_path(dumps, tmp_path)
        out = tmp_path / "plan.json"
        assert main(["plan", str(scores), str(tmp_path / "keep.json"),
                     "-o", str(out)]) == 0
        plan = read_plan(out)
        by_id = plan.by_id()
        assert len(by_id["conv1"].keep) == 2  # ratio 0.5 of 4
        assert len(by_id["conv2"].keep) == 2  # explicit count

    @pytest.mark.parametrize("total,ratio,expected", [
        (4, 0.5, 2),
        (6, 0.25, 2),   # 1.5 rounds up
        (5, 0.1, 1),
        (3, 1.0, 3),
        (8, 0.05, 1),   # floor is one channel
        (7, 0.5, 4),    # 3.5 rounds up
    ])
    def test_ratio_rounding(self, tmp_path, total, ratio, expected):
        scores = {"layers": [{
            "layer": "c", "metric": "rank", "beta": None, "batch": 1,
            "scores": [float(total - i) for i in range(total)],
            "order": list(range(1, total + 1)),
        }]}
        spath = tmp_path / "scores.json"
        spath.write_text(json.dumps(scores))
        (tmp_path / "keep.json").write_text(
            json.dumps({"layers": [{"layer": "c", "ratio": ratio}]})
        )
        out = tmp_path / "plan.json"
        assert main(["plan", str(spath), str(tmp_path / "keep.json"),
                     "-o", str(out)]) == 0
        assert len(read_plan(out).layers[0].keep) == expected

    def test_unknown_layer_exits_2(self, dumps, tmp_path):
        scores = self.scores_path(dumps, tmp_path)
        (tmp_path / "bad.json").write_text(
            json.dumps({"layers": [{"layer": "nope", "ratio": 0.5}]})
        )
        assert main(["plan", str(scores), str(tmp_path / "bad.json"),
                     "-o", str(tmp_path / "p.json")]) == 2

    def test_uncovered_layer_exits_2(self, dumps, tmp_path):
        scores = self.scores_path(dumps, tmp_path)
        (tmp_path / "partial.json").write_text(
            json.dumps({"layers": [{"layer": "conv1", "ratio": 0.5}]})
        )
        assert main(["plan", str(scores), str(tmp_path / "partial.json"),
                     "-o", str(tmp_path / "p.json")]) == 2

    def test_count_above_total_exits_2(self, dumps, tmp_path):
        scores = self.scores_path(dumps, tmp_path)
        (tmp_path / "big.json").write_text(json.dumps({"layers": [
            {"layer": "conv1", "count": 99},
            {"layer": "conv2", "count": 1},
        ]}))
        assert main(["plan", str(scores), str(tmp_path / "big.json"),
                     "-o", str(tmp_path / "p.json")]) == 2


class TestCompose:
    def test_two_pass_flow(self, dumps, tmp_path):
        scores = tmp_path / "scores.json"
        plan1 = tmp_path / "plan1.json"
        assert main(["analyze", str(dumps), "-o", str(scores)]) == 0
        assert main(["plan", str(scores), str(tmp_path / "keep.json"),
                     "-o", str(plan1)]) == 0
        first = read_plan(plan1)
        second = {"layers": [
            {"layer": e.layer, "channels": len(e.keep), "keep": [1]}
            for e in first.layers
        ]}
        plan2 = tmp_path / "plan2.json"
        plan2.write_text(json.dumps(second))
        out = tmp_path / "composite.json"
        assert main(["compose", str(plan1), str(plan2), "-o", str(out)]) == 0
        composite = read_plan(out)
        for entry in composite.layers:
            assert entry.keep == [first.by_id()[entry.layer].keep[0]]
            assert entry.channels == first.by_id()[entry.layer].channels

    def test_channel_mismatch_exits_2(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        a.write_text(json.dumps(
            {"layers": [{"layer": "c", "channels": 6, "keep": [1, 3]}]}
        ))
        b.write_text(json.dumps(
            {"layers": [{"layer": "c", "channels": 6, "keep": [1]}]}
        ))
        assert main(["compose", str(a), str(b), "-o", str(tmp_path / "o.json")]) == 2

    def test_single_plan_is_a_usage_error(self, tmp_path):
        a = tmp_path / "a.json"
        a.write_text(json.dumps(
            {"layers": [{"layer": "c", "channels": 2, "keep": [1]}]}
        ))
        assert main(["compose", str(a), "-o", str(tmp_path / "o.json")]) == 2


class TestVerifyConv:
    def test_reports_pass(self, capsys):
        assert main(["verify-conv", "--seed", "7", "--trials", "20"]) == 0
        out = capsys.readouterr().out
        assert "status: PASS" in out
        assert "max_error" in out

    def test_deterministic_given_seed(self, capsys):
        main(["verify-conv", "--seed", "11", "--trials", "15"])
        first = capsys.readouterr().out
        main(["verify-conv", "--seed", "11", "--trials", "15"])
        assert capsys.readouterr().out == first

    def test_report_file(self, tmp_path, capsys):
        out = tmp_path / "verify.txt"
        assert main(["verify-conv", "--seed", "2", "--trials", "10",
                     "-o", str(out)]) == 0
        assert out.read_text() == capsys.readouterr().out

    def test_zero_trials_is_a_usage_error(self, capsys):
        assert main(["verify-conv", "--trials", "0"]) == 2


class TestReportCommand:
    def test_flow_with_heatmaps(self, dumps, tmp_path):
        scores = tmp_path / "scores.json"
        rank_scores = tmp_path / "rank.json"
        assert main(["analyze", str(dumps), "-o", str(scores)]) == 0
        assert main(["analyze", str(dumps), "--metric", "rank",
                     "-o", str(rank_scores)]) == 0
        out = tmp_path / "report"
        assert main(["report", str(scores), str(rank_scores),
                     "--heatmaps", str(dumps), "--beta", "0.25",
                     "-o", str(out)]) == 0
        assert (out / "report.txt").exists()
        assert (out / "comparison_conv1.ppm").exists()
        assert (out / "heatmap_conv2_c3.pgm").exists()

    def test_missing_layer_in_dumps_exits_2(self, dumps, tmp_path):
        scores = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "-o", str(scores)]) == 0
        doc = json.loads(scores.read_text())
        doc["layers"][0]["layer"] = "conv9"
        scores.write_text(json.dumps(doc))
        assert main(["report", str(scores), "--heatmaps", str(dumps),
                     "-o", str(tmp_path / "r")]) == 2

    def test_three_scores_files_is_a_usage_error(self, dumps, tmp_path):
        scores = tmp_path / "scores.json"
        assert main(["analyze", str(dumps), "-o", str(scores)]) == 0
        assert main(["report", str(scores), str(scores), str(scores),
                     "-o", str(tmp_path / "r")]) == 2


class TestBenchCommand:
    def test_writes_report(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        assert main(["bench", "--sizes", "16,24,32,48", "--reps", "5",
                     "--seed", "1", "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["seed"] == 1
        assert len(doc["records"]) == 8
        assert "slope" in capsys.readouterr().out

    def test_bad_sizes_exit_2(self, tmp_path):
        assert main(["bench", "--sizes", "16,24", "-o",
                     str(tmp_path / "b.json")]) == 2
        assert main(["bench", "--sizes", "x,y,z,w", "-o",
                     str(tmp_path / "b.json")]) == 2


def test_missing_subcommand_is_a_usage_error():
    assert main([]) == 2


def test_unreadable_input_exits_2(tmp_path):
    assert main(["plan", str(tmp_path / "absent.json"),
                 str(tmp_path / "also-absent.json"),
                 "-o", str(tmp_path / "p.json")]) == 2
