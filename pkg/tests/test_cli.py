"""End-to-end pipeline through the CLI: extract -> annotate -> split ->
simulate -> report -> kb."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from foodkb.annotations.splits import write_labeled
from foodkb.cli import main
from tests.conftest import FIXTURES, build_synthetic_split


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestPipelineCommands:
    def test_extract_command(self, runner, tmp_path):
        parts = tmp_path / "parts.txt"
        parts.write_text("skin\npeel\nseed\n")
        out = tmp_path / "pairs.jsonl"
        result = run_ok(runner, [
            "extract",
            "--sentences", str(FIXTURES / "golden_filtered.jsonl"),
            "--parts", str(parts),
            "--vocab", str(FIXTURES / "test_vocab.txt"),
            "--out", str(out)])
        assert "SR pairs" in result.output
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert records
        assert all("relation" in r and "pair_id" in r for r in records)

    def test_annotate_and_split_and_kb(self, runner, tmp_path):
        parts = tmp_path / "parts.txt"
        parts.write_text("skin\npeel\nseed\n")
        pairs_path = tmp_path / "pairs.jsonl"
        run_ok(runner, [
            "extract",
            "--sentences", str(FIXTURES / "golden_filtered.jsonl"),
            "--parts", str(parts),
            "--vocab", str(FIXTURES / "test_vocab.txt"),
            "--out", str(pairs_path)])

        db = tmp_path / "ann.db"
        run_ok(runner, ["annotate", "init", "--db", str(db),
                        "--pairs", str(pairs_path), "--annotators", "alice,bob"])

        # both annotators call everything positive
        records = [json.loads(line) for line in pairs_path.read_text().splitlines()]
        ann_file = tmp_path / "labels.tsv"
        lines = ["pair_id\tannotator_id\tlabel\tannotated_at"]
        for rec in records:
            for who in ("alice", "bob"):
                lines.append(f"{rec['pair_id']}\t{who}\tpositive\t"
                             "2025-11-05T00:00:00+00:00")
        ann_file.write_text("\n".join(lines) + "\n")
        run_ok(runner, ["annotate", "import", "--db", str(db),
                        "--file", str(ann_file)])

        exported = tmp_path / "export.tsv"
        run_ok(runner, ["annotate", "export", "--db", str(db),
                        "--out", str(exported)])
        assert exported.read_text().count("\n") == 2 * len(records) + 1

        consensus_path = tmp_path / "consensus.jsonl"
        result = run_ok(runner, ["annotate", "consensus", "--db", str(db),
                                 "--out", str(consensus_path)])
        assert f"consensus={len(records)}" in result.output

        kb_path = tmp_path / "kb.sqlite"
        run_ok(runner, ["kb", "build", "--kb", str(kb_path),
                        "--from", "annotations", "--db", str(db)])
        kb_tsv = tmp_path / "kb.tsv"
        run_ok(runner, ["kb", "export", "--kb", str(kb_path),
                        "--format", "delimited", "--out", str(kb_tsv)])
        assert kb_tsv.read_text().startswith("food\tpart\tchemical")
        result = run_ok(runner, ["kb", "query", "--kb", str(kb_path),
                                 "--min-confidence", "0.9"])
        assert '"confidence": 1.0' in result.output

    def test_split_simulate_report(self, runner, tmp_path):
        pool = build_synthetic_split(60, 26, seed=81, chem_range=(0, 40))
        val = build_synthetic_split(16, 6, seed=82, chem_range=(40, 50),
                                    index_base=100000)
        test = build_synthetic_split(16, 7, seed=83, chem_range=(50, 60),
                                     index_base=200000)
        pool_path = tmp_path / "pool.jsonl"
        val_path = tmp_path / "val.jsonl"
        test_path = tmp_path / "test.jsonl"
        write_labeled(pool, pool_path)
        write_labeled(val, val_path)
        write_labeled(test, test_path)

        # split the pool itself, just to exercise the command
        split_dir = tmp_path / "splits"
        result = run_ok(runner, ["split", "--labeled", str(pool_path),
                                 "--sizes", "30,15,15", "--seed", "5",
                                 "--out-dir", str(split_dir)])
        assert (split_dir / "manifest.json").exists()

        runs_dir = tmp_path / "runs"
        for strategy in ("uncertainty", "random"):
            run_ok(runner, [
                "simulate", "--pool", str(pool_path), "--val", str(val_path),
                "--test", str(test_path), "--strategy", strategy,
                "--rounds", "3", "--batch", "20", "--runs", "2",
                "--seed", "7", "--out", str(runs_dir)])
        assert len(list(runs_dir.glob("run_*.json"))) == 4

        report_dir = tmp_path / "report"
        run_ok(runner, ["report", "--runs", str(runs_dir),
                        "--out", str(report_dir)])
        summary = (report_dir / "summary.tsv").read_text()
        assert summary.startswith("strategy\tmetric\tround_1")
        assert (report_dir / "ttest.tsv").exists()
        assert (report_dir / "acceleration.tsv").exists()
        assert (report_dir / "discovery.tsv").exists()

    def test_tune_command(self, runner, tmp_path):
        train = build_synthetic_split(80, 36, seed=91, chem_range=(0, 40))
        val = build_synthetic_split(30, 12, seed=92, chem_range=(40, 50),
                                    index_base=100000)
        train_path = tmp_path / "train.jsonl"
        val_path = tmp_path / "val.jsonl"
        write_labeled(train, train_path)
        write_labeled(val, val_path)
        result = run_ok(runner, ["tune", "--train", str(train_path),
                                 "--val", str(val_path)])
        assert "precision=" in result.output
        best = json.loads(result.output.strip().splitlines()[-1])
        assert set(best) == {"learning_rate", "batch_size", "epochs"}
