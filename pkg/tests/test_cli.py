from __future__ import annotations

import json

import pytest

from hcoal.cli import main
from hcoal.corpus import parse_corpus
from hcoal.evaluation import evaluate_labels
from hcoal.ranking import RankedList, SelectionSet


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "spec.json").write_text(json.dumps(
        {"n_examples": 40, "min_tokens": 5, "max_tokens": 12, "seed": 3}))
    (tmp_path / "noise.json").write_text(json.dumps({"seed": 7}))
    return tmp_path


def run(*argv) -> int:
    return main([str(a) for a in argv])


class TestPipeline:
    def test_full_flow(self, workdir, capsys):
        gold = workdir / "gold.conll"
        ai = workdir / "ai.conll"
        rankf = workdir / "rank.json"
        self_dir = workdir

        assert run("gen", "--spec", workdir / "spec.json", "--out", gold) == 0
        assert run("corrupt", "--in", gold, "--noise", workdir / "noise.json",
                   "--out", ai) == 0
        assert run("rank", "--in", ai, "--strategy", "confidence",
                   "--out", rankf) == 0
        assert run("select", "--rank", rankf, "--budget", "0.2",
                   "--out", self_dir / "sel.json") == 0
        assert run("correct", "--in", ai, "--select", self_dir / "sel.json",
                   "--oracle", "--out", self_dir / "mixed.conll") == 0
        assert run("eval", "--in", self_dir / "mixed.conll",
                   "--report", self_dir / "report.json") == 0

        ranked = RankedList.from_dict(json.loads(rankf.read_text()))
        assert len(ranked.entries) == 40
        selection = SelectionSet.from_dict(
            json.loads((self_dir / "sel.json").read_text()))
        assert len(selection.ids) == 8

        mixed = parse_corpus((self_dir / "mixed.conll").read_text(), has_gold=True)
        base = parse_corpus(ai.read_text(), has_gold=True)
        assert evaluate_labels(mixed).micro_f1 >= evaluate_labels(base).micro_f1

        report = json.loads((self_dir / "report.json").read_text())
        assert set(report) == {"per_type", "micro_f1", "macro_f1", "weighted_f1"}

    def test_experiment_command(self, workdir):
        config = {
            "synthetic": {"n_examples": 30},
            "noise": {},
            "strategies": ["random", "confidence"],
            "budgets": [0.1],
            "seeds": [0],
        }
        (workdir / "exp.json").write_text(json.dumps(config))
        out = workdir / "results"
        assert run("experiment", "--config", workdir / "exp.json", "--out", out) == 0
        assert (out / "report.json").exists()
        assert (out / "report.csv").exists()
        assert (out / "report.md").exists()

    def test_correct_with_journal(self, workdir):
        gold = workdir / "gold.conll"
        run("gen", "--spec", workdir / "spec.json", "--out", gold)
        run("corrupt", "--in", gold, "--noise", workdir / "noise.json",
            "--out", workdir / "ai.conll")
        corpus = parse_corpus((workdir / "ai.conll").read_text(), has_gold=True)
        target = corpus.ids[0]
        (workdir / "sel.json").write_text(json.dumps(
            {"strategy": "confidence", "budget_fraction": 0.1, "ids": [target]}))
        record = {"example_id": target,
                  "tags": [str(t.gold_label) for t in corpus.example(target).tokens],
                  "annotator": "expert", "submitted_at": "2026-01-01T00:00:00+00:00"}
        (workdir / "journal.jsonl").write_text(json.dumps(record) + "\n")
        assert run("correct", "--in", workdir / "ai.conll",
                   "--select", workdir / "sel.json",
                   "--corrections", workdir / "journal.jsonl",
                   "--out", workdir / "mixed.conll") == 0
        mixed = parse_corpus((workdir / "mixed.conll").read_text(), has_gold=True)
        fixed = mixed.example(target)
        assert all(t.ai_label == t.gold_label for t in fixed.tokens)


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        assert run("rank", "--strategy", "confidence") == 1  # missing --in/--out
        assert run("frobnicate") == 1

    def test_bad_budget_is_usage_error(self, workdir):
        (workdir / "rank.json").write_text(json.dumps(
            {"strategy": "length", "entries": [[0, 1.0]]}))
        assert run("select", "--rank", workdir / "rank.json", "--budget", "1.7",
                   "--out", workdir / "sel.json") == 1

    def test_missing_file_is_2(self, workdir):
        assert run("eval", "--in", workdir / "nope.conll",
                   "--report", workdir / "r.json") == 2

    def test_malformed_corpus_is_2(self, workdir):
        bad = workdir / "bad.conll"
        bad.write_text("word 3.7 O\n")
        assert run("eval", "--in", bad, "--report", workdir / "r.json") == 2

    def test_eval_without_gold_is_2(self, workdir):
        plain = workdir / "plain.conll"
        plain.write_text("word 0.5 O\n")
        assert run("eval", "--in", plain, "--report", workdir / "r.json") == 2

    def test_infeasible_spec_is_1(self, workdir):
        (workdir / "spec.json").write_text(json.dumps(
            {"n_examples": 5, "min_tokens": 2, "max_tokens": 3,
             "entities_per_example": 50}))
        assert run("gen", "--spec", workdir / "spec.json",
                   "--out", workdir / "g.conll") == 1
