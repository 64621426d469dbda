"""Command-line pipeline: gen, corrupt, rank, select, correct, eval,
experiment, serve.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(malformed corpus, missing gold column, unknown ids, unreadable files).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import (
    Corpus,
    LabelSource,
    MissingGoldError,
    ParseError,
    parse_corpus,
    sniff_has_gold,
    write_corpus,
)
from .evaluation import evaluate_labels
from .experiment import ExperimentConfig, emit_report, run_experiment
from .ranking import RankedList, SelectionSet, Strategy, rank, select_budget
from .service import ReviewSession, SubmissionError, serve
from .simulator import NoiseConfig, SyntheticSpec, corrupt, generate_gold, oracle_correct

USAGE_EXIT = 1
DATA_EXIT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this pipeline reserves 2 for data."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read_corpus(path: str) -> Corpus:
    text = Path(path).read_text(encoding="utf-8")
    return parse_corpus(text, has_gold=sniff_has_gold(text))


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _write_json(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _cmd_gen(args) -> None:
    spec_data = _read_json(args.spec)
    seed = args.seed if args.seed is not None else int(spec_data.get("seed", 0))
    spec = SyntheticSpec.from_dict(spec_data)
    corpus = generate_gold(spec, seed)
    Path(args.out).write_text(write_corpus(corpus, LabelSource.GOLD), encoding="utf-8")
    print(f"wrote {len(corpus)} examples to {args.out}")


def _cmd_corrupt(args) -> None:
    corpus = _read_corpus(args.infile)
    if not corpus.has_gold:
        raise MissingGoldError(f"{args.infile} has no gold column to corrupt from")
    cfg = NoiseConfig.from_dict(_read_json(args.noise))
    if args.seed is not None:
        from dataclasses import replace
        cfg = replace(cfg, seed=args.seed)
    noisy = corrupt(corpus, cfg)
    Path(args.out).write_text(write_corpus(noisy, LabelSource.GOLD), encoding="utf-8")
    print(f"corrupted {len(noisy)} examples with seed {cfg.seed} into {args.out}")


def _cmd_rank(args) -> None:
    corpus = _read_corpus(args.infile)
    ranked = rank(corpus, Strategy(args.strategy), seed=args.seed)
    _write_json(args.out, ranked.to_dict())
    print(f"ranked {len(ranked.entries)} examples by {args.strategy} into {args.out}")


def _cmd_select(args) -> None:
    ranked = RankedList.from_dict(_read_json(args.rank))
    selection = select_budget(ranked, args.budget)
    _write_json(args.out, selection.to_dict())
    print(f"selected {len(selection.ids)} of {len(ranked.entries)} examples "
          f"into {args.out}")


def _cmd_correct(args) -> None:
    corpus = _read_corpus(args.infile)
    selection = SelectionSet.from_dict(_read_json(args.select))
    if args.oracle:
        corrected = oracle_correct(corpus, selection)
    else:
        queue = RankedList(strategy=selection.strategy,
                           entries=tuple((i, 0.0) for i in selection.ids))
        session = ReviewSession(corpus, queue, 1.0, journal_path=args.corrections)
        corrected = session.corrected_corpus()
    mode = LabelSource.GOLD if corpus.has_gold else LabelSource.AI
    Path(args.out).write_text(write_corpus(corrected, mode), encoding="utf-8")
    source = "oracle" if args.oracle else args.corrections
    print(f"corrected {len(selection.ids)} examples ({source}) into {args.out}")


def _cmd_eval(args) -> None:
    corpus = _read_corpus(args.infile)
    report = evaluate_labels(corpus)
    _write_json(args.report, report.to_dict())
    print(f"micro F1 {report.micro_f1:.4f}  macro F1 {report.macro_f1:.4f}  "
          f"weighted F1 {report.weighted_f1:.4f}")


def _cmd_experiment(args) -> None:
    cfg = ExperimentConfig.from_dict(_read_json(args.config))
    bundle = run_experiment(cfg)
    paths = emit_report(bundle, args.out, formats=tuple(args.formats.split(",")))
    for fmt, path in paths.items():
        print(f"{fmt}: {path}")


def _cmd_serve(args) -> None:
    corpus = _read_corpus(args.infile)
    ranked = RankedList.from_dict(_read_json(args.rank))
    session = ReviewSession(corpus, ranked, args.budget,
                            journal_path=args.journal, export_path=args.export_out)
    print(f"serving {len(session.queue_ids)} queued examples on port {args.port} "
          f"(journal: {session.journal_path})")
    serve(session, port=args.port, ui_dir=args.ui)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hcoal",
                     description="budgeted human review of machine-generated labels")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic gold corpus")
    p.add_argument("--spec", required=True, help="synthetic-spec JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("corrupt", help="rewrite machine labels with simulated noise")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--noise", required=True, help="noise-config JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corrupt)

    p = sub.add_parser("rank", help="order examples for review")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--strategy", required=True,
                   choices=[s.value for s in Strategy])
    p.add_argument("--seed", type=int, default=0, help="random strategy only")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("select", help="take the budgeted prefix of a ranking")
    p.add_argument("--rank", required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("correct", help="apply oracle or journaled corrections")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--select", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--oracle", action="store_true")
    mode.add_argument("--corrections", help="correction journal (JSONL)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_correct)

    p = sub.add_parser("eval", help="entity-level F1 against the gold column")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run the full strategy/budget grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--formats", default="json,csv,markdown")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("serve", help="serve the review queue over HTTP")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rank", required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--journal", default="journal.jsonl")
    p.add_argument("--export-out", default=None)
    p.add_argument("--ui", default=None, help="static UI directory to mount at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
        return 0
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_EXIT
    except (ParseError, MissingGoldError, SubmissionError, KeyError,
            LookupError, OSError, json.JSONDecodeError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return DATA_EXIT
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
