"""End-to-end experiment grid: corrupt, rank, select, correct, evaluate.

One corruption per seed is shared by every (strategy, budget) cell so the
strategies compete on identical noisy data. Each cell corrects a fresh
copy; nothing leaks between cells. Reports are deterministic given the
config (timestamps live in a separate metadata field).
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .corpus import Corpus, Example, parse_corpus, sniff_has_gold
from .evaluation import (
    CorrectionStats,
    EvalReport,
    correction_stats,
    evaluate_labels,
    gap_closure,
)
from .ranking import SelectionSet, Strategy, rank, select_budget
from .simulator import NoiseConfig, SyntheticSpec, corrupt, generate_gold, oracle_correct

DEFAULT_BUDGETS = (0.05, 0.10, 0.20)
DEFAULT_STRATEGIES = (Strategy.RANDOM, Strategy.LENGTH, Strategy.ENTITY,
                      Strategy.CONFIDENCE)


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid definition: data source, noise model, strategies, budgets, seeds."""

    noise: NoiseConfig = NoiseConfig()
    input_path: str | None = None
    synthetic: SyntheticSpec | None = None
    strategies: tuple[Strategy, ...] = DEFAULT_STRATEGIES
    budgets: tuple[float, ...] = DEFAULT_BUDGETS
    seeds: tuple[int, ...] = (0,)
    gold_seed: int = 0

    def __post_init__(self) -> None:
        if (self.input_path is None) == (self.synthetic is None):
            raise ValueError("configure exactly one of input_path and synthetic")
        if not self.strategies or not self.budgets or not self.seeds:
            raise ValueError("need at least one strategy, budget and seed")
        for b in self.budgets:
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"budget {b} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "input": self.input_path,
            "synthetic": self.synthetic.to_dict() if self.synthetic else None,
            "noise": self.noise.to_dict(),
            "strategies": [s.value for s in self.strategies],
            "budgets": list(self.budgets),
            "seeds": list(self.seeds),
            "gold_seed": self.gold_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        kwargs: dict = {}
        if data.get("input") is not None:
            kwargs["input_path"] = data["input"]
        if data.get("synthetic") is not None:
            kwargs["synthetic"] = SyntheticSpec.from_dict(data["synthetic"])
        if data.get("noise") is not None:
            kwargs["noise"] = NoiseConfig.from_dict(data["noise"])
        if data.get("strategies"):
            kwargs["strategies"] = tuple(Strategy(s) for s in data["strategies"])
        if data.get("budgets"):
            kwargs["budgets"] = tuple(float(b) for b in data["budgets"])
        if data.get("seeds"):
            kwargs["seeds"] = tuple(int(s) for s in data["seeds"])
        if data.get("gold_seed") is not None:
            kwargs["gold_seed"] = int(data["gold_seed"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Cell:
    """One grid cell; ``error`` is set (and results are None) when it failed."""

    strategy: Strategy
    budget: float
    seed: int
    eval: EvalReport | None
    stats: CorrectionStats | None
    gap_closure_micro: float | None
    gap_closure_macro: float | None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "budget": self.budget,
            "seed": self.seed,
            "eval": self.eval.to_dict() if self.eval else None,
            "stats": self.stats.to_dict() if self.stats else None,
            "gap_closure_micro": self.gap_closure_micro,
            "gap_closure_macro": self.gap_closure_macro,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Cell:
        return cls(
            strategy=Strategy(data["strategy"]),
            budget=data["budget"],
            seed=data["seed"],
            eval=EvalReport.from_dict(data["eval"]) if data["eval"] else None,
            stats=CorrectionStats.from_dict(data["stats"]) if data["stats"] else None,
            gap_closure_micro=data["gap_closure_micro"],
            gap_closure_macro=data["gap_closure_macro"],
            error=data.get("error"),
        )


@dataclass(frozen=True)
class ReportBundle:
    """Everything a report renders: anchors, per-cell results, aggregates."""

    config: ExperimentConfig
    anchors: dict[str, EvalReport]
    cells: tuple[Cell, ...]
    aggregates: tuple[dict, ...]
    meta: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "anchors": {name: report.to_dict()
                        for name, report in self.anchors.items()},
            "cells": [cell.to_dict() for cell in self.cells],
            "aggregates": list(self.aggregates),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ReportBundle:
        return cls(
            config=ExperimentConfig.from_dict(data["config"]),
            anchors={name: EvalReport.from_dict(rep)
                     for name, rep in data["anchors"].items()},
            cells=tuple(Cell.from_dict(c) for c in data["cells"]),
            aggregates=tuple(data["aggregates"]),
            meta=data["meta"],
        )


def load_gold_corpus(cfg: ExperimentConfig) -> Corpus:
    """Load or synthesize the gold corpus named by the config.

    A three-column input file is treated as gold tags (the machine column is
    overwritten by corruption anyway); a four-column file is parsed as-is.
    """
    if cfg.synthetic is not None:
        return generate_gold(cfg.synthetic, cfg.gold_seed)
    assert cfg.input_path is not None
    text = Path(cfg.input_path).read_text(encoding="utf-8")
    if sniff_has_gold(text):
        return parse_corpus(text, has_gold=True)
    plain = parse_corpus(text, has_gold=False)
    examples = tuple(
        Example(ex.id, tuple(replace(tok, gold_label=tok.ai_label)
                             for tok in ex.tokens))
        for ex in plain.examples
    )
    return Corpus(examples=examples, entity_types=plain.entity_types, has_gold=True)


def _mean_sd(values: list[float]) -> dict:
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return {"mean": mean, "sd": sd}


def _optional_mean_sd(values: list[float | None]) -> dict | None:
    present = [v for v in values if v is not None]
    return _mean_sd(present) if present else None


def run_experiment(cfg: ExperimentConfig) -> ReportBundle:
    """Execute the full grid and assemble the report bundle.

    The experiment seed drives both the corruption and the random-baseline
    draw for that repetition. Cell failures are recorded in place and do
    not abort the grid.
    """
    gold = load_gold_corpus(cfg)
    all_ids = SelectionSet(Strategy.RANDOM, 1.0, gold.ids)

    cells: list[Cell] = []
    ai_evals: dict[int, EvalReport] = {}
    gold_eval: EvalReport | None = None

    for seed in cfg.seeds:
        noisy = corrupt(gold, replace(cfg.noise, seed=seed))
        ai_eval = evaluate_labels(noisy)
        ai_evals[seed] = ai_eval
        if gold_eval is None:
            gold_eval = evaluate_labels(oracle_correct(noisy, all_ids))
        for strategy in cfg.strategies:
            ranked = rank(noisy, strategy, seed=seed)
            for budget in cfg.budgets:
                try:
                    selection = select_budget(ranked, budget)
                    corrected = oracle_correct(noisy, selection)
                    report = evaluate_labels(corrected)
                    stats = correction_stats(noisy, selection)
                    closures = {}
                    for metric in ("micro_f1", "macro_f1"):
                        base = getattr(ai_eval, metric)
                        ceiling = getattr(gold_eval, metric)
                        closures[metric] = (
                            gap_closure(base, getattr(report, metric), ceiling)
                            if ceiling != base else None)
                    cells.append(Cell(
                        strategy=strategy, budget=budget, seed=seed,
                        eval=report, stats=stats,
                        gap_closure_micro=closures["micro_f1"],
                        gap_closure_macro=closures["macro_f1"]))
                except Exception as err:  # record, keep the grid going
                    cells.append(Cell(
                        strategy=strategy, budget=budget, seed=seed,
                        eval=None, stats=None, gap_closure_micro=None,
                        gap_closure_macro=None, error=str(err)))

    assert gold_eval is not None
    anchors = {"ai_only": ai_evals[cfg.seeds[0]], "gold": gold_eval}
    aggregates = _aggregate(cfg, cells, ai_evals, gold_eval)
    meta = {"timestamp": datetime.now(timezone.utc).isoformat()}
    return ReportBundle(config=cfg, anchors=anchors, cells=tuple(cells),
                        aggregates=tuple(aggregates), meta=meta)


def _aggregate(cfg: ExperimentConfig, cells: list[Cell],
               ai_evals: dict[int, EvalReport], gold_eval: EvalReport) -> list[dict]:
    rows: list[dict] = []
    rows.append({
        "strategy": "ai_only", "budget": 0.0, "n_seeds": len(cfg.seeds),
        "micro_f1": _mean_sd([r.micro_f1 for r in ai_evals.values()]),
        "macro_f1": _mean_sd([r.macro_f1 for r in ai_evals.values()]),
        "weighted_f1": _mean_sd([r.weighted_f1 for r in ai_evals.values()]),
        "gap_closure_micro": None, "gap_closure_macro": None,
        "entities_identified": None, "entities_corrected": None,
        "examples_requiring_correction": None,
    })
    for strategy in cfg.strategies:
        for budget in cfg.budgets:
            group = [c for c in cells
                     if c.strategy is strategy and c.budget == budget
                     and c.error is None and c.eval is not None]
            if not group:
                continue
            row = {
                "strategy": strategy.value, "budget": budget, "n_seeds": len(group),
                "micro_f1": _mean_sd([c.eval.micro_f1 for c in group]),
                "macro_f1": _mean_sd([c.eval.macro_f1 for c in group]),
                "weighted_f1": _mean_sd([c.eval.weighted_f1 for c in group]),
                "gap_closure_micro": _optional_mean_sd(
                    [c.gap_closure_micro for c in group]),
                "gap_closure_macro": _optional_mean_sd(
                    [c.gap_closure_macro for c in group]),
                "entities_identified": _mean_sd(
                    [float(c.stats.entities_identified) for c in group]),
                "entities_corrected": _mean_sd(
                    [float(c.stats.entities_corrected) for c in group]),
                "examples_requiring_correction": _mean_sd(
                    [float(c.stats.examples_requiring_correction) for c in group]),
            }
            rows.append(row)
    rows.append({
        "strategy": "gold", "budget": 1.0, "n_seeds": len(cfg.seeds),
        "micro_f1": _mean_sd([gold_eval.micro_f1]),
        "macro_f1": _mean_sd([gold_eval.macro_f1]),
        "weighted_f1": _mean_sd([gold_eval.weighted_f1]),
        "gap_closure_micro": None, "gap_closure_macro": None,
        "entities_identified": None, "entities_corrected": None,
        "examples_requiring_correction": None,
    })
    return rows


def bundle_to_json(bundle: ReportBundle) -> str:
    return json.dumps(bundle.to_dict(), indent=2) + "\n"


CSV_FIELDS = [
    "strategy", "budget", "seed", "micro_f1", "macro_f1", "weighted_f1",
    "gap_closure_micro", "gap_closure_macro", "entities_identified",
    "entities_corrected", "pct_entities_corrected", "examples_selected",
    "examples_requiring_correction", "pct_examples_requiring_correction",
    "gold_spans_missed", "error",
]


def bundle_to_csv(bundle: ReportBundle) -> str:
    """One row per grid cell plus the two anchor rows (seed column empty)."""
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    anchor_rows = [r for r in bundle.aggregates if r["strategy"] in ("ai_only", "gold")]
    for row in anchor_rows:
        writer.writerow({
            "strategy": row["strategy"], "budget": row["budget"], "seed": "",
            "micro_f1": row["micro_f1"]["mean"],
            "macro_f1": row["macro_f1"]["mean"],
            "weighted_f1": row["weighted_f1"]["mean"],
        })
    for cell in bundle.cells:
        row = {
            "strategy": cell.strategy.value, "budget": cell.budget,
            "seed": cell.seed, "error": cell.error or "",
        }
        if cell.eval is not None:
            row.update(micro_f1=cell.eval.micro_f1, macro_f1=cell.eval.macro_f1,
                       weighted_f1=cell.eval.weighted_f1,
                       gap_closure_micro=cell.gap_closure_micro,
                       gap_closure_macro=cell.gap_closure_macro)
        if cell.stats is not None:
            row.update(entities_identified=cell.stats.entities_identified,
                       entities_corrected=cell.stats.entities_corrected,
                       pct_entities_corrected=cell.stats.pct_entities_corrected,
                       examples_selected=cell.stats.examples_selected,
                       examples_requiring_correction=
                       cell.stats.examples_requiring_correction,
                       pct_examples_requiring_correction=
                       cell.stats.pct_examples_requiring_correction,
                       gold_spans_missed=cell.stats.gold_spans_missed)
        writer.writerow(row)
    return out.getvalue()


def _fmt(stat: dict | None, digits: int = 3) -> str:
    if stat is None:
        return ""
    if stat["sd"] > 0:
        return f"{stat['mean']:.{digits}f} ± {stat['sd']:.{digits}f}"
    return f"{stat['mean']:.{digits}f}"


def bundle_to_markdown(bundle: ReportBundle) -> str:
    """Strategy-by-budget table, best mean per budget bolded per F1 column."""
    types = [t.entity_type for t in bundle.anchors["gold"].per_type]
    by_key = {(r["strategy"], r["budget"]): r for r in bundle.aggregates}
    strategies = [s.value for s in bundle.config.strategies]
    budgets = list(bundle.config.budgets)

    type_cells: dict[tuple[str, float], dict[str, dict]] = {}
    for (strategy, budget), _row in by_key.items():
        group = [c for c in bundle.cells
                 if c.strategy.value == strategy and c.budget == budget
                 and c.eval is not None]
        if group:
            type_cells[(strategy, budget)] = {
                t: _mean_sd([next(ts.f1 for ts in c.eval.per_type
                                  if ts.entity_type == t) for c in group])
                for t in types
            }

    lines = ["# Label-quality report", ""]
    header = ["Budget", "Strategy"] + types + ["Micro F1", "Macro F1", "Weighted F1"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))

    def anchor_line(label: str, name: str) -> str:
        report = bundle.anchors[name]
        agg = by_key[(name, 0.0 if name == "ai_only" else 1.0)]
        per_type = {t.entity_type: f"{t.f1:.3f}" for t in report.per_type}
        cols = [label, ""] + [per_type[t] for t in types] + [
            _fmt(agg["micro_f1"]), _fmt(agg["macro_f1"]), _fmt(agg["weighted_f1"])]
        return "| " + " | ".join(cols) + " |"

    lines.append(anchor_line("0% (uncorrected)", "ai_only"))
    for budget in budgets:
        best: dict[str, float] = {}
        for metric in ("micro_f1", "macro_f1", "weighted_f1"):
            candidates = [by_key[(s, budget)][metric]["mean"]
                          for s in strategies if (s, budget) in by_key]
            if candidates:
                best[metric] = max(candidates)
        best_type: dict[str, float] = {}
        for t in types:
            candidates = [type_cells[(s, budget)][t]["mean"]
                          for s in strategies if (s, budget) in type_cells]
            if candidates:
                best_type[t] = max(candidates)
        for strategy in strategies:
            if (strategy, budget) not in by_key:
                continue
            row = by_key[(strategy, budget)]
            cols = [f"{budget:.0%}", strategy]
            for t in types:
                text = _fmt(type_cells[(strategy, budget)][t])
                if type_cells[(strategy, budget)][t]["mean"] == best_type.get(t):
                    text = f"**{text}**"
                cols.append(text)
            for metric in ("micro_f1", "macro_f1", "weighted_f1"):
                text = _fmt(row[metric])
                if row[metric]["mean"] == best.get(metric):
                    text = f"**{text}**"
                cols.append(text)
            lines.append("| " + " | ".join(cols) + " |")
    lines.append(anchor_line("100% (fully corrected)", "gold"))

    lines += ["", "## Correction workload", ""]
    header2 = ["Budget", "Strategy", "Entities identified", "Entities corrected",
               "Examples requiring correction"]
    lines.append("| " + " | ".join(header2) + " |")
    lines.append("|" + "---|" * len(header2))
    for budget in budgets:
        for strategy in strategies:
            row = by_key.get((strategy, budget))
            if row is None or row["entities_identified"] is None:
                continue
            lines.append("| " + " | ".join([
                f"{budget:.0%}", strategy,
                _fmt(row["entities_identified"], 1),
                _fmt(row["entities_corrected"], 1),
                _fmt(row["examples_requiring_correction"], 1),
            ]) + " |")
    return "\n".join(lines) + "\n"


def emit_report(bundle: ReportBundle, out_dir: str | Path,
                formats: tuple[str, ...] = ("json", "csv", "markdown")) -> dict[str, Path]:
    """Write the bundle to ``out_dir`` in the requested formats."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    renderers = {"json": ("report.json", bundle_to_json),
                 "csv": ("report.csv", bundle_to_csv),
                 "markdown": ("report.md", bundle_to_markdown)}
    paths: dict[str, Path] = {}
    for fmt in formats:
        if fmt not in renderers:
            raise ValueError(f"unknown report format {fmt!r}")
        filename, render = renderers[fmt]
        path = out / filename
        path.write_text(render(bundle), encoding="utf-8")
        paths[fmt] = path
    return paths
