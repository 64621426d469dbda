"""Entity-level label-quality scoring and correction-workload statistics.

A predicted span is a true positive iff a gold span with identical
boundaries and type exists in the same example (strict exact match,
one-to-one). Precision, recall and F1 fall back to 0 whenever a
denominator is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, LabelSource, MissingGoldError, decode_spans
from .ranking import SelectionSet


@dataclass(frozen=True)
class TypeScore:
    """Confusion counts and derived scores for one entity type."""

    entity_type: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    support: int

    @classmethod
    def from_counts(cls, entity_type: str, tp: int, fp: int, fn: int) -> TypeScore:
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(entity_type=entity_type, tp=tp, fp=fp, fn=fn,
                   precision=precision, recall=recall, f1=f1, support=tp + fn)

    @property
    def participates(self) -> bool:
        """Whether this type occurs in either label column."""
        return self.tp + self.fp + self.fn > 0

    def to_dict(self) -> dict:
        return {
            "entity_type": self.entity_type,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "support": self.support,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TypeScore:
        return cls(entity_type=data["entity_type"], tp=data["tp"], fp=data["fp"],
                   fn=data["fn"], precision=data["precision"], recall=data["recall"],
                   f1=data["f1"], support=data["support"])


@dataclass(frozen=True)
class EvalReport:
    """Per-type scores plus micro, macro and support-weighted averages."""

    per_type: tuple[TypeScore, ...]
    micro_f1: float
    macro_f1: float
    weighted_f1: float

    def to_dict(self) -> dict:
        return {
            "per_type": [t.to_dict() for t in self.per_type],
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
        }

    @classmethod
    def from_dict(cls, data: dict) -> EvalReport:
        return cls(
            per_type=tuple(TypeScore.from_dict(t) for t in data["per_type"]),
            micro_f1=data["micro_f1"],
            macro_f1=data["macro_f1"],
            weighted_f1=data["weighted_f1"],
        )


@dataclass(frozen=True)
class CorrectionStats:
    """Workload counts over a review selection.

    ``entities_corrected`` counts predicted spans in the selection with no
    exact gold match; gold spans the prediction missed entirely are the
    separate ``gold_spans_missed`` (they are not "identified", so they
    cannot be "corrected").
    """

    entities_identified: int
    entities_corrected: int
    pct_entities_corrected: float
    examples_selected: int
    examples_requiring_correction: int
    pct_examples_requiring_correction: float
    gold_spans_missed: int

    def to_dict(self) -> dict:
        return {
            "entities_identified": self.entities_identified,
            "entities_corrected": self.entities_corrected,
            "pct_entities_corrected": self.pct_entities_corrected,
            "examples_selected": self.examples_selected,
            "examples_requiring_correction": self.examples_requiring_correction,
            "pct_examples_requiring_correction": self.pct_examples_requiring_correction,
            "gold_spans_missed": self.gold_spans_missed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> CorrectionStats:
        return cls(**{f: data[f] for f in (
            "entities_identified", "entities_corrected", "pct_entities_corrected",
            "examples_selected", "examples_requiring_correction",
            "pct_examples_requiring_correction", "gold_spans_missed")})


def evaluate_labels(corpus: Corpus) -> EvalReport:
    """Score the machine-label column against gold, entity level.

    Reports one TypeScore per declared entity type. Macro and weighted
    averages run over the types present in either column; declared types
    absent from both are listed with zero counts but do not drag the
    averages (otherwise a fully corrected corpus could score below 1.0).
    """
    if not corpus.has_gold:
        raise MissingGoldError("evaluation needs gold labels")
    counts: dict[str, list[int]] = {t: [0, 0, 0] for t in sorted(corpus.entity_types)}
    for ex in corpus.examples:
        pred = set(decode_spans(ex, LabelSource.AI))
        gold = set(decode_spans(ex, LabelSource.GOLD))
        for span in pred & gold:
            counts[span.entity_type][0] += 1
        for span in pred - gold:
            counts[span.entity_type][1] += 1
        for span in gold - pred:
            counts[span.entity_type][2] += 1

    per_type = tuple(TypeScore.from_counts(t, *counts[t]) for t in counts)
    scored = [t for t in per_type if t.participates]

    micro_tp = sum(t.tp for t in per_type)
    micro_fp = sum(t.fp for t in per_type)
    micro_fn = sum(t.fn for t in per_type)
    micro = TypeScore.from_counts("", micro_tp, micro_fp, micro_fn)

    macro_f1 = sum(t.f1 for t in scored) / len(scored) if scored else 0.0
    total_support = sum(t.support for t in scored)
    weighted_f1 = (sum(t.f1 * t.support for t in scored) / total_support
                   if total_support else 0.0)

    return EvalReport(per_type=per_type, micro_f1=micro.f1,
                      macro_f1=macro_f1, weighted_f1=weighted_f1)


def gap_closure(f1_ai: float, f1_mixed: float, f1_gold: float) -> float:
    """Fraction of the machine-to-human quality gap recovered by correction."""
    if f1_gold == f1_ai:
        raise ValueError("degenerate gap: baseline and ceiling F1 are equal")
    return (f1_mixed - f1_ai) / (f1_gold - f1_ai)


def correction_stats(ai_corpus: Corpus, selection: SelectionSet) -> CorrectionStats:
    """Count the correction work inside a selection."""
    if not ai_corpus.has_gold:
        raise MissingGoldError("correction statistics need gold labels")
    identified = corrected = requiring = missed = 0
    for example_id in selection.ids:
        ex = ai_corpus.example(example_id)
        pred = set(decode_spans(ex, LabelSource.AI))
        gold = set(decode_spans(ex, LabelSource.GOLD))
        identified += len(pred)
        corrected += len(pred - gold)
        missed += len(gold - pred)
        if any(tok.ai_label != tok.gold_label for tok in ex.tokens):
            requiring += 1
    selected = len(selection.ids)
    return CorrectionStats(
        entities_identified=identified,
        entities_corrected=corrected,
        pct_entities_corrected=100.0 * corrected / identified if identified else 0.0,
        examples_selected=selected,
        examples_requiring_correction=requiring,
        pct_examples_requiring_correction=100.0 * requiring / selected if selected else 0.0,
        gold_spans_missed=missed,
    )
