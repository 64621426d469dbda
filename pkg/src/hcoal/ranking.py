"""Review-prioritization orderings over a corpus and budgeted selection.

Three content-based strategies (longest first, most predicted entities
first, lowest minimum entity-token confidence first) plus a seeded random
baseline. Every strategy yields a deterministic total order: ties are
broken by ascending example id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import Corpus, LabelSource, decode_spans

# Sentinel score for examples with no predicted entity tokens: minimum
# confidence over an empty set is undefined, so they rank last.
NO_ENTITY_SCORE = 1.0


class Strategy(Enum):
    LENGTH = "length"
    ENTITY = "entity"
    CONFIDENCE = "confidence"
    RANDOM = "random"


@dataclass(frozen=True)
class RankedList:
    """A strategy's total order over example ids, with per-example scores."""

    strategy: Strategy
    entries: tuple[tuple[int, float], ...]

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "entries": [[i, s] for i, s in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RankedList:
        return cls(
            strategy=Strategy(data["strategy"]),
            entries=tuple((int(i), float(s)) for i, s in data["entries"]),
        )


@dataclass(frozen=True)
class SelectionSet:
    """The budgeted prefix of a ranked list, in rank order."""

    strategy: Strategy
    budget_fraction: float
    ids: tuple[int, ...]

    def __contains__(self, example_id: int) -> bool:
        return example_id in self.id_set

    @property
    def id_set(self) -> frozenset[int]:
        return frozenset(self.ids)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "budget_fraction": self.budget_fraction,
            "ids": list(self.ids),
        }

    @classmethod
    def from_dict(cls, data: dict) -> SelectionSet:
        return cls(
            strategy=Strategy(data["strategy"]),
            budget_fraction=float(data["budget_fraction"]),
            ids=tuple(int(i) for i in data["ids"]),
        )


def _descending(corpus: Corpus, strategy: Strategy, scores: list[float]) -> RankedList:
    order = sorted(zip(corpus.ids, scores), key=lambda e: (-e[1], e[0]))
    return RankedList(strategy=strategy, entries=tuple(order))


def _ascending(corpus: Corpus, strategy: Strategy, scores: list[float]) -> RankedList:
    order = sorted(zip(corpus.ids, scores), key=lambda e: (e[1], e[0]))
    return RankedList(strategy=strategy, entries=tuple(order))


def length_rank(corpus: Corpus) -> RankedList:
    """Order examples from longest to shortest (score = token count)."""
    return _descending(corpus, Strategy.LENGTH,
                       [float(len(ex)) for ex in corpus.examples])


def entity_rank(corpus: Corpus, token_level: bool = False) -> RankedList:
    """Order examples by predicted entity count, most first.

    Counts decoded entity spans by default; with ``token_level=True`` counts
    B/I tokens instead (the literal indicator-sum variant, kept for
    comparison).
    """
    if token_level:
        scores = [float(sum(tok.ai_label.is_entity for tok in ex.tokens))
                  for ex in corpus.examples]
    else:
        scores = [float(len(decode_spans(ex, LabelSource.AI)))
                  for ex in corpus.examples]
    return _descending(corpus, Strategy.ENTITY, scores)


def confidence_rank(corpus: Corpus) -> RankedList:
    """Order examples by minimum entity-token confidence, lowest first.

    Examples whose prediction contains no entity token get NO_ENTITY_SCORE
    and rank strictly last (even past real scores of exactly 1.0): the
    strategy can only speak about labels that exist.
    """
    scored = []
    for ex in corpus.examples:
        confs = [tok.confidence for tok in ex.tokens if tok.ai_label.is_entity]
        if confs:
            scored.append((0, min(confs), ex.id))
        else:
            scored.append((1, NO_ENTITY_SCORE, ex.id))
    scored.sort()
    return RankedList(strategy=Strategy.CONFIDENCE,
                      entries=tuple((i, s) for _, s, i in scored))


def random_rank(corpus: Corpus, seed: int) -> RankedList:
    """Uniform random order, deterministic in the seed.

    Draws one uniform value per example from NumPy's PCG64 generator seeded
    with ``seed`` and sorts ascending; the draws are the scores. Depends
    only on corpus size and seed.
    """
    rng = np.random.default_rng(seed & 0xFFFF_FFFF_FFFF_FFFF)
    draws = rng.random(len(corpus))
    scores = [float(d) for d in draws]
    return _ascending(corpus, Strategy.RANDOM, scores)


def rank(corpus: Corpus, strategy: Strategy, seed: int = 0) -> RankedList:
    """Dispatch to the named strategy. ``seed`` is used by RANDOM only."""
    if strategy is Strategy.LENGTH:
        return length_rank(corpus)
    if strategy is Strategy.ENTITY:
        return entity_rank(corpus)
    if strategy is Strategy.CONFIDENCE:
        return confidence_rank(corpus)
    return random_rank(corpus, seed)


def select_budget(ranked: RankedList, budget_fraction: float) -> SelectionSet:
    """Take the first ceil(budget_fraction * N) entries of the ranking.

    Products within 1e-9 of an integer are treated as exact, so e.g.
    10% of 100 examples selects 10, never 11.
    """
    if not 0.0 <= budget_fraction <= 1.0:
        raise ValueError(f"budget fraction {budget_fraction} outside [0, 1]")
    n = len(ranked.entries)
    count = min(n, max(0, math.ceil(budget_fraction * n - 1e-9)))
    return SelectionSet(
        strategy=ranked.strategy,
        budget_fraction=budget_fraction,
        ids=tuple(i for i, _ in ranked.entries[:count]),
    )
