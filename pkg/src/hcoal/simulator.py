"""Stand-ins for the black-box labeling service and the human expert.

``generate_gold`` builds a synthetic gold-labeled corpus, ``corrupt``
rewrites its machine-label column through a span-level error process with
calibrated confidences, and ``oracle_correct`` replays the expert by
substituting gold labels on a selected subset.

Randomness: every per-example stream is a PCG64 generator derived from
(seed, example id), so corruption of one example never depends on another
and per-example work is schedule-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .corpus import (
    Corpus,
    EntitySpan,
    Example,
    LabelSource,
    MissingGoldError,
    Token,
    decode_spans,
    encode_tags,
)
from .ranking import SelectionSet

DEFAULT_ENTITY_TYPES = ("PROBLEM", "TEST", "TREATMENT")


def _example_rng(seed: int, example_id: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed & 0xFFFF_FFFF_FFFF_FFFF,
                                 spawn_key=(example_id,))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a synthetic gold corpus."""

    n_examples: int
    min_tokens: int = 6
    max_tokens: int = 16
    entity_types: tuple[str, ...] = DEFAULT_ENTITY_TYPES
    entities_per_example: float = 2.0
    vocab_size: int = 500

    def __post_init__(self) -> None:
        if self.n_examples < 0:
            raise ValueError("n_examples must be non-negative")
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ValueError("need 1 <= min_tokens <= max_tokens")
        if not self.entity_types:
            raise ValueError("need at least one entity type")
        if self.entities_per_example < 0 or self.vocab_size < 1:
            raise ValueError("entities_per_example and vocab_size must be positive")
        if self.entities_per_example > self.max_tokens:
            raise ValueError(
                f"{self.entities_per_example} expected entities cannot fit in "
                f"{self.max_tokens} tokens")

    def to_dict(self) -> dict:
        return {
            "n_examples": self.n_examples,
            "min_tokens": self.min_tokens,
            "max_tokens": self.max_tokens,
            "entity_types": list(self.entity_types),
            "entities_per_example": self.entities_per_example,
            "vocab_size": self.vocab_size,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SyntheticSpec:
        known = {f: data[f] for f in
                 ("n_examples", "min_tokens", "max_tokens", "entities_per_example",
                  "vocab_size") if f in data}
        if "entity_types" in data:
            known["entity_types"] = tuple(data["entity_types"])
        return cls(**known)


@dataclass(frozen=True)
class NoiseConfig:
    """Parameters of the simulated labeling-service error process.

    Per gold span, in order: dropped with ``p_miss``; surviving spans get a
    uniformly random other type with ``p_type``; then one edge shifts by one
    token with ``p_boundary`` (edge and direction uniform, clipped to the
    example, skipped if the shift would collide with another span or empty
    the span). ``p_spurious`` is the expected number of extra spans per
    example (length 1-2, placed uniformly over maximal unlabeled gaps,
    skipped when nothing fits). Token confidences are Beta draws conditioned
    on whether the resulting tag equals gold.

    Defaults target roughly 15% of predicted entities being erroneous, with
    clearly separable confidences.
    """

    p_miss: float = 0.04
    p_type: float = 0.08
    p_boundary: float = 0.07
    p_spurious: float = 0.10
    conf_correct: tuple[float, float] = (8.0, 2.0)
    conf_wrong: tuple[float, float] = (2.0, 4.0)
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_miss", "p_type", "p_boundary"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.p_spurious < 0:
            raise ValueError("p_spurious must be non-negative")
        for name in ("conf_correct", "conf_wrong"):
            a, b = getattr(self, name)
            if a <= 0 or b <= 0:
                raise ValueError(f"{name} Beta parameters must be > 0")

    def to_dict(self) -> dict:
        return {
            "p_miss": self.p_miss,
            "p_type": self.p_type,
            "p_boundary": self.p_boundary,
            "p_spurious": self.p_spurious,
            "conf_correct": list(self.conf_correct),
            "conf_wrong": list(self.conf_wrong),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> NoiseConfig:
        known = {f: data[f] for f in
                 ("p_miss", "p_type", "p_boundary", "p_spurious", "seed") if f in data}
        for f in ("conf_correct", "conf_wrong"):
            if f in data:
                known[f] = tuple(data[f])
        return cls(**known)


def generate_gold(spec: SyntheticSpec, seed: int) -> Corpus:
    """Build a synthetic gold corpus; deterministic in ``seed``.

    Every tag sequence is canonical BIO (each span opens with B). The
    machine-label column starts out equal to gold with confidence 1.0 and is
    meant to be overwritten by ``corrupt``.
    """
    types = sorted(spec.entity_types)
    examples = []
    for i in range(spec.n_examples):
        rng = _example_rng(seed, i)
        length = int(rng.integers(spec.min_tokens, spec.max_tokens + 1))
        n_spans = int(rng.poisson(spec.entities_per_example))
        occupied = np.zeros(length, dtype=bool)
        spans: list[EntitySpan] = []
        for _ in range(n_spans):
            span_len = int(rng.integers(1, 4))
            placed = False
            for want in range(span_len, 0, -1):
                starts = [s for s in range(length - want + 1)
                          if not occupied[s:s + want].any()]
                if starts:
                    start = starts[int(rng.integers(len(starts)))]
                    occupied[start:start + want] = True
                    etype = types[int(rng.integers(len(types)))]
                    spans.append(EntitySpan(start, start + want, etype))
                    placed = True
                    break
            if not placed:
                break
        tags = encode_tags(spans, length)
        tokens = tuple(
            Token(text=f"w{int(rng.integers(spec.vocab_size))}",
                  confidence=1.0, ai_label=tag, gold_label=tag)
            for tag in tags
        )
        examples.append(Example(id=i, tokens=tokens))
    return Corpus(examples=tuple(examples),
                  entity_types=frozenset(spec.entity_types), has_gold=True)


def _corrupt_spans(gold_spans: list[EntitySpan], length: int,
                   types: list[str], cfg: NoiseConfig,
                   rng: np.random.Generator) -> list[EntitySpan]:
    spans = [[s.start, s.end, s.entity_type] for s in gold_spans]

    spans = [s for s in spans if rng.random() >= cfg.p_miss]

    for span in spans:
        if rng.random() < cfg.p_type:
            others = [t for t in types if t != span[2]]
            if others:
                span[2] = others[int(rng.integers(len(others)))]

    for idx, span in enumerate(spans):
        if rng.random() < cfg.p_boundary:
            edge = int(rng.integers(2))
            delta = 1 if rng.integers(2) else -1
            start, end = span[0], span[1]
            if edge == 0:
                start = min(max(start + delta, 0), length)
            else:
                end = min(max(end + delta, 0), length)
            if start >= end:
                continue
            collides = any(start < other[1] and other[0] < end
                           for j, other in enumerate(spans) if j != idx)
            if collides:
                continue
            span[0], span[1] = start, end

    for _ in range(int(rng.poisson(cfg.p_spurious))):
        if not types:
            break
        span_len = int(rng.integers(1, 3))
        occupied = np.zeros(length, dtype=bool)
        for s in spans:
            occupied[s[0]:s[1]] = True
        starts = [s for s in range(length - span_len + 1)
                  if not occupied[s:s + span_len].any()]
        if not starts:
            continue
        start = starts[int(rng.integers(len(starts)))]
        etype = types[int(rng.integers(len(types)))]
        spans.append([start, start + span_len, etype])

    return [EntitySpan(s[0], s[1], s[2]) for s in spans]


def corrupt(gold: Corpus, cfg: NoiseConfig) -> Corpus:
    """Rewrite the machine-label column with simulated labeling errors.

    Gold labels, token text, ids and lengths are preserved exactly; the
    emitted tag sequences are always valid BIO because corruption edits
    spans and re-encodes. Deterministic in ``cfg.seed``.
    """
    if not gold.has_gold:
        raise MissingGoldError("corrupt needs a gold-labeled corpus")
    types = sorted(gold.entity_types)
    examples = []
    for ex in gold.examples:
        rng = _example_rng(cfg.seed, ex.id)
        gold_spans = decode_spans(ex, LabelSource.GOLD)
        ai_spans = _corrupt_spans(gold_spans, len(ex), types, cfg, rng)
        tags = encode_tags(ai_spans, len(ex))
        tokens = []
        for tok, tag in zip(ex.tokens, tags):
            params = cfg.conf_correct if tag == tok.gold_label else cfg.conf_wrong
            conf = float(rng.beta(*params))
            tokens.append(replace(tok, ai_label=tag, confidence=conf))
        examples.append(Example(id=ex.id, tokens=tuple(tokens)))
    return Corpus(examples=tuple(examples),
                  entity_types=gold.entity_types, has_gold=True)


def oracle_correct(corpus: Corpus, selection: SelectionSet) -> Corpus:
    """Replace machine labels with gold on every selected example.

    Corrected tokens get confidence 1.0. The input corpus is not mutated;
    applying the same selection twice is a no-op the second time.
    """
    if not corpus.has_gold:
        raise MissingGoldError("oracle correction needs gold labels")
    known = set(corpus.ids)
    for example_id in selection.ids:
        if example_id not in known:
            raise KeyError(f"unknown example id {example_id} in selection")
    selected = selection.id_set
    examples = []
    for ex in corpus.examples:
        if ex.id in selected:
            tokens = tuple(replace(tok, ai_label=tok.gold_label, confidence=1.0)
                           for tok in ex.tokens)
            examples.append(Example(id=ex.id, tokens=tokens))
        else:
            examples.append(ex)
    return Corpus(examples=tuple(examples),
                  entity_types=corpus.entity_types, has_gold=True)
