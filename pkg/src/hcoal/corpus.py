"""Token-labeled corpus model: parsing, validation, serialization, span decoding.

Corpus file format (UTF-8 text): one token per line, columns separated by
one or more ASCII spaces or tabs::

    <text> <confidence> <ai_tag> [<gold_tag>]

Examples (sentences) are separated by one blank line. Tags are ``O``,
``B-<TYPE>`` or ``I-<TYPE>`` where ``<TYPE>`` matches ``[A-Za-z0-9_]+``;
the confidence is a decimal in [0, 1]. The gold column is present iff the
corpus carries gold labels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import IO, Iterable

_TYPE_RE = re.compile(r"^[A-Za-z0-9_]+$")


class ParseError(ValueError):
    """Malformed corpus file. Carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TagError(ParseError):
    """Tag string does not match ``O | B-<TYPE> | I-<TYPE>``."""


class ConfidenceRangeError(ParseError):
    """Confidence outside [0, 1]."""


class MissingGoldError(RuntimeError):
    """Gold labels were requested from a corpus that does not carry them."""


class LabelSource(Enum):
    """Which label column an operation reads or writes.

    MIXED_EXPORT writes the (possibly human-corrected) machine-label column
    without the gold column, producing the training-set file a downstream
    trainer consumes.
    """

    AI = "ai"
    GOLD = "gold"
    MIXED_EXPORT = "mixed-export"


@dataclass(frozen=True)
class BioTag:
    """A single BIO tag: a position (B/I/O) plus an entity type for B and I."""

    position: str
    entity_type: str | None = None

    def __post_init__(self) -> None:
        if self.position not in ("B", "I", "O"):
            raise ValueError(f"invalid tag position {self.position!r}")
        if self.position == "O":
            if self.entity_type is not None:
                raise ValueError("O tag must not carry an entity type")
        elif self.entity_type is None or not _TYPE_RE.match(self.entity_type):
            raise ValueError(
                f"{self.position} tag needs an entity type matching [A-Za-z0-9_]+, "
                f"got {self.entity_type!r}"
            )

    @classmethod
    def parse(cls, text: str) -> BioTag:
        if text == "O":
            return cls("O")
        if len(text) > 2 and text[1] == "-" and text[0] in ("B", "I"):
            if _TYPE_RE.match(text[2:]):
                return cls(text[0], text[2:])
        raise ValueError(f"invalid tag string {text!r}")

    def __str__(self) -> str:
        return "O" if self.position == "O" else f"{self.position}-{self.entity_type}"

    @property
    def is_entity(self) -> bool:
        return self.position != "O"


O_TAG = BioTag("O")


@dataclass(frozen=True)
class Token:
    """One input token with its machine label, confidence and optional gold label."""

    text: str
    confidence: float
    ai_label: BioTag
    gold_label: BioTag | None = None

    def __post_init__(self) -> None:
        if not self.text or any(c.isspace() for c in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Example:
    """A sentence: a stable id plus a non-empty token sequence."""

    id: int
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"example id must be non-negative, got {self.id}")
        if not self.tokens:
            raise ValueError(f"example {self.id} has no tokens")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class EntitySpan:
    """A decoded entity: token range [start, end) plus entity type."""

    start: int
    end: int
    entity_type: str

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span bounds [{self.start}, {self.end})")


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of examples.

    ``entity_types`` covers every type appearing in any tag (it may declare
    extra, unused types). ``has_gold`` is a corpus-level flag: either every
    token carries a gold label or none does.
    """

    examples: tuple[Example, ...]
    entity_types: frozenset[str]
    has_gold: bool

    def __post_init__(self) -> None:
        ids = [ex.id for ex in self.examples]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate example ids")
        for ex in self.examples:
            for tok in ex.tokens:
                if self.has_gold and tok.gold_label is None:
                    raise ValueError(f"example {ex.id}: missing gold label in gold corpus")
                if not self.has_gold and tok.gold_label is not None:
                    raise ValueError(f"example {ex.id}: gold label in non-gold corpus")
                for tag in (tok.ai_label, tok.gold_label):
                    if tag is not None and tag.is_entity and tag.entity_type not in self.entity_types:
                        raise ValueError(f"undeclared entity type {tag.entity_type!r}")

    @classmethod
    def from_examples(cls, examples: Iterable[Example], has_gold: bool,
                      extra_types: Iterable[str] = ()) -> Corpus:
        """Build a corpus, collecting entity types from the tags themselves."""
        examples = tuple(examples)
        types = set(extra_types)
        for ex in examples:
            for tok in ex.tokens:
                for tag in (tok.ai_label, tok.gold_label):
                    if tag is not None and tag.is_entity:
                        types.add(tag.entity_type)
        return cls(examples=examples, entity_types=frozenset(types), has_gold=has_gold)

    def __len__(self) -> int:
        return len(self.examples)

    @cached_property
    def _by_id(self) -> dict[int, Example]:
        return {ex.id: ex for ex in self.examples}

    def example(self, example_id: int) -> Example:
        try:
            return self._by_id[example_id]
        except KeyError:
            raise KeyError(f"unknown example id {example_id}") from None

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(ex.id for ex in self.examples)


def parse_corpus(source: str | IO[str], has_gold: bool) -> Corpus:
    """Parse the corpus file format into a Corpus.

    Ids are assigned 0..N-1 in file order; entity types are collected from
    the tags. Empty input yields an empty corpus. Raises ParseError (wrong
    column count, bad number), TagError or ConfidenceRangeError, each naming
    the offending line.
    """
    text = source if isinstance(source, str) else source.read()
    want_cols = 4 if has_gold else 3

    examples: list[Example] = []
    block: list[Token] = []

    def close_block() -> None:
        if block:
            examples.append(Example(id=len(examples), tokens=tuple(block)))
            block.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            close_block()
            continue
        parts = raw.split()
        if len(parts) != want_cols:
            raise ParseError(
                f"expected {want_cols} columns, got {len(parts)}", line=lineno)
        word = parts[0]
        try:
            confidence = float(parts[1])
        except ValueError:
            raise ParseError(f"confidence {parts[1]!r} is not a number", line=lineno) from None
        if not 0.0 <= confidence <= 1.0:
            raise ConfidenceRangeError(
                f"confidence {parts[1]} outside [0, 1]", line=lineno)
        try:
            ai = BioTag.parse(parts[2])
            gold = BioTag.parse(parts[3]) if has_gold else None
        except ValueError as err:
            raise TagError(str(err), line=lineno) from None
        block.append(Token(text=word, confidence=confidence, ai_label=ai, gold_label=gold))
    close_block()

    return Corpus.from_examples(examples, has_gold=has_gold)


def decode_spans(example: Example, source: LabelSource = LabelSource.AI) -> list[EntitySpan]:
    """Decode the example's BIO tags into entity spans.

    Decoding is total: an I tag that does not continue a same-type run opens
    a new span (the conlleval repair), and a type change closes the previous
    span. Output spans are sorted, non-overlapping, and cover every B/I token.
    """
    if source is LabelSource.GOLD:
        tags = [tok.gold_label for tok in example.tokens]
        if any(t is None for t in tags):
            raise MissingGoldError(f"example {example.id} has no gold labels")
    elif source is LabelSource.AI:
        tags = [tok.ai_label for tok in example.tokens]
    else:
        raise ValueError(f"cannot decode from {source}")

    spans: list[EntitySpan] = []
    start: int | None = None
    current: str | None = None

    def close(end: int) -> None:
        nonlocal start, current
        if start is not None and current is not None:
            spans.append(EntitySpan(start, end, current))
        start = current = None

    for i, tag in enumerate(tags):
        assert tag is not None
        if tag.position == "O":
            close(i)
        elif tag.position == "B" or current != tag.entity_type:
            close(i)
            start, current = i, tag.entity_type
    close(len(tags))
    return spans


def encode_tags(spans: Iterable[EntitySpan], length: int) -> list[BioTag]:
    """Render non-overlapping spans back into a canonical BIO tag sequence."""
    tags = [O_TAG] * length
    for span in sorted(spans, key=lambda s: s.start):
        if span.end > length:
            raise ValueError(f"span {span} exceeds length {length}")
        if any(t.is_entity for t in tags[span.start:span.end]):
            raise ValueError(f"span {span} overlaps another span")
        tags[span.start] = BioTag("B", span.entity_type)
        for i in range(span.start + 1, span.end):
            tags[i] = BioTag("I", span.entity_type)
    return tags


def write_corpus(corpus: Corpus, label_source: LabelSource = LabelSource.GOLD) -> str:
    """Serialize a corpus to the corpus file format.

    GOLD writes all four columns (requires gold labels); AI and MIXED_EXPORT
    write the three-column form carrying the machine-label column only.
    Round-trips: ``parse_corpus(write_corpus(c))`` reproduces the written
    columns exactly, and the text is re-parseable byte-for-byte.
    """
    if label_source is LabelSource.GOLD:
        if not corpus.has_gold:
            raise MissingGoldError("corpus has no gold labels to write")
    blocks: list[str] = []
    for ex in corpus.examples:
        lines = []
        for tok in ex.tokens:
            cols = [tok.text, repr(tok.confidence), str(tok.ai_label)]
            if label_source is LabelSource.GOLD:
                cols.append(str(tok.gold_label))
            lines.append(" ".join(cols))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def strip_gold(corpus: Corpus) -> Corpus:
    """Return the same corpus without its gold column."""
    examples = tuple(
        Example(ex.id, tuple(replace(tok, gold_label=None) for tok in ex.tokens))
        for ex in corpus.examples
    )
    return Corpus(examples=examples, entity_types=corpus.entity_types, has_gold=False)


def sniff_has_gold(text: str) -> bool:
    """Guess the column layout of a corpus file from its first token line."""
    for raw in text.splitlines():
        if raw.strip():
            return len(raw.split()) == 4
    return False
