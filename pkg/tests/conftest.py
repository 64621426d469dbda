from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from hcoal.corpus import BioTag, Corpus, Example, Token

TYPES = ("PROBLEM", "TEST", "TREATMENT")


def all_tags(types: tuple[str, ...] = TYPES) -> list[BioTag]:
    tags = [BioTag("O")]
    for t in types:
        tags.append(BioTag("B", t))
        tags.append(BioTag("I", t))
    return tags


def make_corpus(rng: np.random.Generator, n_examples: int = 6, max_len: int = 10,
                types: tuple[str, ...] = TYPES, has_gold: bool = True,
                p_entity: float = 0.4) -> Corpus:
    """Random corpus with arbitrary (possibly non-canonical) BIO tags."""
    choices = all_tags(types)
    weights = [1 - p_entity] + [p_entity / (2 * len(types))] * (2 * len(types))

    def draw_tag() -> BioTag:
        return choices[rng.choice(len(choices), p=weights)]

    examples = []
    for i in range(n_examples):
        length = int(rng.integers(1, max_len + 1))
        tokens = tuple(
            Token(text=f"t{int(rng.integers(100))}",
                  confidence=float(rng.random()),
                  ai_label=draw_tag(),
                  gold_label=draw_tag() if has_gold else None)
            for _ in range(length))
        examples.append(Example(id=i, tokens=tokens))
    return Corpus.from_examples(examples, has_gold=has_gold, extra_types=types)


# hypothesis building blocks

tag_texts = st.sampled_from([str(t) for t in all_tags()])

confidences = st.floats(min_value=0.0, max_value=1.0, allow_nan=False,
                        allow_infinity=False, allow_subnormal=False)


@st.composite
def tokens(draw, has_gold: bool):
    return Token(
        text=draw(st.text(alphabet="abcxyz", min_size=1, max_size=4)),
        confidence=draw(confidences),
        ai_label=BioTag.parse(draw(tag_texts)),
        gold_label=BioTag.parse(draw(tag_texts)) if has_gold else None,
    )


@st.composite
def corpora(draw, has_gold: bool = True, max_examples: int = 5, max_tokens: int = 8):
    n = draw(st.integers(min_value=0, max_value=max_examples))
    examples = []
    for i in range(n):
        toks = draw(st.lists(tokens(has_gold), min_size=1, max_size=max_tokens))
        examples.append(Example(id=i, tokens=tuple(toks)))
    return Corpus.from_examples(examples, has_gold=has_gold, extra_types=TYPES)
