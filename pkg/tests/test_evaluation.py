from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcoal.corpus import BioTag, Corpus, Example, MissingGoldError, Token
from hcoal.evaluation import (
    correction_stats,
    evaluate_labels,
    gap_closure,
)
from hcoal.ranking import SelectionSet, Strategy, confidence_rank, select_budget
from hcoal.simulator import NoiseConfig, SyntheticSpec, corrupt, generate_gold, oracle_correct

from conftest import corpora, make_corpus
from reference_scorer import reference_counts, reference_f1, reference_micro_f1


def labeled_example(ai: list[str], gold: list[str], example_id: int = 0) -> Example:
    tokens = tuple(
        Token(text=f"w{i}", confidence=0.5,
              ai_label=BioTag.parse(a), gold_label=BioTag.parse(g))
        for i, (a, g) in enumerate(zip(ai, gold)))
    return Example(id=example_id, tokens=tokens)


class TestEvaluateLabels:
    def test_identity_scores_one(self):
        gold = generate_gold(SyntheticSpec(n_examples=15), seed=0)
        report = evaluate_labels(gold)
        assert report.micro_f1 == 1.0
        assert report.macro_f1 == 1.0
        assert report.weighted_f1 == 1.0
        for ts in report.per_type:
            assert ts.f1 == 1.0
            assert ts.support == ts.tp

    def test_hand_enumerated_counts(self):
        # gold {(0,1,A),(2,3,B)}, predicted {(0,1,A),(4,5,A)}
        ex = labeled_example(
            ai=["B-A", "O", "O", "O", "B-A"],
            gold=["B-A", "O", "B-B", "O", "O"])
        report = evaluate_labels(Corpus.from_examples([ex], has_gold=True))
        by_type = {t.entity_type: t for t in report.per_type}
        assert (by_type["A"].tp, by_type["A"].fp, by_type["A"].fn) == (1, 1, 0)
        assert (by_type["B"].tp, by_type["B"].fp, by_type["B"].fn) == (0, 0, 1)
        assert by_type["A"].precision == 0.5
        assert by_type["A"].recall == 1.0
        assert report.micro_f1 == pytest.approx(0.5)
        assert report.macro_f1 == pytest.approx((2 / 3 + 0.0) / 2, abs=1e-9)
        # weighted: supports A=1, B=1
        assert report.weighted_f1 == pytest.approx((2 / 3 + 0.0) / 2, abs=1e-9)

    def test_boundary_error_counts_both_ways(self):
        ex = labeled_example(ai=["B-A", "I-A", "O"], gold=["B-A", "O", "O"])
        report = evaluate_labels(Corpus.from_examples([ex], has_gold=True))
        ts = report.per_type[0]
        assert (ts.tp, ts.fp, ts.fn) == (0, 1, 1)

    def test_requires_gold(self):
        corpus = Corpus.from_examples(
            [Example(0, (Token("a", 0.5, BioTag("O")),))], has_gold=False)
        with pytest.raises(MissingGoldError):
            evaluate_labels(corpus)

    def test_declared_but_absent_type_listed_not_averaged(self):
        ex = labeled_example(ai=["B-A"], gold=["B-A"])
        corpus = Corpus.from_examples([ex], has_gold=True, extra_types=("GHOST",))
        report = evaluate_labels(corpus)
        assert {t.entity_type for t in report.per_type} == {"A", "GHOST"}
        assert report.macro_f1 == 1.0

    @given(corpora(has_gold=True))
    @settings(max_examples=100)
    def test_matches_reference_scorer(self, corpus):
        report = evaluate_labels(corpus)
        expected = reference_counts(corpus)
        for ts in report.per_type:
            assert (ts.tp, ts.fp, ts.fn) == expected[ts.entity_type]
        assert report.micro_f1 == pytest.approx(reference_micro_f1(expected))

    @given(corpora(has_gold=True))
    @settings(max_examples=100)
    def test_bounds_and_micro_count_consistency(self, corpus):
        report = evaluate_labels(corpus)
        for ts in report.per_type:
            assert 0.0 <= ts.precision <= 1.0
            assert 0.0 <= ts.recall <= 1.0
            assert 0.0 <= ts.f1 <= 1.0
        assert 0.0 <= report.micro_f1 <= 1.0
        # micro counts are the sums of the per-type counts
        tp = sum(t.tp for t in report.per_type)
        fp = sum(t.fp for t in report.per_type)
        fn = sum(t.fn for t in report.per_type)
        assert report.micro_f1 == pytest.approx(reference_f1(tp, fp, fn))

    def test_full_correction_scores_one(self):
        gold = generate_gold(SyntheticSpec(n_examples=30), seed=5)
        noisy = corrupt(gold, NoiseConfig(p_miss=0.4, p_type=0.4, seed=6))
        fixed = oracle_correct(noisy, SelectionSet(Strategy.RANDOM, 1.0, noisy.ids))
        report = evaluate_labels(fixed)
        assert report.micro_f1 == report.macro_f1 == report.weighted_f1 == 1.0

    def test_monotone_in_budget(self):
        gold = generate_gold(SyntheticSpec(n_examples=80), seed=7)
        noisy = corrupt(gold, NoiseConfig(seed=8))
        ranked = confidence_rank(noisy)
        last = -1.0
        for budget in (0.0, 0.1, 0.25, 0.5, 0.75, 1.0):
            fixed = oracle_correct(noisy, select_budget(ranked, budget))
            micro = evaluate_labels(fixed).micro_f1
            assert micro >= last
            last = micro


class TestGapClosure:
    def test_documented_values(self):
        assert gap_closure(84.8, 87.1, 88.4) == pytest.approx(0.639, abs=1e-3)
        assert gap_closure(84.8, 87.9, 88.4) == pytest.approx(0.861, abs=1e-3)

    def test_zero_improvement(self):
        assert gap_closure(0.7, 0.7, 0.9) == 0.0

    def test_full_closure_is_exactly_one(self):
        assert gap_closure(0.7, 0.9, 0.9) == 1.0

    def test_degenerate_gap(self):
        with pytest.raises(ValueError, match="degenerate"):
            gap_closure(0.8, 0.9, 0.8)

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
           st.floats(0.01, 100), st.floats(-10, 10))
    @settings(max_examples=200)
    def test_affine_invariance(self, ai, mixed, gold, scale, shift):
        if abs(gold - ai) < 1e-6:
            return
        plain = gap_closure(ai, mixed, gold)
        mapped = gap_closure(scale * ai + shift, scale * mixed + shift,
                             scale * gold + shift)
        assert mapped == pytest.approx(plain, rel=1e-6, abs=1e-6)


class TestCorrectionStats:
    def test_clean_selection(self):
        gold = generate_gold(SyntheticSpec(n_examples=10), seed=9)
        stats = correction_stats(gold, SelectionSet(Strategy.RANDOM, 1.0, gold.ids))
        assert stats.entities_corrected == 0
        assert stats.examples_requiring_correction == 0
        assert stats.pct_entities_corrected == 0.0

    def test_hand_enumerated(self):
        # AI spans {(0,1,A),(3,4,B)}, gold {(0,1,A)}
        ex = labeled_example(
            ai=["B-A", "O", "O", "B-B", "O"],
            gold=["B-A", "O", "O", "O", "O"])
        corpus = Corpus.from_examples([ex], has_gold=True)
        stats = correction_stats(corpus, SelectionSet(Strategy.RANDOM, 1.0, (0,)))
        assert stats.entities_identified == 2
        assert stats.entities_corrected == 1
        assert stats.pct_entities_corrected == 50.0
        assert stats.examples_requiring_correction == 1
        assert stats.gold_spans_missed == 0

    def test_missed_gold_span_is_separate(self):
        ex = labeled_example(ai=["O", "O"], gold=["B-A", "O"])
        corpus = Corpus.from_examples([ex], has_gold=True)
        stats = correction_stats(corpus, SelectionSet(Strategy.RANDOM, 1.0, (0,)))
        assert stats.entities_identified == 0
        assert stats.entities_corrected == 0
        assert stats.gold_spans_missed == 1
        assert stats.examples_requiring_correction == 1

    def test_empty_selection_all_zero(self):
        gold = generate_gold(SyntheticSpec(n_examples=5), seed=10)
        stats = correction_stats(gold, SelectionSet(Strategy.RANDOM, 0.0, ()))
        assert stats.entities_identified == 0
        assert stats.pct_entities_corrected == 0.0
        assert stats.pct_examples_requiring_correction == 0.0

    def test_unknown_id(self):
        gold = generate_gold(SyntheticSpec(n_examples=5), seed=11)
        with pytest.raises(KeyError):
            correction_stats(gold, SelectionSet(Strategy.RANDOM, 0.1, (77,)))

    def test_counts_restricted_to_selection(self):
        rng = np.random.default_rng(3)
        corpus = make_corpus(rng, n_examples=12)
        half = SelectionSet(Strategy.RANDOM, 0.5, corpus.ids[:6])
        full = correction_stats(corpus, SelectionSet(Strategy.RANDOM, 1.0, corpus.ids))
        partial = correction_stats(corpus, half)
        assert partial.examples_selected == 6
        assert partial.entities_identified <= full.entities_identified
        assert partial.entities_corrected <= full.entities_corrected
