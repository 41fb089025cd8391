import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from secrel.scoring import (
    NO_SCORE,
    YES_SCORE,
    apply_oracle_override,
    score_pattern,
    score_relation,
    select_queries,
    select_top_fraction,
)


class TestScoreRelation:
    def test_single_unsupported_pattern(self):
        assert score_relation([0]) == 0.0

    def test_two_patterns(self):
        # (ln 4 + ln 8) / 2, evaluated directly
        expected = (math.log(4) + math.log(8)) / 2
        assert score_relation([3, 7]) == pytest.approx(expected, rel=1e-12)
        assert round(expected, 4) == 1.7329

    def test_three_equal_patterns(self):
        assert score_relation([1, 1, 1]) == pytest.approx(math.log(2), rel=1e-12)

    def test_empty_support_rejected(self):
        with pytest.raises(ValueError):
            score_relation([])

    def test_negative_support_rejected(self):
        with pytest.raises(ValueError):
            score_relation([2, -1])

    def test_monotone_in_each_support_count(self):
        base = score_relation([2, 5, 1])
        assert score_relation([3, 5, 1]) > base
        assert score_relation([2, 6, 1]) > base
        assert score_relation([2, 5, 2]) > base


class TestScorePattern:
    def test_single_known_relation(self):
        assert score_pattern(1, 5) == 0.0

    def test_partial_precision(self):
        assert score_pattern(4, 10) == pytest.approx(4 * math.log(4) / 10, rel=1e-12)
        assert round(4 * math.log(4) / 10, 4) == 0.5545

    def test_perfect_precision(self):
        assert score_pattern(4, 4) == pytest.approx(math.log(4), rel=1e-12)

    def test_m_zero_rejected(self):
        with pytest.raises(ValueError):
            score_pattern(0, 3)

    def test_m_exceeding_n_rejected(self):
        with pytest.raises(ValueError):
            score_pattern(5, 3)

    def test_monotonicity(self):
        assert score_pattern(3, 10) > score_pattern(2, 10)
        assert score_pattern(2, 10) > score_pattern(2, 11)


class TestOverride:
    def test_yes(self):
        assert apply_oracle_override(0.55, "yes") == 1000.0

    def test_no(self):
        assert apply_oracle_override(0.55, "no") == -1.0

    def test_dont_know(self):
        assert apply_oracle_override(0.55, "dont_know") == 0.55

    def test_unknown_answer(self):
        with pytest.raises(ValueError):
            apply_oracle_override(0.5, "maybe")


def scored(scores):
    return [(f"c{i:02d}", s) for i, s in enumerate(scores)]


class TestSelectTopFraction:
    def test_scores_one_to_ten(self):
        pool = scored(range(1, 11))
        accepted = select_top_fraction(pool, 0.8)
        assert sorted(accepted) == [f"c{i:02d}" for i in range(2, 10)]  # scores 3..10

    def test_all_rejected(self):
        assert select_top_fraction(scored([-1, -1, -1]), 1.0) == []

    def test_single_candidate_ceiling(self):
        assert select_top_fraction(scored([0.2]), 0.8) == ["c00"]

    def test_negative_never_accepted(self):
        pool = [("good", 0.1), ("bad", NO_SCORE)]
        assert select_top_fraction(pool, 1.0) == ["good"]

    def test_yes_always_accepted_even_past_cut(self):
        pool = [("y1", YES_SCORE), ("y2", YES_SCORE), ("y3", YES_SCORE), ("z", 0.5)]
        accepted = select_top_fraction(pool, 0.25)  # ceil = 1
        assert set(accepted) == {"y1", "y2", "y3"}

    def test_tie_break_by_key(self):
        pool = [("b", 1.0), ("a", 1.0), ("c", 1.0)]
        assert select_top_fraction(pool, 0.3) == ["a"]

    def test_fraction_domain(self):
        with pytest.raises(ValueError):
            select_top_fraction(scored([1.0]), 0.0)
        with pytest.raises(ValueError):
            select_top_fraction(scored([1.0]), 1.5)

    def test_empty_pool(self):
        assert select_top_fraction([], 0.8) == []


class TestSelectQueries:
    def test_two_percent_of_hundred(self):
        assert len(select_queries(scored([float(i) for i in range(100)]), 0.02)) == 2

    def test_zero_fraction(self):
        assert select_queries(scored([1.0, 2.0]), 0.0) == []

    def test_ceiling_of_small_pool(self):
        assert len(select_queries(scored([float(i) for i in range(10)]), 0.02)) == 1

    def test_highest_scores_selected(self):
        pool = [("low", 0.1), ("high", 9.0), ("mid", 3.0)]
        assert select_queries(pool, 0.6) == ["high", "mid"]


# --- properties ---------------------------------------------------------------


def brute_force_accept(pool, fraction):
    """Enumerate subsets and keep the one respecting the cut rule: size
    min(ceil(f*n), #non-negative), no excluded candidate dominating an
    included one under (score desc, key asc)."""
    nonneg = [kv for kv in pool if kv[1] >= 0]
    k = min(math.ceil(fraction * len(pool)), len(nonneg))
    for combo in itertools.combinations(nonneg, k):
        chosen = set(combo)
        valid = True
        for inside in combo:
            for outside in nonneg:
                if outside in chosen:
                    continue
                if (-outside[1], outside[0]) < (-inside[1], inside[0]):
                    valid = False
        if valid:
            return {key for key, _ in combo}
    return set()


@given(
    scores=st.lists(
        st.one_of(st.just(-1.0), st.floats(0, 50, allow_nan=False)), min_size=1, max_size=6
    ),
    fraction=st.floats(0.05, 1.0, allow_nan=False),
)
@settings(max_examples=200)
def test_selection_equals_subset_enumeration(scores, fraction):
    pool = scored(scores)
    assert set(select_top_fraction(pool, fraction)) == brute_force_accept(pool, fraction)


@given(
    scores=st.lists(st.floats(0, 50, allow_nan=False), min_size=1, max_size=12),
    fraction=st.floats(0.05, 1.0, allow_nan=False),
)
@settings(max_examples=200)
def test_selection_size_property(scores, fraction):
    pool = scored(scores)
    accepted = select_top_fraction(pool, fraction)
    assert len(accepted) == min(math.ceil(fraction * len(pool)), len(pool))


@given(
    fs=st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=5), min_size=1, max_size=10)
)
@settings(max_examples=100)
def test_rank_invariance_of_log_base(fs):
    """Scoring in log2 rescales everything by one constant, so accepted sets match."""
    natural = [(f"c{i:02d}", score_relation(f)) for i, f in enumerate(fs)]
    base2 = [
        (f"c{i:02d}", sum(math.log2(x + 1) for x in f) / len(f)) for i, f in enumerate(fs)
    ]
    for fraction in (0.5, 0.8, 1.0):
        assert set(select_top_fraction(natural, fraction)) == set(
            select_top_fraction(base2, fraction)
        )
