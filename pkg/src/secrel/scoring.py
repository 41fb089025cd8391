"""Confidence scoring for nominated relations and patterns, plus selection.

A nominated relation identified by distinct patterns p_1..p_n scores
sum(log(f_i + 1)) / n, where f_i counts the unique known relations pattern
p_i identified. A nominated pattern occurring with m unique known relations
over N unique occurrences scores m * log(m) / N. Natural log throughout;
any fixed base gives identical rankings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

YES_SCORE = 1000.0
NO_SCORE = -1.0
ANSWERS = ("yes", "no", "dont_know")


def score_relation(supporting_fs: Sequence[int]) -> float:
    """Score a relation candidate from the f_i counts of its supporting patterns."""
    if not supporting_fs:
        raise ValueError("a relation candidate must be nominated by at least one pattern")
    if any(f < 0 for f in supporting_fs):
        raise ValueError("pattern support counts must be non-negative")
    return sum(math.log(f + 1) for f in supporting_fs) / len(supporting_fs)


def score_pattern(m: int, n_occurrences: int) -> float:
    """Score a pattern that matched m unique known relations over N unique occurrences."""
    if m < 1:
        raise ValueError("an unnominated pattern (m=0) has no score")
    if m > n_occurrences:
        raise ValueError(f"m={m} cannot exceed occurrence count N={n_occurrences}")
    return m * math.log(m) / n_occurrences


def apply_oracle_override(score: float, answer: str) -> float:
    """yes -> 1000, no -> -1, dont_know -> unchanged."""
    if answer == "yes":
        return YES_SCORE
    if answer == "no":
        return NO_SCORE
    if answer == "dont_know":
        return score
    raise ValueError(f"unknown oracle answer {answer!r}")


def _ranked(scored: Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    # deterministic: highest score first, ties broken by candidate key
    return sorted(scored, key=lambda kv: (-kv[1], kv[0]))


def select_top_fraction(scored: Iterable[tuple[str, float]], fraction: float) -> list[str]:
    """Accept the ceil(fraction * n) highest-scoring candidates.

    Negative scores (oracle "no") are never accepted regardless of fraction;
    yes-overridden candidates (score >= 1000) are always accepted, even past
    the cut.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"accept fraction must lie in (0, 1], got {fraction}")
    ranked = _ranked(scored)
    if not ranked:
        return []
    take = math.ceil(fraction * len(ranked))
    while take < len(ranked) and ranked[take][1] >= YES_SCORE:
        take += 1
    return [key for key, score in ranked[:take] if score >= 0.0]


def select_queries(scored: Iterable[tuple[str, float]], fraction: float) -> list[str]:
    """The ceil(fraction * n) highest-scoring candidates, to be shown to the user."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"query fraction must lie in [0, 1], got {fraction}")
    ranked = _ranked(scored)
    if fraction == 0.0 or not ranked:
        return []
    return [key for key, _ in ranked[: math.ceil(fraction * len(ranked))]]


@dataclass(frozen=True)
class ScoredPattern:
    key: str
    m: int
    n_occurrences: int
    score: float


@dataclass(frozen=True)
class ScoredRelation:
    key: str
    supporting: tuple[tuple[str, int], ...]  # (pattern key, f_i)
    score: float
