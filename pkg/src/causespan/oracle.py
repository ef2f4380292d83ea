"""Exhaustive reference decoders.

Deliberately naive: every admissible quadruple or signal span is scored and
ranked with the same comparator the decoder uses. O(n^4) relations, meant
for n up to about 20.
"""

from __future__ import annotations

import heapq
from math import comb
from typing import Iterator, Optional, Sequence

from .types import (
    RelationHypothesis,
    Span,
    SpanProbabilityField,
    hypothesis_sort_key,
    orientation_of,
    relation_score,
    require_valid,
)


def iter_spans(n: int) -> Iterator[Span]:
    for s in range(n):
        for e in range(s, n):
            yield Span(s, e)


def iter_disjoint_pairs(n: int) -> Iterator[tuple[Span, Span]]:
    """All (cause, effect) span pairs over ``n`` tokens that share no token."""
    spans = list(iter_spans(n))
    for cause in spans:
        for effect in spans:
            if not cause.overlaps(effect):
                yield cause, effect


def disjoint_pair_count(n: int) -> int:
    # ordered pairs a <= b < c <= d, times two orientations
    return 2 * comb(n + 2, 4)


def oracle_decode(field: SpanProbabilityField, m: Optional[int] = None) -> list[RelationHypothesis]:
    """Top ``m`` relations by exhaustive enumeration (all of them when m is None)."""
    require_valid(field)
    if field.n < 2:
        raise ValueError(f"field {field.id!r}: cause and effect need at least two tokens")
    hyps = (
        RelationHypothesis(
            cause=cause,
            effect=effect,
            orientation=orientation_of(cause, effect),
            score=relation_score(field, cause, effect),
        )
        for cause, effect in iter_disjoint_pairs(field.n)
    )
    if m is None:
        return sorted(hyps, key=hypothesis_sort_key)
    if m < 1:
        raise ValueError("m must be positive")
    return heapq.nsmallest(m, hyps, key=hypothesis_sort_key)


def oracle_signal(
    field: SpanProbabilityField,
    exclusion: Sequence[Span] = (),
    max_len: Optional[int] = None,
) -> Optional[tuple[Span, float]]:
    """Best signal span disjoint from ``exclusion``; no presence gating."""
    require_valid(field)
    if not field.has_signal:
        raise ValueError(f"field {field.id!r} has no signal vectors")
    best = None
    for span in iter_spans(field.n):
        if max_len is not None and len(span) > max_len:
            continue
        if any(span.overlaps(x) for x in exclusion):
            continue
        score = field.p_signal_start[span.start] + field.p_signal_end[span.end]
        key = (-score, span.start, span.end)
        if best is None or key < best[0]:
            best = (key, span, score)
    return None if best is None else (best[1], best[2])
