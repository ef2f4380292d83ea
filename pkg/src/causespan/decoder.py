"""Span decoding over start/end probability fields.

The baseline takes an independent argmax per vector and can emit inverted
or overlapping spans. :func:`bss_decode` is the beam-search span selector:
it ranks outer boundary pairs (first-span start, second-span end) for both
orientations, fills each with the best inner boundaries (first-span end,
second-span start) and keeps the top ``m`` quadruples in a bounded min-heap.
"""

from __future__ import annotations

import heapq
import math
import sys
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .types import (
    ALLOW_OVERLAP,
    INNER_SINGLE,
    BaselineDecodeResult,
    DecodeConfig,
    Orientation,
    RelationHypothesis,
    Span,
    SpanProbabilityField,
    require_valid,
)

_EPS = sys.float_info.epsilon


def softmax(scores: Sequence[float]) -> tuple[float, ...]:
    x = np.asarray(scores, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("softmax needs a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("softmax input contains non-finite values")
    e = np.exp(x - x.max())
    return tuple((e / e.sum()).tolist())


def apply_softmax(field: SpanProbabilityField) -> SpanProbabilityField:
    """Normalize every vector of ``field`` independently."""
    return field.map_vectors(softmax, normalized=True)


def _argmax(values: Sequence[float]) -> int:
    # first maximum wins
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def baseline_decode(field: SpanProbabilityField) -> BaselineDecodeResult:
    """Independent argmax of each vector, with no structural constraint."""
    require_valid(field)
    sig_s = sig_e = None
    if field.has_signal:
        sig_s, sig_e = _argmax(field.p_signal_start), _argmax(field.p_signal_end)
    return BaselineDecodeResult(
        raw_cause_start=_argmax(field.p_cause_start),
        raw_cause_end=_argmax(field.p_cause_end),
        raw_effect_start=_argmax(field.p_effect_start),
        raw_effect_end=_argmax(field.p_effect_end),
        raw_signal_start=sig_s,
        raw_signal_end=sig_e,
    )


@dataclass(frozen=True)
class OuterPair:
    sp: int
    ep: int
    orientation: Orientation
    outer_score: float

    def __post_init__(self):
        if not self.sp + 1 <= self.ep:
            raise ValueError(f"outer pair needs sp + 1 <= ep, got ({self.sp}, {self.ep})")


class _RangeArgmax:
    """Sparse table answering argmax over ``values[lo..hi]`` in O(1).

    Ties resolve to the smallest index.
    """

    def __init__(self, values: Sequence[float]):
        self.values = values
        arr = np.asarray(values, dtype=np.float64)
        n = arr.size
        level = np.arange(n)
        self.table = [level.tolist()]
        width = 1
        while 2 * width <= n:
            size = n - 2 * width + 1
            left, right = level[:size], level[width : width + size]
            level = np.where(arr[right] > arr[left], right, left)
            self.table.append(level.tolist())
            width *= 2

    def query(self, lo: int, hi: int) -> int:
        k = (hi - lo + 1).bit_length() - 1
        row = self.table[k]
        x, y = row[lo], row[hi - (1 << k) + 1]
        return y if self.values[y] > self.values[x] else x


def top_k_outer_pairs(
    a: Sequence[float], b: Sequence[float], k: int, orientation: Orientation
) -> list[OuterPair]:
    """Exact top-``k`` pairs ``sp < ep`` by ``a[sp] + b[ep]``, best first.

    Lazy best-first search: one heap entry per ``ep`` holds the best ``sp``
    of a contiguous candidate range; popping an entry splits its range
    around the chosen ``sp``. O((n + k) log n) time, O(n log n) memory.
    Ties go to the smaller ``sp``, then the smaller ``ep``.
    """
    n = len(a)
    if len(b) != n:
        raise ValueError(f"vector lengths differ: {n} != {len(b)}")
    if n < 2:
        raise ValueError("outer pairs need at least two positions")
    if k < 1:
        raise ValueError("k must be positive")
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    rmq = _RangeArgmax(a)

    heap = []
    for ep in range(1, n):
        sp = rmq.query(0, ep - 1)
        heap.append((-(a[sp] + b[ep]), sp, ep, 0, ep - 1))
    heapq.heapify(heap)

    out: list[OuterPair] = []
    while heap and len(out) < k:
        neg, sp, ep, lo, hi = heapq.heappop(heap)
        out.append(OuterPair(sp, ep, orientation, -neg))
        if lo <= sp - 1:
            s = rmq.query(lo, sp - 1)
            heapq.heappush(heap, (-(a[s] + b[ep]), s, ep, lo, sp - 1))
        if sp + 1 <= hi:
            s = rmq.query(sp + 1, hi)
            heapq.heappush(heap, (-(a[s] + b[ep]), s, ep, sp + 1, hi))
    return out


def best_inner_pair(
    a: Sequence[float], b: Sequence[float], lo: int, hi: int
) -> Optional[tuple[int, int, float]]:
    """Best ``(i, j)`` with ``lo <= i < j <= hi`` by ``a[i] + b[j]``.

    One pass carrying the running prefix maximum of ``a``. Ties go to the
    smaller ``i``, then the smaller ``j``. Returns None when the range holds
    fewer than two positions.
    """
    if lo < 0 or hi >= len(a) or hi >= len(b):
        raise IndexError(f"inner range [{lo}, {hi}] out of bounds")
    if hi < lo + 1:
        return None
    run_val, run_i = a[lo], lo
    best_s, best_i, best_j = run_val + b[lo + 1], lo, lo + 1
    for j in range(lo + 1, hi + 1):
        s = run_val + b[j]
        if s > best_s or (s == best_s and run_i < best_i):
            best_s, best_i, best_j = s, run_i, j
        v = a[j]
        if v > run_val:
            run_val, run_i = v, j
    return best_i, best_j, best_s


def _orientation_vectors(field: SpanProbabilityField, orientation: Orientation):
    """(outer start, inner end, inner start, outer end) vectors."""
    if orientation is Orientation.C_BEFORE_E:
        return field.p_cause_start, field.p_cause_end, field.p_effect_start, field.p_effect_end
    return field.p_effect_start, field.p_effect_end, field.p_cause_start, field.p_cause_end


def _quad_score(vecs, sp: int, i: int, j: int, ep: int) -> float:
    # same term order as types.relation_score
    first_s, first_e, second_s, second_e = vecs
    return first_s[sp] + first_e[i] + second_s[j] + second_e[ep]


def _heap_key(score: float, rank: int, sp: int, i: int, j: int, ep: int, orientation) -> tuple:
    # min-heap root is the worst candidate under hypothesis_sort_key
    if orientation is Orientation.C_BEFORE_E:
        cs, es, ce, ee = sp, j, i, ep
    else:
        cs, es, ce, ee = j, sp, ep, i
    return (score, -rank, -cs, -es, -ce, -ee)


def _to_hypothesis(score, sp, i, j, ep, orientation) -> RelationHypothesis:
    first, second = Span(sp, i), Span(j, ep)
    if orientation is Orientation.C_BEFORE_E:
        return RelationHypothesis(cause=first, effect=second, orientation=orientation, score=score)
    return RelationHypothesis(cause=second, effect=first, orientation=orientation, score=score)


def _push_bounded(heap: list, item: tuple, m: int) -> None:
    if len(heap) < m:
        heapq.heappush(heap, item)
    elif item[0] > heap[0][0]:
        heapq.heapreplace(heap, item)


def _score_slack(field: SpanProbabilityField) -> float:
    # bound on rounding differences between partial and full four-term sums
    scale = sum(max(abs(v) for v in vec) for vec in (
        field.p_cause_start, field.p_cause_end, field.p_effect_start, field.p_effect_end))
    return 16 * _EPS * (scale + 1.0)


def bss_decode(field: SpanProbabilityField, config: DecodeConfig) -> list[RelationHypothesis]:
    """Top-``m`` non-overlapping cause/effect quadruples, best first.

    With ``inner_search="single"`` each outer pair contributes only its best
    inner pair. The default ``"top_m"`` lets an outer pair contribute up to
    ``m`` inner pairs, so the heap holds the exact top-``m`` quadruples among
    all explored outer pairs; for ``m == 1`` both agree up to tie-breaking.
    """
    require_valid(field)
    return _bss(field, config)


def _bss(field: SpanProbabilityField, config: DecodeConfig) -> list[RelationHypothesis]:
    if field.n < 2:
        raise ValueError(f"field {field.id!r}: cause and effect need at least two tokens")
    k, m = config.beam_k, config.num_answers_m

    outers: list[tuple[OuterPair, tuple]] = []
    for orientation in (Orientation.C_BEFORE_E, Orientation.C_AFTER_E):
        vecs = _orientation_vectors(field, orientation)
        for op in top_k_outer_pairs(vecs[0], vecs[3], k, orientation):
            outers.append((op, vecs))

    heap: list = []
    best_per_outer = []
    for op, vecs in outers:
        inner = best_inner_pair(vecs[1], vecs[2], op.sp, op.ep)
        if inner is None:
            continue
        i, j, inner_score = inner
        if config.inner_search == INNER_SINGLE:
            score = _quad_score(vecs, op.sp, i, j, op.ep)
            key = _heap_key(score, op.orientation.rank, op.sp, i, j, op.ep, op.orientation)
            _push_bounded(heap, (key, (score, op.sp, i, j, op.ep, op.orientation)), m)
        else:
            best_per_outer.append((op.outer_score + inner_score, op, vecs))

    if config.inner_search != INNER_SINGLE and best_per_outer:
        slack = _score_slack(field)
        estimates = sorted((t[0] for t in best_per_outer), reverse=True)
        threshold = estimates[min(m, len(estimates)) - 1] - slack
        for estimate, op, vecs in best_per_outer:
            if estimate < threshold:
                continue
            for i, j in _inner_candidates(vecs, op, threshold - op.outer_score - slack):
                score = _quad_score(vecs, op.sp, i, j, op.ep)
                key = _heap_key(score, op.orientation.rank, op.sp, i, j, op.ep, op.orientation)
                _push_bounded(heap, (key, (score, op.sp, i, j, op.ep, op.orientation)), m)

    hyps = [_to_hypothesis(*payload) for _, payload in heap]
    hyps.sort(key=RelationHypothesis.sort_key)
    return hyps


def _inner_candidates(vecs, op: OuterPair, limit: float) -> Iterable[tuple[int, int]]:
    """Every inner pair of ``op`` whose inner sum reaches ``limit``."""
    _, x, y, _ = vecs
    sp, ep = op.sp, op.ep
    run = -math.inf
    for j in range(sp + 1, ep + 1):
        v = x[j - 1]
        if v > run:
            run = v
        yj = y[j]
        if run + yj >= limit:
            for i in range(sp, j):
                if x[i] + yj >= limit:
                    yield i, j


def decode_signal(
    field: SpanProbabilityField, config: DecodeConfig, exclusion: Sequence[Span] = ()
) -> Optional[tuple[Span, float]]:
    """Best signal span, or None when gated out, absent or infeasible."""
    require_valid(field)
    return _signal(field, config, exclusion)


def _free_segments(n: int, blocked: set[int]) -> Iterable[tuple[int, int]]:
    lo = None
    for idx in range(n):
        if idx in blocked:
            if lo is not None:
                yield lo, idx - 1
                lo = None
        elif lo is None:
            lo = idx
    if lo is not None:
        yield lo, n - 1


def _signal(field, config, exclusion) -> Optional[tuple[Span, float]]:
    if not field.has_signal:
        return None
    if field.signal_presence is not None and field.signal_presence < config.signal_threshold:
        return None
    ps, pe = field.p_signal_start, field.p_signal_end
    blocked: set[int] = set()
    if config.signal_overlap_policy != ALLOW_OVERLAP:
        for span in exclusion:
            blocked.update(span.indices())
    max_len = config.max_signal_length or field.n

    best = None
    for lo, hi in _free_segments(field.n, blocked):
        window: deque[int] = deque()  # start indices with non-increasing ps
        for e in range(lo, hi + 1):
            while window and ps[window[-1]] < ps[e]:
                window.pop()
            window.append(e)
            if window[0] < e - max_len + 1:
                window.popleft()
            s = window[0]
            score = ps[s] + pe[e]
            if best is None or score > best[0] or (score == best[0] and (s, e) < best[1:]):
                best = (score, s, e)
    if best is None:
        return None
    return Span(best[1], best[2]), best[0]


def decode(field: SpanProbabilityField, config: DecodeConfig) -> list[RelationHypothesis]:
    """Top-``m`` relations, each with its best admissible signal attached."""
    require_valid(field)
    hyps = _bss(field, config)
    allow = config.signal_overlap_policy == ALLOW_OVERLAP
    shared = _signal(field, config, ()) if allow else None
    out = []
    for h in hyps:
        sig = shared if allow else _signal(field, config, (h.cause, h.effect))
        out.append(h.with_signal(*sig) if sig else h)
    return out
