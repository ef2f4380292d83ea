"""Field factories and brute-force references shared by the tests."""

from __future__ import annotations

import itertools

import numpy as np
from hypothesis import strategies as st

from causespan import SpanProbabilityField, softmax


def make_field(cs, ce, es, ee, ss=None, se=None, presence=None, normalized=True, tokens=None, fid="f"):
    n = len(cs)
    return SpanProbabilityField(
        id=fid,
        tokens=tokens or [f"t{i}" for i in range(n)],
        p_cause_start=cs,
        p_cause_end=ce,
        p_effect_start=es,
        p_effect_end=ee,
        p_signal_start=ss,
        p_signal_end=se,
        signal_presence=presence,
        normalized=normalized,
    )


def random_field(rng: np.random.Generator, n: int, signal=True, fid="r") -> SpanProbabilityField:
    vecs = [softmax(rng.normal(size=n)) for _ in range(6)]
    return make_field(
        *vecs[:4],
        ss=vecs[4] if signal else None,
        se=vecs[5] if signal else None,
        presence=float(rng.uniform()) if signal else None,
        fid=fid,
    )


def uniform_field(n: int) -> SpanProbabilityField:
    v = [1.0 / n] * n
    return make_field(v, v, v, v)


def delta(n: int, at: int) -> list[float]:
    return [1.0 if i == at else 0.0 for i in range(n)]


def brute_top_pairs(a, b, k):
    pairs = [(sp, ep) for sp in range(len(a)) for ep in range(sp + 1, len(a))]
    pairs.sort(key=lambda p: (-(a[p[0]] + b[p[1]]), p[0], p[1]))
    return [(sp, ep, a[sp] + b[ep]) for sp, ep in pairs[:k]]


def brute_inner(a, b, lo, hi):
    cands = [(i, j) for i, j in itertools.combinations(range(lo, hi + 1), 2)]
    if not cands:
        return None
    i, j = min(cands, key=lambda p: (-(a[p[0]] + b[p[1]]), p[0], p[1]))
    return i, j, a[i] + b[j]


# dyadic values in [-8, 8] with 8 fractional bits: four-term sums are exact,
# so ties are genuine and no rounding collision can reorder candidates
exact_values = st.integers(-2048, 2048).map(lambda v: v / 256.0)


@st.composite
def exact_fields(draw, min_n=2, max_n=8, signal=True):
    n = draw(st.integers(min_n, max_n))
    vec = st.lists(exact_values, min_size=n, max_size=n)
    vecs = [draw(vec) for _ in range(6 if signal else 4)]
    presence = draw(st.none() | st.floats(0, 1)) if signal else None
    return make_field(
        *vecs[:4],
        ss=vecs[4] if signal else None,
        se=vecs[5] if signal else None,
        presence=presence,
        normalized=False,
    )
