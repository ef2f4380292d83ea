import numpy as np
import pytest

from causespan import Span, oracle_decode, oracle_signal
from causespan.oracle import disjoint_pair_count, iter_disjoint_pairs

from helpers import delta, make_field, random_field, uniform_field


def _count_by_hand(n):
    # independent count: pick two disjoint intervals, either one may be the cause
    total = 0
    for a in range(n):
        for b in range(a, n):
            for c in range(b + 1, n):
                for d in range(c, n):
                    total += 2
    return total


def test_delta_example():
    f = make_field([1, 0], [1, 0], [0, 1], [0, 1])
    (h,) = oracle_decode(f, 1)
    assert (h.cause, h.effect, h.score) == (Span(0, 0), Span(1, 1), 4.0)


def test_n2_has_exactly_two_quadruples():
    f = make_field([1, 0], [1, 0], [0, 1], [0, 1])
    hyps = oracle_decode(f)
    assert len(hyps) == 2
    assert [h.score for h in hyps] == [4.0, 0.0]


def test_uniform_n3_enumeration():
    # per orientation: (0,0|1,1) (0,0|1,2) (0,0|2,2) (0,1|2,2) (1,1|2,2)
    hyps = oracle_decode(uniform_field(3), 10)
    assert len(hyps) == 10
    assert len({h.score for h in hyps}) == 1
    assert hyps[0].score == pytest.approx(4 / 3)


def test_single_token_rejected():
    with pytest.raises(ValueError):
        oracle_decode(make_field([1.0], [1.0], [1.0], [1.0]), 1)


@pytest.mark.parametrize("n", range(2, 10))
def test_completeness_against_closed_form(n):
    assert disjoint_pair_count(n) == _count_by_hand(n)
    assert sum(1 for _ in iter_disjoint_pairs(n)) == disjoint_pair_count(n)
    assert len(oracle_decode(uniform_field(n))) == disjoint_pair_count(n)


def test_output_sorted_descending():
    rng = np.random.default_rng(0)
    for _ in range(20):
        hyps = oracle_decode(random_field(rng, 7))
        assert all(a.score >= b.score for a, b in zip(hyps, hyps[1:]))


def test_signal_empty_feasible_set():
    v = [0.5, 0.5]
    f = make_field(v, v, v, v, ss=v, se=v)
    assert oracle_signal(f, [Span(0, 1)]) is None


def test_signal_delta_no_exclusion():
    u = [0.25] * 4
    f = make_field(u, u, u, u, ss=delta(4, 1), se=delta(4, 3))
    assert oracle_signal(f) == (Span(1, 3), 2.0)


def test_signal_requires_vectors():
    u = [0.5, 0.5]
    with pytest.raises(ValueError):
        oracle_signal(make_field(u, u, u, u))
