import json
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sturmdos.cf import (
    Frequency,
    checkpoint_indices,
    convergents,
    denominators,
    gauss_shift,
    parse_frequency,
    sturm_sequence,
)
from sturmdos.errors import ValidationError, WrongTailKind


def cf_value(quotients):
    """Oracle: evaluate [0; a_1, ..., a_n] from the bottom up."""
    x = Fraction(0)
    for a in reversed(quotients):
        x = 1 / (a + x)
    return x


def sturm_oracle(alpha, K):
    one_minus = 1 - alpha
    return [1 if (k * alpha - mpmath.floor(k * alpha)) >= one_minus else 0 for k in range(1, K + 1)]


finite_streams = st.lists(st.integers(1, 4), min_size=1, max_size=16)


def test_fibonacci_denominators():
    assert [c.q for c in convergents(Frequency.fibonacci(), 5)] == [0, 1, 1, 2, 3, 5, 8]


def test_silver_denominators():
    assert [c.q for c in convergents(Frequency.constant(2), 3)] == [0, 1, 2, 5, 12]


def test_convergent_seeds():
    cv = convergents(Frequency.constant(3), 0)
    assert [(c.n, c.p, c.q) for c in cv] == [(-1, 1, 0), (0, 0, 1)]


@given(finite_streams)
def test_convergents_match_cf_value(qs):
    f = Frequency.finite(qs)
    cv = convergents(f, len(qs))
    for k in range(1, len(qs) + 1):
        c = cv[k + 1]
        assert Fraction(c.p, c.q) == cf_value(qs[:k])
        assert Fraction(c.p, c.q).denominator == c.q


@settings(max_examples=50)
@given(st.lists(st.integers(1, 4), min_size=30, max_size=30))
def test_denominator_growth_bound(qs):
    f = Frequency.finite(qs)
    M = max(qs)
    q = denominators(f, 30)
    assert all(q[n] <= (M + 1) ** n for n in range(31))
    assert all(q[n] < q[n + 1] for n in range(1, 30))


@settings(max_examples=40)
@given(st.lists(st.integers(1, 3), min_size=14, max_size=14))
def test_q_sandwich(qs):
    f = Frequency.finite(qs)
    q = denominators(f, 14)
    for n in range(15):
        qs_ = denominators(gauss_shift(f, n), 14 - n)
        for m in range(15 - n):
            assert q[n] * qs_[m] <= q[n + m] <= 2 * q[n] * qs_[m]


def test_gauss_shift_streams():
    assert Frequency.fibonacci().quotients(5) == gauss_shift(Frequency.fibonacci(), 7).quotients(5)
    f = Frequency.schedule([(3, 2)])
    assert gauss_shift(f, 3).quotients(5) == [2, 2, 1, 1, 1]


@given(st.lists(st.integers(1, 4), min_size=1, max_size=5), st.integers(0, 12))
def test_gauss_shift_periodic(block, n):
    f = Frequency.periodic(block)
    assert gauss_shift(f, n).quotients(10) == f.quotients(n + 10)[n:]


def test_schedule_stream():
    f = Frequency.schedule([(3, 2)])
    assert f.quotients(10) == [1, 1, 1, 2, 2, 1, 1, 1, 2, 2]
    g = Frequency.schedule([(2, 1), (1, 3)], extend="finite")
    assert list(g) == [1, 1, 2, 1, 2, 2, 2]


def test_bound_violation():
    with pytest.raises(ValidationError):
        Frequency((1, 3), bound=2)


def test_checkpoints():
    assert checkpoint_indices(Frequency.schedule([(3, 2), (4, 5)])) == [(0, 3, 5), (5, 9, 14)]
    assert checkpoint_indices(Frequency.schedule([], extend="finite")) == []
    cps = checkpoint_indices(Frequency.schedule([(1, 1)]), count=6)
    assert [T for _, T, _ in cps] == [2 * n - 1 for n in range(1, 7)]
    with pytest.raises(WrongTailKind):
        checkpoint_indices(Frequency.fibonacci())


def test_sturm_fibonacci():
    assert sturm_sequence(Frequency.fibonacci(), 5) == [1, 0, 1, 1, 0]


def test_sturm_silver():
    assert sturm_sequence(Frequency.constant(2), 2) == [0, 1]


@pytest.mark.parametrize("alpha_expr, freq", [
    ("(sqrt(5)-1)/2", Frequency.fibonacci()),
    ("sqrt(2)-1", Frequency.constant(2)),
    ("(sqrt(13)-3)/2", Frequency.constant(3)),
])
def test_sturm_against_irrational(alpha_expr, freq):
    with mpmath.workdps(300):
        alpha = eval(alpha_expr, {"sqrt": mpmath.sqrt})
        assert sturm_sequence(freq, 400) == sturm_oracle(alpha, 400)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=8, max_size=8),
       st.lists(st.integers(1, 3), min_size=4, max_size=4),
       st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_sturm_prefix_determinism(head, tail1, tail2):
    f1, f2 = Frequency.finite(head + tail1), Frequency.finite(head + tail2)
    K = denominators(f1, 6)[6]
    assert sturm_sequence(f1, K) == sturm_sequence(f2, K)


@given(st.lists(st.integers(1, 4), min_size=0, max_size=4),
       st.sampled_from(["const", "periodic", "schedule"]))
def test_json_round_trip(prefix, kind):
    tail = {"const": Frequency.constant(2), "periodic": Frequency.periodic([1, 2, 2]),
            "schedule": Frequency.schedule([(2, 1), (4, 3)], extend="arith")}[kind].tail
    f = Frequency(tuple(prefix), tail)
    g = Frequency.from_json(f.to_json())
    assert g == f and g.quotients(25) == f.quotients(25)
    assert json.loads(g.to_json()) == json.loads(f.to_json())


def test_parse_frequency():
    assert parse_frequency("fib").quotients(4) == [1, 1, 1, 1]
    assert parse_frequency("silver").quotients(3) == [2, 2, 2]
    assert parse_frequency("const:3").quotients(2) == [3, 3]
    assert parse_frequency("schedule:1,2").quotients(6) == [1, 2, 2, 1, 2, 2]
    assert parse_frequency(Frequency.periodic([1, 3]).to_json()).quotients(4) == [1, 3, 1, 3]
    with pytest.raises(ValidationError):
        parse_frequency("schedule:1")
