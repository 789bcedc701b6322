import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sturmdos.cf import Frequency, denominators
from sturmdos.errors import CapExceeded, ValidationError
from sturmdos.symbolic import (
    Letter,
    Word,
    admissible,
    alphabet,
    aux_matrix,
    aux_product_bounds_check,
    connecting_word,
    count_words,
    descendant_count,
    enumerate_words,
    format_word,
    incidence_matrix,
    parse_word,
    root_alphabet,
    strong_primitivity_check,
    successors,
    typed_counts,
    typed_descendant_count,
)


def oracle_pairs(n, m):
    """Admissible (row, column) pairs written out directly from the transition rules."""
    k_I = range(1, n + 2) if n else [0]
    k_III = range(1, n + 1) if n else [0]
    out = set()
    out |= {(("I", k), ("II", 1)) for k in k_I}
    if n:
        out |= {(("II", 1), ("I", l)) for l in range(1, m + 2)}
        out |= {(("II", 1), ("III", l)) for l in range(1, m + 1)}
    out |= {(("III", k), ("I", l)) for k in k_III for l in range(1, m + 1)}
    out |= {(("III", k), ("III", l)) for k in k_III for l in range(1, m)}
    return out


def oracle_matrix(n, m):
    rows = root_alphabet() if n == 0 else alphabet(n)
    pairs = oracle_pairs(n, m)
    return np.array([[int(((e.type, e.index), (f.type, f.index)) in pairs) for f in alphabet(m)] for e in rows])


@pytest.mark.parametrize("n, m", [(n, m) for n in range(0, 5) for m in range(1, 5)])
def test_incidence_matches_rule_oracle(n, m):
    assert (incidence_matrix(n, m) == oracle_matrix(n, m)).all()
    rows = root_alphabet() if n == 0 else alphabet(n)
    for e in rows:
        assert successors(e, m) == [f for f in alphabet(m) if admissible(e, f)]


def test_incidence_small_examples():
    A = incidence_matrix(1, 1)
    # alphabet order (I,1),(I,2),II,(III,1)
    assert A[2].tolist() == [1, 1, 0, 1]
    assert A[0].tolist() == [0, 0, 1, 0]
    assert A[3].tolist() == [1, 0, 0, 0]
    R = incidence_matrix(0, 1)
    assert R[0].tolist() == [0, 0, 1, 0]
    assert R[1].tolist() == [1, 0, 0, 0]


def test_alphabet_sizes():
    for a in range(1, 6):
        assert len(alphabet(a)) == 2 * a + 2
    with pytest.raises(ValidationError):
        alphabet(0)


@pytest.mark.parametrize("n, m", [(1, 1), (1, 2), (2, 1), (3, 2)])
def test_aux_matrix_counts_transitions(n, m):
    A = incidence_matrix(n, m)
    types = [e.type for e in alphabet(n)]
    ctypes = [f.type for f in alphabet(m)]
    aux = aux_matrix(m)
    for i, t in enumerate(types):
        row = [sum(A[i, j] for j, c in enumerate(ctypes) if c == u) for u in ("I", "II", "III")]
        assert row == aux[("I", "II", "III").index(t)]


@pytest.mark.parametrize("M, k, expected", [(2, 6, True), (2, 2, False), (3, 6, True), (1, 6, True)])
def test_strong_primitivity(M, k, expected):
    ok, wit = strong_primitivity_check(M, k)
    assert ok is expected
    if not ok:
        assert wit.zeros


def test_strong_primitivity_brute_force_product():
    for tup in itertools.product((1, 2), repeat=6):
        P = np.eye(len(alphabet(tup[0])), dtype=object)
        for a, b in zip(tup, tup[1:]):
            P = P.dot(oracle_matrix(a, b).astype(object))
        assert (P > 0).all()


@pytest.mark.parametrize("M", [1, 2, 3])
def test_aux_product_bounds(M):
    assert aux_product_bounds_check(M) == (True, None)


def _check_connecting(levels, e, eh):
    w = connecting_word(levels, e, eh)
    assert w[0] == e and w[-1] == eh and len(w) == len(levels)
    assert [x.level for x in w] == list(levels)
    assert all(admissible(a, b) for a, b in zip(w, w[1:]))
    return w


def test_connecting_word_examples():
    I1, II1 = Letter(1, "I", 1), Letter(1, "II", 1)
    w = _check_connecting([1] * 6, I1, II1)
    assert w == [I1, II1, I1, II1, I1, II1]
    II2 = Letter(2, "II", 1)
    w = _check_connecting([2] * 6, II2, II2)
    assert w == [II2, Letter(2, "III", 1), Letter(2, "I", 1), II2, Letter(2, "I", 1), II2]
    with pytest.raises(ValidationError):
        connecting_word([1] * 5, I1, II1)


@settings(max_examples=200)
@given(st.lists(st.integers(1, 3), min_size=6, max_size=10), st.data())
def test_connecting_word_any_endpoints(levels, data):
    e = data.draw(st.sampled_from(alphabet(levels[0])))
    eh = data.draw(st.sampled_from(alphabet(levels[-1])))
    _check_connecting(levels, e, eh)


def test_fibonacci_counts():
    fib = Frequency.fibonacci()
    assert count_words(fib, 0) == 2
    assert count_words(fib, 2) == 4
    assert count_words(fib, 5) == 16
    assert typed_counts(fib, 5) == (8, 5, 3)


def test_enumerate_small():
    fib = Frequency.fibonacci()
    assert enumerate_words(fib, 0, as_tuples=True) == [(Letter(0, "I", 0),), (Letter(0, "III", 0),)]
    one = [format_word(w) for w in enumerate_words(fib, 1, as_tuples=True)]
    assert one == ["I|II@1", "III|(I,1)@1"]
    with pytest.raises(CapExceeded):
        enumerate_words(fib, 20, cap=100)


def test_typed_descendant_example():
    fib = Frequency.fibonacci()
    w = parse_word("I|II@1", fib)
    assert typed_descendant_count(w, 1) == 1
    assert descendant_count(w, 1) == 3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=7, max_size=7))
def test_counts_match_enumeration(qs):
    f = Frequency.finite(qs)
    q = denominators(f, 7)
    for n in range(8):
        words = enumerate_words(f, n, as_tuples=True)
        t = typed_counts(f, n)
        assert len(words) == count_words(f, n) == sum(t)
        assert [sum(w[-1].type == u for w in words) for u in ("I", "II", "III")] == list(t)
        assert t[1] + t[2] == q[n]
        assert q[n] <= len(words) <= 5 * q[n]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=6, max_size=6), st.integers(0, 3), st.integers(0, 3))
def test_descendant_counts_compose(qs, n, m):
    f = Frequency.finite(qs)
    for w in enumerate_words(f, n):
        direct = sum(1 for v in enumerate_words(f, n + m, as_tuples=True) if v[: n + 1] == w.letters)
        assert descendant_count(w, m) == direct
    assert sum(descendant_count(w, m) for w in enumerate_words(f, n)) == count_words(f, n + m)


def test_word_validation_and_roundtrip():
    fib = Frequency.fibonacci()
    for w in enumerate_words(fib, 4):
        assert parse_word(str(w), fib) == w
        assert Word(w.letters, fib).depth == 4
    with pytest.raises(ValidationError):
        Word((Letter(0, "I", 0), Letter(1, "I", 1)), fib)
    with pytest.raises(ValidationError):
        Word((Letter(0, "I", 0), Letter(2, "II", 1)), fib)
    with pytest.raises(ValidationError):
        parse_word("I|II", fib)


def test_common_prefix():
    fib = Frequency.fibonacci()
    a = parse_word("I|II@1|(I,1)@1", fib)
    b = parse_word("I|II@1|(III,1)@1", fib)
    assert str(a.common_prefix(b)) == "I|II@1"
    assert a.prefix(1).is_prefix_of(a)
    assert parse_word("III|(I,1)@1", fib).common_prefix(a) is None
