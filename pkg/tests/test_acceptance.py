"""One test (or group) per acceptance criterion; results land in conftest.ACCEPTANCE
and are printed as one line per criterion at the end of the run."""

import itertools
import math
import random
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from sturmdos.bands import build_band_tree
from sturmdos.cf import Frequency, denominators, gauss_shift
from sturmdos.dos import (
    bilipschitz_distortion,
    dimension_estimate,
    dos_approx,
    dos_spectral,
    fibonacci_asymptotic_check,
    fibonacci_constant,
    oscillation_diagnostic,
    assign_eigenvalues,
)
from sturmdos.measures import (
    LogBandLength,
    LogQn,
    diameter_bounds_check,
    gibbs_constant,
    gibbs_measure,
    potential_constants,
    weak_gibbs_distance,
)
from sturmdos.symbolic import (
    alphabet,
    aux_product_bounds_check,
    count_words,
    enumerate_words,
    root_alphabet,
    strong_primitivity_check,
    typed_counts,
)


def record(k, ok, detail):
    prev = ACCEPTANCE.get(k)
    if prev is not None:
        ok = ok and prev[0]
        detail = f"{prev[1]}; {detail}"
    ACCEPTANCE[k] = (bool(ok), detail)


def rule_matrix(n, m):
    """Transition matrix straight from the admissibility rules (row alphabet A_n, A_0 for n=0)."""
    rows = root_alphabet() if n == 0 else alphabet(n)

    def ok(e, f):
        if e.type == "I":
            return f.type == "II"
        if e.type == "II":
            return f.type in ("I", "III")
        return (f.type == "I" and f.index <= m) or (f.type == "III" and f.index <= m - 1)

    return np.array([[int(ok(e, f)) for f in alphabet(m)] for e in rows], dtype=object)


# -- 1 -----------------------------------------------------------------------------

def test_criterion_1_combinatorial_exactness():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    freqs = [("fib", Frequency.fibonacci()), ("all-2", Frequency.constant(2))]
    freqs += [(f"rand{i}", Frequency.finite([rng.randint(1, 3) for _ in range(16)])) for i in range(10)]
    fails, enumerated = [], 0
    for label, f in freqs:
        q = denominators(f, 14)
        # letter-level path count through the rule matrices
        v = np.ones(2, dtype=object)
        prev = 0
        for n in range(15):
            if n > 0:
                v = v.dot(rule_matrix(prev, f.quotient(n)))
                prev = f.quotient(n)
            brute = int(v.sum())
            c = count_words(f, n)
            t = typed_counts(f, n)
            if brute != c or not (q[n] <= c <= 5 * q[n]) or t[1] + t[2] != q[n]:
                fails.append((label, n))
            if c <= 60000:
                enumerated += 1
                if len(enumerate_words(f, n, cap=60000, as_tuples=True)) != c:
                    fails.append((label, n, "enum"))
        for n in range(15):
            qs = denominators(gauss_shift(f, n), 14 - n)
            for m in range(15 - n):
                if not q[n] * qs[m] <= q[n + m] <= 2 * q[n] * qs[m]:
                    fails.append((label, "sandwich", n, m))
    dt = time.perf_counter() - t0
    ok = not fails and dt <= 5
    record(1, ok, f"{len(freqs)} frequencies, n<=14, {enumerated} explicit enumerations, {dt:.2f}s")
    assert not fails, fails
    assert dt <= 5


# -- 2 -----------------------------------------------------------------------------

def test_criterion_2_primitivity_and_bounds():
    t0 = time.perf_counter()
    res = []
    for M in (1, 2, 3):
        res.append(strong_primitivity_check(M, 6)[0])
        res.append(aux_product_bounds_check(M)[0])
        # independent positivity check from the rule matrices
        mats = {(a, b): rule_matrix(a, b) for a in range(1, M + 1) for b in range(1, M + 1)}
        pos = True
        for tup in itertools.product(range(1, M + 1), repeat=6):
            P = mats[tup[0], tup[1]]
            for a, b in zip(tup[1:], tup[2:]):
                P = P.dot(mats[a, b])
            pos &= bool((P > 0).all())
        res.append(pos)
    dt = time.perf_counter() - t0
    record(2, all(res) and dt <= 10, f"M<=3, k=6 positivity and aux bounds, {dt:.2f}s")
    assert all(res)
    assert dt <= 10


# -- 3 -----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def crit3():
    t0 = time.perf_counter()
    tree = build_band_tree(Frequency.fibonacci(), 24, 9)
    rep = tree.verify(9)
    return tree, rep, time.perf_counter() - t0


def test_criterion_3_band_hierarchy(crit3):
    tree, rep, dt = crit3
    q = denominators(tree.freq, 9)
    lv = rep["levels"]
    counts = all(e["bands"] == count_words(tree.freq, e["n"]) and e["typed_II_III"] == q[e["n"]] for e in lv)
    kids = all(e["children"] for e in lv[:-1])
    nested = all(e["nested"] for e in lv[:-1])
    disjoint = all(e["disjoint"] for e in lv)
    edges = all(e["edges"] for e in lv)
    width = all(e["width_bound"] for e in lv if e["n"] != 1)
    ok = counts and kids and nested and disjoint and edges and width and dt <= 120
    record(3, ok, f"counts/children/nested/disjoint/edges(2^-64) ok={ok}, width n!=1 ok={width}, {dt:.1f}s")
    assert counts and kids and nested and disjoint and edges
    assert width
    assert dt <= 120


@pytest.mark.xfail(strict=True, reason="order-1 band after a_1=1 coincides with its parent, width 4 > 2")
def test_criterion_3_width_bound_order_one(crit3):
    tree, rep, _ = crit3
    ok = rep["levels"][1]["width_bound"]
    widths = [math.exp(b.log_length) for b in tree.level(1)]
    record(3, ok, f"width bound at n=1 {'holds' if ok else 'FAILS'} (max width {max(widths):.3f} > 2)")
    assert ok


# -- 4 -----------------------------------------------------------------------------

@pytest.mark.parametrize("freq", [Frequency.fibonacci(), Frequency.constant(2)], ids=["fib", "all-2"])
def test_criterion_4_dos_cross_validation(freq):
    t0 = time.perf_counter()
    tree = build_band_tree(freq, 24, 9)
    per = []
    for n in range(0, 6):
        l = n + 4
        assign_eigenvalues(tree, l)  # raises unless each eigenvalue sits in exactly one band
        per.append(dos_spectral(tree, l, n).masses == dos_approx(freq, n, l).masses)
    dt = time.perf_counter() - t0
    ok = all(per) and dt <= 120
    record(4, ok, f"{'fib' if freq.bound == 1 else 'all-2'}: exact agreement n<=5 l=n+4 ({dt:.1f}s)")
    assert all(per)
    assert dt <= 120


# -- 5 -----------------------------------------------------------------------------

def test_criterion_5_dos_uniformity():
    t0 = time.perf_counter()
    Ks = {}
    for label, f in (("fib", Frequency.fibonacci()), ("all-2", Frequency.constant(2))):
        q = denominators(f, 18)
        K = 1.0
        for n in range(0, 9):
            for l in range(n + 6, n + 11):
                a = dos_approx(f, n, l)
                for k, v in a.masses.items():
                    if len(k) == n + 1:
                        r = float(q[n] * v)
                        K = max(K, r, 1 / r)
        Ks[label] = K
    dt = time.perf_counter() - t0
    ok = max(Ks.values()) <= 20 and dt <= 60
    record(5, ok, "K " + ", ".join(f"{k}={v:.3f}" for k, v in Ks.items()) + f" (<= 20), {dt:.1f}s")
    assert max(Ks.values()) <= 20
    assert dt <= 60


# -- 6 -----------------------------------------------------------------------------

def test_criterion_6_gibbs_like():
    t0 = time.perf_counter()
    f = Frequency.fibonacci()
    pot = LogQn(f)
    N = 8
    Cs = [gibbs_constant(gibbs_measure(pot, f, N, N + k), pot) for k in range(6, 11)]
    mono = all(a >= b for a, b in zip(Cs, Cs[1:]))
    const_ok = True
    for M, g in ((1, f), (2, Frequency.constant(2)), (2, Frequency.periodic([1, 2, 2])),
                 (3, Frequency.periodic([3, 1, 2]))):
        pc = potential_constants(LogQn(g), g, N)
        const_ok &= pc.c_bv == 0 and pc.c_rg <= 2 * math.log(M + 1) + 1e-12 and pc.c_bc <= math.log(2) + 1e-12
    dt = time.perf_counter() - t0
    ok = all(math.isfinite(c) for c in Cs) and mono and const_ok and dt <= 60
    record(6, ok, "C(N+6..N+10) = " + ", ".join(f"{c:.4f}" for c in Cs) + f"; constants ok={const_ok}, {dt:.1f}s")
    assert all(math.isfinite(c) for c in Cs)
    assert mono
    assert const_ok
    assert dt <= 60


# -- 7 -----------------------------------------------------------------------------

def test_criterion_7_metric_and_diameters():
    t0 = time.perf_counter()
    tree = build_band_tree(Frequency.fibonacci(), 24, 9)
    psi = LogBandLength(tree)
    ws = enumerate_words(tree.freq, 6)
    d = [[weak_gibbs_distance(psi, a, b) for b in ws] for a in ws]
    ultra = all(d[i][j] <= max(d[i][k], d[j][k]) for i, j, k in itertools.product(range(len(ws)), repeat=3))
    rep = diameter_bounds_check(tree, psi, levels=range(4, 9))
    cs = list(rep.per_level.values())
    stable = max(cs) / min(cs) < 1.5
    dt = time.perf_counter() - t0
    ok = ultra and rep.max_ratio <= 1 and rep.c > 0 and stable and dt <= 30
    record(7, ok, f"ultrametric on {len(ws) ** 3} triples; diam/r <= {rep.max_ratio:.3f}; "
                  f"c per level {min(cs):.4f}..{max(cs):.4f}, {dt:.1f}s")
    assert ultra
    assert rep.max_ratio <= 1 and rep.c > 0 and stable
    assert dt <= 30


# -- 8 -----------------------------------------------------------------------------

def test_criterion_8_exactness_diagnostic():
    t0 = time.perf_counter()
    from sturmdos.bands import BandTree
    tree = BandTree(Frequency.fibonacci(), 24)
    e8 = dimension_estimate(tree, 8, chains=32, seed=0)
    e12 = dimension_estimate(tree, 12, chains=32, seed=0)
    dists = {k: bilipschitz_distortion(tree, k) for k in (6, 8)}
    b8 = dists[8]
    bounded = 0 < b8.lower and math.isfinite(b8.upper) and b8.distortion < 10
    stable = abs(b8.distortion / dists[6].distortion - 1) < 0.05
    dt = time.perf_counter() - t0
    ok = e12["spread"] < e8["spread"] and bounded and stable and dt <= 300
    record(8, ok, f"spread d_8={e8['spread']:.4f} -> d_12={e12['spread']:.4f}; distortion depth 8 "
                  f"[{b8.lower:.4f}, {b8.upper:.4f}] over {b8.pairs} pairs, {dt:.1f}s")
    assert e12["spread"] < e8["spread"]
    assert bounded and stable
    assert dt <= 300


# -- 9 -----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def crit9():
    t0 = time.perf_counter()
    f = Frequency.schedule([(6, 6), (8, 8), (10, 10)])
    rep = oscillation_diagnostic(f, 200, 28, chains=32, seed=0)
    return rep, time.perf_counter() - t0


def test_criterion_9_diagnostic_runs(crit9):
    rep, dt = crit9
    assert rep.checkpoints == [(6, 12), (20, 28)]
    assert all(math.isfinite(x) for x in (rep.delta, rep.se, rep.paired_se))
    assert set(rep.baselines) == {"all-1", "all-2"}
    assert rep.lower["n"] == rep.upper["n"] == 32
    assert dt <= 900


@pytest.mark.xfail(strict=True, reason="at lambda=200 and depth 28 the measured gap and the baselines "
                                        "do not show d(2) > d(1); see the decision ledger")
def test_criterion_9_gap_sign(crit9):
    rep, dt = crit9
    b = rep.baselines
    ok = rep.delta > 3 * rep.se and b["all-2"] > b["all-1"] and dt <= 900
    record(9, ok, f"delta={rep.delta:+.4f} (se {rep.se:.4f}); baselines all-1={b['all-1']:.4f} "
                  f"all-2={b['all-2']:.4f}; block increments twos-ones={rep.block['delta']:+.4f} "
                  f"(se {rep.block['paired_se']:.4f}), {dt:.1f}s")
    assert rep.delta > 3 * rep.se
    assert b["all-2"] > b["all-1"]


# -- 10 ----------------------------------------------------------------------------

def test_criterion_10_fibonacci_trend():
    t0 = time.perf_counter()
    rows = fibonacci_asymptotic_check((50, 100, 200, 400), depth=24, chains=32, seed=0)
    const = float(fibonacci_constant())
    errs = [abs(r["d_loglambda"] - const) for r in rows]
    approaching = all(a > b for a, b in zip(errs, errs[1:]))
    in_unit = all(0 < r["d_estimate"] < 1 for r in rows)
    last = abs(rows[-1]["relative_error"])
    dt = time.perf_counter() - t0
    ok = approaching and last <= 0.25 and in_unit and dt <= 1200
    record(10, ok, "d*log(lambda) = " + ", ".join(f"{r['d_loglambda']:.4f}" for r in rows)
                   + f" vs {const:.4f}; lambda=400 error {last:.2%}, {dt:.1f}s")
    assert approaching and in_unit
    assert last <= 0.25
    assert dt <= 1200
