"""Invariant suites behind ``sturmdos verify``.

Each suite returns a list of ``Check`` records; nothing here raises on a
failed invariant, so a report always comes back whole.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import NamedTuple

from .cf import Frequency, denominators, gauss_shift
from .symbolic import (
    aux_product_bounds_check,
    count_words,
    enumerate_words,
    strong_primitivity_check,
    typed_counts,
)

__all__ = ["Check", "combinatorial_suite", "band_suite", "dos_suite", "measure_suite", "SUITES", "run_suite"]


class Check(NamedTuple):
    name: str
    ok: bool
    detail: object = None

    def to_dict(self):
        return {"check": self.name, "ok": bool(self.ok), "detail": self.detail}


def random_frequencies(M: int, count: int, length: int, seed: int = 0) -> list[Frequency]:
    rng = random.Random(seed)
    return [Frequency.finite([rng.randint(1, M) for _ in range(length)]) for _ in range(count)]


def _q_sandwich(freq: Frequency, N: int):
    q = denominators(freq, N)
    for n in range(N + 1):
        qs = denominators(gauss_shift(freq, n), N - n)
        for m in range(N - n + 1):
            lo = q[n] * qs[m]
            if not lo <= q[n + m] <= 2 * lo:
                return (n, m)
    return None


def combinatorial_suite(M: int = 2, nmax: int = 14, brute: int = 10, samples: int = 10,
                        seed: int = 0) -> list[Check]:
    """Strong primitivity, auxiliary-product bounds, denominator sandwich,
    word counts against ``q_n`` and against brute-force enumeration."""
    out = []
    for m in range(1, M + 1):
        ok, wit = strong_primitivity_check(m, 6)
        out.append(Check(f"strong_primitivity M={m} k=6", ok, None if ok else str(wit)))
        ok, bad = aux_product_bounds_check(m)
        out.append(Check(f"aux_product_bounds M={m}", ok, bad))
    freqs = [("fib", Frequency.fibonacci())]
    if M >= 2:
        freqs.append(("const:2", Frequency.constant(2)))
    freqs += [(f"random#{i}", f) for i, f in enumerate(random_frequencies(M, samples, nmax + 2, seed))]
    for label, f in freqs:
        bad = _q_sandwich(f, nmax)
        out.append(Check(f"q_sandwich {label}", bad is None, bad))
        q = denominators(f, nmax)
        fails = []
        for n in range(nmax + 1):
            c = count_words(f, n)
            t = typed_counts(f, n)
            if not (q[n] <= c <= 5 * q[n]) or t[1] + t[2] != q[n] or sum(t) != c:
                fails.append(n)
        out.append(Check(f"word_counts {label}", not fails, fails or None))
        mism = [n for n in range(min(brute, nmax) + 1)
                if len(enumerate_words(f, n, cap=10**7, as_tuples=True)) != count_words(f, n)]
        out.append(Check(f"enumeration {label} n<={min(brute, nmax)}", not mism, mism or None))
    return out


def band_suite(freq: Frequency, lam, depth: int) -> list[Check]:
    from .bands import build_band_tree

    tree = build_band_tree(freq, lam, depth, verify=False)
    rep = tree.verify(depth)
    out = []
    for key in ("bands", "children", "nested", "disjoint", "edges", "width_bound"):
        bad = []
        for e in rep["levels"]:
            if key == "bands":
                if not (e["bands"] == e["count_words"] and e["typed_II_III"] == e["q_n"]):
                    bad.append(e["n"])
            elif not e.get(key, True):
                bad.append(e["n"])
        out.append(Check(f"bands.{key}", not bad, bad or None))
    return out


def dos_suite(freq: Frequency, lam, depth: int, horizon: int) -> list[Check]:
    from .bands import BandTree
    from .dos import dos_approx, dos_spectral

    a = dos_approx(freq, depth, horizon)
    out = [Check("dos.level_sums", all(a.level_sum(n) == 1 for n in range(depth + 1)))]
    b = dos_spectral(BandTree(freq, lam), horizon, depth)
    diff = [k for k in a.masses if a.masses[k] != b.masses[k]]
    out.append(Check("dos.spectral_equals_combinatorial", not diff, len(diff) or None))
    q = denominators(freq, depth)
    K = max(max(float(q[len(k) - 1] * v), float(1 / (q[len(k) - 1] * v))) for k, v in a.masses.items())
    out.append(Check("dos.uniformity_K", math.isfinite(K), K))
    return out


def measure_suite(freq: Frequency, depth: int, horizon: int | None = None) -> list[Check]:
    from .measures import LogQn, gibbs_constant, gibbs_measure, potential_constants

    pot = LogQn(freq)
    horizon = depth + 6 if horizon is None else horizon
    mu = gibbs_measure(pot, freq, depth, horizon)
    C = gibbs_constant(mu, pot)
    out = [Check("measure.additivity", mu.additivity_defect() < 1e-12, mu.additivity_defect()),
           Check("measure.gibbs_constant_finite", math.isfinite(C), C)]
    pc = potential_constants(pot, freq, depth)
    M = max(freq.quotient(k) for k in range(1, depth + 2))
    out.append(Check("measure.c_bv", pc.c_bv == 0, pc.c_bv))
    out.append(Check("measure.c_rg", pc.c_rg <= 2 * math.log(M + 1) + 1e-12, pc.c_rg))
    out.append(Check("measure.c_bc", pc.c_bc <= math.log(2) + 1e-12, pc.c_bc))
    return out


SUITES = ("combinatorial", "bands", "dos", "measures", "all")


def run_suite(name: str, freq: Frequency, lam=24, depth: int = 6, horizon: int | None = None,
              M: int = 2, seed: int = 0) -> list[Check]:
    if name not in SUITES:
        from .errors import ValidationError
        raise ValidationError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    out = []
    if name in ("combinatorial", "all"):
        out += combinatorial_suite(M, seed=seed)
    if name in ("bands", "all"):
        out += band_suite(freq, lam, depth)
    if name in ("dos", "all"):
        out += dos_suite(freq, lam, min(depth, 5), min(depth, 5) + 4 if horizon is None else horizon)
    if name in ("measures", "all"):
        out += measure_suite(freq, depth, horizon)
    return out
