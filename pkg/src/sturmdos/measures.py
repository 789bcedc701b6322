"""Potentials on the coding space, Gibbs-like measures and the weak Gibbs metric.

A potential here is a family ``phi_n`` of cylinder functions: ``phi_n(x)``
depends on ``x|_n`` only (user potentials may look a fixed number of letters
further, taking the lexicographically smallest admissible extension as the
representative point).  Depth ``n`` means words ``w_0 ... w_n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .bands import BandTree
from .cf import Frequency, denominators
from .errors import CapExceeded, Undetermined, ValidationError
from .symbolic import (
    P0,
    TYPES,
    Word,
    count_words,
    enumerate_words,
    format_word,
    successors,
    typed_counts,
    _TYPE_RANK,
    _vecmat,
)

__all__ = [
    "Potential",
    "LogQn",
    "LogBandLength",
    "UserPotential",
    "ConstantPotential",
    "PotentialConstants",
    "CylinderMeasure",
    "partition_sum",
    "log_partition_sum",
    "conditional_sum",
    "gibbs_measure",
    "gibbs_constant",
    "potential_constants",
    "weak_gibbs_distance",
    "diameter_bounds_check",
    "DiameterReport",
    "quasi_multiplicativity",
    "logsumexp",
]

DEFAULT_CAP = 10**6


def logsumexp(values: Iterable[float]) -> float:
    vals = list(values)
    if not vals:
        return -math.inf
    m = max(vals)
    if m == -math.inf:
        return m
    return m + math.log(math.fsum(math.exp(v - m) for v in vals))


class Potential:
    """Base class: ``value(letters)`` is ``phi_n`` on the cylinder of a depth-``n`` word."""

    kind = "user"
    #: True when phi_n is the same for every depth-n word
    level_constant = False
    freq: Frequency

    def value(self, letters: tuple) -> float:
        raise NotImplementedError

    def level_value(self, n: int) -> float:
        raise TypeError("potential is not constant on levels")

    def __call__(self, w) -> float:
        return self.value(w.letters if isinstance(w, Word) else tuple(w))

    def empty_value(self) -> float:
        """Stand-in for the empty word (points with different root letters)."""
        return max(self.value((r,)) for r in _roots())

    def is_negative(self, depth: int, cap: int = DEFAULT_CAP) -> bool:
        """``phi_n`` non-increasing along every chain up to ``depth`` and negative from depth 1."""
        for w in enumerate_words(self.freq, depth, cap=cap, as_tuples=True):
            vals = [self.value(w[: k + 1]) for k in range(len(w))]
            if any(b > a for a, b in zip(vals, vals[1:])):
                return False
            if len(vals) > 1 and vals[1] >= 0:
                return False
        return True


def _roots():
    from .symbolic import root_alphabet
    return root_alphabet()


class LogQn(Potential):
    """``phi_n = log q_n``."""

    kind = "LogQn"
    level_constant = True

    def __init__(self, freq: Frequency):
        self.freq = freq
        self._q = [1]

    def _qn(self, n):
        if n >= len(self._q):
            self._q = denominators(self.freq, max(n, 2 * len(self._q)))
        return self._q[n]

    def level_value(self, n: int) -> float:
        return math.log(self._qn(n))

    def value(self, letters: tuple) -> float:
        return self.level_value(len(letters) - 1)


class ConstantPotential(Potential):
    """``phi_n = c_n`` for given level constants (a callable of ``n``)."""

    kind = "constant"
    level_constant = True

    def __init__(self, freq: Frequency, c: Callable[[int], float] = lambda n: 0.0):
        self.freq = freq
        self._c = c

    def level_value(self, n):
        return float(self._c(n))

    def value(self, letters):
        return self.level_value(len(letters) - 1)


class LogBandLength(Potential):
    """``psi_n(x) = log |B_{x|n}|`` read off a band tree."""

    kind = "LogBandLength"

    def __init__(self, tree: BandTree):
        self.tree = tree
        self.freq = tree.freq

    def value(self, letters: tuple) -> float:
        return self.tree.band(letters).log_length

    def empty_value(self) -> float:
        # convex hull of both root bands
        return math.log(float(self.tree.lam) + 4)


class UserPotential(Potential):
    """Wraps ``fn(word) -> float``.

    ``fn`` sees the depth-``n`` word extended by ``lookahead`` further
    letters along the lexicographically smallest admissible path.
    """

    kind = "user"

    def __init__(self, freq: Frequency, fn: Callable[[Word], float], lookahead: int = 0):
        self.freq = freq
        self.fn = fn
        self.lookahead = lookahead

    def value(self, letters: tuple) -> float:
        ext = tuple(letters)
        for _ in range(self.lookahead):
            ext = ext + (successors(ext[-1], self.freq.quotient(len(ext)))[0],)
        return float(self.fn(Word._trusted(ext, self.freq)))

    def values_over_extensions(self, letters: tuple) -> list[float]:
        """``fn`` over every admissible extension of the given lookahead."""
        layer = [tuple(letters)]
        for _ in range(self.lookahead):
            layer = [w + (c,) for w in layer for c in successors(w[-1], self.freq.quotient(len(w)))]
        return [float(self.fn(Word._trusted(w, self.freq))) for w in layer]


class PotentialConstants(NamedTuple):
    c_rg: float
    c_bv: float
    c_bc: float
    depth: int

    def to_dict(self):
        return self._asdict()


@dataclass
class CylinderMeasure:
    """Masses of all cylinders up to ``depth``, keyed by letter tuples."""

    freq: Frequency
    depth: int
    masses: dict = field(repr=False)
    horizon: int | None = None

    def mass(self, w) -> float:
        key = w.letters if isinstance(w, Word) else tuple(w)
        try:
            return self.masses[key]
        except KeyError:
            raise ValidationError(f"no mass stored for {format_word(key)}") from None

    def level(self, n: int) -> dict:
        return {k: v for k, v in self.masses.items() if len(k) == n + 1}

    def additivity_defect(self) -> float:
        """Largest relative gap between a parent mass and the sum of its children."""
        kids: dict = {}
        for k, v in self.masses.items():
            if len(k) > 1:
                kids.setdefault(k[:-1], []).append(v)
        worst = abs(math.fsum(v for k, v in self.masses.items() if len(k) == 1) - 1.0)
        for parent, vs in kids.items():
            p = self.masses[parent]
            worst = max(worst, abs(math.fsum(vs) - p) / p)
        return worst

    def to_dict(self, digits: int = 17) -> dict:
        return {format_word(k): f"{v:.{digits}g}" for k, v in sorted(self.masses.items(), key=lambda kv: (len(kv[0]), kv[0]))}

    def to_json(self, **kw) -> str:
        return json.dumps({"depth": self.depth, "horizon": self.horizon, "masses": self.to_dict()}, **kw)


def _check_pot(pot: Potential, freq: Frequency):
    if pot.freq != freq:
        raise ValidationError("potential and frequency disagree")


def log_partition_sum(pot: Potential, freq: Frequency, n: int, cap: int = DEFAULT_CAP) -> float:
    """``log sigma_n``."""
    _check_pot(pot, freq)
    if pot.level_constant:
        return math.log(count_words(freq, n)) + pot.level_value(n)
    words = enumerate_words(freq, n, cap=cap, as_tuples=True)
    return logsumexp(pot.value(w) for w in words)


def partition_sum(pot: Potential, freq: Frequency, n: int, cap: int = DEFAULT_CAP) -> float:
    """``sigma_n = sum over depth-n words of exp(phi_n)``."""
    return math.exp(log_partition_sum(pot, freq, n, cap))


def _descendants(w: tuple, freq: Frequency, m: int, cap: int):
    layer = [w]
    for k in range(len(w), len(w) + m):
        level = freq.quotient(k)
        layer = [v + (c,) for v in layer for c in successors(v[-1], level)]
        if len(layer) > cap:
            raise CapExceeded(f"more than {cap} descendants")
    return layer


def conditional_sum(pot: Potential, w: Word, m: int, cap: int = DEFAULT_CAP) -> float:
    """``sigma^w_m``: sum over descendants ``v`` of exp(phi_{n+m}(v) - phi_n(w))."""
    if m < 0:
        raise ValidationError("m must be >= 0")
    if m == 0:
        return 1.0
    n = w.depth
    if pot.level_constant:
        from .symbolic import descendant_count
        return descendant_count(w, m) * math.exp(pot.level_value(n + m) - pot.level_value(n))
    base = pot.value(w.letters)
    vs = _descendants(w.letters, w.freq, m, cap)
    return math.exp(logsumexp(pot.value(v) - base for v in vs))


def gibbs_measure(pot: Potential, freq: Frequency, depth: int, horizon: int | None = None,
                  cap: int = DEFAULT_CAP) -> CylinderMeasure:
    """Finite-horizon Gibbs-like measure.

    Level-``horizon`` words get weight ``exp(phi_L)/sigma_L``; cylinders up to
    ``depth`` receive the total weight of their descendants.  Parents are sums
    of children by construction.
    """
    _check_pot(pot, freq)
    if horizon is None:
        horizon = depth + 8
    if horizon < depth:
        raise ValidationError("horizon must be >= depth")
    masses: dict = {}
    if pot.level_constant:
        # weights are uniform on level L: mass(w) = #descendants / #Omega_L
        total = count_words(freq, horizon)
        for n in range(depth + 1):
            for w in enumerate_words(freq, n, cap=cap, as_tuples=True):
                v = [0, 0, 0]
                v[_TYPE_RANK[w[-1].type]] = 1
                for k in range(n + 1, horizon + 1):
                    v = _vecmat(v, freq.quotient(k))
                masses[w] = float(Fraction(sum(v), total))
        return CylinderMeasure(freq, depth, masses, horizon)
    words = enumerate_words(freq, horizon, cap=cap, as_tuples=True)
    logs = [pot.value(w) for w in words]
    lz = logsumexp(logs)
    agg: dict = {}
    for w, lv in zip(words, logs):
        agg.setdefault(w[: depth + 1], []).append(lv - lz)
    for k, lst in agg.items():
        masses[k] = math.exp(logsumexp(lst))
    for n in range(depth - 1, -1, -1):
        kids: dict = {}
        for k, v in masses.items():
            if len(k) == n + 2:
                kids.setdefault(k[:-1], []).append(v)
        for k, vs in kids.items():
            masses[k] = math.fsum(vs)
    return CylinderMeasure(freq, depth, masses, horizon)


def gibbs_constant(mu: CylinderMeasure, pot: Potential, levels: Iterable[int] | None = None,
                   cap: int = DEFAULT_CAP) -> float:
    """Smallest ``C >= 1`` with ``C^-1 e^{phi_n}/sigma_n <= mu[w] <= C e^{phi_n}/sigma_n``."""
    _check_pot(pot, mu.freq)
    levels = range(mu.depth + 1) if levels is None else levels
    worst = 0.0
    for n in levels:
        lz = log_partition_sum(pot, mu.freq, n, cap)
        for k, m in mu.level(n).items():
            worst = max(worst, abs(math.log(m) - (pot.value(k) - lz)))
    return math.exp(worst)


def _all_words_upto(freq, depth, cap):
    for n in range(depth + 1):
        yield n, enumerate_words(freq, n, cap=cap, as_tuples=True)


def potential_constants(pot: Potential, freq: Frequency, depth: int, cap: int = DEFAULT_CAP,
                        min_level: int = 0) -> PotentialConstants:
    """Measured regularity, variation and covariation constants up to ``depth``.

    Covariation is exhaustive: every word of depth ``<= depth`` is split as
    ``u v`` at each position, the pairs are grouped by the suffix ``v`` and a
    group contributes ``max - min`` of ``phi(uv) - phi(u)``.
    """
    _check_pot(pot, freq)
    top = enumerate_words(freq, depth, cap=cap, as_tuples=True)
    c_rg = 0.0
    vals_cache: dict = {}

    def val(k):
        v = vals_cache.get(k)
        if v is None:
            v = vals_cache[k] = pot.value(k)
        return v

    if pot.level_constant:
        lv = [pot.level_value(n) for n in range(depth + 1)]
        for n in range(min_level, depth + 1):
            for m in range(n + 1, depth + 1):
                c_rg = max(c_rg, abs(lv[m] - lv[n]) / (m - n))
    else:
        for x in top:
            vs = [val(x[: k + 1]) for k in range(len(x))]
            for n in range(min_level, depth + 1):
                for m in range(n + 1, depth + 1):
                    c_rg = max(c_rg, abs(vs[m] - vs[n]) / (m - n))
    c_bv = 0.0
    if isinstance(pot, UserPotential) and pot.lookahead:
        for n, words in _all_words_upto(freq, depth, cap):
            for w in words:
                ext = pot.values_over_extensions(w)
                c_bv = max(c_bv, max(ext) - min(ext))
    groups: dict = {}
    for N, words in _all_words_upto(freq, depth, cap):
        for w in words:
            for n in range(max(min_level, 0), N):
                r = val(w) - val(w[: n + 1])
                key = w[n + 1:]
                lo, hi = groups.get(key, (r, r))
                groups[key] = (min(lo, r), max(hi, r))
    c_bc = max((hi - lo for lo, hi in groups.values()), default=0.0)
    return PotentialConstants(c_rg, c_bv, c_bc, depth)


def quasi_multiplicativity(pot: Potential, freq: Frequency, depth: int, cap: int = DEFAULT_CAP) -> float:
    """Max over ``n + m <= depth`` and depth-``n`` words ``w`` of
    ``|log(sigma_{n+m} / (sigma_n sigma^w_m))|`` (returned exponentiated)."""
    _check_pot(pot, freq)
    lz = [log_partition_sum(pot, freq, n, cap) for n in range(depth + 1)]
    worst = 0.0
    for n in range(depth + 1):
        for w in enumerate_words(freq, n, cap=cap):
            for m in range(0, depth - n + 1):
                s = conditional_sum(pot, w, m, cap)
                worst = max(worst, abs(lz[n + m] - lz[n] - math.log(s)))
    return math.exp(worst)


def weak_gibbs_distance(psi: Potential, x, y) -> float:
    """``d(x, y) = r_{x ^ y}`` with ``r_w = exp(psi_n(w))``.

    ``x`` and ``y`` are finite chains (Words or letter tuples); identical
    chains are at distance 0, and a chain that is a proper prefix of the
    other cannot decide where they split.
    """
    xl = x.letters if isinstance(x, Word) else tuple(x)
    yl = y.letters if isinstance(y, Word) else tuple(y)
    if xl == yl:
        return 0.0
    k = 0
    for a, b in zip(xl, yl):
        if a != b:
            break
        k += 1
    if k == min(len(xl), len(yl)):
        raise Undetermined("one chain is a prefix of the other; extend them to separate")
    if k == 0:
        return math.exp(psi.empty_value())
    return math.exp(psi.value(xl[:k]))


class DiameterReport(NamedTuple):
    per_level: dict  # n -> min diam/r_w over sampled cylinders
    max_ratio: float  # largest diam/r_w seen (must be <= 1)
    c: float  # min over all levels
    samples: int


def diameter_bounds_check(tree: BandTree, psi: LogBandLength | None = None,
                          levels: Iterable[int] = range(4, 9), extend: int | None = None) -> DiameterReport:
    """``c r_w <= diam[w] <= r_w`` with the diameter taken over chains that
    extend ``w`` to depth ``max(levels) + extend``.

    Since ``d`` only depends on where two chains split, the diameter of
    ``[w]`` is ``r_v`` for the shortest extension ``v`` of ``w`` that has two
    or more children within the horizon (0 if there is none).
    """
    psi = LogBandLength(tree) if psi is None else psi
    levels = list(levels)
    if extend is None:
        extend = P0 + 2
    horizon = max(levels) + extend
    per, worst_hi, count = {}, 0.0, 0
    for n in levels:
        lo_ratio = math.inf
        for b in tree.level(n):
            node = b
            diam = 0.0
            while node.order < horizon:
                kids = tree.children(node)
                if len(kids) > 1:
                    diam = math.exp(psi.value(node.word.letters))
                    break
                node = kids[0]
            r = math.exp(psi.value(b.word.letters))
            ratio = diam / r
            lo_ratio = min(lo_ratio, ratio)
            worst_hi = max(worst_hi, ratio)
            count += 1
        per[n] = lo_ratio
    return DiameterReport(per, worst_hi, min(per.values()), count)
