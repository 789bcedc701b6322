"""Spectral generating bands of Sturm Hamiltonians.

Traces ``h_(n,p)(x) = tr M_{n-1}(x) M_n(x)^p`` are evaluated through the
block recursion ``M_{n+1} = M_{n-1} M_n^{a_{n+1}}`` in arb ball arithmetic,
so every value carries a rigorous enclosure.

Children of a band are found by sampling the relevant trace inside the
parent, refining around places where a root can hide, and certifying sign
changes.  Every band of ``{|h| <= 2}`` is a monotone branch of ``h`` through
a root, so counting certified roots counts bands.  The number of children is
known in advance from the subdivision rules (I -> 1, II -> 2a+1, III -> 2a-1),
and that number is the stopping certificate: too few means refine, too many
or ambiguous signs means raise the working precision.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from flint import arb, ctx

from .cf import Frequency, denominators
from .errors import (
    CountMismatch,
    InvalidCoupling,
    PrecisionExhausted,
    UnknownWord,
    ValidationError,
)
from .symbolic import Letter, Word, count_words, root_alphabet

__all__ = [
    "TraceHandle",
    "Interval",
    "BandNode",
    "BandTree",
    "eval_trace",
    "transfer_matrices",
    "isolate_subbands",
    "build_band_tree",
    "band_for_word",
    "gap_statistics",
    "covariation_statistics",
    "GapStats",
    "CovariationStats",
    "DEFAULT_BITS",
    "MAX_BITS",
]

DEFAULT_BITS = 128
MAX_BITS = 4096
_MAX_ROUNDS = 400
_MAX_SAMPLES = 20000


@contextlib.contextmanager
def _prec(bits: int):
    old = ctx.prec
    ctx.prec = int(bits)
    try:
        yield
    finally:
        ctx.prec = old


def _to_arb(x) -> arb:
    if isinstance(x, arb):
        return x
    if isinstance(x, int):
        return arb(x)
    if isinstance(x, float):
        return arb(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return arb(x.numerator) / x.denominator
    return arb(str(x))


# 2x2 matrices as (a, b, c, d) tuples

def _mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _pow(A, k):
    R = A
    for _ in range(k - 1):
        R = _mul(R, A)
    return R


def _adj(A):
    a, b, c, d = A
    return (d, -b, -c, a)


def transfer_matrices(freq: Frequency, lam, x, upto: int):
    """``[M_{-1}(x), M_0(x), ..., M_upto(x)]`` at the current working precision."""
    lam = _to_arb(lam)
    x = _to_arb(x)
    mats = [(arb(1), -lam, arb(0), arb(1)), (x, arb(-1), arb(1), arb(0))]
    for n in range(0, upto):
        mats.append(_mul(mats[-2], _pow(mats[-1], freq.quotient(n + 1))))
    return mats


def _cheb(t, k):
    """``S_k(t)``: ``S_{-1} = 0``, ``S_0 = 1``, ``S_{k+1} = t S_k - S_{k-1}``."""
    if k < 0:
        return arb(0)
    a, b = arb(0), arb(1)
    for _ in range(k):
        a, b = b, t * b - a
    return b


def trace_sequence(freq: Frequency, lam, x, upto: int):
    """``(xs, zs)`` with ``xs[k+1] = tr M_k`` for ``k >= -1`` and
    ``zs[k] = tr M_{k-1} M_k`` for ``k >= 0``, up to ``k = upto``.

    Scalar recursion from Cayley-Hamilton (``M^a = S_{a-1} M - S_{a-2} I``);
    the ball radii grow far slower than with explicit matrix products.
    """
    lam = _to_arb(lam)
    x = _to_arb(x)
    xs = [arb(2), x]
    zs = [x - lam]
    for n in range(0, upto):
        a = freq.quotient(n + 1)
        t, z, xp = xs[-1], zs[-1], xs[-2]
        s = [_cheb(t, a - 2), _cheb(t, a - 1), _cheb(t, a)]
        xs.append(s[1] * z - s[0] * xp)
        zs.append(s[2] * z - s[1] * xp)
    return xs, zs


class TraceHandle(NamedTuple):
    """Identifies ``h_(n,p)`` for a given frequency and coupling."""

    n: int
    p: int
    lam: object
    freq: Frequency

    def at(self, x):
        """Value at ``x`` at the current working precision."""
        xs, zs = trace_sequence(self.freq, self.lam, x, self.n)
        prev, cur, z = xs[self.n], xs[self.n + 1], zs[self.n]
        if self.p == -1:
            return cur * prev - z
        if self.p == 0:
            return prev
        return _cheb(cur, self.p - 1) * z - _cheb(cur, self.p - 2) * prev

    def at_matrix(self, x):
        """Same value through explicit transfer-matrix products."""
        mats = transfer_matrices(self.freq, self.lam, x, self.n)
        prev, cur = mats[self.n], mats[self.n + 1]
        if self.p == -1:
            P = _mul(prev, _adj(cur))
        elif self.p == 0:
            P = prev
        else:
            P = _mul(prev, _pow(cur, self.p))
        return P[0] + P[3]

    def label(self) -> str:
        return f"({self.n},{self.p})"


def eval_trace(h: TraceHandle, x, bits: int = DEFAULT_BITS, tol: float | None = None,
               max_bits: int = MAX_BITS) -> arb:
    """Certified enclosure of ``h(x)`` with radius at most ``tol``.

    ``x`` is taken as exact (a float, int, Fraction, decimal string or arb
    midpoint).  Precision doubles until the enclosure is narrow enough.
    """
    if h.n < 0 or h.p < -1:
        raise ValidationError("need n >= 0 and p >= -1")
    if tol is None:
        tol = 2.0 ** (-(bits // 2))
    b = bits
    while b <= max_bits:
        with _prec(b):
            xa = _to_arb(x)
            v = h.at(xa)
        if v.rad() <= tol:
            return v
        b *= 2
    raise PrecisionExhausted(f"h{h.label()} at {x}: enclosure wider than {tol} at {max_bits} bits")


class Interval(NamedTuple):
    lo: arb
    hi: arb
    h_lo: arb  # value of the generating trace at lo
    h_hi: arb
    prec: int

    @property
    def width(self) -> arb:
        return self.hi.mid() - self.lo.mid()


class _Retry(Exception):
    """Raised inside one isolation attempt to request more precision."""


def _sign(v: arb) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def _logabs(v: arb) -> float:
    m = abs(v.mid())
    if m == 0:
        return -math.inf
    return float(m.log())


def _isolate_once(fn: Callable, lo: arb, hi: arb, expected: int, tol: arb, prec: int) -> list[Interval]:
    span = hi - lo
    n0 = 24 + 12 * expected
    xs = [(lo + span * (1 - arb.cos_pi(arb(k) / n0)) / 2).mid() for k in range(n0 + 1)]
    xs[0], xs[-1] = lo, hi
    vals = [fn(x) for x in xs]

    def settle(i):
        # a sample sitting on a root has an undetermined sign; nudge it
        for attempt in range(3):
            if _sign(vals[i]) != 0:
                return
            if vals[i].rad() > tol:
                raise _Retry("sample sign undetermined")
            left = xs[i - 1] if i > 0 else xs[i]
            right = xs[i + 1] if i + 1 < len(xs) else xs[i]
            xs[i] = (xs[i] + (right - left) / 1024 * (attempt + 1)).mid()
            vals[i] = fn(xs[i])
        raise _Retry("sample sign undetermined")

    for _ in range(_MAX_ROUNDS):
        for i in range(len(xs)):
            settle(i)
        sg = [_sign(v) for v in vals]
        changes = [i for i in range(len(xs) - 1) if sg[i] != sg[i + 1]]
        if len(changes) > expected:
            raise _Retry(f"found {len(changes)} roots, expected {expected}")
        # every band needs a sample with |h| > 2 on each side of its root
        missing = []
        if len(changes) == expected:
            bounds = [-1] + changes + [len(xs) - 1]
            for k in range(len(changes) + 1):
                a, b = bounds[k] + 1, bounds[k + 1]
                if not any(abs(vals[j]) > 2 for j in range(a, b + 1)):
                    missing.append((max(a - 1, 0), min(b + 1, len(xs) - 1)))
            if not missing:
                break
        if len(xs) > _MAX_SAMPLES:
            raise _Retry("sample budget exhausted")
        la = [_logabs(v) for v in vals]
        windows = list(missing)
        if not windows:
            for i in range(1, len(xs) - 1):
                if sg[i - 1] == sg[i] == sg[i + 1] and la[i] <= la[i - 1] and la[i] <= la[i + 1]:
                    windows.append((i - 1, i + 1))
        if not windows:
            # nothing suggests where a root hides; refine everywhere,
            # ends included since roots may crowd a parent endpoint
            windows = [(i, i + 1) for i in range(len(xs) - 1)]
            per = 1
        else:
            per = 7
        new = []
        for a, b in windows:
            step = (xs[b] - xs[a]) / (per + 1)
            new.extend((xs[a] + step * k).mid() for k in range(1, per + 1))
        merged = sorted(list(zip(xs, vals)) + [(x, None) for x in new], key=lambda t: t[0])
        xs, vals = [], []
        for x, v in merged:
            if xs and x == xs[-1]:
                continue
            xs.append(x)
            vals.append(fn(x) if v is None else v)
    else:
        raise _Retry("refinement rounds exhausted")

    out = []
    for i in changes:
        s = sg[i]
        j = i
        while not abs(vals[j]) > 2:
            j -= 1
        k = i + 1
        while not abs(vals[k]) > 2:
            k += 1
        lo_e, hlo = _edge(fn, xs[j], xs[i + 1], vals[j], vals[i + 1], 2 * s, tol)
        hi_e, hhi = _edge(fn, xs[i], xs[k], vals[i], vals[k], -2 * s, tol)
        out.append(Interval(lo_e, hi_e, hlo, hhi, prec))
    return out


def _edge(fn, a, b, fa, fb, target, tol):
    """Point where ``fn`` crosses ``target`` in ``[a, b]`` (unique crossing)."""
    ga, gb = fa - target, fb - target
    sa, sb = _sign(ga), _sign(gb)
    if sa == 0 or sb == 0 or sa == sb:
        raise _Retry("edge bracket not certified")
    side = 0
    for _ in range(600):
        x = ((a * gb - b * ga) / (gb - ga)).mid()
        if not (a < x < b):
            x = ((a + b) / 2).mid()
        gx = fn(x) - target
        if abs(gx) < tol:
            return _certify_edge(fn, x, gx, a, b, target, sa), gx + target
        s = _sign(gx)
        if s == 0:
            raise _Retry("edge value undetermined")
        if s == sa:
            a, ga = x, gx
            if side == -1:
                gb = gb / 2
            side = -1
        else:
            b, gb = x, gx
            if side == 1:
                ga = ga / 2
            side = 1
        if not (a < b) or (b - a).mid() == 0:
            break
    raise _Retry("edge refinement stalled")


def _certify_edge(fn, x, gx, a, b, target, sa):
    """Ball around ``x`` certified to contain the exact crossing."""
    slope = abs((fn(b) - fn(a)) / (b - a)).mid()
    eps = (abs(gx).upper() * 2 / slope).mid() if slope > 0 else (b - a).mid()
    floor = abs(x.mid()) * arb(2) ** (-ctx.prec + 8) + arb(2) ** (-ctx.prec)
    eps = max(eps, floor.mid())
    for _ in range(40):
        l, r = (x - eps).mid(), (x + eps).mid()
        if l <= a or r >= b:
            break
        if _sign(fn(l) - target) == sa and _sign(fn(r) - target) == -sa:
            return x + arb(0, eps)
        eps = (eps * 4).mid()
    # the bracket itself is certified
    return arb((a + b) / 2).mid() + arb(0, ((b - a) / 2).upper())


def isolate_subbands(h: TraceHandle | Callable, parent=None, expected: int = 1,
                     bits: int = DEFAULT_BITS, max_bits: int = MAX_BITS,
                     lam=None) -> list[Interval]:
    """The ``expected`` components of ``{|h| <= 2}`` inside ``parent``.

    ``parent`` is a pair of endpoints (defaults to a window containing the
    whole spectrum).  Endpoint values are certified to ``2 +- 2^-(bits/2)``.
    """
    if expected < 0:
        raise ValidationError("expected count must be >= 0")
    if expected == 0:
        return []
    if isinstance(h, TraceHandle):
        lam = h.lam
        fn = h.at
    else:
        fn = h
    if parent is None:
        L = float(lam) if lam is not None else 0.0
        parent = (-4 - abs(L), 4 + abs(L))
    lo_p, hi_p = parent
    with _prec(max(bits, 64)):
        lo_p, hi_p = _to_arb(lo_p), _to_arb(hi_p)
        width = hi_p.mid() - lo_p.mid()
        if not width > 0:
            raise ValidationError("parent interval is empty")
        scale = max(abs(lo_p.mid()), abs(hi_p.mid()), arb(1))
        extra = float((scale / width).log()) / math.log(2)
    prec = bits + max(0, math.ceil(extra)) + 32
    tol_exp = bits // 2
    last = None
    while prec <= max_bits + max(0, math.ceil(extra)) + 32:
        with _prec(prec):
            tol = arb(2) ** (-tol_exp)
            try:
                return _isolate_once(fn, lo_p.mid(), hi_p.mid(), expected, tol, prec)
            except _Retry as exc:
                last = str(exc)
        prec *= 2
    if last and last.startswith("found"):
        raise CountMismatch(last)
    if last and ("budget" in last or "rounds" in last):
        raise CountMismatch(f"could not locate {expected} bands: {last}")
    raise PrecisionExhausted(f"isolation failed at {max_bits} bits: {last}")


@dataclass(eq=False)
class BandNode:
    """A spectral generating band ``B_w``."""

    word: Word
    lo: arb
    hi: arb
    order: int
    type: str
    trace: TraceHandle
    h_lo: arb = field(default=None, repr=False)
    h_hi: arb = field(default=None, repr=False)
    prec: int = DEFAULT_BITS

    @property
    def interval(self):
        return (self.lo, self.hi)

    @property
    def length(self) -> arb:
        with _prec(self.prec):
            return self.hi.mid() - self.lo.mid()

    @property
    def log_length(self) -> float:
        with _prec(self.prec):
            return float((self.hi.mid() - self.lo.mid()).log())

    def contains(self, other: "BandNode") -> bool:
        """Certified ``other`` subset of ``self``."""
        if other.lo is self.lo and other.hi is self.hi:
            return True
        with _prec(max(self.prec, other.prec)):
            return bool(self.lo <= other.lo and other.hi <= self.hi)

    def contains_point(self, x) -> bool | None:
        """True/False when certified, None when ``x`` is within endpoint uncertainty."""
        with _prec(self.prec):
            x = _to_arb(x)
            if self.lo < x and x < self.hi:
                return True
            if x < self.lo or x > self.hi:
                return False
            return None

    def to_dict(self, digits: int | None = None) -> dict:
        if digits is None:
            digits = _digits_for(self)
        return {
            "word": str(self.word),
            "lo": self.lo.mid().str(digits, radius=False),
            "hi": self.hi.mid().str(digits, radius=False),
            "type": self.type,
            "n": self.trace.n,
            "p": self.trace.p,
        }


def _digits_for(node: BandNode) -> int:
    lg = node.log_length
    return max(20, int(-lg / math.log(10)) + 20) if math.isfinite(lg) else 40


class BandTree:
    """Nested bands ``{B_w}`` for one frequency and coupling.

    Children are computed on demand and cached, so deep chains can be
    explored without building whole levels.  ``depth`` is the number of
    fully built levels (see :func:`build_band_tree`).
    """

    def __init__(self, freq: Frequency, lam, bits: int = DEFAULT_BITS, max_bits: int = MAX_BITS,
                 check_types: bool = True):
        lam_f = float(lam)
        if not lam_f > 4:
            raise InvalidCoupling(f"coupling must exceed 4 (got {lam})")
        if lam_f <= 20:
            warnings.warn("band covariation bounds assume coupling > 20", RuntimeWarning, stacklevel=2)
        self.freq = freq
        self.lam = lam
        self.bits = bits
        self.max_bits = max_bits
        self.check_types = check_types
        self.depth = 0
        self._children: dict[tuple, list[BandNode]] = {}
        rI, rIII = root_alphabet()
        with _prec(bits):
            L = _to_arb(lam)
            self.roots = [
                BandNode(Word._trusted((rI,), freq), L - 2, L + 2, 0, "I",
                         TraceHandle(0, 1, lam, freq), arb(-2), arb(2), bits),
                BandNode(Word._trusted((rIII,), freq), arb(-2), arb(2), 0, "III",
                         TraceHandle(1, 0, lam, freq), arb(-2), arb(2), bits),
            ]
        self._index = {n.word.letters: n for n in self.roots}

    # -- construction -------------------------------------------------------

    def children(self, node: BandNode) -> list[BandNode]:
        key = node.word.letters
        if key in self._children:
            return self._children[key]
        n = node.order
        a = self.freq.quotient(n + 1)
        lam, freq = self.lam, self.freq
        if node.type == "I":
            plan = [(TraceHandle(n + 2, 0, lam, freq), "II", 1)]
        elif node.type == "II":
            plan = [(TraceHandle(n + 1, 1, lam, freq), "I", a + 1),
                    (TraceHandle(n + 2, 0, lam, freq), "III", a)]
        else:
            plan = [(TraceHandle(n + 1, 1, lam, freq), "I", a),
                    (TraceHandle(n + 2, 0, lam, freq), "III", a - 1)]
        found = []
        if node.type == "I" and a == 1:
            # M_{n+1} = M_{n-1} M_n, so tr M_{n+1} is the parent's own trace
            # and the single child coincides with the parent
            iv = Interval(node.lo, node.hi, node.h_lo, node.h_hi, node.prec)
            found.append((iv, plan[0][0], "II"))
            plan = []
        for h, t, cnt in plan:
            for iv in isolate_subbands(h, (node.lo, node.hi), cnt, self.bits, self.max_bits):
                found.append((iv, h, t))
        found.sort(key=lambda r: r[0].lo.mid())
        for (i1, _, _), (i2, _, _) in zip(found, found[1:]):
            with _prec(max(i1.prec, i2.prec)):
                if not i1.hi < i2.lo:
                    raise CountMismatch(f"children of {node.word} overlap")
        out = []
        counter = {"I": 0, "II": 0, "III": 0}
        for iv, h, t in found:
            with _prec(iv.prec):
                if not (iv.lo is node.lo or node.lo <= iv.lo) or not (iv.hi is node.hi or iv.hi <= node.hi):
                    raise CountMismatch(f"a child of {node.word} leaves the parent band")
            counter[t] += 1
            letter = Letter(a, t, counter[t])
            word = Word._trusted(node.word.letters + (letter,), freq)
            child = BandNode(word, iv.lo, iv.hi, n + 1, t, h, iv.h_lo, iv.h_hi, iv.prec)
            if self.check_types:
                self._check_type(child)
            out.append(child)
            self._index[word.letters] = child
        self._children[key] = out
        return out

    def _check_type(self, child: BandNode):
        # containment test of the type definition, evaluated at the midpoint
        m = child.order
        host = TraceHandle(m, -1 if child.type == "II" else 0, self.lam, self.freq)
        with _prec(child.prec):
            mid = ((child.lo + child.hi) / 2).mid()
        b = child.prec
        while True:
            with _prec(b):
                v = abs(host.at(mid))
            if v <= 2:
                return
            if v > 2:
                raise CountMismatch(f"band {child.word} fails the type-{child.type} containment test")
            if b >= self.max_bits:
                raise PrecisionExhausted(f"type test for {child.word} undecided at {b} bits")
            b = min(2 * b, self.max_bits)

    def band(self, word: Word | Iterable[Letter]) -> BandNode:
        """``B_w`` for any admissible word, computing missing ancestors lazily."""
        letters = tuple(word.letters if isinstance(word, Word) else word)
        node = self._index.get(letters)
        if node is not None:
            return node
        if not letters:
            raise UnknownWord("empty word")
        node = self._index.get(letters[:1])
        if node is None:
            raise UnknownWord(f"no root band {letters[0]}")
        for k in range(1, len(letters)):
            self.children(node)
            nxt = self._index.get(letters[: k + 1])
            if nxt is None:
                raise UnknownWord(f"{format_letters(letters[: k + 1])} is not a band of this tree")
            node = nxt
        return node

    def chain(self, word: Word) -> list[BandNode]:
        """``[B_{w|0}, B_{w|1}, ..., B_w]``."""
        self.band(word)
        L = word.letters
        return [self._index[L[: k + 1]] for k in range(len(L))]

    def extend_to(self, depth: int):
        level = self.roots
        for n in range(depth):
            nxt = []
            for node in level:
                nxt.extend(self.children(node))
            level = nxt
        self.depth = max(self.depth, depth)

    def level(self, n: int) -> list[BandNode]:
        """All bands of order ``n`` sorted left to right (builds as needed)."""
        if n > self.depth:
            self.extend_to(n)
        nodes = list(self.roots)
        for _ in range(n):
            nodes = [c for b in nodes for c in self.children(b)]
        return sorted(nodes, key=lambda b: b.lo.mid())

    def is_built(self, letters: tuple) -> bool:
        return letters in self._index

    # -- checks and export --------------------------------------------------

    def verify(self, depth: int | None = None, tol_exp: int | None = None) -> dict:
        """Structural checks for built levels; returns a report dict."""
        depth = self.depth if depth is None else depth
        tol_exp = self.bits // 2 if tol_exp is None else tol_exp
        q = denominators(self.freq, depth)
        report = {"levels": [], "ok": True}
        for n in range(depth + 1):
            lvl = self.level(n)
            typed = sum(1 for b in lvl if b.type in ("II", "III"))
            cw = count_words(self.freq, n)
            disjoint = all(_lt(b1.hi, b2.lo, max(b1.prec, b2.prec)) for b1, b2 in zip(lvl, lvl[1:]))
            width_ok = all(b.log_length <= (2 - n) * math.log(2) + 1e-12 for b in lvl)
            edges_ok = all(_edge_ok(b, tol_exp) for b in lvl)
            entry = {
                "n": n, "bands": len(lvl), "count_words": cw, "typed_II_III": typed,
                "q_n": q[n], "disjoint": disjoint, "width_bound": width_ok, "edges": edges_ok,
            }
            if n < depth:
                a = self.freq.quotient(n + 1)
                want = {"I": (0, 1, 0), "II": (a + 1, 0, a), "III": (a, 0, a - 1)}
                kids_ok = True
                nested = True
                for b in lvl:
                    kids = self.children(b)
                    got = tuple(sum(1 for c in kids if c.type == t) for t in ("I", "II", "III"))
                    kids_ok &= got == want[b.type]
                    nested &= all(b.contains(c) for c in kids)
                entry["children"] = kids_ok
                entry["nested"] = nested
            entry["ok"] = (len(lvl) == cw and typed == q[n] and disjoint and width_ok and edges_ok
                           and entry.get("children", True) and entry.get("nested", True))
            report["ok"] &= entry["ok"]
            report["levels"].append(entry)
        return report

    def to_dict(self, depth: int | None = None) -> dict:
        depth = self.depth if depth is None else depth
        return {
            "frequency": self.freq.to_dict(),
            "lambda": str(self.lam),
            "bits": self.bits,
            "depth": depth,
            "levels": [[b.to_dict() for b in self.level(n)] for n in range(depth + 1)],
        }

    def to_json(self, depth: int | None = None, **kw) -> str:
        return json.dumps(self.to_dict(depth), **kw)

    def to_csv(self, depth: int | None = None) -> str:
        depth = self.depth if depth is None else depth
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "lo", "hi", "type", "word"])
        for n in range(depth + 1):
            for b in self.level(n):
                d = b.to_dict()
                w.writerow([n, d["lo"], d["hi"], b.type, d["word"]])
        return buf.getvalue()


def format_letters(letters) -> str:
    from .symbolic import format_word
    return format_word(letters)


def _lt(a: arb, b: arb, prec: int) -> bool:
    with _prec(prec):
        return bool(a < b)


def _edge_ok(b: BandNode, tol_exp: int) -> bool:
    if b.order == 0:
        return True
    with _prec(b.prec):
        tol = arb(2) ** (-tol_exp)
        lo_v, hi_v = b.h_lo, b.h_hi
        ok = abs(abs(lo_v) - 2) < tol and abs(abs(hi_v) - 2) < tol
        return bool(ok and _sign(lo_v) == -_sign(hi_v))


def build_band_tree(freq: Frequency, lam, depth: int, bits: int = DEFAULT_BITS,
                    max_bits: int = MAX_BITS, verify: bool = True) -> BandTree:
    """Build every band of order ``<= depth``.

    With ``verify`` the level counts are checked against the word count and
    ``q_n`` and a mismatch raises ``CountMismatch``.
    """
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    tree = BandTree(freq, lam, bits, max_bits)
    tree.extend_to(depth)
    if verify:
        q = denominators(freq, depth)
        for n in range(depth + 1):
            lvl = tree.level(n)
            cw = count_words(freq, n)
            typed = sum(1 for b in lvl if b.type != "I")
            if len(lvl) != cw or typed != q[n]:
                raise CountMismatch(f"level {n}: {len(lvl)} bands ({typed} of type II/III), "
                                    f"expected {cw} ({q[n]})")
    return tree


def band_for_word(tree: BandTree, w: Word) -> BandNode:
    """``B_w``; the word must lie within the built depth."""
    if w.freq != tree.freq:
        raise ValidationError("word and tree use different frequencies")
    if w.depth > tree.depth:
        raise UnknownWord(f"word depth {w.depth} exceeds tree depth {tree.depth}")
    return tree.band(w)


class GapStats(NamedTuple):
    per_level: list  # min |G|/|B_G| for each order n
    counts: list  # number of gaps of each order
    C: float  # running minimum


def gap_statistics(tree: BandTree, depth: int | None = None) -> GapStats:
    """Relative gap sizes: gaps of order ``n`` are the components of
    ``B minus (children of B)`` for level-``n`` bands ``B``."""
    depth = tree.depth if depth is None else depth
    if depth < 1:
        raise ValidationError("gap statistics need depth >= 1")
    per, counts = [], []
    for n in range(depth):
        best = math.inf
        cnt = 0
        for b in tree.level(n):
            kids = tree.children(b)
            with _prec(max([b.prec] + [c.prec for c in kids])):
                pts = [b.lo.mid()]
                for c in kids:
                    pts.extend([c.lo.mid(), c.hi.mid()])
                pts.append(b.hi.mid())
                blen = b.hi.mid() - b.lo.mid()
                for g0, g1 in zip(pts[::2], pts[1::2]):
                    g = g1 - g0
                    if g > 0:
                        cnt += 1
                        best = min(best, float(g / blen))
        per.append(best)
        counts.append(cnt)
    return GapStats(per, counts, min(per))


class CovariationStats(NamedTuple):
    eta: float
    log_eta: float
    groups: int  # suffix groups with at least two members
    pairs: int  # (word, split) samples examined


def covariation_statistics(tree: BandTree, sample: int | None = None, seed: int = 0,
                           depth: int | None = None) -> CovariationStats:
    """Empirical covariation constant ``eta``.

    For words ``w u`` and ``w~ u`` sharing the suffix ``u``, compares
    ``|B_wu|/|B_w|`` with ``|B_w~u|/|B_w~|``.  Grouping splits by suffix
    makes the maximum over all pairs a max/min per group.  With ``sample`` only that many random splits are
    used.
    """
    import random

    depth = tree.depth if depth is None else depth
    if depth < 1:
        raise ValidationError("covariation statistics need depth >= 1")
    splits = []
    for N in range(1, depth + 1):
        for b in tree.level(N):
            for n in range(0, N):
                splits.append((b, n))
    if sample is not None and sample < len(splits):
        rng = random.Random(seed)
        splits = rng.sample(splits, sample)
    groups: dict = {}
    for b, n in splits:
        L = b.word.letters
        parent = tree.band(L[: n + 1])
        r = b.log_length - parent.log_length
        key = L[n + 1:]
        lo, hi, c = groups.get(key, (r, r, 0))
        groups[key] = (min(lo, r), max(hi, r), c + 1)
    log_eta = max((hi - lo for lo, hi, _ in groups.values()), default=0.0)
    multi = sum(1 for *_, c in groups.values() if c > 1)
    return CovariationStats(math.exp(log_eta), log_eta, multi, len(splits))
