"""Continued fractions, convergents, Gauss shifts and Sturm sequences.

A :class:`Frequency` is a bounded-type irrational described by its stream of
partial quotients: a finite prefix followed by a closed-form tail rule.
Quotients are 1-based (``a_1`` is the first); convergent seeds live at
orders -1 and 0 so that ``p_{n+1} = a_{n+1} p_n + p_{n-1}`` holds literally.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from flint import arb, ctx, fmpq

from .errors import BoundaryDegenerate, ValidationError, WrongTailKind

__all__ = [
    "ConstantTail",
    "PeriodicTail",
    "ScheduleTail",
    "FiniteTail",
    "Frequency",
    "ConvergentPair",
    "convergents",
    "denominators",
    "gauss_shift",
    "sturm_sequence",
    "checkpoint_indices",
    "parse_frequency",
]


@dataclass(frozen=True)
class ConstantTail:
    value: int

    def to_dict(self):
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class PeriodicTail:
    block: tuple[int, ...]

    def to_dict(self):
        return {"kind": "periodic", "block": list(self.block)}


@dataclass(frozen=True)
class ScheduleTail:
    """Blocks ``1^{t_1} 2^{tau_1} 1^{t_2} 2^{tau_2} ...``.

    ``extend`` says what happens after the listed pairs run out: ``"cycle"``
    repeats them, ``"arith"`` continues the arithmetic progression of the
    last two pairs, ``"finite"`` ends the stream (a rational truncation).
    """

    pairs: tuple[tuple[int, int], ...]
    extend: str = "cycle"

    def pair(self, i: int) -> tuple[int, int] | None:
        """The 0-based ``i``-th block pair, or None past the end of a finite schedule."""
        L = len(self.pairs)
        if i < L:
            return self.pairs[i]
        if self.extend == "cycle":
            return self.pairs[i % L]
        if self.extend == "arith":
            t1, s1 = self.pairs[-1]
            t0, s0 = self.pairs[-2] if L >= 2 else self.pairs[-1]
            k = i - L + 1
            return (t1 + k * (t1 - t0), s1 + k * (s1 - s0))
        return None

    def to_dict(self):
        return {"kind": "schedule", "pairs": [list(p) for p in self.pairs], "extend": self.extend}


@dataclass(frozen=True)
class FiniteTail:
    def to_dict(self):
        return {"kind": "finite"}


def _tail_from_dict(d):
    kind = d.get("kind")
    if kind == "constant":
        return ConstantTail(int(d["value"]))
    if kind == "periodic":
        return PeriodicTail(tuple(int(a) for a in d["block"]))
    if kind == "schedule":
        return ScheduleTail(tuple((int(t), int(s)) for t, s in d["pairs"]), d.get("extend", "cycle"))
    if kind == "finite":
        return FiniteTail()
    raise ValidationError(f"unknown tail kind {kind!r}")


@dataclass(frozen=True)
class Frequency:
    """Partial-quotient stream ``a_1, a_2, ...`` of a frequency of bounded type."""

    prefix: tuple[int, ...] = ()
    tail: ConstantTail | PeriodicTail | ScheduleTail | FiniteTail = ConstantTail(1)
    bound: int | None = None
    _cache: list = field(default_factory=list, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        tail = self.tail
        symbols = set(self.prefix)
        if isinstance(tail, ConstantTail):
            symbols.add(tail.value)
        elif isinstance(tail, PeriodicTail):
            if not tail.block:
                raise ValidationError("periodic tail needs a nonempty block")
            symbols.update(tail.block)
        elif isinstance(tail, ScheduleTail):
            if not tail.pairs and tail.extend != "finite":
                raise ValidationError("an infinite schedule needs at least one pair")
            if tail.extend not in ("cycle", "arith", "finite"):
                raise ValidationError(f"unknown schedule extension {tail.extend!r}")
            if any(t < 0 or s < 0 for t, s in tail.pairs):
                raise ValidationError("schedule block lengths must be nonnegative")
            if tail.extend == "cycle" and tail.pairs and sum(t + s for t, s in tail.pairs) == 0:
                raise ValidationError("cyclic schedule has zero total length")
            if tail.extend == "arith" and len(tail.pairs) >= 2:
                (t0, s0), (t1, s1) = tail.pairs[-2:]
                if t1 < t0 or s1 < s0 or (t1 == t0 == 0 and s1 == s0 == 0):
                    raise ValidationError("arithmetic schedule must be non-decreasing and nonzero")
            if any(t for t, _ in tail.pairs):
                symbols.add(1)
            if any(s for _, s in tail.pairs):
                symbols.add(2)
        elif not isinstance(tail, FiniteTail):
            raise ValidationError(f"unsupported tail {tail!r}")
        if any(a < 1 for a in symbols):
            raise ValidationError("partial quotients must be positive integers")
        top = max(symbols) if symbols else 1
        if self.bound is None:
            object.__setattr__(self, "bound", top)
        elif top > self.bound:
            raise ValidationError(f"quotient {top} exceeds bound {self.bound}")

    # -- quotient access ---------------------------------------------------

    @property
    def length(self) -> int | None:
        """Number of available quotients (None for an infinite stream)."""
        tail = self.tail
        if isinstance(tail, FiniteTail):
            return len(self.prefix)
        if isinstance(tail, ScheduleTail) and tail.extend == "finite":
            return len(self.prefix) + sum(t + s for t, s in tail.pairs)
        return None

    def available(self, n: int) -> bool:
        L = self.length
        return L is None or n <= L

    def _schedule_value(self, k: int) -> int:
        # k is the 0-based index into the tail stream; _cache = [values, next block]
        cache = self._cache
        if not cache:
            with self._lock:
                if not cache:
                    cache.extend([[], 0])
        values = cache[0]
        if k < len(values):
            return values[k]
        with self._lock:
            while len(values) <= k:
                pair = self.tail.pair(cache[1])
                if pair is None:
                    break
                t, s = pair
                values.extend([1] * t + [2] * s)
                cache[1] += 1
        if k >= len(values):
            raise IndexError(f"frequency has only {len(self.prefix) + len(values)} quotients")
        return values[k]

    def quotient(self, n: int) -> int:
        """Partial quotient ``a_n`` (n >= 1)."""
        if n < 1:
            raise ValueError("quotients are indexed from 1")
        P = len(self.prefix)
        if n <= P:
            return self.prefix[n - 1]
        k = n - P - 1
        tail = self.tail
        if isinstance(tail, ConstantTail):
            return tail.value
        if isinstance(tail, PeriodicTail):
            return tail.block[k % len(tail.block)]
        if isinstance(tail, ScheduleTail):
            return self._schedule_value(k)
        raise IndexError(f"frequency has only {P} quotients")

    def quotients(self, n: int) -> list[int]:
        """``[a_1, ..., a_n]``."""
        return [self.quotient(i) for i in range(1, n + 1)]

    def __iter__(self) -> Iterator[int]:
        n = 1
        while self.available(n):
            yield self.quotient(n)
            n += 1

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"prefix": list(self.prefix), "tail": self.tail.to_dict(), "bound": self.bound}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Frequency":
        return cls(tuple(d.get("prefix", ())), _tail_from_dict(d["tail"]), d.get("bound"))

    @classmethod
    def from_json(cls, s: str) -> "Frequency":
        return cls.from_dict(json.loads(s))

    # -- common constructors -----------------------------------------------

    @classmethod
    def constant(cls, k: int) -> "Frequency":
        return cls((), ConstantTail(k))

    @classmethod
    def fibonacci(cls) -> "Frequency":
        return cls.constant(1)

    @classmethod
    def periodic(cls, block, prefix=()) -> "Frequency":
        return cls(tuple(prefix), PeriodicTail(tuple(block)))

    @classmethod
    def schedule(cls, pairs, extend: str = "cycle", prefix=()) -> "Frequency":
        return cls(tuple(prefix), ScheduleTail(tuple((int(t), int(s)) for t, s in pairs), extend))

    @classmethod
    def finite(cls, quotients) -> "Frequency":
        return cls(tuple(quotients), FiniteTail())


class ConvergentPair(NamedTuple):
    n: int
    p: int
    q: int


def convergents(freq: Frequency, n: int) -> list[ConvergentPair]:
    """Convergents ``p_k/q_k`` for orders ``-1..n`` as exact integers."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = [ConvergentPair(-1, 1, 0), ConvergentPair(0, 0, 1)]
    p0, p1, q0, q1 = 1, 0, 0, 1
    for k in range(1, n + 1):
        a = freq.quotient(k)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append(ConvergentPair(k, p1, q1))
    return out


def denominators(freq: Frequency, n: int) -> list[int]:
    """``[q_0, q_1, ..., q_n]``."""
    qs = [1]
    q0, q1 = 0, 1
    for k in range(1, n + 1):
        q0, q1 = q1, freq.quotient(k) * q1 + q0
        qs.append(q1)
    return qs


def gauss_shift(freq: Frequency, n: int) -> Frequency:
    """The frequency ``G^n(alpha)`` whose stream is ``a_{n+1}, a_{n+2}, ...``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return freq
    P = len(freq.prefix)
    tail = freq.tail
    if n <= P:
        return Frequency(freq.prefix[n:], tail, freq.bound)
    k = n - P
    if isinstance(tail, ConstantTail):
        return Frequency((), tail, freq.bound)
    if isinstance(tail, PeriodicTail):
        r = k % len(tail.block)
        return Frequency((), PeriodicTail(tail.block[r:] + tail.block[:r]), freq.bound)
    if isinstance(tail, FiniteTail):
        raise IndexError("shift beyond the end of a finite frequency")
    # schedule: skip whole blocks, keep the partial block as a prefix
    i, consumed = 0, 0
    while True:
        pair = tail.pair(i)
        if pair is None:
            if consumed == k:
                return Frequency((), FiniteTail(), freq.bound)
            raise IndexError("shift beyond the end of a finite schedule")
        t, s = pair
        if consumed + t + s > k:
            break
        consumed += t + s
        i += 1
    block = [1] * t + [2] * s
    new_prefix = tuple(block[k - consumed:])
    L = len(tail.pairs)
    if tail.extend == "cycle":
        r = (i + 1) % L
        rest = tail.pairs[r:] + tail.pairs[:r]
    elif tail.extend == "arith":
        rest = tuple(tail.pair(j) for j in range(i + 1, max(i + 3, L)))
    else:
        rest = tail.pairs[i + 1:]
        if not rest:
            return Frequency(new_prefix, FiniteTail(), freq.bound)
    return Frequency(new_prefix, ScheduleTail(tuple(rest), tail.extend), freq.bound)


def _sturm_exact(p: int, q: int, K: int) -> list[int]:
    # frac(k p/q) >= 1 - p/q  <=>  (k p mod q) >= q - p ; equality is the closed endpoint
    out = []
    thresh = q - p
    for k in range(1, K + 1):
        r = (k * p) % q
        if r == thresh or r == 0:
            # orbit point on an endpoint of [1-beta, 1): truncation too shallow
            raise BoundaryDegenerate(f"k={k} hits an endpoint for beta={p}/{q}")
        out.append(1 if r > thresh else 0)
    return out


def _alpha_ball(freq: Frequency, K: int, prec: int):
    """Rigorous enclosure of alpha from two consecutive convergents."""
    target = K * K << prec
    p0, p1, q0, q1 = 1, 0, 0, 1
    k = 0
    while q1 * q0 < target or k < 2:
        if not freq.available(k + 1):
            return arb(fmpq(p1, q1))
        a = freq.quotient(k + 1)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        k += 1
    lo, hi = arb(fmpq(p0, q0)), arb(fmpq(p1, q1))
    mid = (lo + hi) / 2
    return mid + arb(0, abs(hi - lo).abs_upper())


def _sturm_ball(alpha, K: int) -> list[int]:
    out = []
    one_minus = 1 - alpha
    for k in range(1, K + 1):
        x = k * alpha
        fl = x.floor()
        if not fl.is_exact():
            raise BoundaryDegenerate(f"k={k}: k*alpha straddles an integer at working precision")
        d = (x - fl) - one_minus
        if d > 0:
            out.append(1)
        elif d < 0:
            out.append(0)
        else:
            raise BoundaryDegenerate(f"k={k}: orbit point not separated from 1-alpha")
    return out


def sturm_sequence(freq: Frequency, count: int, verify: bool = True, bits: int = 256) -> list[int]:
    """Sturm bits ``S_1..S_K`` with ``S_k = 1`` iff ``k alpha mod 1`` lies in ``[1-alpha, 1)``.

    Evaluated exactly at a rational convergent ``p_N/q_N`` two orders beyond
    the first ``q_n >= K``; with ``verify`` the result is cross-checked bit
    for bit against ball arithmetic on an enclosure of alpha itself.
    """
    K = count
    if K <= 0:
        return []
    qs = [1]
    n = 0
    while qs[-1] < K:
        n += 1
        if not freq.available(n):
            break
        qs = denominators(freq, n)
    N = n + 2
    while True:
        if not freq.available(N):
            N = freq.length
            if N is None or N < 1:
                raise BoundaryDegenerate("not enough quotients to evaluate the Sturm sequence")
        cv = convergents(freq, N)[-1]
        try:
            exact = _sturm_exact(cv.p, cv.q, K)
            break
        except BoundaryDegenerate:
            if not freq.available(N + 1):
                raise
            N += 1
    if verify:
        old = ctx.prec
        try:
            ctx.prec = max(bits, 200)
            ball = _sturm_ball(_alpha_ball(freq, K, ctx.prec - 16), K)
        finally:
            ctx.prec = old
        if ball != exact:
            raise BoundaryDegenerate("exact and ball evaluations of the Sturm sequence disagree")
    return exact


def checkpoint_indices(freq: Frequency, count: int | None = None) -> list[tuple[int, int, int]]:
    """Prefix sums ``(T^_{n-1}, T_n, T^_n)`` of a block schedule.

    ``count`` defaults to the number of listed pairs.  A nonempty prefix
    shifts every index by its length.
    """
    tail = freq.tail
    if not isinstance(tail, ScheduleTail):
        raise WrongTailKind("checkpoints need a block-schedule frequency")
    if count is None:
        count = len(tail.pairs)
    out = []
    hat = len(freq.prefix)
    for i in range(count):
        pair = tail.pair(i)
        if pair is None:
            break
        t, s = pair
        T = hat + t
        out.append((hat, T, T + s))
        hat = T + s
    return out


def parse_frequency(spec: str) -> Frequency:
    """Parse a shorthand (``fib``, ``silver``, ``const:k``, ``periodic:1,2``,
    ``schedule:t1,tau1,...``, ``finite:1,2,3``) or inline JSON."""
    s = spec.strip()
    if s.startswith("{"):
        return Frequency.from_json(s)
    if s == "fib":
        return Frequency.fibonacci()
    if s == "silver":
        return Frequency.constant(2)
    kind, _, rest = s.partition(":")
    nums = [int(v) for v in rest.split(",") if v.strip()] if rest else []
    if kind == "const" and len(nums) == 1:
        return Frequency.constant(nums[0])
    if kind == "periodic" and nums:
        return Frequency.periodic(nums)
    if kind == "finite" and nums:
        return Frequency.finite(nums)
    if kind == "schedule" and nums and len(nums) % 2 == 0:
        return Frequency.schedule(list(zip(nums[::2], nums[1::2])))
    raise ValidationError(f"cannot parse frequency {spec!r}")
