"""Coding combinatorics of the band hierarchy.

Alphabets ``A_a`` (a >= 1) hold ``2a + 2`` letters ordered
``(I,1) < ... < (I,a+1) < II < (III,1) < ... < (III,a)``; the root alphabet
``A_0 = {I, III}`` starts every word.  Admissible words of depth ``n`` are
``w_0 w_1 ... w_n`` with ``w_i`` in ``A_{a_i}`` and each consecutive pair
admissible.  Counting goes through the 3x3 type matrices, so everything is
exact big-integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .cf import Frequency
from .errors import CapExceeded, ValidationError

__all__ = [
    "TYPES",
    "P0",
    "Letter",
    "Word",
    "alphabet",
    "root_alphabet",
    "admissible",
    "successors",
    "incidence_matrix",
    "aux_matrix",
    "PrimitivityWitness",
    "strong_primitivity_check",
    "connecting_word",
    "typed_counts",
    "count_words",
    "enumerate_words",
    "typed_descendant_count",
    "descendant_count",
    "aux_product_bounds_check",
    "format_word",
    "parse_word",
]

TYPES = ("I", "II", "III")
_TYPE_RANK = {"I": 0, "II": 1, "III": 2}

#: Strong-primitivity length of the Sturm alphabet family: every product of
#: at least this many consecutive incidence matrices is positive.
P0 = 6


class Letter(NamedTuple):
    """Letter of ``A_level``; root letters have level 0 and index 0, ``II`` has index 1."""

    level: int
    type: str
    index: int = 1

    @property
    def sort_key(self):
        return (_TYPE_RANK[self.type], self.index)

    def __str__(self):
        if self.level == 0:
            return self.type
        if self.type == "II":
            return f"II@{self.level}"
        return f"({self.type},{self.index})@{self.level}"


def alphabet(a: int) -> list[Letter]:
    """Ordered alphabet ``A_a``."""
    if a < 1:
        raise ValidationError("alphabet level must be >= 1 (use root_alphabet for A_0)")
    return (
        [Letter(a, "I", j) for j in range(1, a + 2)]
        + [Letter(a, "II", 1)]
        + [Letter(a, "III", j) for j in range(1, a + 1)]
    )


def root_alphabet() -> list[Letter]:
    return [Letter(0, "I", 0), Letter(0, "III", 0)]


def _valid(e: Letter) -> bool:
    a = e.level
    if a == 0:
        return e.type in ("I", "III") and e.index == 0
    if e.type == "I":
        return 1 <= e.index <= a + 1
    if e.type == "II":
        return e.index == 1
    return e.type == "III" and 1 <= e.index <= a


def admissible(e: Letter, f: Letter) -> bool:
    """Whether ``e -> f`` is an admissible transition."""
    if f.level < 1 or not (_valid(e) and _valid(f)):
        return False
    m = f.level
    if e.type == "I":
        return f.type == "II"
    if e.type == "II":
        return f.type == "I" or f.type == "III"
    # type III, root or not
    if f.type == "I":
        return f.index <= m
    return f.type == "III" and f.index <= m - 1


def successors(e: Letter, m: int) -> list[Letter]:
    """Admissible letters of ``A_m`` following ``e``, in alphabet order."""
    if e.type == "I":
        return [Letter(m, "II", 1)]
    if e.type == "II":
        return [Letter(m, "I", j) for j in range(1, m + 2)] + [Letter(m, "III", j) for j in range(1, m + 1)]
    return [Letter(m, "I", j) for j in range(1, m + 1)] + [Letter(m, "III", j) for j in range(1, m)]


def incidence_matrix(n: int, m: int) -> np.ndarray:
    """0/1 matrix of ``A_n -> A_m`` transitions (2 rows when ``n == 0``)."""
    rows = root_alphabet() if n == 0 else alphabet(n)
    cols = alphabet(m)
    return np.array([[int(admissible(e, f)) for f in cols] for e in rows], dtype=np.int64)


def aux_matrix(a: int) -> list[list[int]]:
    """Type-transition counts for level ``a``, rows/cols ordered (I, II, III)."""
    return [[0, 1, 0], [a + 1, 0, a], [a, 0, a - 1]]


def _vecmat(v, a):
    A = aux_matrix(a)
    return [v[0] * A[0][j] + v[1] * A[1][j] + v[2] * A[2][j] for j in range(3)]


def _matmul3(X, Y):
    return [[sum(X[i][k] * Y[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


class PrimitivityWitness(NamedTuple):
    levels: tuple
    zeros: list  # (row letter, column letter) pairs with a zero entry


def strong_primitivity_check(M: int, k: int = P0):
    """Check that every product ``A_{a_1 a_2} ... A_{a_{k-1} a_k}`` over
    ``{1..M}^k`` is entrywise positive.

    Returns ``(True, None)`` or ``(False, PrimitivityWitness)`` for the first
    failing level tuple.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    mats = {(i, j): incidence_matrix(i, j) for i in range(1, M + 1) for j in range(1, M + 1)}
    for tup in itertools.product(range(1, M + 1), repeat=k):
        P = mats[tup[0], tup[1]]
        for i in range(1, k - 1):
            # clip keeps entries small; only positivity matters
            P = np.minimum(P @ mats[tup[i], tup[i + 1]], 1)
        if not (P > 0).all():
            rows, cols = alphabet(tup[0]), alphabet(tup[-1])
            zeros = [(rows[i], cols[j]) for i, j in zip(*np.nonzero(P == 0))]
            return False, PrimitivityWitness(tup, zeros)
    return True, None


_TABLE6 = {
    # (type of e, type of target) -> four middle letters as (type, index)
    ("I", "I"): [("II", 1), ("III", 1), ("I", 1), ("II", 1)],
    ("I", "II"): [("II", 1), ("I", 1), ("II", 1), ("I", 1)],
    ("II", "I"): [("I", 1), ("II", 1), ("I", 1), ("II", 1)],
    ("II", "II"): [("III", 1), ("I", 1), ("II", 1), ("I", 1)],
    ("III", "I"): [("I", 1), ("II", 1), ("I", 1), ("II", 1)],
    ("III", "II"): [("I", 1), ("II", 1), ("III", 1), ("I", 1)],
}


def connecting_word(levels: Sequence[int], e: Letter, e_hat: Letter) -> list[Letter]:
    """Admissible letters ``e = x_1, ..., x_k = e_hat`` with ``x_i`` in ``A_{levels[i]}``.

    Length 6 follows a fixed case table; longer spans first walk greedily
    through ``(I,1)`` / ``II`` letters and then close with the table.
    """
    k = len(levels)
    if k < P0:
        raise ValidationError(f"connecting words need at least {P0} levels")
    if e.level != levels[0] or e_hat.level != levels[-1] or not (_valid(e) and _valid(e_hat)):
        raise ValidationError("endpoint letters do not match the given levels")
    out = [e]
    for lvl in levels[1:k - 5]:
        prev = out[-1]
        nxt = Letter(lvl, "II", 1) if prev.type == "I" else Letter(lvl, "I", 1)
        out.append(nxt)
    start = out[-1]
    tgt = "II" if e_hat.type == "II" else "I"
    middle = _TABLE6[(start.type, tgt)]
    lv = levels[k - 5:k - 1]
    out.extend(Letter(l, t, j) for l, (t, j) in zip(lv, middle))
    out.append(e_hat)
    return out


@dataclass(frozen=True)
class Word:
    """Admissible word ``w_0 ... w_n`` bound to a frequency (``n`` is the depth)."""

    letters: tuple[Letter, ...]
    freq: Frequency = field(compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(Letter(*x) for x in self.letters))
        L = self.letters
        if not L or L[0].level != 0:
            raise ValidationError("a word starts with a root letter")
        for i in range(1, len(L)):
            if L[i].level != self.freq.quotient(i):
                raise ValidationError(f"letter {i} has level {L[i].level}, expected a_{i}={self.freq.quotient(i)}")
            if not admissible(L[i - 1], L[i]):
                raise ValidationError(f"{L[i - 1]} -> {L[i]} is not admissible")

    @property
    def depth(self) -> int:
        return len(self.letters) - 1

    @property
    def type(self) -> str:
        return self.letters[-1].type

    def __len__(self):
        return len(self.letters)

    def prefix(self, n: int) -> "Word":
        """The depth-``n`` prefix ``w|_n``."""
        return Word._trusted(self.letters[: n + 1], self.freq)

    def extend(self, letter: Letter) -> "Word":
        return Word(self.letters + (letter,), self.freq)

    def is_prefix_of(self, other: "Word") -> bool:
        return other.letters[: len(self.letters)] == self.letters

    def common_prefix(self, other: "Word") -> "Word | None":
        """Longest common prefix ``x ^ y`` (None when the root letters differ)."""
        assert self.freq is other.freq, "words bound to different frequencies"
        k = 0
        for a, b in zip(self.letters, other.letters):
            if a != b:
                break
            k += 1
        return Word._trusted(self.letters[:k], self.freq) if k else None

    def __str__(self):
        return format_word(self.letters)

    @classmethod
    def _trusted(cls, letters, freq):
        w = object.__new__(cls)
        object.__setattr__(w, "letters", tuple(letters))
        object.__setattr__(w, "freq", freq)
        return w


def format_word(letters: Iterable[Letter]) -> str:
    return "|".join(str(Letter(*x)) for x in letters)


def parse_word(text: str, freq: Frequency) -> Word:
    """Inverse of ``str(word)``, e.g. ``"I|II@1|(I,1)@1"``."""
    letters = []
    for tok in text.split("|"):
        tok = tok.strip()
        if tok in ("I", "III"):
            letters.append(Letter(0, tok, 0))
            continue
        body, _, lvl = tok.partition("@")
        if not lvl:
            raise ValidationError(f"bad letter {tok!r}")
        if body == "II":
            letters.append(Letter(int(lvl), "II", 1))
        else:
            t, _, j = body.strip("()").partition(",")
            letters.append(Letter(int(lvl), t, int(j)))
    return Word(tuple(letters), freq)


def typed_counts(freq: Frequency, n: int) -> tuple[int, int, int]:
    """Number of depth-``n`` words ending in a letter of type I, II, III."""
    v = [1, 0, 1]
    for k in range(1, n + 1):
        v = _vecmat(v, freq.quotient(k))
    return tuple(v)


def count_words(freq: Frequency, n: int) -> int:
    """``#Omega_n = (1,0,1) . A^_{a_1} ... A^_{a_n} . (1,1,1)^t``."""
    return sum(typed_counts(freq, n))


def _children(letters: tuple, freq: Frequency):
    m = freq.quotient(len(letters))
    return successors(letters[-1], m)


def enumerate_words(freq: Frequency, n: int, cap: int = 10**6, as_tuples: bool = False) -> list:
    """All depth-``n`` words in lexicographic order."""
    total = count_words(freq, n)
    if total > cap:
        raise CapExceeded(f"{total} words at depth {n} exceed the cap {cap}")
    levels = [freq.quotient(k) for k in range(1, n + 1)]
    layer = [(x,) for x in root_alphabet()]
    for m in levels:
        layer = [w + (c,) for w in layer for c in successors(w[-1], m)]
    if as_tuples:
        return layer
    return [Word._trusted(w, freq) for w in layer]


def _type_vector(t: str) -> list[int]:
    v = [0, 0, 0]
    v[_TYPE_RANK[t]] = 1
    return v


def typed_descendant_count(w: Word, m: int, types: Iterable[str] = ("II", "III")) -> int:
    """Descendants of ``w`` after ``m`` more letters whose last letter has a type in ``types``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    v = _type_vector(w.type)
    n = w.depth
    for k in range(n + 1, n + m + 1):
        v = _vecmat(v, w.freq.quotient(k))
    return sum(v[_TYPE_RANK[t]] for t in set(types))


def descendant_count(w: Word, m: int) -> int:
    """``#Xi_{w,m}``."""
    return typed_descendant_count(w, m, TYPES)


def aux_product_bounds_check(M: int):
    """Check ``J <= A^_{a_1}...A^_{a_5} <= 81 (M+1)^5 J`` over ``{1..M}^5``.

    Returns ``(ok, failing_tuple)``.
    """
    upper = 81 * (M + 1) ** 5
    for tup in itertools.product(range(1, M + 1), repeat=5):
        P = aux_matrix(tup[0])
        for a in tup[1:]:
            P = _matmul3(P, aux_matrix(a))
        if any(x < 1 or x > upper for row in P for x in row):
            return False, tup
    return True, None
