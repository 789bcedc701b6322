"""Density of states: exact band masses, periodic spectra and local dimensions.

The DOS mass of ``B_w`` at horizon ``l`` is the share of level-``l`` bands of
type II/III inside ``B_w``; those bands each hold exactly one eigenvalue of
the ``q_l``-periodic approximant, which gives an independent spectral
computation of the same rational numbers.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from flint import arb

from .bands import BandTree, _prec
from .cf import Frequency, checkpoint_indices, denominators, sturm_sequence
from .errors import (
    DepthExceeded,
    SizeExceeded,
    UncertifiedEigenvalue,
    ValidationError,
    WrongTailKind,
)
from .symbolic import Word, descendant_count, enumerate_words, format_word, typed_descendant_count, _TYPE_RANK, _vecmat

__all__ = [
    "periodic_spectrum",
    "SpectrumBounds",
    "dos_band_mass",
    "dos_spectral_mass",
    "DosApprox",
    "DosMeasure",
    "dos_approx",
    "dos_spectral",
    "assign_eigenvalues",
    "DimensionSeries",
    "local_dimension_series",
    "sample_chains",
    "build_alternating_frequency",
    "FeasibilityRow",
    "oscillation_diagnostic",
    "OscillationReport",
    "fibonacci_asymptotic_check",
    "fibonacci_constant",
    "dimension_estimate",
    "MAX_EIG_SIZE",
    "bilipschitz_distortion",
    "DistortionReport",
]

MAX_EIG_SIZE = 5000


class SpectrumBounds(NamedTuple):
    values: np.ndarray  # sorted eigenvalues
    radii: np.ndarray  # each true eigenvalue lies within radius of its estimate


def periodic_spectrum(freq: Frequency, lam, n: int, bounds: bool = False, max_size: int = MAX_EIG_SIZE):
    """Eigenvalues of the ``q_n``-periodic restriction with potential ``lam S_i``.

    With ``bounds`` a :class:`SpectrumBounds` is returned whose radii come
    from eigenvector residuals.
    """
    q = denominators(freq, n)[n]
    if q > max_size:
        raise SizeExceeded(f"q_{n} = {q} exceeds the eigensolve budget {max_size}")
    S = sturm_sequence(freq, q)
    lam = float(lam)
    H = np.zeros((q, q))
    np.fill_diagonal(H, lam * np.asarray(S, dtype=float))
    for i in range(q):
        # periodic stencil; for q <= 2 the wrapped couplings coincide and add up
        H[i, (i + 1) % q] += 1.0
        H[i, (i - 1) % q] += 1.0
    if not bounds:
        return np.linalg.eigvalsh(H)
    vals, vecs = np.linalg.eigh(H)
    res = np.linalg.norm(H @ vecs - vecs * vals, axis=0) / np.linalg.norm(vecs, axis=0)
    # rounding in forming the residual: three nonzeros per row, zeros add exactly
    slack = 16 * np.finfo(float).eps * (abs(lam) + 2 + np.abs(vals))
    return SpectrumBounds(vals, res + slack)


def dos_band_mass(freq: Frequency, w: Word, l: int) -> Fraction:
    """``nu_l(B_w) = v^{t_w} A^_{a_{n+1}} ... A^_{a_l} v_* / q_l``."""
    n = w.depth
    if l < n:
        raise ValidationError("horizon must be at least the word depth")
    q = denominators(freq, l)[l]
    return Fraction(typed_descendant_count(w, l - n, ("II", "III")), q)


@dataclass
class DosApprox:
    """Level-``l`` DOS masses of all bands of order ``<= depth``."""

    freq: Frequency
    level: int
    depth: int
    masses: dict = field(repr=False)  # letters -> Fraction
    method: str = "combinatorial"

    def mass(self, w) -> float:
        return float(self.exact(w))

    def exact(self, w) -> Fraction:
        key = w.letters if isinstance(w, Word) else tuple(w)
        return self.masses[key]

    def log_mass(self, w) -> float:
        f = self.exact(w)
        return math.log(f.numerator) - math.log(f.denominator) if f else -math.inf

    def level_sum(self, n: int) -> Fraction:
        return sum((v for k, v in self.masses.items() if len(k) == n + 1), Fraction(0))

    def rows(self):
        for k, v in sorted(self.masses.items(), key=lambda kv: (len(kv[0]), kv[0])):
            yield len(k) - 1, format_word(k), v

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["level", "word", "mass", "mass_exact"])
        for n, word, v in self.rows():
            wr.writerow([n, word, f"{float(v):.17g}", f"{v.numerator}/{v.denominator}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "depth": self.depth,
            "method": self.method,
            "masses": {word: f"{v.numerator}/{v.denominator}" for _, word, v in self.rows()},
            "level_sums": [str(self.level_sum(n)) for n in range(self.depth + 1)],
        }


def _typed_vectors(freq: Frequency, depth: int, l: int):
    # counts of II/III descendants at level l, per (depth n, type)
    out = {}
    for n in range(depth + 1):
        for t in ("I", "II", "III"):
            v = [0, 0, 0]
            v[_TYPE_RANK[t]] = 1
            for k in range(n + 1, l + 1):
                v = _vecmat(v, freq.quotient(k))
            out[n, t] = v[1] + v[2]
    return out


def dos_approx(freq: Frequency, depth: int, l: int, cap: int = 10**6) -> DosApprox:
    """Exact combinatorial masses for every word of depth ``<= depth``."""
    if l < depth:
        raise ValidationError("horizon must be >= depth")
    q = denominators(freq, l)[l]
    tv = _typed_vectors(freq, depth, l)
    masses = {}
    for n in range(depth + 1):
        for w in enumerate_words(freq, n, cap=cap, as_tuples=True):
            masses[w] = Fraction(tv[n, w[-1].type], q)
    return DosApprox(freq, l, depth, masses, "combinatorial")


class DosMeasure:
    """Lazy DOS masses ``nu_{n+extra}(B_w)`` for words of any depth."""

    def __init__(self, freq: Frequency, extra: int = 16):
        self.freq = freq
        self.extra = extra
        self._q = denominators(freq, 8)

    def _qn(self, n):
        if n >= len(self._q):
            self._q = denominators(self.freq, max(n, 2 * len(self._q)))
        return self._q[n]

    def log_mass(self, w) -> float:
        letters = w.letters if isinstance(w, Word) else tuple(w)
        n = len(letters) - 1
        word = Word._trusted(letters, self.freq)
        c = typed_descendant_count(word, self.extra, ("II", "III"))
        return math.log(c) - math.log(self._qn(n + self.extra))

    def mass(self, w) -> float:
        return math.exp(self.log_mass(w))


def assign_eigenvalues(tree: BandTree, l: int, max_size: int = MAX_EIG_SIZE) -> dict:
    """Map each level-``l`` type II/III band (letters) to the number of
    periodic eigenvalues it provably contains.

    An eigenvalue estimate with residual radius ``r`` is placed in a band when
    that band is the only level-``l`` II/III band meeting ``[e - r, e + r]``.
    Together with the certified count of ``q_l`` such bands (one per root of
    the degree-``q_l`` trace) this pins the exact eigenvalue inside it.
    """
    lvl = sorted((b for b in tree.level(l) if b.type != "I"), key=lambda b: float(b.lo.mid()))
    q = denominators(tree.freq, l)[l]
    if len(lvl) != q:
        raise UncertifiedEigenvalue(f"level {l} has {len(lvl)} type II/III bands, expected {q}")
    sb = periodic_spectrum(tree.freq, tree.lam, l, bounds=True, max_size=max_size)
    mids = [float(b.lo.mid()) for b in lvl]
    counts = {b.word.letters: 0 for b in lvl}
    for e, r in zip(sb.values, sb.radii):
        e, r = float(e), float(r)
        i = bisect.bisect_right(mids, e)
        cands = [j for j in (i - 2, i - 1, i, i + 1) if 0 <= j < len(lvl)]
        hits = []
        prec = max(lvl[j].prec for j in cands)
        with _prec(prec):
            lo_e, hi_e = arb(e) - arb(r), arb(e) + arb(r)
            for j in cands:
                b = lvl[j]
                if b.hi < lo_e or b.lo > hi_e:
                    continue
                hits.append(j)
            # bands beyond the candidates are further away by ordering
            left_ok = cands[0] == 0 or lvl[cands[0] - 1].hi < lo_e
            right_ok = cands[-1] == len(lvl) - 1 or lvl[cands[-1] + 1].lo > hi_e
        if len(hits) != 1 or not (left_ok and right_ok):
            raise UncertifiedEigenvalue(f"eigenvalue {e!r} +- {r:.3g} meets {len(hits)} bands")
        counts[lvl[hits[0]].word.letters] += 1
    bad = [k for k, c in counts.items() if c != 1]
    if bad:
        raise UncertifiedEigenvalue(f"{len(bad)} bands do not hold exactly one eigenvalue")
    return counts


def dos_spectral(tree: BandTree, l: int, depth: int, max_size: int = MAX_EIG_SIZE) -> DosApprox:
    """Eigenvalue-count masses for every band of order ``<= depth``."""
    if depth > l:
        raise ValidationError("depth must be <= horizon")
    counts = assign_eigenvalues(tree, l, max_size)
    q = denominators(tree.freq, l)[l]
    agg: dict = {}
    for letters, c in counts.items():
        for n in range(depth + 1):
            agg[letters[: n + 1]] = agg.get(letters[: n + 1], 0) + c
    masses = {}
    for n in range(depth + 1):
        for b in tree.level(n):
            masses[b.word.letters] = Fraction(agg.get(b.word.letters, 0), q)
    return DosApprox(tree.freq, l, depth, masses, "spectral")


def dos_spectral_mass(tree: BandTree, w: Word, l: int, max_size: int = MAX_EIG_SIZE) -> Fraction:
    """Share of certified level-``l`` periodic eigenvalues lying in ``B_w``."""
    counts = assign_eigenvalues(tree, l, max_size)
    q = denominators(tree.freq, l)[l]
    L = w.letters
    return Fraction(sum(c for k, c in counts.items() if k[: len(L)] == L), q)


# -- local dimensions -------------------------------------------------------


@dataclass
class DimensionSeries:
    word: tuple
    depths: list
    values: list  # d_n = log mass / log |B|
    tags: list  # "T", "That" or ""

    def at(self, n: int) -> float:
        return self.values[self.depths.index(n)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["depth", "d_n", "checkpoint"])
        for n, d, t in zip(self.depths, self.values, self.tags):
            wr.writerow([n, f"{d:.12g}", t])
        return buf.getvalue()


def _log_mass(mu, letters):
    if hasattr(mu, "log_mass"):
        return mu.log_mass(letters)
    m = mu.mass(letters)
    return math.log(m) if m > 0 else -math.inf


def _checkpoint_tags(freq: Frequency, depth: int) -> dict:
    try:
        cps = checkpoint_indices(freq)
    except WrongTailKind:
        return {}
    tags = {}
    for _, T, That in cps:
        if T <= depth:
            tags.setdefault(T, "T")
        if That <= depth:
            tags.setdefault(That, "That")
    return tags


def local_dimension_series(tree: BandTree, mu, x, lengths=None) -> DimensionSeries:
    """``d_n = log mu[x|n] / log |B_{x|n}|`` along the chain ``x``.

    ``lengths`` may override band lengths (``letters -> log length``), which
    is how synthetic fixtures are fed in.
    """
    letters = x.letters if isinstance(x, Word) else tuple(x)
    D = len(letters) - 1
    mdepth = getattr(mu, "depth", None)
    if mdepth is not None and D > mdepth:
        raise DepthExceeded(f"chain depth {D} exceeds measure depth {mdepth}")
    tags = _checkpoint_tags(tree.freq, D) if tree is not None else {}
    depths, vals, tg = [], [], []
    for n in range(1, D + 1):
        pre = letters[: n + 1]
        ll = lengths(pre) if lengths is not None else tree.band(pre).log_length
        lm = _log_mass(mu, pre)
        if not (ll < 0 and math.isfinite(lm) and math.isfinite(ll)):
            continue
        depths.append(n)
        vals.append(lm / ll)
        tg.append(tags.get(n, ""))
    return DimensionSeries(letters, depths, vals, tg)


def sample_chains(tree: BandTree, depth: int, count: int = 32, seed: int = 0,
                  extremal: bool = True) -> list[tuple]:
    """Uniformly random admissible depth-``depth`` words plus the two
    lexicographically extreme chains.

    Each step picks a child with probability proportional to its number of
    admissible extensions to ``depth``, so the chain is a uniform draw from
    all depth-``depth`` words; DOS masses are comparable to uniform at every
    level, which makes these draws DOS-typical.
    """
    rng = random.Random(seed)
    out = []
    if extremal and count >= 2:
        for pick in (0, -1):
            node = tree.roots[pick]
            for _ in range(depth):
                node = tree.children(node)[pick]
            out.append(node.word.letters)
    weights: dict = {}

    def weight(node):
        key = (node.order, node.type)
        if key not in weights:
            weights[key] = descendant_count(node.word, depth - node.order)
        return weights[key]

    while len(out) < count:
        node = rng.choices(tree.roots, [weight(r) for r in tree.roots])[0]
        for _ in range(depth):
            kids = tree.children(node)
            node = rng.choices(kids, [weight(k) for k in kids])[0]
        out.append(node.word.letters)
    return out


def dimension_estimate(tree: BandTree, depth: int, chains: int = 32, seed: int = 0,
                       extra: int = 16, stat: str = "median") -> dict:
    """DOS local-dimension estimate at ``depth`` from sampled chains."""
    mu = DosMeasure(tree.freq, extra)
    xs = sample_chains(tree, depth, chains, seed)
    ds = []
    for x in xs:
        s = local_dimension_series(tree, mu, x)
        ds.append(s.values[-1])
    est = statistics.median(ds) if stat == "median" else statistics.fmean(ds)
    return {"depth": depth, "estimate": est, "values": ds,
            "spread": max(ds) - min(ds), "sd": statistics.pstdev(ds)}


def fibonacci_constant(bits: int = 128) -> arb:
    """``(5 + sqrt 5)/4 * log(1/alpha_1)`` with ``alpha_1 = (sqrt 5 - 1)/2``."""
    with _prec(bits):
        s5 = arb(5).sqrt()
        return (5 + s5) / 4 * ((s5 + 1) / 2).log()


def fibonacci_asymptotic_check(lams: Sequence = (50, 100, 200, 400), depth: int = 20,
                               chains: int = 32, seed: int = 0, extra: int = 16) -> list[dict]:
    """``d * log(lambda)`` per coupling, against the closed-form constant."""
    const = float(fibonacci_constant())
    freq = Frequency.fibonacci()
    rows = []
    for lam in lams:
        if not float(lam) > 20:
            raise ValidationError("couplings must exceed 20")
        tree = BandTree(freq, lam)
        est = dimension_estimate(tree, depth, chains, seed, extra)
        d = est["estimate"]
        rows.append({"lambda": lam, "depth": depth, "d_estimate": d,
                     "d_loglambda": d * math.log(float(lam)), "constant": const,
                     "relative_error": d * math.log(float(lam)) / const - 1})
    return rows


class OscillationReport(NamedTuple):
    lower: dict  # stats of d at T_n checkpoints
    upper: dict  # stats of d at T^_n checkpoints
    delta: float
    se: float  # combined standard error of the two checkpoint means
    paired_se: float
    baselines: dict  # frequency label -> d estimate at the same depth
    checkpoints: list
    block: dict  # increments across 1-blocks ("ones") and 2-blocks ("twos")

    def to_dict(self):
        return self._asdict()


def _stats(xs):
    m = statistics.fmean(xs)
    sd = statistics.stdev(xs) if len(xs) > 1 else 0.0
    return {"mean": m, "sd": sd, "n": len(xs), "se": sd / math.sqrt(len(xs)) if xs else math.nan}


def oscillation_diagnostic(freq: Frequency, lam, depth: int, chains: int = 32, seed: int = 0,
                           extra: int = 16, checkpoints: Sequence | None = None,
                           baselines: bool = True, tree: BandTree | None = None) -> OscillationReport:
    """Local-dimension ratios at the ends of 1-blocks (``T_n``) and 2-blocks (``T^_n``).

    ``checkpoints`` is a list of ``(T_n, T^_n)`` pairs; it defaults to the
    schedule's own checkpoints that fit within ``depth``.
    """
    if checkpoints is None:
        cps = [(T, Th) for _, T, Th in checkpoint_indices(freq) if Th <= depth]
    else:
        cps = [tuple(c) for c in checkpoints]
    if not cps:
        raise DepthExceeded("depth does not cover a full block pair")
    if max(Th for _, Th in cps) > depth:
        raise DepthExceeded("a checkpoint lies beyond the requested depth")
    tree = BandTree(freq, lam) if tree is None else tree
    mu = DosMeasure(freq, extra)
    xs = sample_chains(tree, depth, chains, seed)
    lower, upper, paired, ones, twos = [], [], [], [], []
    prevs = [0] + [Th for _, Th in cps[:-1]]
    for x in xs:
        s = local_dimension_series(tree, mu, x)
        lo = [s.at(T) for T, _ in cps]
        up = [s.at(Th) for _, Th in cps]
        lower.append(statistics.fmean(lo))
        upper.append(statistics.fmean(up))
        paired.append(upper[-1] - lower[-1])
        # dimension across each block alone, free of the cumulative offset
        lm = lambda k: _log_mass(mu, x[: k + 1])
        ll = lambda k: tree.band(x[: k + 1]).log_length
        o, t = [], []
        for p, (T, Th) in zip(prevs, cps):
            # a block that adds no length (single-child steps) carries no ratio
            if ll(T) != ll(p):
                o.append((lm(T) - lm(p)) / (ll(T) - ll(p)))
            if ll(Th) != ll(T):
                t.append((lm(Th) - lm(T)) / (ll(Th) - ll(T)))
        if o and t:
            ones.append(statistics.fmean(o))
            twos.append(statistics.fmean(t))
    L, U = _stats(lower), _stats(upper)
    delta = U["mean"] - L["mean"]
    se = math.hypot(L["se"], U["se"])
    pse = _stats(paired)["se"]
    if ones:
        block = {"ones": _stats(ones), "twos": _stats(twos),
                 "delta": statistics.fmean(twos) - statistics.fmean(ones),
                 "paired_se": _stats([b - a for a, b in zip(ones, twos)])["se"]}
    else:
        block = {"ones": None, "twos": None, "delta": math.nan, "paired_se": math.nan}
    base = {}
    if baselines:
        for label, f in (("all-1", Frequency.fibonacci()), ("all-2", Frequency.constant(2))):
            base[label] = dimension_estimate(BandTree(f, lam), depth, chains, seed, extra, "mean")["estimate"]
    return OscillationReport(L, U, delta, se, pse, base, cps, block)


class FeasibilityRow(NamedTuple):
    n: int
    T_hat_prev: int
    T: int
    T_hat: int
    # first line of the t_n condition: lhs <= rhs
    q_lhs: float
    q_rhs: float
    # second line of the t_n condition (measured band extrema), None if skipped
    psi_t_lhs: float | None
    psi_t_rhs: float | None
    # the tau_n condition
    psi_tau_lhs: float | None
    psi_tau_rhs: float | None

    @property
    def q_ok(self) -> bool:
        return self.q_lhs <= self.q_rhs

    @property
    def psi_t_ok(self):
        return None if self.psi_t_lhs is None else self.psi_t_lhs <= self.psi_t_rhs

    @property
    def psi_tau_ok(self):
        return None if self.psi_tau_lhs is None else self.psi_tau_lhs >= self.psi_tau_rhs

    @property
    def q_slack(self) -> float:
        """``(log q_{t_n}(alpha_1) / n) / (T^_{n-1} log 3)``; >= 1 means satisfied."""
        extra = self.q_rhs - (self.q_lhs - self.T_hat_prev * math.log(3))
        base = self.T_hat_prev * math.log(3)
        return math.inf if base == 0 else extra / base

    def to_dict(self):
        d = self._asdict()
        d.update(q_ok=self.q_ok, psi_t_ok=self.psi_t_ok, psi_tau_ok=self.psi_tau_ok, q_slack=self.q_slack)
        return d


def _extreme_logs(tree: BandTree, depth: int, chains: int, seed: int):
    """(min, max) of log|B| over sampled chains at ``depth``."""
    logs = [tree.band(x).log_length for x in sample_chains(tree, depth, chains, seed)]
    return min(logs), max(logs)


def build_alternating_frequency(schedule: Sequence, M: int = 2, lam=None, chains: int = 16,
                                seed: int = 0, psi_depth_cap: int = 40, extend: str = "cycle"):
    """Frequency ``1^{t_1} 2^{tau_1} 1^{t_2} 2^{tau_2} ...`` plus a feasibility report.

    For each block ``n`` the report evaluates
      * ``T^_{n-1} log 3 + log q_{t_n}(a_1) <= (1 + 1/n) log q_{t_n}(a_1)`` exactly;
      * ``|psi_{T^_{n-1}}|_max + psi^1_{t_n} <= (1 - 1/n) psi^1_{t_n}`` and
        ``-|psi_{T_n}|_min + psi^2_{tau_n} >= (1 + 1/n) psi^2_{tau_n}`` with the
        sup/inf replaced by band-length extrema over sampled chains (only when
        ``lam`` is given and the depths stay below ``psi_depth_cap``).
    """
    pairs = [(int(t), int(u)) for t, u in schedule]
    if not pairs:
        raise ValidationError("schedule must be nonempty")
    if M != 2:
        raise ValidationError("the alternating construction uses quotients 1 and 2 (M = 2)")
    freq = Frequency.schedule(pairs, extend=extend)
    fib = Frequency.fibonacci()
    cps = checkpoint_indices(freq)
    qf = denominators(fib, max(t for t, _ in pairs))
    trees = None
    if lam is not None:
        trees = (BandTree(freq, lam), BandTree(fib, lam), BandTree(Frequency.constant(2), lam))
    rows = []
    for n, ((t, tau), (Th_prev, T, Th)) in enumerate(zip(pairs, cps), start=1):
        lq = math.log(qf[t])
        q_lhs = Th_prev * math.log(3) + lq
        q_rhs = (1 + 1 / n) * lq
        pt = ptr = pu = pur = None
        if trees is not None and max(Th_prev, T, t, tau) <= psi_depth_cap:
            ta, t1, t2 = trees
            # |psi|_max at T^_{n-1}: the smallest band; |psi|_min at T_n: the largest
            lo_prev, _ = _extreme_logs(ta, Th_prev, chains, seed)
            _, hi_T = _extreme_logs(ta, T, chains, seed)
            f_lo, f_hi = _extreme_logs(t1, t, chains, seed)
            s_lo, s_hi = _extreme_logs(t2, tau, chains, seed)
            # worst case over x: the psi^1 value closest to 0 (largest band)
            pt = abs(lo_prev) + f_hi
            ptr = (1 - 1 / n) * f_hi
            # worst case over y: the psi^2 value closest to 0
            pu = -abs(hi_T) + s_hi
            pur = (1 + 1 / n) * s_hi
        rows.append(FeasibilityRow(n, Th_prev, T, Th, q_lhs, q_rhs, pt, ptr, pu, pur))
    return freq, rows


class DistortionReport(NamedTuple):
    lower: float  # min over pairs of dist_min(B_w, B_w') / d(w, w')
    upper: float  # max over pairs of dist_max(B_w, B_w') / d(w, w')
    pairs: int

    @property
    def distortion(self) -> float:
        return self.upper / self.lower


def bilipschitz_distortion(tree: BandTree, depth: int = 8, cap: int = 4000) -> DistortionReport:
    """Compare Euclidean distances between depth-``depth`` bands with the weak
    Gibbs distance of their codes.

    Any two spectrum points coded through ``w`` and ``w'`` are at a distance
    between the gap and the span of ``B_w``, ``B_w'``; both are divided by
    ``r_{w ^ w'}`` for ``psi = log |B|``.
    """
    from .measures import LogBandLength, weak_gibbs_distance

    psi = LogBandLength(tree)
    bands = tree.level(depth)
    if len(bands) > cap:
        raise SizeExceeded(f"{len(bands)} bands exceed the pair budget {cap}")
    ends = [(float(b.lo.mid()), float(b.hi.mid())) for b in bands]
    lo, hi, k = math.inf, 0.0, 0
    for i in range(len(bands)):
        for j in range(i + 1, len(bands)):
            d = weak_gibbs_distance(psi, bands[i].word, bands[j].word)
            (a0, a1), (b0, b1) = ends[i], ends[j]
            gap = max(b0 - a1, a0 - b1)
            span = max(a1, b1) - min(a0, b0)
            lo = min(lo, gap / d)
            hi = max(hi, span / d)
            k += 1
    return DistortionReport(lo, hi, k)
