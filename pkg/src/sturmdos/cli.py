"""``sturmdos`` command line.

Every subcommand writes one artifact (stdout or ``--output``) and exits 0;
errors become a JSON object on stderr with the taxonomy code and exit
status 2 (validation), 3 (computation) or 4 (resource guard).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from fractions import Fraction

from . import __version__
from .cf import denominators, parse_frequency
from .errors import SizeExceeded, SturmError, ValidationError

WORD_CAP = 10**6
EIG_CAP = 5000
BITS_DEPTH_BUDGET = 4096 * 64


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def _freq(args):
    spec = args.freq
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            spec = fh.read().strip()
    return parse_frequency(spec)


def _lam(args):
    try:
        lam = Fraction(args.lam)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"coupling must be a real number (got {args.lam!r})")
    if not lam > 4:
        from .errors import InvalidCoupling
        raise InvalidCoupling(f"coupling must exceed 4 (got {args.lam})")
    return lam if lam.denominator != 1 else int(lam)


def _guard(args):
    if args.depth < 0:
        raise ValidationError("depth must be >= 0")
    if args.bits < 32:
        raise ValidationError("bits must be >= 32")
    if not args.unsafe and (args.depth + 1) * args.bits > BITS_DEPTH_BUDGET:
        raise SizeExceeded("depth x bits exceeds the resource guard; pass --unsafe to override")


def _caps(args):
    return (10**12, 10**6) if args.unsafe else (WORD_CAP, EIG_CAP)


def _emit(args, text: str):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_bands(args):
    from .bands import build_band_tree
    from .symbolic import count_words

    _guard(args)
    freq, lam = _freq(args), _lam(args)
    wcap, _ = _caps(args)
    if count_words(freq, args.depth) > wcap:
        raise SizeExceeded(f"level {args.depth} has more than {wcap} bands; pass --unsafe")
    tree = build_band_tree(freq, lam, args.depth, bits=args.bits, verify=False)
    rep = tree.verify(args.depth)
    summary = {
        "counts": [e["bands"] for e in rep["levels"]],
        "count_words": [e["count_words"] for e in rep["levels"]],
        "q_n": [e["q_n"] for e in rep["levels"]],
        "ok": rep["ok"],
    }
    if args.format == "csv":
        body = tree.to_csv(args.depth)
        body += "# level,bands,count_words,q_n\n"
        body += "".join(f"# {e['n']},{e['bands']},{e['count_words']},{e['q_n']}\n" for e in rep["levels"])
        _emit(args, body)
    else:
        d = tree.to_dict(args.depth)
        d["verification"] = rep
        d["summary"] = summary
        _emit(args, _dump(d))


def cmd_dos(args):
    from .bands import BandTree
    from .dos import dos_approx, dos_spectral

    _guard(args)
    freq, lam = _freq(args), _lam(args)
    wcap, ecap = _caps(args)
    horizon = args.depth + 6 if args.horizon is None else args.horizon
    approx = dos_approx(freq, args.depth, horizon, cap=wcap)
    if args.spectral:
        if denominators(freq, horizon)[horizon] > ecap:
            raise SizeExceeded(f"q_{horizon} exceeds the eigensolve budget; pass --unsafe")
        spec = dos_spectral(BandTree(freq, lam, bits=args.bits), horizon, args.depth, max_size=ecap)
        agree = spec.masses == approx.masses
    if args.format == "csv":
        _emit(args, approx.to_csv())
    else:
        d = approx.to_dict()
        d["lambda"] = str(lam)
        d["frequency"] = freq.to_dict()
        if args.spectral:
            d["spectral_agrees"] = agree
        _emit(args, _dump(d))


def cmd_dim(args):
    from .bands import BandTree
    from .cf import ScheduleTail
    from .dos import DosMeasure, local_dimension_series, oscillation_diagnostic, sample_chains

    freq, lam = _freq(args), _lam(args)
    is_schedule = isinstance(freq.tail, ScheduleTail)
    if args.depth_given:
        depth = args.depth
    elif is_schedule:
        from .cf import checkpoint_indices
        depth = checkpoint_indices(freq)[-1][2]
    else:
        depth = 20
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    tree = BandTree(freq, lam, bits=args.bits)
    extra = 16 if args.horizon is None else args.horizon
    mu = DosMeasure(freq, extra)
    chains = sample_chains(tree, depth, args.chains, args.seed)
    series = [local_dimension_series(tree, mu, x) for x in chains]
    summary = {"lambda": str(lam), "depth": depth, "chains": len(chains), "seed": args.seed}
    last = sorted(s.values[-1] for s in series)
    med = last[len(last) // 2] if len(last) % 2 else (last[len(last) // 2 - 1] + last[len(last) // 2]) / 2
    summary["d_estimate"] = med
    summary["d_loglambda"] = med * math.log(float(lam))
    if is_schedule:
        rep = oscillation_diagnostic(freq, lam, depth, args.chains, args.seed, extra,
                                     baselines=args.baselines, tree=tree)
        summary.update(delta=rep.delta, delta_se=rep.se, lower_mean=rep.lower["mean"],
                       upper_mean=rep.upper["mean"], block_delta=rep.block["delta"],
                       baselines=rep.baselines)
    if args.format == "csv":
        lines = ["chain,depth,d_n,checkpoint"]
        for i, s in enumerate(series):
            lines += [f"{i},{n},{d:.12g},{t}" for n, d, t in zip(s.depths, s.values, s.tags)]
        lines += [f"# {k}={v:.12g}" if isinstance(v, float) else f"# {k}={v}" for k, v in summary.items()
                  if not isinstance(v, dict)]
        _emit(args, "\n".join(lines) + "\n")
    else:
        summary["series"] = [{"word": len(s.word) - 1, "depths": s.depths, "d": s.values, "tags": s.tags}
                             for s in series]
        _emit(args, _dump(summary))


def cmd_verify(args):
    from .checks import run_suite

    freq = _freq(args)
    lam = _lam(args)
    checks = run_suite(args.suite, freq, lam, args.depth, args.horizon, args.M, args.seed)
    ok = all(c.ok for c in checks)
    _emit(args, _dump({"suite": args.suite, "ok": ok, "checks": [c.to_dict() for c in checks]}))
    return 0 if ok else 3


def cmd_symbolic(args):
    from .symbolic import aux_matrix, incidence_matrix, typed_counts

    freq = _freq(args)
    q = denominators(freq, args.depth)
    rows = []
    for n in range(args.depth + 1):
        t = typed_counts(freq, n)
        rows.append({"n": n, "a_n": freq.quotient(n) if n else None, "count": sum(t),
                     "typed": list(t), "q_n": q[n]})
    if args.format == "csv":
        lines = ["n,count,I,II,III,q_n"] + [
            f"{r['n']},{r['count']},{r['typed'][0]},{r['typed'][1]},{r['typed'][2]},{r['q_n']}" for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    else:
        mats = {}
        for n in range(1, min(args.depth, 4) + 1):
            mats[f"A_{n}{n + 1}"] = incidence_matrix(freq.quotient(n), freq.quotient(n + 1)).tolist()
        _emit(args, _dump({"frequency": freq.to_dict(), "levels": rows, "incidence": mats,
                           "aux": {a: aux_matrix(a) for a in sorted({freq.quotient(k) for k in range(1, args.depth + 1)})}}))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--freq", default="fib", help="fib, silver, const:k, periodic:.., schedule:.., JSON or @file")
    common.add_argument("--lambda", dest="lam", default="24", help="coupling (> 4; > 20 recommended)")
    common.add_argument("--depth", type=int, default=None)
    common.add_argument("--bits", type=int, default=128)
    common.add_argument("--horizon", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--unsafe", action="store_true", help="lift the word and eigensolve guards")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="sturmdos", description="Band hierarchy and DOS of Sturm Hamiltonians")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("bands", parents=[common], help="export the band tree")
    s.set_defaults(func=cmd_bands, default_depth=6)
    s = sub.add_parser("dos", parents=[common], help="exact DOS band masses")
    s.add_argument("--spectral", action="store_true", help="also cross-check against periodic eigenvalues")
    s.set_defaults(func=cmd_dos, default_depth=6)
    s = sub.add_parser("dim", parents=[common], help="local-dimension series along sampled chains")
    s.add_argument("--chains", type=int, default=32)
    s.add_argument("--baselines", action="store_true", help="also estimate constant-type baselines")
    s.set_defaults(func=cmd_dim, default_depth=None)
    s = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    s.add_argument("--suite", default="combinatorial", help="combinatorial, bands, dos, measures or all")
    s.add_argument("--M", type=int, default=2)
    s.set_defaults(func=cmd_verify, default_depth=6)
    s = sub.add_parser("symbolic", parents=[common], help="word counts and incidence matrices")
    s.set_defaults(func=cmd_symbolic, default_depth=8)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.depth_given = args.depth is not None
    if args.depth is None:
        args.depth = args.default_depth if args.default_depth is not None else 0
    if args.threads > 1:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(
                json.dumps({"warning": str(msg)}), file=sys.stderr)
            rc = args.func(args)
    except SturmError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(json.dumps({"error": "IO", "message": str(exc)}), file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
