"""Command-line entry point.

Every subcommand writes JSON (with a ``schema_version``), digit text, CSV or
PGM.  Output is deterministic given the flags.  Exit codes: 0 success,
2 domain or precondition error, 3 undecidable at the precision cap, 4 I/O.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

from .errors import DomainError, Undecidable
from .expansion import Alphabet, canonical_intervals
from .numerics.beta import BetaValue

SCHEMA_VERSION = 1

EXIT_OK, EXIT_DOMAIN, EXIT_UNDECIDABLE, EXIT_IO = 0, 2, 3, 4


def _beta(text: str) -> BetaValue:
    try:
        return BetaValue.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact number: {text!r}") from None


def _alphabet(text: str) -> Alphabet:
    try:
        return Alphabet.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _span(s, digits=17):
    return list(s.enclose(128).to_strings(digits))


# --- subcommands ----------------------------------------------------------------------

def cmd_constants(args):
    from .synthesis import compute_constants

    ci = canonical_intervals(args.beta, args.alphabet)
    k = compute_constants(args.beta, args.alphabet, args.policy)
    _emit({
        "schema_version": SCHEMA_VERSION,
        "beta": args.beta.describe(),
        "alphabet": args.alphabet.value,
        "intervals": {name: _span(getattr(ci, name)) for name in ("I", "S", "O", "calI", "calJ")},
        "constants": k.to_json(),
    }, args.out)


def cmd_table(args):
    from .synthesis import build_partition_table

    table = build_partition_table(args.beta, args.alphabet, args.policy)
    if args.format == "text":
        text = table.to_text().rstrip("\n") + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return
    _emit(table.to_json(), args.out)


def _stream(args):
    from . import frequency as F

    kind = args.kind
    if kind == "freq":
        if args.p is None:
            raise DomainError("expand freq needs --p")
        return F.FrequencyStream(args.beta, args.x, args.p, args.alphabet, args.policy)
    if kind == "accum":
        targets = None
        if args.targets:
            # a finite list is repeated so the targets keep recurring
            targets = itertools.cycle([_fraction(t) for t in args.targets.split(",")])
        return F.AccumulationStream(args.beta, args.x, targets, args.alphabet, args.policy)
    if kind == "normal":
        return F.SimplyNormalStream(args.beta, args.x, max_rungs=args.max_rungs)
    if kind == "hybrid":
        return F.HybridStream(args.beta, args.x, args.policy)
    if kind == "slowgrowth":
        return F.SlowGrowthStream(args.beta, args.x, F.GrowthFunction.parse(args.growth), args.policy)
    raise DomainError(f"unknown expansion kind {kind!r}")


def cmd_expand(args):
    s = _stream(args)
    s.extend_to(args.n)
    if args.log:
        s.write_log(args.log)
    if args.out:
        s.write_digits(args.out, args.n)
        summary = s.summary()
        summary["digits"] = args.n
        _emit(summary)
    else:
        sys.stdout.write(s.digit_text(args.n))


def cmd_kl(args):
    from .thuemorse import komornik_loreti

    b = komornik_loreti()
    e = b.enclose(args.prec)
    _emit({"schema_version": SCHEMA_VERSION, "beta_kl": list(e.to_strings(20)),
           "width": format(float(e.hi - e.lo), ".3e")}, args.out)


def cmd_multinacci(args):
    from .thuemorse import multinacci, quasi_greedy

    b = multinacci(args.n)
    alpha = quasi_greedy(b, args.length)
    _emit({"schema_version": SCHEMA_VERSION, "n": args.n, "beta": b.describe(),
           "quasi_greedy_prefix": "".join(map(str, alpha))}, args.out)


def cmd_ladder(args):
    from .thuemorse import base_ladder

    _emit({"schema_version": SCHEMA_VERSION, "rungs": base_ladder(args.M).to_json()}, args.out)


def cmd_dim(args):
    from .thuemorse import dim_lower_bound

    d = dim_lower_bound(args.k, args.beta, args.prec)
    out = {"schema_version": SCHEMA_VERSION, "beta": args.beta.describe()}
    out.update(d.to_json())
    _emit(out, args.out)


def cmd_delta(args):
    from .affine import certify_delta

    cert = certify_delta(args.beta1, args.search, args.c, args.iterations, args.grid_step,
                         args.budget, args.policy)
    _emit(cert.to_json(), args.out)


def _params(args):
    from .affine import AffineParams

    return AffineParams(args.beta1, args.beta2, args.beta3)


def cmd_fibre(args):
    from .affine import fibre_interval, point_in_fibre
    from .expansion import word_string

    fc = fibre_interval(_params(args), args.x, digits=args.digits, prec=args.prec)
    out = fc.to_json()
    if args.y is not None:
        pt = point_in_fibre(fc, args.y, digits=args.digits)
        out["y"] = str(args.y)
        out["lambda"] = word_string(pt.word.digits(), Alphabet.PLUS_MINUS)
        out["value"] = list(pt.value.to_strings(17))
        out["tail_bound"] = format(float(pt.tail.hi), ".6e")
        out["seams"] = pt.seams
    _emit(out, args.out)


def cmd_render(args):
    from . import render as R

    params = _params(args)
    pts = R.render_attractor(params, args.mode, args.n, args.seed)
    fmt = args.format
    if fmt == "pgm":
        if not args.out:
            raise DomainError("PGM output needs --out")
        R.write_pgm(R.raster(pts, params, args.width, args.height), args.out)
    elif args.out:
        R.write_csv(pts, args.out)
    else:
        sys.stdout.write("x,y\n")
        for x, y in pts.tolist():
            sys.stdout.write(f"{x:.12g},{y:.12g}\n")
        return
    _emit({"schema_version": SCHEMA_VERSION, "mode": args.mode, "points": len(pts),
           "format": fmt, "digest": R.digest(pts)})


def cmd_hs(args):
    from .affine import hare_sidorov

    verdict, q = hare_sidorov(args.beta1, args.beta2)
    _emit({"schema_version": SCHEMA_VERSION, "beta1": args.beta1.describe(),
           "beta2": args.beta2.describe(), "verdict": verdict.value,
           "quantity": list(q.to_strings(17))}, args.out)


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="betaexp", description="Certified beta-expansion tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, prec=128):
        sp.add_argument("--out", "-o", help="output path (default: stdout)")
        sp.add_argument("--prec", type=int, default=prec, help=f"working precision in bits (default {prec})")

    def policy(sp):
        sp.add_argument("--policy", choices=("shortest", "proof"), default="shortest",
                        help="word choice in the partition table (default shortest)")

    sp = sub.add_parser("constants", help="canonical intervals and synthesis constants")
    sp.add_argument("--beta", type=_beta, required=True)
    sp.add_argument("--alphabet", type=_alphabet, default=Alphabet.ZERO_ONE)
    policy(sp)
    common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("table", help="partition table of return words")
    sp.add_argument("--beta", type=_beta, required=True)
    sp.add_argument("--alphabet", type=_alphabet, default=Alphabet.ZERO_ONE)
    sp.add_argument("--format", choices=("json", "text"), default="json")
    policy(sp)
    common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("expand", help="generate an expansion with a certificate log")
    sp.add_argument("kind", choices=("freq", "accum", "normal", "hybrid", "slowgrowth"))
    sp.add_argument("--beta", type=_beta, required=True)
    sp.add_argument("--x", type=_fraction, required=True)
    sp.add_argument("--n", type=int, default=1000, help="number of digits (default 1000)")
    sp.add_argument("--alphabet", type=_alphabet, default=Alphabet.ZERO_ONE)
    sp.add_argument("--p", type=_fraction, help="target frequency of the low digit (freq)")
    sp.add_argument("--targets", help="comma-separated accumulation targets (accum)")
    sp.add_argument("--growth", default="sqrt", help="sqrt, log, linear or pow:<a> (slowgrowth)")
    sp.add_argument("--max-rungs", type=int, default=10)
    sp.add_argument("--log", help="write the checkpoint log (JSON lines) here")
    policy(sp)
    common(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("kl", help="enclosure of the Komornik-Loreti constant")
    common(sp)
    sp.set_defaults(func=cmd_kl)

    sp = sub.add_parser("multinacci", help="multinacci base and its quasi-greedy expansion")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--length", type=int, default=64)
    common(sp)
    sp.set_defaults(func=cmd_multinacci)

    sp = sub.add_parser("ladder", help="the first M rungs of the base ladder")
    sp.add_argument("-M", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_ladder)

    sp = sub.add_parser("dim", help="dimension lower bound from heavy words")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--beta", type=_beta, required=True)
    common(sp)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("delta", help="certified radius for the contraction parameters")
    sp.add_argument("--beta1", type=_beta, required=True)
    sp.add_argument("--search", choices=("bisection", "grid"), default="bisection")
    sp.add_argument("--c", type=_fraction, default=Fraction(1, 2), help="head threshold (default 1/2)")
    sp.add_argument("--iterations", type=int, default=20)
    sp.add_argument("--grid-step", type=_fraction, default=Fraction(1, 1000))
    sp.add_argument("--budget", type=int, default=20_000, help="box subdivision budget")
    policy(sp)
    common(sp)
    sp.set_defaults(func=cmd_delta)

    def affine(sp, third=True):
        sp.add_argument("--beta1", type=_beta, required=True)
        sp.add_argument("--beta2", type=_beta, required=True)
        if third:
            sp.add_argument("--beta3", type=_beta, required=True)

    sp = sub.add_parser("fibre", help="certified interval in a vertical fibre")
    affine(sp)
    sp.add_argument("--x", type=_fraction, required=True)
    sp.add_argument("--y", type=_fraction)
    sp.add_argument("--digits", type=int, default=2000)
    common(sp, prec=320)
    sp.set_defaults(func=cmd_fibre)

    sp = sub.add_parser("render", help="point cloud (CSV) or raster (PGM) of the attractor")
    affine(sp)
    sp.add_argument("--mode", choices=("chaos", "depth"), default="chaos")
    sp.add_argument("-n", type=int, default=100_000, help="points (chaos) or word length (depth)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=("csv", "pgm"), default="csv")
    sp.add_argument("--width", type=int, default=512)
    sp.add_argument("--height", type=int, default=512)
    common(sp)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("hs", help="check the two-base inequality of Hare and Sidorov")
    affine(sp, third=False)
    common(sp)
    sp.set_defaults(func=cmd_hs)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Undecidable as exc:
        print(f"undecidable: {exc}", file=sys.stderr)
        return EXIT_UNDECIDABLE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
