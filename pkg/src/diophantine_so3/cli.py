"""Command-line harness.

Exit codes: 0 success, 2 invalid input, 3 search cap or measure budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .elimination import ChainSizeError, elimination_chain
from .measure import (
    BudgetError,
    PhiSpec,
    check_dm_lemma,
    phi_alpha_measure,
    phi_measure,
    phi_union_measure,
)
from .rotation import (
    RotationTriple,
    UnitQuaternion,
    alpha_derivative_sq,
    evaluate_word,
    frobenius_distance,
    rotation_angle,
    so3_distance,
)
from .search import (
    SearchCapError,
    degenerate_order,
    explore_tower_signs,
    fit_diophantine,
    random_points,
)
from .trigpoly import build_P, freeness_certificate, height_bound, leading_alpha_coefficient
from .words import WordError, WordIndex, word_length

EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _quaternion(text: str) -> UnitQuaternion:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated components w,x,y,z")
    return UnitQuaternion.from_components(parts)


def _word(text: str) -> WordIndex:
    try:
        return WordIndex.parse(text)
    except WordError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _signs(text: str) -> tuple[int, ...]:
    table = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}
    try:
        return tuple(table[s.strip()] for s in text.split(","))
    except KeyError as exc:
        raise argparse.ArgumentTypeError(f"bad sign {exc.args[0]!r}; use +,- entries") from exc


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _global_options(sup: bool) -> argparse.ArgumentParser:
    # the same flags work before or after the subcommand; SUPPRESS keeps the
    # subparser from overwriting a value given earlier
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if sup else (lambda v: v)
    p.add_argument("--seed", type=_seed, default=d(0))
    p.add_argument("--format", choices=("csv", "json"), default=d(None))
    p.add_argument("--out", default=d(None))
    p.add_argument("--threads", type=int, default=d(1))
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _global_options(sup=True)
    parser = _Parser(prog="diophantine-so3", parents=[_global_options(sup=False)],
                     description="Word search, exact polynomials and measure estimates for rotation pairs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def point_args(p):
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--gamma", type=float)

    p = sub.add_parser("eval", parents=[shared], help="evaluate a word at a point")
    p.add_argument("--word", type=_word, required=True)
    point_args(p)
    p.add_argument("--target", type=_quaternion, default=UnitQuaternion.identity())

    p = sub.add_parser("search", parents=[shared], help="exhaustive min-distance search and exponent fits")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--points", type=int, default=1)
    point_args(p)
    p.add_argument("--target", type=_quaternion, default=UnitQuaternion.identity())
    p.add_argument("--metric", choices=("so3", "lift"), default="so3")
    p.add_argument("--timing", action="store_true", help="fill the seconds column (output no longer reproducible)")

    p = sub.add_parser("poly", parents=[shared], help="integer polynomial of |dW/dalpha|^2 and the leading coefficient")
    p.add_argument("--word", type=_word, required=True)
    p.add_argument("--raw", action="store_true", help="skip reduction modulo the circle relations")

    p = sub.add_parser("eliminate", parents=[shared], help="three-stage resultant elimination")
    p.add_argument("--word", type=_word, required=True)
    p.add_argument("--D", type=float, default=5.0)
    p.add_argument("--polys", action="store_true", help="include the stage polynomials")

    p = sub.add_parser("measure", parents=[shared], help="sublevel-set measures")
    p.add_argument("kind", choices=("phi", "phi-alpha", "union", "dm-check"))
    p.add_argument("--word", type=_word)
    p.add_argument("--threshold", type=float)
    p.add_argument("--target", type=_quaternion, default=UnitQuaternion.identity())
    p.add_argument("--metric", choices=("lift", "so3"), default="lift")
    p.add_argument("--method", choices=("grid", "monte-carlo"), default="grid")
    p.add_argument("--resolution", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--D", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--coeffs", help="ascending polynomial coefficients c0,c1,...")
    p.add_argument("--eps", type=float)
    p.add_argument("--interval", default="-1,1")

    p = sub.add_parser("degenerate", parents=[shared], help="vanishing order of commutator-tower words")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.2)
    p.add_argument("--signs", type=_signs)
    p.add_argument("--quantity", choices=("squared", "distance"), default="squared")
    p.add_argument("--explore", action="store_true", help="fit every non-collapsing sign vector")
    return parser


def _point(args, required: bool = True) -> RotationTriple | None:
    vals = (args.alpha, args.beta, args.gamma)
    if all(v is None for v in vals):
        if required:
            raise ValueError("--alpha, --beta and --gamma are required")
        return None
    if any(v is None for v in vals):
        raise ValueError("give all of --alpha, --beta, --gamma")
    return RotationTriple(*vals)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_eval(args, fmt):
    pt = _point(args)
    q = evaluate_word(args.word, pt)
    out = {
        "word": args.word.to_text(), "point": list(pt.as_tuple()), "quaternion": list(q.as_tuple()),
        "distance": so3_distance(q, args.target), "frobenius": frobenius_distance(q, args.target),
        "rotation_angle": rotation_angle(q),
        "alpha_derivative_sq": float(alpha_derivative_sq(args.word, pt.alpha, pt.beta, pt.gamma)),
    }
    if fmt == "csv":
        return _rows_csv(("key", "value"), [(k, json.dumps(v)) for k, v in sorted(out.items())])
    return _dump(out)


def _cmd_search(args, fmt):
    if args.nmax < 1:
        raise ValueError("--nmax must be >= 1")
    pt = _point(args, required=False)
    points = [pt] if pt is not None else random_points(args.points, args.seed)
    rec = fit_diophantine(points, args.nmax, args.target, threads=args.threads, timing=args.timing,
                          metric=args.metric, seed=None if pt is not None else args.seed)
    return rec.to_csv() if fmt == "csv" else rec.to_json() + "\n"


def _cmd_poly(args, fmt):
    P = build_P(args.word, reduce=not args.raw)
    n, m = word_length(args.word), args.word.m
    out = {"word": args.word.to_text(), "P": P.to_text(), "terms": len(P), "total_degree": P.total_degree(),
           "degree_bound": 2 * n + 2 * m, "height": P.height(), "height_bound": height_bound(n)}
    if args.word.has_a():
        fc = leading_alpha_coefficient(args.word)
        out["leading"] = {"frequency": fc.frequency,
                          "components": [c.to_text() for c in fc.coefficient.components()],
                          "certificate": freeness_certificate(args.word)}
    if fmt == "csv":
        return _rows_csv(("coeff", "monomial"), [line.split(" * ", 1) if " * " in line else (line, "1")
                                                 for line in P.to_text().splitlines()])
    return _dump(out)


def _cmd_eliminate(args, fmt):
    rec = elimination_chain(args.word, D=args.D)
    d = rec.to_dict()
    if not args.polys:
        d.pop("polys", None)
    if fmt == "csv":
        rows = [(s["name"], s.get("total_degree", ""), s.get("height_bits", ""), s.get("terms", ""))
                for s in rec.stages]
        return _rows_csv(("stage", "total_degree", "height_bits", "terms"), rows)
    return _dump(d)


def _interval(text: str):
    a, b = (float(v) for v in text.split(","))
    return (a, b)


def _cmd_measure(args, fmt):
    kind = args.kind
    if kind == "dm-check":
        if args.coeffs is None or args.eps is None:
            raise ValueError("dm-check needs --coeffs and --eps")
        coeffs = [float(c) for c in args.coeffs.split(",")]
        out = check_dm_lemma(coeffs, _interval(args.interval), args.eps, args.resolution or 10**5)
    else:
        common = dict(method=args.method, resolution=args.resolution, samples=args.samples, seed=args.seed)
        if kind == "phi":
            if args.word is None or args.threshold is None:
                raise ValueError("phi needs --word and --threshold")
            est = phi_measure(PhiSpec(args.word, args.target, args.threshold, args.metric),
                              workers=args.threads, **common)
        elif kind == "phi-alpha":
            if args.word is None or args.threshold is None:
                raise ValueError("phi-alpha needs --word and --threshold")
            est = phi_alpha_measure(args.word, args.threshold, workers=args.threads, **common)
        else:
            if args.n is None or (args.D is None and args.threshold is None):
                raise ValueError("union needs --n and --D (or --threshold)")
            kw = {} if args.budget is None else {"budget": args.budget}
            est = phi_union_measure(args.n, args.D if args.D is not None else math.nan, args.target,
                                    threshold=args.threshold, metric=args.metric, **kw, **common)
        out = est.to_dict()
    if fmt == "csv":
        return _rows_csv(("key", "value"), [(k, json.dumps(v, sort_keys=True)) for k, v in sorted(out.items())])
    return _dump(out)


def _cmd_degenerate(args, fmt):
    if args.explore:
        rows = explore_tower_signs(args.k, args.beta, args.gamma)
        if fmt == "csv":
            return _rows_csv(("signs", "word_length", "slope_squared", "slope_distance"),
                             [(" ".join(f"{s:+d}" for s in r["signs"]), r["word_length"],
                               repr(r["slope_squared"]), repr(r["slope_distance"])) for r in rows])
        return _dump(rows)
    fit = degenerate_order(args.k, args.beta, args.gamma, signs=args.signs, quantity=args.quantity)
    if fmt == "csv":
        return _rows_csv(("alpha", "log10_sq_distance"),
                         [(repr(a), repr(v)) for a, v in zip(fit.alphas, fit.log10_values)])
    return _dump(fit.to_dict())


COMMANDS = {"eval": _cmd_eval, "search": _cmd_search, "poly": _cmd_poly, "eliminate": _cmd_eliminate,
            "measure": _cmd_measure, "degenerate": _cmd_degenerate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or ("csv" if args.command == "search" else "json")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        text = COMMANDS[args.command](args, fmt)
    except (SearchCapError, ChainSizeError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
