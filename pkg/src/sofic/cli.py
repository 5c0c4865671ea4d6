"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments or manifest, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import harness
from .harness import ExperimentManifest, SchemaError, dumps


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _cycle_type(text: str):
    from .sqrt_count import CycleType

    try:
        return CycleType.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_perm(path):
    from .perm import Permutation

    with open(path) as fh:
        return Permutation.parse(fh.read())


def _read_itm(path):
    from .fullgroup import IntervalTranslationMap

    with open(path) as fh:
        return IntervalTranslationMap.parse(fh.read())


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_trials(args, subcommand: str, params: dict) -> None:
    m = ExperimentManifest(subcommand, params, seed=args.seed, trials=args.trials, format=args.format)
    result = harness.run_manifest(m, jobs=args.jobs)
    _write(harness.emit(result, args.format, timing=args.timing), args.out)


# ---------------------------------------------------------------- commands

def cmd_sqrt_count(args) -> None:
    from .sqrt_count import cycle_type, sqrt_count_bruteforce, sqrt_count_exact

    if args.perm_file:
        y = _read_perm(args.perm_file)
        t = cycle_type(y)
    else:
        y = None
        t = args.type
    payload = {"type": str(t), "degree": t.degree, "count": sqrt_count_exact(t)}
    if args.bruteforce:
        payload["bruteforce"] = sqrt_count_bruteforce(y if y is not None else t.representative())
    _write(dumps(payload), args.out)


def cmd_near_commute(args) -> None:
    from math import floor

    from .almost_commute import (
        bcyc_enumerate,
        construct_near_commuting,
        count_bound,
        commutation_defect,
        enumerate_near_commuting,
    )

    n = args.n
    if args.mode == "bcyc":
        eps = args.epsilon if args.epsilon is not None else Fraction(args.k, n)
        res = bcyc_enumerate(n, eps)
        payload = {
            "mode": "bcyc",
            "n": n,
            "epsilon": eps,
            "size": res.size,
            "reference": res.reference,
            "below_reference": res.below_reference,
        }
        if args.witnesses:
            payload["cycles"] = {" ".join(map(str, c)): [list(w) for w in ws] for c, ws in sorted(res.witnesses.items())}
        _write(dumps(payload), args.out)
        return
    if args.k is not None:
        k = args.k
    elif args.epsilon is not None:
        k = floor(args.epsilon * n) + 1
    else:
        raise SchemaError("near-commute needs --k or --epsilon")
    if args.mode == "construct":
        built = construct_near_commuting(n, k, cyclic=not args.linear)
        payload = {
            "mode": "construct",
            "n": n,
            "k": k,
            "count": len(built),
            "max_defect": max(commutation_defect(y) for y in built),
            "defect_bound": Fraction(k, n),
        }
        if args.witnesses:
            payload["permutations"] = sorted(list(y) for y in built)
    else:
        res = enumerate_near_commuting(n, k, cyclic=not args.linear)
        payload = {
            "mode": "exhaustive",
            "n": n,
            "k": k,
            "ball_size": len(res.ball),
            "constructed_size": len(res.constructed),
            "complete": res.complete,
            "equal": res.equal,
            "missing": len(res.missing),
            "count_bound": count_bound(n, Fraction(k - 1, n)),
        }
        if args.witnesses:
            payload["ball"] = sorted(list(y) for y in res.ball)
            payload["missing_witnesses"] = sorted(list(y) for y in res.missing)
    _write(dumps(payload), args.out)


def cmd_expander(args) -> None:
    _run_trials(args, "expander", {"n": args.n, "lambda": args.lam, "mode": args.mode, "threshold": args.threshold})


def cmd_extract(args) -> None:
    from .intertwiner import admissible_lambda, extract

    if args.construct:
        if args.n is None:
            raise SchemaError("--construct needs --n")
        _run_trials(
            args,
            "extract",
            {"n": args.n, "lambda": args.lam, "perturb": args.perturb, "commuting_square": not args.uniform_conjugator},
        )
        return
    if not (args.x_file and args.z_file and args.y_file):
        raise SchemaError("extract needs --x-file, --z-file and --y-file, or --construct")
    x, z, y = _read_perm(args.x_file), _read_perm(args.z_file), _read_perm(args.y_file)
    lam = args.lam if args.lam is not None else admissible_lambda(x, z)
    _write(dumps(extract(x, z, y, lam).to_dict()), args.out)


def cmd_fullgroup(args) -> None:
    from .fullgroup import approximate_itm, compose_itm, embed_perm_itm, hamming_itm

    if args.action == "approx":
        if len(args.files) != 1:
            raise SchemaError("approx takes one map file")
        res = approximate_itm(_read_itm(args.files[0]), args.epsilon, n=args.grid)
        payload = {
            "n": res.n,
            "p": list(res.p),
            "distance": res.distance,
            "bound": 2 * args.epsilon,
            "kept_shifts": res.kept_shifts,
            "kept_mass": res.kept_mass,
        }
        _write(dumps(payload), args.out)
    elif args.action == "compose":
        if len(args.files) != 2:
            raise SchemaError("compose takes two map files")
        u, v = map(_read_itm, args.files)
        _write(compose_itm(u, v).format(), args.out)
    elif args.action == "distance":
        if len(args.files) != 2:
            raise SchemaError("distance takes two map files")
        u, v = map(_read_itm, args.files)
        _write(dumps({"distance": hamming_itm(u, v)}), args.out)
    elif args.action == "embed":
        if len(args.files) != 1:
            raise SchemaError("embed takes one permutation file")
        _write(embed_perm_itm(_read_perm(args.files[0])).format(), args.out)


def cmd_rep(args) -> None:
    from .perm import DiagProjection
    from .rep import (
        FiniteSoficRep,
        WordWeightScheme,
        convex_combine,
        cut_rep,
        rep_distance_upper,
        trace_defect,
    )

    reps = [FiniteSoficRep.load(f) for f in args.files]
    if args.action == "defect":
        if len(reps) != 1:
            raise SchemaError("defect takes one representation file")
        _write(dumps({"L": args.L, "degree": reps[0].degree, "trace_defect": trace_defect(reps[0], args.L)}), args.out)
    elif args.action == "combine":
        if len(reps) != 2 or args.lam is None:
            raise SchemaError("combine takes two representation files and --lambda")
        _write(dumps(convex_combine(reps[0], reps[1], args.lam).to_json()), args.out)
    elif args.action == "cut":
        if len(reps) != 1 or not args.set_file:
            raise SchemaError("cut takes one representation file and --set-file")
        with open(args.set_file) as fh:
            subset = [int(t) for t in fh.read().split()]
        cut = cut_rep(reps[0], DiagProjection(reps[0].degree, subset))
        _write(dumps(cut.to_json()), args.out)
    elif args.action == "distance":
        if len(reps) != 2:
            raise SchemaError("distance takes two representation files")
        scheme = WordWeightScheme.shortlex(reps[0].generators, args.L)
        res = rep_distance_upper(reps[0], reps[1], scheme, args.budget, seed=args.seed)
        payload = {
            "upper_bound_squared": res.squared,
            "upper_bound": res.value,
            "tail_bound": res.tail_bound,
            "conjugator": list(res.conjugator),
            "evaluations": res.evaluations,
        }
        _write(dumps(payload), args.out)


def cmd_run(args) -> None:
    m = ExperimentManifest.load(args.manifest)
    result = harness.run_manifest(m, jobs=args.jobs)
    _write(harness.emit(result, m.format, timing=args.timing), args.out or m.out)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--trials", type=int, default=1, help="number of seeded trials")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--timing", action="store_true", help="include per-trial wall time")

    parser = argparse.ArgumentParser(prog="sofic", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sqrt-count", parents=[common], help="count x with x^2 = y")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--perm-file", help="permutation in one-line format")
    src.add_argument("--type", type=_cycle_type, help='cycle type, e.g. "2^2 3^1"')
    p.add_argument("--bruteforce", action="store_true", help="also count exhaustively (degree <= 9)")
    p.set_defaults(func=cmd_sqrt_count)

    p = sub.add_parser("near-commute", parents=[common], help="permutations almost commuting with the n-cycle")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int)
    g.add_argument("--epsilon", type=_rational)
    p.add_argument("--mode", choices=("construct", "exhaustive", "bcyc"), default="exhaustive")
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--linear", action="store_true", help="cut the line, not the cycle (no rotations)")
    p.set_defaults(func=cmd_near_commute)

    p = sub.add_parser("expander", parents=[common], help="spectral gap / Cheeger experiment on cycle pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 5))
    p.add_argument("--mode", choices=("sample", "exact"), default="sample")
    p.add_argument("--threshold", type=float, default=3.6)
    p.set_defaults(func=cmd_expander)

    p = sub.add_parser("extract", parents=[common], help="extract a near-conjugator from an involutive intertwiner")
    p.add_argument("--x-file")
    p.add_argument("--z-file")
    p.add_argument("--y-file")
    p.add_argument("--construct", action="store_true", help="build planted swap-amplified instances")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--perturb", type=int, default=0, help="transpositions; negative draws from 0..|t|")
    p.add_argument("--uniform-conjugator", action="store_true", help="do not force u^2 to commute with x")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("fullgroup", parents=[common], help="exact interval translation maps")
    p.add_argument("action", choices=("approx", "compose", "distance", "embed"))
    p.add_argument("files", nargs="+")
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 4))
    p.add_argument("--grid", type=int, help="force the grid size n in approx")
    p.set_defaults(func=cmd_fullgroup)

    p = sub.add_parser("rep", parents=[common], help="finite sofic representations")
    p.add_argument("action", choices=("defect", "combine", "cut", "distance"))
    p.add_argument("files", nargs="+")
    p.add_argument("--L", type=int, default=2, help="word length")
    p.add_argument("--lambda", dest="lam", type=_rational)
    p.add_argument("--set-file")
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("run", parents=[common], help="run an experiment manifest (JSON)")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials < 0 or args.jobs < 1 or args.seed < 0:
        parser.error("--trials and --seed must be >= 0, --jobs >= 1")
    try:
        args.func(args)
    except SchemaError as exc:
        print(f"sofic: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"sofic: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
