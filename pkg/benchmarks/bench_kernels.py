"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json]

Each case runs on both backends; results must agree before timings are shown.
"""
import argparse
import json
import sys
import time

import numpy as np

from sofic.kernels import available_backends
from sofic.perm import canonical_cycle, random_cycle


def cases():
    rng = np.random.default_rng(0)
    a18 = canonical_cycle(18).images
    c18 = random_cycle(18, rng).images
    return [
        ("count_square_roots id_8", "count_square_roots", (tuple(range(8)),)),
        ("count_square_roots id_9", "count_square_roots", (tuple(range(9)),)),
        ("near_commuting n=8 d=3", "near_commuting", (8, 3, False)),
        ("near_commuting n=8 d=3 squared", "near_commuting", (8, 3, True)),
        ("min_boundary_ratio n=18", "min_boundary_ratio", (a18, c18, 8)),
    ]


def best_time(fn, args, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python fallback is available", file=sys.stderr)
    rows = []
    for label, name, call_args in cases():
        timings, results = {}, {}
        for backend, mod in sorted(backends.items()):
            timings[backend], out = best_time(getattr(mod, name), call_args, args.repeat)
            results[backend] = list(out) if isinstance(out, list) else out
        if len({json.dumps(r) for r in results.values()}) != 1:
            raise SystemExit(f"backends disagree on {label}")
        row = {"case": label, **{f"{b}_s": t for b, t in timings.items()}}
        if "cython" in timings:
            row["speedup"] = timings["python"] / timings["cython"]
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':34} {'python (s)':>11} {'cython (s)':>11} {'speedup':>9}")
    for row in rows:
        cy = row.get("cython_s")
        print(
            f"{row['case']:34} {row['python_s']:11.4f} "
            f"{cy if cy is None else format(cy, '11.5f'):>11} "
            f"{'' if cy is None else format(row['speedup'], '8.0f') + 'x':>9}"
        )


if __name__ == "__main__":
    main()
