"""Seeded, parallel trial execution and deterministic JSON/CSV output."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .perm import Permutation


class SchemaError(ValueError):
    """Invalid manifest or parameters."""


def derive_seed(master: int, index: int) -> int:
    """Counter-mode hash of ``(master, index)``; independent of worker layout."""
    digest = hashlib.blake2b(f"{master}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


# ---------------------------------------------------------------- trials

def _trial_expander(params: dict, rng: np.random.Generator) -> dict:
    from .expander import build_graph, cheeger_exact, expander_condition_all, sample_pair, spectrum

    a, c = sample_pair(params["n"], rng)
    g = build_graph(a, c)
    spec = spectrum(g)
    if params["mode"] == "exact":
        bound: Any = cheeger_exact(g).h
        holds, _ = expander_condition_all(a, c, params["lambda"], mode="exact")
    else:
        bound = spec.cheeger_lower_bound
        holds, _ = expander_condition_all(a, c, params["lambda"], mode="spectral")
    return {
        "lambda2": spec.lambda2,
        "cheeger_or_bound": bound,
        "condition_holds": holds,
        "max_abs_nontrivial": spec.max_nontrivial,
        "below_threshold": spec.max_nontrivial <= params["threshold"],
    }


def _trial_extract(params: dict, rng: np.random.Generator) -> dict:
    from .intertwiner import admissible_lambda, extract, perturb_involution, planted_instance

    n = params["n"]
    inst = planted_instance(n, rng, 0, commuting_square=params["commuting_square"])
    perturb = params["perturb"]
    if perturb < 0:
        # negative: draw uniformly from 0 .. |perturb|
        perturb = int(rng.integers(0, -perturb + 1))
    y = perturb_involution(inst.y, perturb, rng)
    lam = params["lambda"] if params["lambda"] is not None else admissible_lambda(inst.x, inst.z)
    report = extract(inst.x, inst.z, y, lam)
    payload = {"perturb": perturb}
    payload.update(report.to_dict())
    payload["recovered_conjugator"] = report.w == inst.u
    return payload


def _trial_fullgroup(params: dict, rng: np.random.Generator) -> dict:
    from .fullgroup import approximate_itm, random_itm

    phi = random_itm(rng, params["max_pieces"], params["max_den"])
    res = approximate_itm(phi, params["epsilon"])
    return {
        "pieces": len(phi.pieces),
        "n": res.n,
        "distance": res.distance,
        "within_bound": res.distance < 2 * params["epsilon"],
    }


def _trial_rep_distance(params: dict, rng: np.random.Generator) -> dict:
    from .perm import random_permutation
    from .rep import WordWeightScheme, conjugate_rep, random_free_rep, rep_distance_upper

    rep1 = random_free_rep(params["n"], rng)
    rep2 = conjugate_rep(rep1, random_permutation(params["n"], rng))
    scheme = WordWeightScheme.shortlex(rep1.generators, params["L"])
    res = rep_distance_upper(rep1, rep2, scheme, params["budget"], seed=int(rng.integers(2**63)))
    return {"squared": res.squared, "evaluations": res.evaluations, "reached_zero": res.squared == 0}


@dataclass(frozen=True)
class Param:
    kind: Callable
    default: Any = None
    required: bool = False
    choices: tuple = ()


def _rational(v) -> Fraction:
    return Fraction(v) if not isinstance(v, float) else Fraction(str(v))


def _opt_rational(v):
    return None if v is None else _rational(v)


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("true", "false", "1", "0"):
        return v.lower() in ("true", "1")
    raise ValueError(f"not a boolean: {v!r}")


TRIAL_SCHEMAS: dict[str, dict[str, Param]] = {
    "expander": {
        "n": Param(int, required=True),
        "lambda": Param(_rational, Fraction(1, 5)),
        "mode": Param(str, "sample", choices=("sample", "exact")),
        "threshold": Param(float, 3.6),
    },
    "extract": {
        "n": Param(int, required=True),
        "lambda": Param(_opt_rational, None),
        "perturb": Param(int, 0),
        "commuting_square": Param(_bool, True),
    },
    "fullgroup": {
        "epsilon": Param(_rational, Fraction(1, 4)),
        "max_pieces": Param(int, 8),
        "max_den": Param(int, 12),
    },
    "rep": {
        "n": Param(int, required=True),
        "L": Param(int, 2),
        "budget": Param(int, 10_000),
    },
}

TRIAL_FUNCTIONS: dict[str, Callable[[dict, np.random.Generator], dict]] = {
    "expander": _trial_expander,
    "extract": _trial_extract,
    "fullgroup": _trial_fullgroup,
    "rep": _trial_rep_distance,
}


def validate_params(subcommand: str, params: dict) -> dict:
    if subcommand not in TRIAL_SCHEMAS:
        raise SchemaError(f"unknown subcommand {subcommand!r}; expected one of {sorted(TRIAL_SCHEMAS)}")
    schema = TRIAL_SCHEMAS[subcommand]
    unknown = set(params) - set(schema)
    if unknown:
        raise SchemaError(f"unknown parameters for {subcommand}: {sorted(unknown)}")
    out = {}
    for name, spec in schema.items():
        if name not in params or params[name] is None:
            if spec.required:
                raise SchemaError(f"missing required parameter {name!r} for {subcommand}")
            out[name] = spec.default
            continue
        try:
            value = spec.kind(params[name])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad value for {name!r}: {exc}") from None
        if spec.choices and value not in spec.choices:
            raise SchemaError(f"{name!r} must be one of {spec.choices}, got {value!r}")
        out[name] = value
    return out


@dataclass
class ExperimentManifest:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    trials: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise SchemaError("seed must be a non-negative integer")
        if not isinstance(self.trials, int) or self.trials < 0:
            raise SchemaError("trials must be a non-negative integer")
        if self.format not in ("json", "csv"):
            raise SchemaError(f"format must be json or csv, got {self.format!r}")
        self.params = validate_params(self.subcommand, self.params)

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentManifest:
        allowed = {"subcommand", "params", "seed", "trials", "out", "format"}
        unknown = set(data) - allowed
        if unknown:
            raise SchemaError(f"unknown manifest keys: {sorted(unknown)}")
        if "subcommand" not in data:
            raise SchemaError("manifest needs a 'subcommand'")
        return cls(**data)

    @classmethod
    def load(cls, path) -> ExperimentManifest:
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "format": self.format,
        }


@dataclass
class TrialRecord:
    index: int
    seed: int
    payload: dict
    wall_time: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        out = {"trial": self.index, "seed": self.seed}
        out.update(self.payload)
        if timing:
            out["wall_time"] = self.wall_time
        return out


@dataclass
class RunResult:
    manifest: ExperimentManifest
    records: list[TrialRecord]
    summary: dict


def _run_one(job) -> TrialRecord:
    subcommand, params, master, index = job
    seed = derive_seed(master, index)
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    try:
        payload = TRIAL_FUNCTIONS[subcommand](params, rng)
    except Exception as exc:  # recorded, run continues
        payload = {"error": f"{type(exc).__name__}: {exc}"}
    return TrialRecord(index, seed, payload, time.perf_counter() - start)


def summarize(records: list[TrialRecord]) -> dict:
    """Exact frequency of every boolean payload field, plus error count."""
    if not records:
        return {}
    ok = [r for r in records if "error" not in r.payload]
    summary: dict[str, Any] = {"trials": len(records), "errors": len(records) - len(ok)}
    keys: list[str] = []
    for r in ok:
        for k, v in r.payload.items():
            if isinstance(v, bool) and k not in keys:
                keys.append(k)
    for k in keys:
        hits = sum(1 for r in ok if r.payload.get(k) is True)
        summary[f"frequency_{k}"] = Fraction(hits, len(ok)) if ok else None
    return summary


def run_manifest(m: ExperimentManifest, jobs: int = 1) -> RunResult:
    work = [(m.subcommand, m.params, m.seed, i) for i in range(m.trials)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        records = [_run_one(job) for job in work]
    records.sort(key=lambda r: r.index)
    return RunResult(m, records, summarize(records))


# ---------------------------------------------------------------- output

def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return ""
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _cell(v) -> str:
    if isinstance(v, (list, tuple, dict, Permutation)):
        return json.dumps(to_jsonable(v), separators=(",", ":"))
    return _scalar(v)


def to_jsonable(v):
    """Fractions become ``"p/q"``; permutations become image lists."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, Permutation):
        return list(v.images)
    if isinstance(v, dict):
        return {str(k): to_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [to_jsonable(x) for x in items]
    if isinstance(v, np.generic):
        return v.item()
    return v


def _write_json(v, out: list[str], indent: int, level: int) -> None:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(v, dict):
        if not v:
            out.append("{}")
            return
        out.append("{")
        for k, (key, item) in enumerate(v.items()):
            out.append(("," if k else "") + pad + json.dumps(key) + ": ")
            _write_json(item, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(v, list):
        if not v:
            out.append("[]")
            return
        out.append("[")
        for k, item in enumerate(v):
            out.append(("," if k else "") + pad)
            _write_json(item, out, indent, level + 1)
        out.append(end + "]")
    elif isinstance(v, float):
        out.append("null" if (math.isnan(v) or math.isinf(v)) else format(v, ".17g"))
    else:
        out.append(json.dumps(v))


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON: insertion key order, floats with 17 significant digits."""
    out: list[str] = []
    _write_json(to_jsonable(obj), out, indent, 0)
    return "".join(out) + "\n"


_RATIONAL = re.compile(r"^-?\d+/\d+$")


def parse_rationals(obj):
    """Inverse of :func:`to_jsonable` for rationals: ``"p/q"`` strings -> Fraction."""
    if isinstance(obj, str) and _RATIONAL.match(obj):
        return Fraction(obj)
    if isinstance(obj, dict):
        return {k: parse_rationals(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [parse_rationals(v) for v in obj]
    return obj


def records_csv(records: list[TrialRecord], columns: list[str] | None = None, timing: bool = False) -> str:
    rows = [r.to_dict(timing) for r in records]
    if columns is None:
        columns = ["trial", "seed"]
        for row in rows:
            for k in row:
                if k not in columns:
                    columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def result_json(result: RunResult, timing: bool = False) -> str:
    return dumps(
        {
            "manifest": result.manifest.to_dict(),
            "records": [r.to_dict(timing) for r in result.records],
            "summary": result.summary,
        }
    )


def emit(result: RunResult, fmt: str | None = None, path: str | None = None, timing: bool = False) -> str:
    """Render ``result`` and write it to ``path`` when given; returns the text."""
    fmt = fmt or result.manifest.format
    if fmt == "csv":
        columns = None
        if result.manifest.subcommand == "expander":
            columns = EXPANDER_COLUMNS + (["wall_time"] if timing else [])
        text = records_csv(result.records, columns, timing)
    elif fmt == "json":
        text = result_json(result, timing)
    else:
        raise SchemaError(f"unknown format {fmt!r}")
    if path:
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    return text


EXPANDER_COLUMNS = ["trial", "seed", "lambda2", "cheeger_or_bound", "condition_holds", "max_abs_nontrivial", "below_threshold"]
