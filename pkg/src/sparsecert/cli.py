"""Command-line front end.

Every subcommand reads one JSON problem document (``version: 1``), runs the
matching library operation and prints a JSON report (or a CSV table) on
standard output. Numbers in the document may be JSON numbers or decimal
strings.

Exit codes: 0 success (pass, feasible), 1 failure with a certificate in the
report (fail, infeasible, not positive), 2 usage or input error, 3 numerical
failure or an undecided verdict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import karlin, moments
from .core import Interval, SparsePolynomial, power_basis
from .errors import (
    InfeasibleSequence,
    InputError,
    NotStrictlyPositive,
    NumericalFailure,
    SparsecertError,
)
from .tsystem import FunctionFamily, SamplingConfig, is_et_system, is_t_system

FORMAT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

TASKS = ("check-tsystem", "check-etsystem", "decompose", "certify-nonneg",
         "moment-check", "recover-atoms", "signed-repr", "hankel")


class UsageError(InputError):
    pass


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _num(value, what: str) -> float:
    if isinstance(value, bool) or value is None:
        raise UsageError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            raise UsageError(f"{what}: {value!r} is not a decimal number") from None
    raise UsageError(f"{what}: expected a number, got {type(value).__name__}")


def _nums(values, what: str) -> list[float]:
    if not isinstance(values, list):
        raise UsageError(f"{what}: expected a list")
    return [_num(v, f"{what}[{i}]") for i, v in enumerate(values)]


def _field(doc: dict, key: str):
    if key not in doc:
        raise UsageError(f"missing field {key!r}")
    return doc[key]


def _interval(doc: dict) -> Interval:
    node = _field(doc, "interval")
    if not isinstance(node, dict):
        raise UsageError("interval: expected an object")
    kind = node.get("kind", "closed")
    if kind == "halfline":
        return Interval.halfline()
    return Interval.closed(_num(_field(node, "a"), "interval.a"), _num(_field(node, "b"), "interval.b"))


def _family(doc: dict) -> FunctionFamily:
    node = _field(doc, "family")
    if not isinstance(node, dict):
        raise UsageError("family: expected an object")
    kind = node.get("kind", "powers")
    if kind == "powers":
        return FunctionFamily.powers(_nums(_field(node, "exponents"), "family.exponents"))
    if kind == "exponentials":
        return FunctionFamily.exponentials(_nums(_field(node, "rates"), "family.rates"))
    if kind == "cauchy":
        return FunctionFamily.cauchy(_nums(_field(node, "shifts"), "family.shifts"))
    raise UsageError(f"family.kind: unknown family {kind!r}")


def _polynomial(doc: dict) -> SparsePolynomial:
    node = _field(doc, "polynomial")
    if not isinstance(node, dict):
        raise UsageError("polynomial: expected an object")
    return SparsePolynomial(_nums(_field(node, "exponents"), "polynomial.exponents"),
                            _nums(_field(node, "coefficients"), "polynomial.coefficients"))


def _sequence(doc: dict) -> moments.TruncatedMomentSequence:
    node = _field(doc, "sequence")
    if not isinstance(node, dict):
        raise UsageError("sequence: expected an object")
    return moments.TruncatedMomentSequence(_nums(_field(node, "exponents"), "sequence.exponents"),
                                           _nums(_field(node, "values"), "sequence.values"))


def load_problem(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise UsageError("problem document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise UsageError(f"unsupported version {doc.get('version')!r}, expected {FORMAT_VERSION}")
    return doc


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _decomposition_csv(report: dict) -> str:
    rows = []
    for part in ("knots_star", "knots_upper"):
        for k in report.get(part, {}).get("knots", []):
            rows.append([part, k["location"], k["multiplicity"]])
    return _csv(["part", "location", "multiplicity"], rows)


def _to_csv(task: str, report: dict) -> str:
    if task in ("decompose", "certify-nonneg"):
        if "knots_star" not in report:
            return _csv(["status", "witness"], [[report["status"], report.get("witness")]])
        return _decomposition_csv(report)
    if task in ("check-tsystem", "check-etsystem"):
        w = report.get("witness")
        return _csv(["status", "witness", "min_relative_det"],
                    [[report["status"], "" if w is None else " ".join(map(repr, w)),
                      report["min_relative_det"]]])
    if task == "moment-check":
        w = report.get("witness")
        rows = [[report["status"], report["min_value"], "", ""]]
        if w is not None:
            rows += [["witness", "", e, c] for e, c in zip(w["exponents"], w["coefficients"])]
        measure = report.get("measure")
        if measure is not None:
            rows += [["atom", "", x, c] for x, c in zip(measure["atoms"], measure["weights"])]
        return _csv(["kind", "min_value", "key", "value"], rows)
    if task == "recover-atoms":
        if "atoms" not in report:
            return _csv(["status"], [[report["status"]]])
        return _csv(["atom", "weight"], list(zip(report["atoms"], report["weights"])))
    if task == "signed-repr":
        return _csv(["point", "weight"], list(zip(report["points"], report["weights"])))
    if task == "hankel":
        return _csv(["condition", "passed", "min_eigenvalue"],
                    [[k, v["passed"], v["min_eigenvalue"]] for k, v in sorted(report["checks"].items())])
    raise UsageError(f"no CSV layout for {task}")


def write_samples(dec: karlin.Decomposition, count: int, path: Path) -> None:
    """``x, f, f_star, f_upper`` at ``count`` points for external plotting."""
    if count < 2:
        raise UsageError("--emit-samples needs at least 2 points")
    if dec.interval.is_closed:
        xs = np.linspace(dec.interval.a, dec.interval.b, count)
    else:
        xs = np.linspace(0.0, karlin.halfline_tail_bound(dec.f), count)
    rows = [[x, a, b, c] for x, a, b, c in zip(xs, dec.f(xs), dec.f_star(xs), dec.f_upper(xs))]
    path.write_text(_csv(["x", "f", "f_star", "f_upper"], rows), encoding="utf-8")


# ---------------------------------------------------------------------------
# tasks
# ---------------------------------------------------------------------------

def _settings(doc: dict, args) -> tuple[float | None, int]:
    tol = args.tol if args.tol is not None else (None if "tol" not in doc else _num(doc["tol"], "tol"))
    seed = args.seed if args.seed is not None else int(_num(doc.get("seed", 0), "seed"))
    if tol is not None and not tol > 0:
        raise UsageError("tol must be positive")
    return tol, seed


def _task_tsystem(doc, args, et: bool):
    fam = _family(doc)
    iv = _interval(doc)
    _, seed = _settings(doc, args)
    mode = doc.get("mode", "et" if et else "t")
    if mode not in ("t", "et"):
        raise UsageError("mode must be 't' or 'et'")
    kw = {"seed": seed}
    if args.grid is not None:
        kw["points_per_dim"] = args.grid
    cfg = SamplingConfig(**kw)
    verdict = (is_et_system if mode == "et" else is_t_system)(fam, iv, cfg)
    report = {"mode": mode, **verdict.to_dict()}
    code = {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(verdict.status, EXIT_NUMERIC)
    return report, code


def _reverified(dec: karlin.Decomposition, tol: float) -> dict:
    check = karlin.verify(dec)
    bound = tol * check["norm"]
    if check["residual"] > bound or min(check["min_star"], check["min_upper"]) < -bound:
        raise NumericalFailure("decomposition failed independent re-verification", **check)
    return check


def _task_decompose(doc, args, certify: bool):
    f = _polynomial(doc)
    iv = _interval(doc)
    tol, seed = _settings(doc, args)
    tol = karlin.DEFAULT_TOL if tol is None else tol
    kw = {"tol": tol, "seed": seed}
    if args.grid is not None:
        kw["grid_size"] = args.grid
    try:
        if certify:
            dec = karlin.certify_nonneg(f, iv, **kw)
        elif iv.is_closed:
            dec = karlin.decompose_interval(f, iv, **kw)
        else:
            dec = karlin.decompose_halfline(f, **kw)
    except NotStrictlyPositive as exc:
        return {"status": "not-positive", "error": exc.code, "message": str(exc),
                "witness": exc.details.get("witness")}, EXIT_FAIL
    report = {"status": "ok", **dec.to_dict(), "verification": _reverified(dec, tol)}
    if args.emit_samples:
        path = Path(args.samples_path) if args.samples_path else Path(args.input).with_suffix(".samples.csv")
        write_samples(dec, args.emit_samples, path)
        report["samples_path"] = str(path)
    return report, EXIT_OK


def _feasibility_cfg(tol, seed, args) -> moments.FeasibilityConfig:
    kw = {"tol": tol, "seed": seed}
    if args.grid is not None:
        kw["grid"] = args.grid
    return moments.FeasibilityConfig(**kw)


def _task_moment_check(doc, args):
    s = _sequence(doc)
    iv = _interval(doc)
    tol, seed = _settings(doc, args)
    res = moments.sparse_feasible(s, iv, _feasibility_cfg(tol, seed, args))
    code = {"feasible": EXIT_OK, "infeasible": EXIT_FAIL}.get(res.status, EXIT_NUMERIC)
    return res.to_dict(), code


def _task_recover(doc, args):
    s = _sequence(doc)
    iv = _interval(doc)
    tol, seed = _settings(doc, args)
    try:
        mu = moments.recover_atoms(s, iv, _feasibility_cfg(tol, seed, args))
    except InfeasibleSequence as exc:
        w = exc.details.get("witness")
        return {"status": "infeasible", "riesz_value": exc.details.get("riesz_value"),
                "witness": None if w is None else w.to_dict()}, EXIT_FAIL
    err = float(np.max(np.abs(moments.moments_of(mu, s.exps).values - s.values)))
    return {"status": "ok", **mu.to_dict(), "moment_error": err}, EXIT_OK


def _task_signed(doc, args):
    s = _sequence(doc)
    pts = _nums(_field(doc, "points"), "points")
    w = moments.signed_representation(s, pts)
    resid = float(np.max(np.abs(power_basis(s.exps, pts).T @ w - s.values)))
    return {"status": "ok", "points": pts, "weights": w.tolist(), "residual": resid,
            "any_negative": bool(np.any(w < 0))}, EXIT_OK


def _task_hankel(doc, args):
    s = _sequence(doc)
    checks = moments.hankel_psd_checks(s)
    return {"status": "ok", "checks": {k: v.to_dict() for k, v in checks.items()}}, EXIT_OK


def _dispatch(task: str, doc: dict, args):
    if task == "check-tsystem":
        return _task_tsystem(doc, args, et=False)
    if task == "check-etsystem":
        return _task_tsystem(doc, args, et=True)
    if task == "decompose":
        return _task_decompose(doc, args, certify=False)
    if task == "certify-nonneg":
        return _task_decompose(doc, args, certify=True)
    if task == "moment-check":
        return _task_moment_check(doc, args)
    if task == "recover-atoms":
        return _task_recover(doc, args)
    if task == "signed-repr":
        return _task_signed(doc, args)
    return _task_hankel(doc, args)


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsecert", description="Sparse positivity certificates and moment problems.")
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--input", required=True, metavar="PATH", help="problem document (JSON)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--grid", type=int, default=None,
                        help="sampling density (T-checks), verification grid (decompositions) "
                             "or dual grid (moment checks)")
    parser.add_argument("--emit-samples", type=int, default=0, metavar="N",
                        help="write N (x, f, f_star, f_upper) samples as CSV")
    parser.add_argument("--samples-path", default=None, metavar="PATH",
                        help="where --emit-samples writes (default: <input>.samples.csv)")
    return parser


def _report_error(exc: SparsecertError, stream) -> None:
    payload = {"code": exc.code, "message": str(exc)}
    details = {k: v for k, v in exc.details.items() if not isinstance(v, SparsePolynomial)}
    if details:
        payload["details"] = details
    stream.write(dumps(payload))


def run(argv=None, stdout=None, stderr=None) -> int:
    """Run one subcommand; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        doc = load_problem(args.input)
        if doc.get("task", args.task) != args.task:
            raise UsageError(f"document task {doc['task']!r} does not match subcommand {args.task!r}")
        report, code = _dispatch(args.task, doc, args)
    except InputError as exc:
        _report_error(exc, stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        _report_error(exc, stderr)
        return EXIT_NUMERIC
    except SparsecertError as exc:
        _report_error(exc, stderr)
        return EXIT_FAIL
    report = {"version": FORMAT_VERSION, "task": args.task, **report}
    if isinstance(report.get("witness"), SparsePolynomial):
        report["witness"] = report["witness"].to_dict()
    stdout.write(dumps(report) if args.format == "json" else _to_csv(args.task, _clean(report)))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
