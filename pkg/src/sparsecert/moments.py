"""Truncated moment sequences for sparse power families.

Feasibility on ``[a, b]`` (and ``[0, inf)``) is decided through the dual cone:
a sequence is a truncated moment sequence iff its Riesz functional is
nonnegative on every extremal nonnegative polynomial, i.e. on the
determinantal polynomials with a full-index zero pattern. The extremal
families are searched by a batched low-discrepancy screen followed by local
refinement; a negative value comes with the offending polynomial as a dual
certificate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares, minimize, nnls
from scipy.stats import qmc

from .core import ExponentVector, Interval, SparsePolynomial, power_basis
from .errors import (
    ConfigError,
    DomainError,
    ExponentMismatch,
    InfeasibleSequence,
    NotDense,
    RecoveryFailed,
    ShapeError,
    SingularSystem,
)
from .extremal import knot_matrix
from .tsystem import FunctionFamily

PSD_TOL = 1e-10


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedMomentSequence:
    """Moment values ``s_i`` paired with the exponents ``alpha_i``."""

    exps: ExponentVector
    values: np.ndarray = field(repr=False)

    def __init__(self, exps, values):
        if not isinstance(exps, ExponentVector):
            exps = ExponentVector(exps)
        v = np.array(values, dtype=float).reshape(-1)
        if v.size != len(exps):
            raise ShapeError(f"{v.size} moments given for {len(exps)} exponents")
        if not np.all(np.isfinite(v)):
            raise DomainError("moments must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "values", v)

    @property
    def order(self) -> int:
        return self.exps.order

    def __repr__(self) -> str:
        return f"TruncatedMomentSequence(exps={list(self.exps)}, values={self.values.tolist()})"

    def to_dict(self) -> dict:
        return {"exponents": list(self.exps), "values": self.values.tolist()}


@dataclass(frozen=True)
class AtomicMeasure:
    """``sum_j weights[j] * delta(atoms[j])`` with positive weights."""

    atoms: tuple[float, ...]
    weights: tuple[float, ...]

    def __init__(self, atoms: Sequence[float], weights: Sequence[float]):
        xs = tuple(float(x) for x in atoms)
        ws = tuple(float(w) for w in weights)
        if len(xs) != len(ws):
            raise ShapeError("atoms and weights differ in length")
        if len(set(xs)) != len(xs):
            raise ShapeError("atoms must be pairwise distinct")
        if any(not w > 0 for w in ws):
            raise DomainError("weights must be strictly positive")
        order = np.argsort(xs)
        object.__setattr__(self, "atoms", tuple(xs[i] for i in order))
        object.__setattr__(self, "weights", tuple(ws[i] for i in order))

    def __len__(self) -> int:
        return len(self.atoms)

    def to_dict(self) -> dict:
        return {"atoms": list(self.atoms), "weights": list(self.weights)}


def riesz(s: TruncatedMomentSequence, p: SparsePolynomial) -> float:
    """``L_s(p) = sum_i a_i s_{alpha_i}``."""
    total = 0.0
    for alpha, coeff in zip(p.exps, p.coeffs):
        try:
            k = s.exps.index_of(alpha)
        except KeyError:
            if coeff == 0:
                continue
            raise ExponentMismatch(f"exponent {alpha:g} has no moment") from None
        total += float(coeff) * float(s.values[k])
    return total


def moments_of(mu: AtomicMeasure, exps) -> TruncatedMomentSequence:
    """``s_i = sum_j c_j x_j ** alpha_i``."""
    ev = exps if isinstance(exps, ExponentVector) else ExponentVector(exps)
    if len(mu) == 0:
        return TruncatedMomentSequence(ev, np.zeros(len(ev)))
    vals = power_basis(ev, np.array(mu.atoms)).T @ np.array(mu.weights)
    return TruncatedMomentSequence(ev, vals)


def signed_representation(s: TruncatedMomentSequence, pts: Sequence[float]) -> np.ndarray:
    """Weights ``w_j`` of any sign with ``sum_j w_j x_j ** alpha_i = s_i``."""
    xs = np.asarray(pts, dtype=float).reshape(-1)
    if xs.size != s.order + 1:
        raise ShapeError(f"need {s.order + 1} points, got {xs.size}")
    if np.unique(xs).size != xs.size:
        raise SingularSystem("points must be distinct")
    mat = power_basis(s.exps, xs).T
    scale = np.max(np.abs(mat), axis=0)
    scale[scale == 0] = 1.0
    a = mat / scale
    if np.linalg.matrix_rank(a) < a.shape[0]:
        raise SingularSystem("alternant is singular at these points")
    w = np.linalg.solve(a, s.values) / scale
    return w


# ---------------------------------------------------------------------------
# dense Hankel criteria
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HankelCheck:
    passed: bool
    min_eigenvalue: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "min_eigenvalue": self.min_eigenvalue, "detail": self.detail}


def _hankel(seq: np.ndarray, d: int) -> np.ndarray:
    if d < 0:
        return np.zeros((0, 0))
    return np.array([[seq[i + j] for j in range(d + 1)] for i in range(d + 1)])


def _min_eig(mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(mat)[0]) if mat.size else math.inf


def _psd(mat: np.ndarray) -> bool:
    if not mat.size:
        return True
    ev = np.linalg.eigvalsh(mat)
    return bool(ev[0] >= -PSD_TOL * max(np.sum(np.abs(ev)), 1e-300))


def _rank(mat: np.ndarray) -> int:
    if not mat.size:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(sv > PSD_TOL * max(sv[0], 1e-300)))


def _in_range(mat: np.ndarray, v: np.ndarray) -> bool:
    if not v.size:
        return True
    if not mat.size:
        return bool(np.allclose(v, 0))
    x, *_ = np.linalg.lstsq(mat, v, rcond=PSD_TOL)
    return bool(np.linalg.norm(mat @ x - v) <= 1e-8 * (np.linalg.norm(v) + np.linalg.norm(mat)))


def _check(parts: list[tuple[str, np.ndarray]], extra_ok: bool = True, note: str = "") -> HankelCheck:
    mins = [_min_eig(m) for _, m in parts]
    ok = all(_psd(m) for _, m in parts) and extra_ok
    names = ", ".join(name for name, _ in parts)
    return HankelCheck(ok, float(min(mins)) if mins else math.inf,
                       f"PSD({names})" + (f"; {note}" if note else ""))


def _hamburger(s: np.ndarray) -> HankelCheck:
    n = s.size - 1
    d = n // 2
    h = _hankel(s, d)
    if n % 2 == 1:
        v = s[d + 1: 2 * d + 2]
        return _check([("H(s)", h)], _psd(h) and _in_range(h, v), "tail column in range")
    # first column that depends on the previous ones fixes the rank
    r = h.shape[0]
    for k in range(h.shape[0]):
        if _rank(h[:, : k + 1]) == k:
            r = k
            break
    return _check([("H(s)", h)], _rank(h) == r, "rank condition")


def _stieltjes(s: np.ndarray) -> HankelCheck:
    n = s.size - 1
    xs = s[1:]
    if n % 2 == 0:
        d = n // 2
        a, b = _hankel(s, d), _hankel(xs, d - 1)
        v = s[d + 1: 2 * d + 1]
        return _check([("H(s)", a), ("H(Xs)", b)], _in_range(b, v), "tail column in range")
    d = (n - 1) // 2
    a, b = _hankel(s, d), _hankel(xs, d)
    v = s[d + 1: 2 * d + 2]
    return _check([("H(s)", a), ("H(Xs)", b)], _in_range(a, v), "tail column in range")


def _hausdorff(s: np.ndarray) -> HankelCheck:
    n = s.size - 1
    if n % 2 == 0:
        d = n // 2
        xmx2 = s[1:-1] - s[2:]
        return _check([("H(s)", _hankel(s, d)), ("H((X-X^2)s)", _hankel(xmx2, d - 1))])
    d = (n - 1) // 2
    return _check([("H(Xs)", _hankel(s[1:], d)), ("H((1-X)s)", _hankel(s[:-1] - s[1:], d))])


def _svecov(s: np.ndarray) -> HankelCheck:
    n = s.size - 1
    x2mx = s[2:] - s[1:-1]
    return _check([("H(s)", _hankel(s, n // 2)), ("H((X^2-X)s)", _hankel(x2mx, (n - 2) // 2))],
                  note="necessary conditions only")


def hankel_psd_checks(s: TruncatedMomentSequence) -> dict[str, HankelCheck]:
    """Classical Hankel criteria for dense integer exponents ``0, 1, ..., n``.

    ``hamburger`` (real line), ``stieltjes`` (``[0, inf)``) and ``hausdorff``
    (``[0, 1]``) are the exact truncated conditions; ``svecov`` (support
    ``(-inf, 0] u [1, inf)``) reports the positive semidefiniteness of ``s``
    and ``(X^2 - X) s`` only.
    """
    if tuple(s.exps) != tuple(float(i) for i in range(s.order + 1)):
        raise NotDense("Hankel checks need the exponents 0, 1, ..., n")
    v = np.asarray(s.values)
    return {
        "hamburger": _hamburger(v),
        "stieltjes": _stieltjes(v),
        "hausdorff": _hausdorff(v),
        "svecov": _svecov(v),
    }


# ---------------------------------------------------------------------------
# extremal families on the dual side
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeasibilityConfig:
    """Search settings for :func:`sparse_feasible`.

    ``tol=None`` means ``1e-8 * (1 + max|s|)``.
    """

    tol: float | None = None
    screen: int = 512
    refine: int = 4
    grid: int = 257
    seed: int = 0
    threads: int | None = None

    def __post_init__(self):
        if self.screen < 1 or self.refine < 1 or self.grid < 8:
            raise ConfigError("screen, refine and grid must be positive (grid >= 8)")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")


@dataclass(frozen=True)
class FeasibilityResult:
    status: str  # "feasible" | "infeasible" | "marginal"
    min_value: float
    tol: float
    witness: SparsePolynomial | None = None
    family: str = ""
    knots: tuple[float, ...] = ()
    measure: AtomicMeasure | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "min_value": self.min_value,
            "tol": self.tol,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "family": self.family,
            "knots": list(self.knots),
            "measure": None if self.measure is None else self.measure.to_dict(),
        }


@dataclass
class _DualFamily:
    name: str
    fixed: list
    n_free: int
    at_inf: bool


class _Dual:
    """Batched evaluation of normalised extremal polynomials.

    Everything is carried in an orthonormalised basis (triangular factor of the
    sampled power basis), so coefficient vectors stay well conditioned.
    """

    def __init__(self, s: TruncatedMomentSequence, iv: Interval, grid: int):
        self.s = s
        self.iv = iv
        self.fam = FunctionFamily.powers(s.exps)
        exps = s.exps.as_array()
        n = s.order
        if iv.is_closed:
            self.scale = 1.0
            t = (1 - np.cos(np.linspace(0, np.pi, grid))) / 2
            xg = iv.a + (iv.b - iv.a) * t
            weight = np.ones_like(xg)
        else:
            s0, sn = s.values[0], s.values[-1]
            self.scale = (sn / s0) ** (1.0 / exps[-1]) if s0 > 0 and sn > 0 and exps[-1] > 0 else 1.0
            t = np.linspace(0, 1, grid + 1)[:-1]
            xg = self.scale * t / (1 - t)
            weight = (1.0 + xg / self.scale) ** -exps[-1]
        self.xgrid = xg
        vals = self.fam.values(xg) * weight[:, None]
        r = np.linalg.qr(vals, mode="r")
        self.minv = np.linalg.solve(r, np.eye(n + 1))
        self.wgrid = vals @ self.minv
        self.s_g = self.minv.T @ s.values
        self.families = self._families()
        self._fixed_cache: dict[str, np.ndarray] = {}

    def _families(self) -> list[_DualFamily]:
        n = self.s.order
        m = n // 2
        a, b = self.iv.a, self.iv.b
        if self.iv.is_closed:
            if n % 2 == 0:
                fams = [_DualFamily("interior", [], m, False)]
                if m >= 1:
                    fams.append(_DualFamily("endpoints", [(a, 1), (b, 1)], m - 1, False))
            else:
                fams = [_DualFamily("left", [(a, 1)], m, False),
                        _DualFamily("right", [(b, 1)], m, False)]
        else:
            if n % 2 == 0:
                fams = [_DualFamily("interior", [], m, False)]
                if m >= 1:
                    fams.append(_DualFamily("zero-top", [(0.0, 1)], m - 1, True))
            else:
                fams = [_DualFamily("zero", [(0.0, 1)], m, False),
                        _DualFamily("top", [], m, True)]
        return fams

    def _fixed_rows(self, fam: _DualFamily) -> np.ndarray:
        key = fam.name
        if key not in self._fixed_cache:
            rows = knot_matrix(self.fam, fam.fixed)
            if fam.at_inf:
                rows = np.vstack([rows, np.eye(self.s.order + 1)[-1]])
            self._fixed_cache[key] = rows
        return self._fixed_cache[key]

    def _values(self, x: np.ndarray, order: int) -> np.ndarray:
        if np.all(x > 0):
            # fast path for interior knots
            alphas = self.s.exps.as_array()
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.exp(np.outer(np.log(x), alphas - order))
                if order == 1:
                    out *= alphas
            return out
        with np.errstate(over="ignore", invalid="ignore"):
            try:
                return self.fam.values(x, order)
            except DomainError:
                out = np.full((x.size, self.s.order + 1), np.nan)
                for i, xi in enumerate(x):
                    try:
                        out[i] = self.fam.values(xi, order)[0]
                    except DomainError:
                        pass
                return out

    def knots_from_unit(self, t: np.ndarray) -> np.ndarray:
        if self.iv.is_closed:
            return self.iv.a + (self.iv.b - self.iv.a) * t
        return self.scale * t / (1 - t)

    def evaluate(self, fam: _DualFamily, t: np.ndarray):
        """Riesz values of the normalised, nonnegatively oriented polynomials.

        ``t`` has shape ``(B, n_free)`` with increasing rows in ``(0, 1)``.
        Returns ``(values, coefficient vectors in the orthonormal basis)``;
        degenerate knot rows give ``nan``.
        """
        n1 = self.s.order + 1
        fixed = self._fixed_rows(fam)
        bsz = t.shape[0]
        rows = np.empty((bsz, n1 - 1, n1))
        rows[:, : fixed.shape[0]] = fixed
        if fam.n_free:
            x = self.knots_from_unit(np.clip(t, 1e-12, 1 - 1e-9)).ravel()
            free = np.empty((bsz, 2 * fam.n_free, n1))
            free[:, 0::2] = self._values(x, 0).reshape(bsz, fam.n_free, n1)
            free[:, 1::2] = self._values(x, 1).reshape(bsz, fam.n_free, n1)
            rows[:, fixed.shape[0]:] = free
        if n1 == 1:
            q = np.ones((bsz, 1)) / self.wgrid[np.argmax(np.abs(self.wgrid[:, 0])), 0]
            return q @ self.s_g, q
        rows = rows @ self.minv
        bad = ~np.all(np.isfinite(rows), axis=(1, 2))
        rows[bad] = 0.0
        norms = np.linalg.norm(rows, axis=2, keepdims=True)
        norms[norms == 0] = 1.0
        _, sv, vt = np.linalg.svd(rows / norms)
        q = vt[:, -1, :]
        degenerate = bad | (sv[:, -1] <= 1e-12 * sv[:, 0])
        vals = q @ self.wgrid.T
        k = np.argmax(np.abs(vals), axis=1)
        peak = vals[np.arange(bsz), k]
        q = q / peak[:, None]
        out = q @ self.s_g
        out[degenerate] = np.nan
        return out, q

    def polynomial(self, q: np.ndarray) -> SparsePolynomial:
        return SparsePolynomial(self.s.exps, self.minv @ q)


def _unit_knots(v: np.ndarray) -> np.ndarray:
    z = np.c_[v, np.zeros(v.shape[0])]
    w = np.exp(z - z.max(axis=1, keepdims=True))
    w /= w.sum(axis=1, keepdims=True)
    return np.cumsum(w, axis=1)[:, :-1]


def _unit_logits(t: np.ndarray) -> np.ndarray:
    gaps = np.diff(np.c_[np.zeros(t.shape[0]), t, np.ones(t.shape[0])], axis=1)
    gaps = np.maximum(gaps, 1e-300)
    return np.log(gaps[:, :-1]) - np.log(gaps[:, -1:])


def _threads(cfg: FeasibilityConfig) -> int:
    if cfg.threads is not None:
        return max(1, cfg.threads)
    try:
        return max(1, int(os.environ.get("SPARSECERT_THREADS", "1")))
    except ValueError:
        raise ConfigError("SPARSECERT_THREADS must be an integer") from None


def _search(dual: _Dual, cfg: FeasibilityConfig):
    """Global minimum of the normalised Riesz value over all extremal families."""
    results = []
    jobs = []
    for fi, fam in enumerate(dual.families):
        if fam.n_free == 0:
            val, q = dual.evaluate(fam, np.zeros((1, 0)))
            results.append((float(val[0]), fi, (), q[0]))
            continue
        sob = qmc.Sobol(d=fam.n_free, scramble=True, seed=cfg.seed + fi)
        pts = np.sort(sob.random(cfg.screen), axis=1)
        pts = np.clip(pts, 1e-6, 1 - 1e-6)
        vals, _ = dual.evaluate(fam, pts)
        vals = np.where(np.isnan(vals), np.inf, vals)
        order = np.argsort(vals, kind="stable")[: cfg.refine]
        for k in order:
            jobs.append((fi, pts[k]))

    def refine(job):
        fi, t0 = job
        fam = dual.families[fi]

        def obj(v):
            val, _ = dual.evaluate(fam, _unit_knots(v[None, :]))
            return float(val[0]) if np.isfinite(val[0]) else 1e6

        v0 = _unit_logits(t0[None, :])[0]
        res = minimize(obj, v0, method="Nelder-Mead",
                       options={"xatol": 1e-9, "fatol": 1e-15, "maxiter": 400 * fam.n_free})
        t = _unit_knots(res.x[None, :])
        val, q = dual.evaluate(fam, t)
        return (float(val[0]), fi, tuple(dual.knots_from_unit(t[0]).tolist()), q[0])

    workers = _threads(cfg)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results.extend(ex.map(refine, jobs))
    else:
        results.extend(refine(j) for j in jobs)
    results = [r for r in results if np.isfinite(r[0])]
    if not results:
        raise RecoveryFailed("every extremal polynomial evaluation was degenerate")
    best = min(r[0] for r in results)
    ties = [r for r in results if r[0] <= best + 1e-12]
    return min(ties, key=lambda r: (r[1], r[2]))


def _check_support(s: TruncatedMomentSequence, iv: Interval) -> None:
    """Exponent/interval combinations covered by the dual characterisation."""
    if iv.is_closed:
        try:
            iv.check_exponents(s.exps)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if iv.a < 0:
            raise ConfigError("moment feasibility needs a >= 0")
        if iv.a == 0 and s.exps[0] != 0:
            raise ConfigError("on [0, b] the first exponent must be 0")
    elif s.exps[0] != 0:
        raise ConfigError("on [0, inf) the exponents must start with 0")


def sparse_feasible(s: TruncatedMomentSequence, iv: Interval,
                    cfg: FeasibilityConfig | None = None) -> FeasibilityResult:
    """Decide whether ``s`` is a truncated moment sequence on ``iv``.

    The minimum of ``L_s(p)`` over the normalised extremal polynomials decides:
    below ``-tol`` the sequence is infeasible and the minimiser is returned as
    witness, above ``tol`` it is feasible. In between an atomic representing
    measure is sought; success gives ``feasible`` (with the measure), failure
    ``marginal``.
    """
    cfg = cfg or FeasibilityConfig()
    _check_support(s, iv)
    tol = cfg.tol if cfg.tol is not None else 1e-8 * (1 + float(np.max(np.abs(s.values))))
    dual = _Dual(s, iv, cfg.grid)
    val, fi, knots, q = _search(dual, cfg)
    fam = dual.families[fi].name
    witness = dual.polynomial(q)
    if val >= tol:
        return FeasibilityResult("feasible", val, tol, None, fam, knots)
    # close to the boundary the dual value is noisy; a reproducing measure overrides it
    mu = _recover(s, iv, hint=knots) if val > -1e3 * tol else None
    if val <= -tol and mu is None:
        return FeasibilityResult("infeasible", val, tol, witness, fam, knots)
    if mu is not None:
        return FeasibilityResult("feasible", val, tol, None, fam, knots, mu)
    return FeasibilityResult("marginal", val, tol, witness, fam, knots)


# ---------------------------------------------------------------------------
# atom recovery
# ---------------------------------------------------------------------------

def _recovery_grid(s: TruncatedMomentSequence, iv: Interval, size: int) -> np.ndarray:
    if iv.is_closed:
        return np.linspace(iv.a, iv.b, size)
    exps = s.exps.as_array()
    s0, sn = s.values[0], s.values[-1]
    scale = (sn / s0) ** (1.0 / exps[-1]) if s0 > 0 and sn > 0 and exps[-1] > 0 else 1.0
    # atoms beyond a few hundred typical scales carry negligible weight
    top = 200.0 / 201.0
    t = np.linspace(0, top, size)
    return scale * t / (1 - t)


def _grid_measure(s, iv, xs, rs, merge: bool = True) -> AtomicMeasure | None:
    """Nonnegative least squares on a grid, neighbouring grid atoms merged and polished."""
    target = np.asarray(s.values)
    a = power_basis(s.exps, xs).T
    cs = np.max(np.abs(a * rs[:, None]), axis=0)
    cs[cs == 0] = 1.0
    w, _ = nnls(a * rs[:, None] / cs, target * rs, maxiter=50 * a.shape[1])
    w = w / cs
    idx = np.flatnonzero(w > 0)
    if idx.size == 0:
        return None
    groups: list[list[int]] = [[idx[0]]]
    for i in idx[1:]:
        if merge and i - groups[-1][-1] <= 1:
            groups[-1].append(i)
        else:
            groups.append([i])
    atoms = np.array([np.average(xs[g], weights=w[g]) for g in groups])
    weights = np.array([w[g].sum() for g in groups])
    return _polish(s, iv, atoms, weights, rs)


def _sparsest(s, iv, mu: AtomicMeasure, rs, tol: float) -> AtomicMeasure:
    """Try fewer atoms, seeded by splitting ``mu`` at its widest gaps."""
    x, w = np.array(mu.atoms), np.array(mu.weights)
    for k in range(1, len(mu)):
        cuts = np.sort(np.argsort(np.diff(x))[::-1][: k - 1]) + 1
        parts = np.split(np.arange(x.size), cuts)
        atoms = np.array([np.average(x[p], weights=w[p]) for p in parts])
        weights = np.array([w[p].sum() for p in parts])
        cand = _polish(s, iv, atoms, weights, rs)
        if cand is not None and len(cand) <= k and _moment_error(cand, s) <= tol:
            return cand
    return mu


def _recover(s: TruncatedMomentSequence, iv: Interval, sizes=(2001, 20001),
             hint=None) -> AtomicMeasure | None:
    """Atomic measure reproducing ``s``; ``hint`` are candidate atoms tried first."""
    target = np.asarray(s.values)
    tol = 1e-9 * (1 + float(np.max(np.abs(target))))
    if np.max(np.abs(target)) == 0:
        return AtomicMeasure([], [])
    grids = [_recovery_grid(s, iv, size) for size in sizes]
    if hint is not None and len(hint):
        ends = [iv.a, iv.b] if iv.is_closed else [0.0]
        grids.insert(0, np.unique(np.r_[np.asarray(hint, dtype=float), ends]))
    for gi, xs in enumerate(grids):
        amax = np.max(np.abs(power_basis(s.exps, xs)), axis=0)
        # two row scalings: relative to the data, and damped for steep powers
        for damp in (1.0, 1e-3):
            rs = 1.0 / (np.abs(target) + damp * amax)
            mu = _grid_measure(s, iv, xs, rs, merge=hint is None or gi > 0)
            if mu is not None and _moment_error(mu, s) <= tol and len(mu) <= s.order + 1:
                return _sparsest(s, iv, mu, rs, tol)
    return None


def _moment_error(mu: AtomicMeasure, s: TruncatedMomentSequence) -> float:
    return float(np.max(np.abs(moments_of(mu, s.exps).values - s.values)))


def _polish(s, iv, atoms, weights, rs) -> AtomicMeasure | None:
    lo = iv.a if iv.is_closed else 0.0
    hi = iv.b if iv.is_closed else np.inf
    target = np.asarray(s.values)

    def resid(z):
        k = z.size // 2
        x, w = z[:k], z[k:]
        return (power_basis(s.exps, x).T @ w - target) * rs

    z0 = np.r_[np.clip(atoms, lo, hi), weights]
    k = atoms.size
    if np.max(np.abs(resid(z0))) <= 1e-15:
        return _measure(atoms, weights)
    bounds = (np.r_[np.full(k, lo), np.zeros(k)], np.r_[np.full(k, hi), np.full(k, np.inf)])
    try:
        res = least_squares(resid, z0, bounds=bounds, xtol=1e-15, ftol=1e-15, gtol=1e-15,
                            max_nfev=2000)
        z = res.x
        if np.linalg.norm(resid(z)) > np.linalg.norm(resid(z0)):
            z = z0
    except (ValueError, DomainError):
        z = z0
    x, w = z[:k], z[k:]
    x = np.where(np.abs(x - lo) <= 1e-9 * max(1.0, abs(lo)), lo, x)
    if np.isfinite(hi):
        x = np.where(np.abs(x - hi) <= 1e-9 * max(1.0, abs(hi)), hi, x)
    return _measure(x, w)


def _measure(x, w) -> AtomicMeasure | None:
    x, w = np.asarray(x, dtype=float), np.asarray(w, dtype=float)
    keep = w > 1e-10 * max(1.0, float(np.max(w)) if w.size else 1.0)
    x, w = x[keep], w[keep]
    # atoms that collapsed onto each other are merged
    order = np.argsort(x)
    x, w = x[order], w[order]
    mx, mw = [], []
    for xi, wi in zip(x, w):
        if mx and abs(xi - mx[-1]) <= 1e-12 * max(1.0, abs(xi)):
            mw[-1] += wi
        else:
            mx.append(xi)
            mw.append(wi)
    try:
        return AtomicMeasure(mx, mw)
    except (ShapeError, DomainError):
        return None


def recover_atoms(s: TruncatedMomentSequence, iv: Interval,
                  cfg: FeasibilityConfig | None = None) -> AtomicMeasure:
    """An atomic representing measure with at most ``n + 1`` atoms.

    Raises
    ------
    InfeasibleSequence
        If no measure exists; ``witness`` is a nonnegative polynomial with
        negative Riesz value.
    RecoveryFailed
        If the search fails on a sequence that is not shown infeasible.
    """
    _check_support(s, iv)
    mu = _recover(s, iv)
    if mu is not None:
        return mu
    verdict = sparse_feasible(s, iv, cfg)
    if verdict.status == "infeasible":
        raise InfeasibleSequence("sequence has no representing measure",
                                 witness=verdict.witness, riesz_value=verdict.min_value)
    if verdict.measure is not None:
        return verdict.measure
    raise RecoveryFailed("no atomic measure reproduces the moments", status=verdict.status,
                         min_value=verdict.min_value)
