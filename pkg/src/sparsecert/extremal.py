"""Polynomials with prescribed zeros, interpolation and zero counting.

A "polynomial" here is a real combination of the members of a
:class:`~sparsecert.tsystem.FunctionFamily`. Power families produce
:class:`~sparsecert.core.SparsePolynomial` objects, other families a
:class:`FamilyCombination`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import Interval, SparsePolynomial
from .errors import (
    ConstructionFailed,
    DegenerateDeterminant,
    DomainError,
    IdenticallyZero,
    IndexTooLarge,
    ShapeError,
    SingularSystem,
)
from .tsystem import MAX_MULTIPLICITY, FunctionFamily, determinant, knot_rows


# ---------------------------------------------------------------------------
# knot sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Knot:
    location: float
    multiplicity: int = 1
    endpoint: bool = False


def _is_endpoint(iv: Interval, x: float) -> bool:
    return x == iv.a or (iv.is_closed and x == iv.b)


@dataclass(frozen=True)
class KnotSet:
    """Ordered zero locations with multiplicities on an interval.

    Entries may be given as :class:`Knot`, ``(location, multiplicity)`` pairs or
    bare locations. The endpoint flag is derived from the location.
    """

    interval: Interval
    entries: tuple[Knot, ...] = field(default=())

    def __init__(self, interval: Interval, entries: Iterable = ()):
        knots = []
        for e in entries:
            if isinstance(e, Knot):
                x, m = e.location, e.multiplicity
            elif isinstance(e, (tuple, list)):
                x, m = e
            else:
                x, m = e, 1
            x, m = float(x), int(m)
            if not interval.contains(x):
                raise DomainError(f"knot {x} outside {interval}")
            if not 1 <= m <= MAX_MULTIPLICITY:
                raise ShapeError(f"knot multiplicity must be in 1..{MAX_MULTIPLICITY}, got {m}")
            knots.append(Knot(x, m, _is_endpoint(interval, x)))
        for lo, hi in zip(knots, knots[1:]):
            if not lo.location < hi.location:
                raise ShapeError("knot locations must be strictly increasing")
        object.__setattr__(self, "interval", interval)
        object.__setattr__(self, "entries", tuple(knots))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def locations(self) -> np.ndarray:
        return np.array([k.location for k in self.entries])

    @property
    def interior(self) -> np.ndarray:
        return np.array([k.location for k in self.entries if not k.endpoint])

    @property
    def endpoints(self) -> tuple[float, ...]:
        return tuple(k.location for k in self.entries if k.endpoint)

    @property
    def total_multiplicity(self) -> int:
        return sum(k.multiplicity for k in self.entries)

    @property
    def index(self) -> int:
        return index(self)

    def to_dict(self) -> dict:
        return {
            "knots": [
                {"location": k.location, "multiplicity": k.multiplicity, "endpoint": k.endpoint}
                for k in self.entries
            ],
            "index": self.index,
        }


def index(ks: KnotSet) -> int:
    """Sum of ``eps(x)`` over the knots: 2 for interior points, 1 for endpoints."""
    return sum(1 if k.endpoint else 2 for k in ks.entries)


# ---------------------------------------------------------------------------
# combinations of family members
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FamilyCombination:
    """``sum_i coeffs[i] * f_i`` for a general function family."""

    fam: FunctionFamily
    coeffs: np.ndarray

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        vals = self.fam.values(x) @ self.coeffs
        return float(vals[0]) if scalar else vals

    def derivative(self, x, order: int = 1):
        scalar = np.ndim(x) == 0
        vals = self.fam.values(x, order) @ self.coeffs
        return float(vals[0]) if scalar else vals

    @property
    def order(self) -> int:
        return self.fam.order

    def to_dict(self) -> dict:
        return {"family": self.fam.kind, "coefficients": list(map(float, self.coeffs))}


def combination(fam: FunctionFamily, coeffs) -> SparsePolynomial | FamilyCombination:
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    if c.size != fam.order + 1:
        raise ShapeError(f"{c.size} coefficients for a family of order {fam.order}")
    if fam.kind == "powers":
        return SparsePolynomial(fam.exponents, c)
    c = c.copy()
    c.setflags(write=False)
    return FamilyCombination(fam, c)


def interpolate(fam: FunctionFamily, pts: Sequence[float], vals: Sequence[float]):
    """The unique member of the span with ``f(x_i) = y_i`` at ``n + 1`` distinct nodes."""
    xs = np.asarray(pts, dtype=float).reshape(-1)
    ys = np.asarray(vals, dtype=float).reshape(-1)
    if xs.size != fam.order + 1 or ys.size != xs.size:
        raise ShapeError(f"need {fam.order + 1} nodes and values")
    if np.unique(xs).size != xs.size:
        raise ShapeError("interpolation nodes must be distinct")
    mat = fam.values(xs)
    scale = np.max(np.abs(mat), axis=0)
    scale[scale == 0] = 1.0
    a = mat / scale
    if np.linalg.matrix_rank(a) < a.shape[0]:
        raise SingularSystem("alternant is singular at these nodes", nodes=xs.tolist())
    coeffs = np.linalg.solve(a, ys) / scale
    resid = np.abs(mat @ coeffs - ys)
    if np.any(resid > 1e-9 * (1 + np.abs(ys))):
        raise SingularSystem("alternant too ill-conditioned", residual=float(resid.max()))
    return combination(fam, coeffs)


# ---------------------------------------------------------------------------
# determinantal construction
# ---------------------------------------------------------------------------

def knot_matrix(fam: FunctionFamily, knots: Iterable[tuple[float, int]]) -> np.ndarray:
    """Stack the value/derivative rows of ``(location, multiplicity)`` pairs."""
    rows = [knot_rows(fam, x, m, limit_at_zero=True) for x, m in knots]
    if not rows:
        return np.zeros((0, fam.order + 1))
    return np.vstack(rows)


def cofactor_vector(rows: np.ndarray, rank_tol: float = 1e-12) -> np.ndarray:
    """Coefficients of ``x -> det([f(x); rows])`` for an ``n x (n+1)`` matrix.

    Raises :class:`DegenerateDeterminant` if ``rows`` is rank deficient, which
    is exactly when that determinant vanishes identically.
    """
    n, n1 = rows.shape
    if n1 != n + 1:
        raise ShapeError(f"need {n1 - 1} knot rows, got {n}")
    if n == 0:
        return np.ones(1)
    col = np.max(np.abs(rows), axis=0)
    col[col == 0] = 1.0
    rnorm = np.linalg.norm(rows / col, axis=1)
    if np.any(rnorm == 0):
        raise DegenerateDeterminant("a knot row vanishes identically")
    scaled = rows / col / rnorm[:, None]
    _, sv, vt = np.linalg.svd(scaled)
    if sv[-1] <= rank_tol * sv[0]:
        raise DegenerateDeterminant("knot rows are linearly dependent", singular_values=sv.tolist())
    q = vt[-1] / col
    q /= np.linalg.norm(q)
    return determinant(np.vstack([q, rows])) * q


def _check_grid(iv: Interval, ks_locations: np.ndarray, size: int = 2001) -> np.ndarray:
    if iv.is_closed:
        return np.linspace(iv.a, iv.b, size)
    top = 10.0 * (1.0 + (ks_locations.max() if ks_locations.size else 0.0))
    return np.linspace(0.0, top, size)


def _normalize(fam, coeffs, normalization, xs):
    if isinstance(normalization, (int, float)) and not isinstance(normalization, bool):
        return coeffs * float(normalization)
    if isinstance(normalization, tuple):
        x0, target = normalization
        v = float((fam.values([x0]) @ coeffs)[0])
        if v == 0:
            raise ConstructionFailed(f"polynomial vanishes at the normalization point {x0}")
        return coeffs * (target / v)
    if normalization == "det":
        return coeffs
    lead = coeffs[-1]
    if normalization == "leading" and abs(lead) > 1e-14 * np.max(np.abs(coeffs)):
        return coeffs / lead
    if normalization in ("leading", "supnorm"):
        vals = fam.values(xs) @ coeffs
        k = int(np.argmax(np.abs(vals)))
        return coeffs / vals[k]
    raise ShapeError(f"unknown normalization {normalization!r}")


def _verify_zeros(rows: np.ndarray, coeffs: np.ndarray) -> None:
    scale = np.linalg.norm(rows, axis=1) * np.linalg.norm(coeffs)
    err = np.abs(rows @ coeffs)
    if np.any(err > 1e-8 * np.maximum(scale, 1e-300)):
        raise ConstructionFailed("constructed polynomial does not vanish at its knots",
                                 error=float(np.max(err / scale)))


def poly_with_zeros(fam: FunctionFamily, ks: KnotSet, normalization="leading"):
    """``c * det([f(x); knot rows])``: the combination vanishing at every knot.

    The knots must carry exactly ``order`` rows in total (sum of multiplicities).

    Parameters
    ----------
    normalization
        ``"leading"`` makes the coefficient of the last member +1 (falling back
        to ``"supnorm"`` when it vanishes); ``"supnorm"`` scales to max-abs 1 on
        the interval with a positive maximum; ``"det"`` returns the raw
        determinant; a number multiplies the determinant; a pair ``(x, y)``
        scales so that the value at ``x`` is ``y``.
    """
    n = fam.order
    total = ks.total_multiplicity
    if total > n + 1:
        raise ShapeError(f"{total} knot rows exceed the family size {n + 1}")
    rows = knot_matrix(fam, ((k.location, k.multiplicity) for k in ks))
    if total == n + 1:
        raise DegenerateDeterminant(
            "knots fill the whole family; the determinant is constant",
            knot_determinant=determinant(rows),
        )
    if total != n:
        raise ShapeError(f"need {n} knot rows, got {total}")
    coeffs = cofactor_vector(rows)
    coeffs = _normalize(fam, coeffs, normalization, _check_grid(ks.interval, ks.locations))
    _verify_zeros(rows, coeffs)
    return combination(fam, coeffs)


def _padding_rows(fam: FunctionFamily, iv: Interval, count: int) -> np.ndarray:
    """Rows that fix the remaining degrees of freedom without touching ``iv``.

    Simple zeros to the right of ``b`` when the family is defined there, else
    the vanishing of the top coefficients (a zero "at infinity").
    """
    if count == 0:
        return np.zeros((0, fam.order + 1))
    if iv.is_closed:
        width = iv.b - iv.a
        pts = iv.b + width * (1.0 + np.arange(count))
        try:
            rows = fam.values(pts)
            if np.all(np.isfinite(rows)):
                return rows
        except DomainError:
            pass
    return np.eye(fam.order + 1)[fam.order + 1 - count:][::-1]


def _orient_nonneg(fam, coeffs, xs, what: str):
    vals = fam.values(xs) @ coeffs
    k = int(np.argmax(np.abs(vals)))
    coeffs = coeffs / vals[k]
    vals = vals / vals[k]
    if vals.min() < -1e-9:
        raise ConstructionFailed(f"{what} is not nonnegative on the grid", minimum=float(vals.min()))
    return coeffs


def nonneg_poly_with_zeros(fam: FunctionFamily, ks: KnotSet):
    """A combination that is ``>= 0`` on the interval and vanishes at every knot.

    Interior knots become double zeros and endpoint knots simple zeros, so the
    index of ``ks`` may not exceed the order. The result is scaled to sup-norm 1
    on the interval.
    """
    n = fam.order
    idx = index(ks)
    if idx > n:
        raise IndexTooLarge(f"index {idx} exceeds order {n}")
    knots = [(k.location, 1 if k.endpoint else 2) for k in ks]
    rows = knot_matrix(fam, knots)
    full = np.vstack([rows, _padding_rows(fam, ks.interval, n - idx)])
    try:
        coeffs = cofactor_vector(full)
    except DegenerateDeterminant as exc:
        raise ConstructionFailed("knot rows are degenerate", **exc.details) from exc
    xs = _check_grid(ks.interval, ks.locations, 10_000)
    coeffs = _orient_nonneg(fam, coeffs, xs, "extremal polynomial")
    _verify_zeros(rows, coeffs)
    return combination(fam, coeffs)


def poly_with_nodal_nonnodal(fam: FunctionFamily, nonnodal: Sequence[float],
                             nodal: Sequence[float], iv: Interval | None = None):
    """A combination with sign changes exactly at ``nodal`` and touch points at ``nonnodal``.

    ``iv`` defaults to the hull of all given points widened by 10% (not below
    0 when all points are nonnegative); non-nodal points must be interior to it.
    """
    nn = sorted(float(x) for x in nonnodal)
    nd = sorted(float(x) for x in nodal)
    n = fam.order
    if 2 * len(nn) + len(nd) > n:
        raise IndexTooLarge(f"2k + l = {2 * len(nn) + len(nd)} exceeds order {n}")
    allpts = sorted(nn + nd)
    if len(set(allpts)) != len(allpts):
        raise ShapeError("zero locations must be distinct")
    if iv is None:
        lo, hi = (allpts[0], allpts[-1]) if allpts else (0.0, 1.0)
        pad = 0.1 * (hi - lo) if hi > lo else 0.5
        iv = Interval.closed(max(lo - pad, 0.0) if lo >= 0 else lo - pad, hi + pad)
    for x in nn:
        if not iv.a < x < iv.b:
            raise DomainError(f"non-nodal zero {x} must be interior")
    rows = knot_matrix(fam, [(x, 2) for x in nn] + [(x, 1) for x in nd])
    full = np.vstack([rows, _padding_rows(fam, iv, n - rows.shape[0])])
    try:
        coeffs = cofactor_vector(full)
    except DegenerateDeterminant as exc:
        raise ConstructionFailed("knot rows are degenerate", **exc.details) from exc
    coeffs = coeffs / np.max(np.abs(coeffs))
    _verify_zeros(rows, coeffs)

    # sign pattern between consecutive zeros
    cuts = [iv.a] + allpts + [iv.b]
    prev = None
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        vals = fam.values(np.linspace(lo, hi, 42)[1:-1]) @ coeffs
        sgn = np.sign(vals)
        if sgn[0] == 0 or np.any(sgn != sgn[0]):
            raise ConstructionFailed("unexpected sign change between prescribed zeros")
        if prev is not None:
            flips = lo in nd
            if (sgn[0] != prev) != flips:
                raise ConstructionFailed("sign pattern does not match the nodal pattern")
        prev = sgn[0]
    return combination(fam, coeffs)


# ---------------------------------------------------------------------------
# zero counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroCount:
    nodal: int
    nonnodal: int
    locations: tuple[float, ...]
    kinds: tuple[str, ...]

    @property
    def index(self) -> int:
        return 2 * self.nonnodal + self.nodal


def _deriv(p, x):
    return p.derivative(x, 1)


def count_zeros(p, iv: Interval, grid_size: int = 2000, rel_tol: float = 1e-10,
                horizon: float = 10.0) -> ZeroCount:
    """Classify the zeros of ``p`` on ``iv`` into nodal and non-nodal ones.

    A sign change (polished by bisection) is nodal; an interior local minimum of
    ``|p|`` below ``rel_tol * max|p|`` without a sign change is non-nodal.
    Zeros at the endpoints are nodal. Two sign changes closer than the
    resolution are merged into one non-nodal zero.
    """
    lo, hi = (iv.a, iv.b) if iv.is_closed else (0.0, horizon)
    xs = np.linspace(lo, hi, grid_size)
    vals = np.asarray(p(xs), dtype=float)
    norm = float(np.max(np.abs(vals)))
    if norm == 0.0:
        raise IdenticallyZero("polynomial vanishes on the whole grid")
    thr = rel_tol * norm
    f = lambda x: float(p(x))  # noqa: E731
    merge = 1e-7 * (hi - lo)

    found: list[tuple[float, str]] = []
    if abs(vals[0]) <= thr:
        found.append((lo, "nodal"))
    if iv.is_closed and abs(vals[-1]) <= thr:
        found.append((hi, "nodal"))

    sgn = np.where(np.abs(vals) <= thr, 0, np.sign(vals)).astype(int)
    nz = np.flatnonzero(sgn)
    # sign changes across consecutive nonzero samples
    for i, j in zip(nz, nz[1:]):
        if sgn[i] != sgn[j]:
            a_, b_ = xs[i], xs[j]
            found.append((brentq(f, a_, b_, xtol=1e-15, rtol=4 * np.finfo(float).eps), "nodal"))
        elif j > i + 1:
            # run of tiny values between equal signs: a touch point
            found.append((_touch_point(p, xs[i], xs[j]), "nonnodal"))

    # touch points the threshold did not see: local minima of |p|
    absv = np.abs(vals)
    for i in range(1, grid_size - 1):
        if sgn[i] == 0 or not (absv[i] <= absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if sgn[i - 1] != sgn[i] or sgn[i + 1] != sgn[i]:
            continue
        x0 = _touch_point(p, xs[i - 1], xs[i + 1])
        if abs(f(x0)) <= thr:
            found.append((x0, "nonnodal"))

    found.sort()
    merged: list[tuple[float, str]] = []
    for x, kind in found:
        if merged and x - merged[-1][0] <= merge:
            px, pk = merged[-1]
            at_end = px in (lo, hi) or x in (lo, hi)
            if at_end:
                merged[-1] = (px if px in (lo, hi) else x, "nodal")
            elif pk == "nodal" and kind == "nodal":
                merged[-1] = ((px + x) / 2, "nonnodal")
            elif kind == "nonnodal" or pk == "nonnodal":
                merged[-1] = (px, "nonnodal")
            continue
        merged.append((x, kind))

    nodal = sum(1 for _, k in merged if k == "nodal")
    return ZeroCount(nodal, len(merged) - nodal, tuple(x for x, _ in merged),
                     tuple(k for _, k in merged))


def _touch_point(p, a: float, b: float) -> float:
    """Minimiser of ``|p|`` on ``[a, b]``: root of ``p'`` if bracketed."""
    da, db = _deriv(p, a), _deriv(p, b)
    if da * db < 0:
        return brentq(lambda x: _deriv(p, x), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    res = minimize_scalar(lambda x: abs(float(p(x))), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-14})
    return float(res.x)
