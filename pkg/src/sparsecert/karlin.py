"""Karlin decompositions ``f = f_* + f^*`` of positive sparse polynomials.

On ``[a, b]`` both parts are nonnegative, their zero sets have full index
``n`` and strictly interlace, and ``f^*(b) = 0``. On ``[0, inf)`` the role of
``b`` is taken by the leading coefficient: ``f^*`` has no ``x**alpha_n`` term.

Each part is ``sign * c * det([f(x); knot rows])`` where the knot rows are
listed in increasing knot order (value row before derivative row for a double
knot) and, on the half-line, the row selecting the top coefficient comes last.

The unknowns are the ``n - 1`` free interior knots. For a trial knot vector the
two determinantal polynomials ``P`` and ``Q`` are formed and the coefficient
vector of ``f`` is projected onto ``span(P, Q)``; the projection residual is
driven to zero by a damped Gauss-Newton (Levenberg-Marquardt) iteration over an
ordering-preserving parameterisation of the knots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .core import Interval, SparsePolynomial
from .errors import (
    BadLeadingCoefficient,
    DegenerateDeterminant,
    DomainError,
    NegativeSomewhere,
    NewtonDivergence,
    NotStrictlyPositive,
    ShapeError,
    TailNegative,
    TooManyZeros,
)
from .extremal import KnotSet, cofactor_vector, count_zeros, index, knot_matrix
from .tsystem import MAX_MULTIPLICITY, FunctionFamily

DEFAULT_TOL = 1e-8
GRID_SIZE = 10_000
RANDOM_STARTS = 16


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``f = f_star + f_upper`` with the knot sets of both parts.

    ``c_star`` and ``c_upper`` are nonnegative; ``sign_star * c_star`` is the
    multiplier of the ordered knot determinant (see the module docstring).
    ``degenerate`` marks the boundary case where one part vanishes.
    """

    f: SparsePolynomial
    f_star: SparsePolynomial
    f_upper: SparsePolynomial
    knots_star: KnotSet
    knots_upper: KnotSet
    c_star: float
    c_upper: float
    sign_star: int
    sign_upper: int
    residual: float
    min_star: float
    min_upper: float
    interval: Interval
    degenerate: bool = False
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "interval": {"kind": self.interval.kind, "a": self.interval.a,
                         "b": None if not self.interval.is_closed else self.interval.b},
            "f": self.f.to_dict(),
            "f_star": self.f_star.to_dict(),
            "f_upper": self.f_upper.to_dict(),
            "knots_star": self.knots_star.to_dict(),
            "knots_upper": self.knots_upper.to_dict(),
            "c_star": self.c_star,
            "c_upper": self.c_upper,
            "sign_star": self.sign_star,
            "sign_upper": self.sign_upper,
            "residual": self.residual,
            "min_star": self.min_star,
            "min_upper": self.min_upper,
            "degenerate": self.degenerate,
            "iterations": self.iterations,
        }


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _sup(vals: np.ndarray) -> float:
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def _refine_min(f: SparsePolynomial, xs: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    k = int(np.argmin(vals))
    lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, xs.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda x: f(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        if res.fun < vals[k]:
            return float(res.x), float(res.fun)
    return float(xs[k]), float(vals[k])


def halfline_tail_bound(f: SparsePolynomial) -> float:
    """A radius beyond which the leading term dominates (needs ``a_n > 0``)."""
    a = f.coeffs
    if f.order == 0:
        return 1.0
    gap = f.exps[-1] - f.exps[-2]
    ratio = float(np.sum(np.abs(a[:-1])) / a[-1])
    return max(1.0, ratio ** (1.0 / gap)) * (1 + 1e-9)


def halfline_grid(f: SparsePolynomial, size: int = GRID_SIZE) -> np.ndarray:
    top = halfline_tail_bound(f)
    # dense near 0, geometric towards the tail radius
    return np.unique(np.r_[np.linspace(0.0, min(top, 1.0), size // 2),
                           np.geomspace(min(top, 1.0), top, size // 2)])


def _check_positive(f: SparsePolynomial, xs: np.ndarray) -> float:
    vals = f(xs)
    norm = _sup(vals)
    x0, v0 = _refine_min(f, xs, vals)
    if v0 <= 1e-12 * norm:
        raise NotStrictlyPositive(f"f is not strictly positive (min {v0:.3g} at x = {x0:.12g})",
                                  witness=x0, minimum=v0)
    return norm


def _prepare_interval(f: SparsePolynomial, iv: Interval) -> None:
    if not iv.is_closed:
        raise DomainError("a closed interval is required")
    iv.check_exponents(f.exps)


def _prepare_halfline(f: SparsePolynomial) -> None:
    if f.exps[0] < 0:
        raise DomainError("negative exponents are not defined at 0")
    nz = np.flatnonzero(f.coeffs)
    if nz.size and f.coeffs[nz[-1]] < 0:
        raise TailNegative("leading nonzero coefficient is negative", witness=math.inf)
    if f.leading_coefficient == 0:
        raise BadLeadingCoefficient("the coefficient of the top exponent must be positive")
    if f.exps[0] != 0 or f.coeffs[0] <= 0:
        raise NotStrictlyPositive("f(0) <= 0", witness=0.0, minimum=float(f(0.0)))


# ---------------------------------------------------------------------------
# generic knot solver
# ---------------------------------------------------------------------------

@dataclass
class _Problem:
    """Free-knot system in a scaled variable ``u``.

    Free knots ``t`` live in ``(lo, hi)``; ``to_u`` maps them to ``u``.
    Free knots at positions ``star_parity::2`` of the merged order are double
    knots of ``f_*``, the others double knots of ``f^*``. Residuals are measured
    through ``metric``, the triangular factor of the (weighted) basis sampled at
    Chebyshev points, so that coefficient distances mirror function values.
    """

    fam: FunctionFamily
    raw_target: np.ndarray
    n_free: int
    star_parity: int
    fixed_star: list
    fixed_upper: list
    inf_star: bool
    inf_upper: bool
    lo: float
    hi: float
    metric: np.ndarray
    to_u: Callable = staticmethod(lambda t: t)

    def __post_init__(self):
        n1 = self.metric.shape[0]
        self.metric_inv = np.linalg.solve(self.metric, np.eye(n1))

    @property
    def target(self) -> np.ndarray:
        v = self.metric @ self.raw_target
        return v / np.linalg.norm(v)

    def split(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return t[self.star_parity::2], t[1 - self.star_parity::2]

    def knot_lists(self, t: np.ndarray):
        ts, tu = self.split(t)
        us, uu = self.to_u(ts), self.to_u(tu)
        star = _merge(self.fixed_star, [(x, 2) for x in us])
        upper = _merge(self.fixed_upper, [(x, 2) for x in uu])
        return star, upper

    def rows(self, knots, at_inf: bool) -> np.ndarray:
        rows = knot_matrix(self.fam, knots)
        if at_inf:
            rows = np.vstack([rows, np.eye(self.fam.order + 1)[-1]])
        return rows

    def basis(self, t: np.ndarray):
        """Unit vectors of ``P`` and ``Q`` in the orthonormalised basis.

        Knot rows are transformed by ``metric^-1`` before the cofactor vector is
        formed, which keeps the computation well conditioned even when the raw
        power basis is nearly dependent on the interval.
        """
        star, upper = self.knot_lists(t)
        p = cofactor_vector(self.rows(star, self.inf_star) @ self.metric_inv)
        q = cofactor_vector(self.rows(upper, self.inf_upper) @ self.metric_inv)
        return p / np.linalg.norm(p), q / np.linalg.norm(q)

    def to_coeffs(self, g: np.ndarray) -> np.ndarray:
        return self.metric_inv @ g

    def residual(self, t: np.ndarray, target: np.ndarray):
        try:
            with np.errstate(over="raise", invalid="raise"):
                p, q = self.basis(t)
        except (DegenerateDeterminant, ShapeError, DomainError, FloatingPointError):
            return None, None
        b = np.column_stack([p, q])
        c, *_ = np.linalg.lstsq(b, target, rcond=None)
        return target - b @ c, c


def _chebyshev_metric(fam: FunctionFamily, u: np.ndarray, weight: np.ndarray) -> np.ndarray:
    vals = fam.values(u) * weight[:, None]
    return np.linalg.qr(vals, mode="r")


def _merge(fixed, free):
    acc: dict[float, int] = {}
    for x, m in list(fixed) + list(free):
        acc[float(x)] = acc.get(float(x), 0) + m
    out = sorted(acc.items())
    if any(m > MAX_MULTIPLICITY for _, m in out):
        raise ShapeError("knot multiplicity cap exceeded")
    return out


def _to_knots(v: np.ndarray, lo: float, hi: float) -> np.ndarray:
    z = np.r_[v, 0.0]
    w = np.exp(z - z.max())
    w /= w.sum()
    return lo + (hi - lo) * np.cumsum(w)[:-1]


def _from_knots(t: np.ndarray, lo: float, hi: float) -> np.ndarray:
    gaps = np.diff(np.r_[lo, t, hi])
    gaps = np.maximum(gaps, 1e-300)
    return np.log(gaps[:-1]) - np.log(gaps[-1])


def _levenberg_marquardt(prob: _Problem, t0: np.ndarray, target: np.ndarray,
                         max_iter: int = 200, tol: float = 1e-14):
    """Minimise ``|residual|`` over the free knots; returns ``(t, r, c, iters)``.

    The knots are parameterised by the logits of their gaps, which keeps every
    iterate strictly ordered inside ``(lo, hi)``.
    """
    k = prob.n_free
    if k == 0:
        r, c = prob.residual(np.zeros(0), target)
        return np.zeros(0), r, c, 0

    def fun(v):
        return prob.residual(_to_knots(v, prob.lo, prob.hi), target)

    v = _from_knots(t0, prob.lo, prob.hi)
    r, c = fun(v)
    if r is None:
        return None, None, None, 0
    cost = float(r @ r)
    lam = 1e-3
    it = 0
    for it in range(1, max_iter + 1):
        if math.sqrt(cost) <= tol:
            break
        jac = np.empty((r.size, k))
        for j in range(k):
            h = 1e-6 * max(1.0, abs(v[j]))
            vp, vm = v.copy(), v.copy()
            vp[j] += h
            vm[j] -= h
            rp, _ = fun(vp)
            rm, _ = fun(vm)
            jac[:, j] = 0.0 if rp is None or rm is None else (rp - rm) / (2 * h)
        g = jac.T @ r
        a = jac.T @ jac
        diag = np.diag(a).copy()
        diag[diag == 0] = 1.0
        improved = False
        step = np.zeros(k)
        while lam < 1e12:
            try:
                step = np.linalg.solve(a + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            r_new, c_new = fun(v + step)
            if r_new is not None and float(r_new @ r_new) < cost:
                v = v + step
                r, c, cost = r_new, c_new, float(r_new @ r_new)
                lam = max(lam / 5, 1e-12)
                improved = True
                break
            lam *= 4
        if not improved or np.linalg.norm(step) < 1e-15 * (1 + np.linalg.norm(v)):
            break
    return _to_knots(v, prob.lo, prob.hi), r, c, it


def _chebyshev_start(prob: _Problem) -> np.ndarray:
    j = np.arange(1, prob.n_free + 1)
    return prob.lo + (prob.hi - prob.lo) * (1 - np.cos(j * np.pi / (prob.n_free + 1))) / 2


def _starts(prob: _Problem, seed: int, initial=None):
    if initial is not None:
        yield np.asarray(initial, dtype=float)
    yield _chebyshev_start(prob)
    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_STARTS):
        yield np.sort(rng.uniform(prob.lo, prob.hi, prob.n_free))


def _part_signs(prob: _Problem, t: np.ndarray) -> tuple[float, float]:
    """Signs making ``P`` and ``Q`` nonnegative, read off at their largest sample."""
    p, q = (prob.to_coeffs(v) for v in prob.basis(t))
    u = prob.to_u(np.linspace(prob.lo, prob.hi, 257)[1:-1])
    vp, vq = prob.fam.values(u) @ p, prob.fam.values(u) @ q
    return float(np.sign(vp[np.argmax(np.abs(vp))])), float(np.sign(vq[np.argmax(np.abs(vq))]))


def _homotopy(prob: _Problem, max_steps: int = 400):
    """Track the knots from a polynomial with known knots to the target.

    The start polynomial is ``P + Q`` (oriented to be nonnegative) at Chebyshev
    knots; every convex combination with the target stays strictly positive,
    and the unique decomposition moves continuously along the path.
    """
    t = _chebyshev_start(prob)
    sp, sq = _part_signs(prob, t)
    p, q = prob.basis(t)
    g = sp * p + sq * q
    g /= np.linalg.norm(g)
    f = prob.target
    s, ds, steps = 0.0, 0.25, 0
    while s < 1.0 and steps < max_steps:
        steps += 1
        s_new = min(1.0, s + ds)
        goal = (1 - s_new) * g + s_new * f
        goal /= np.linalg.norm(goal)
        t_new, r, c, _ = _levenberg_marquardt(prob, t, goal, max_iter=40, tol=1e-13)
        ok = (t_new is not None and r is not None and np.linalg.norm(r) <= 1e-10
              and _interlaced(t_new, prob.lo, prob.hi)
              and c[0] * sp > 0 and c[1] * sq > 0)
        if ok:
            s, t = s_new, t_new
            ds = min(2 * ds, 1.0 - s) if s < 1.0 else ds
        else:
            ds /= 3
            if ds < 1e-6:
                return None
    return t if s >= 1.0 else None


# ---------------------------------------------------------------------------
# assembling a decomposition
# ---------------------------------------------------------------------------

def _ordered_det_coeffs(fam: FunctionFamily, knots, at_inf: bool) -> np.ndarray:
    rows = knot_matrix(fam, knots)
    if at_inf:
        rows = np.vstack([rows, np.eye(fam.order + 1)[-1]])
    return cofactor_vector(rows)


def _scale_constant(coeffs: np.ndarray, det_coeffs: np.ndarray) -> tuple[float, int]:
    mult = float(coeffs @ det_coeffs / (det_coeffs @ det_coeffs))
    return abs(mult), (1 if mult > 0 else -1 if mult < 0 else 0)


def _interlaced(free: np.ndarray, lo: float, hi: float) -> bool:
    pts = np.r_[lo, free, hi]
    return bool(np.all(np.diff(pts) > 1e-12 * (hi - lo)))


def verify(dec: Decomposition, grid_size: int = GRID_SIZE) -> dict:
    """Independent re-evaluation of residual and minima on a fresh grid."""
    f = dec.f
    if dec.interval.is_closed:
        xs = np.linspace(dec.interval.a, dec.interval.b, grid_size + 1)
    else:
        xs = halfline_grid(f, grid_size + 1)
    fv = f(xs)
    sv = dec.f_star(xs)
    uv = dec.f_upper(xs)
    norm = _sup(fv)
    return {
        "norm": norm,
        "residual": _sup(fv - sv - uv),
        "min_star": float(sv.min()),
        "min_upper": float(uv.min()),
        "upper_at_b": float(dec.f_upper(dec.interval.b)) if dec.interval.is_closed else 0.0,
    }


def _finish(f, fam_x, iv, star_knots, upper_knots, inf_star, inf_upper, fs, fu,
            xs, tol, degenerate=False, iterations=0, check_free=None):
    """Build, orient and validate a decomposition; returns None on failure."""
    f_star = SparsePolynomial(f.exps, fs)
    f_upper = SparsePolynomial(f.exps, fu)
    fv = f(xs)
    norm = _sup(fv)
    sv, uv = f_star(xs), f_upper(xs)
    resid = _sup(fv - sv - uv)
    mins, minu = float(sv.min()), float(uv.min())
    if resid > tol * norm or mins < -tol * norm or minu < -tol * norm:
        return None
    if check_free is not None and not check_free():
        return None
    try:
        c_star, s_star = (_scale_constant(fs, _ordered_det_coeffs(fam_x, star_knots, inf_star))
                          if np.any(fs) else (0.0, 0))
        c_up, s_up = (_scale_constant(fu, _ordered_det_coeffs(fam_x, upper_knots, inf_upper))
                      if np.any(fu) else (0.0, 0))
    except DegenerateDeterminant:
        return None
    return Decomposition(
        f=f, f_star=f_star, f_upper=f_upper,
        knots_star=KnotSet(iv, star_knots), knots_upper=KnotSet(iv, upper_knots),
        c_star=c_star, c_upper=c_up, sign_star=s_star, sign_upper=s_up,
        residual=resid, min_star=mins, min_upper=minu, interval=iv,
        degenerate=degenerate, iterations=iterations,
    )


def _candidate(f, iv, prob, unscale, x_of_t, fixed_star_x, fixed_upper_x, xs, tol, t, iters):
    r, c = prob.residual(t, prob.target)
    if r is None or not _interlaced(t, prob.lo, prob.hi):
        return None
    p, q = (prob.to_coeffs(v) for v in prob.basis(t))
    tnorm = float(np.linalg.norm(prob.metric @ prob.raw_target))
    fs = c[0] * p * tnorm / unscale
    fu = c[1] * q * tnorm / unscale
    if prob.inf_upper:
        fu[-1] = 0.0
        fs[-1] = f.coeffs[-1]
    ts, tu = prob.split(t)
    star = _merge(fixed_star_x, [(x, 2) for x in x_of_t(ts)])
    upper = _merge(fixed_upper_x, [(x, 2) for x in x_of_t(tu)])
    return _finish(f, FunctionFamily.powers(f.exps), iv, star, upper, prob.inf_star,
                   prob.inf_upper, fs, fu, xs, tol, iterations=iters)


def _solve(f: SparsePolynomial, iv: Interval, prob: _Problem, unscale: np.ndarray,
           x_of_t: Callable, fixed_star_x, fixed_upper_x, xs, tol, seed, initial):
    """Chebyshev (or given) start, then homotopy, then random restarts."""
    args = (f, iv, prob, unscale, x_of_t, fixed_star_x, fixed_upper_x, xs, tol)
    last = None
    starts = _starts(prob, seed, initial)
    first = [next(starts)] + ([next(starts)] if initial is not None else [])
    for t0 in first:
        t, r, _, iters = _levenberg_marquardt(prob, t0, prob.target)
        if t is not None:
            last = (t, float(np.linalg.norm(r)))
            dec = _candidate(*args, t, iters)
            if dec is not None:
                return dec
    t = _homotopy(prob)
    if t is not None:
        t, r, _, iters = _levenberg_marquardt(prob, t, prob.target)
        if t is not None:
            last = (t, float(np.linalg.norm(r)))
            dec = _candidate(*args, t, iters)
            if dec is not None:
                return dec
    for t0 in starts:
        t, r, _, iters = _levenberg_marquardt(prob, t0, prob.target)
        if t is None:
            continue
        last = (t, float(np.linalg.norm(r)))
        dec = _candidate(*args, t, iters)
        if dec is not None:
            return dec
    raise NewtonDivergence(
        "knot iteration did not produce a valid decomposition",
        last_iterate=None if last is None else last[0].tolist(),
        residual=None if last is None else last[1],
    )


def _interval_problem(f: SparsePolynomial, iv: Interval, order: int, fixed_star, fixed_upper):
    """Problem for the free pattern of the given order on a closed interval.

    ``fixed_*`` are pinned ``(x, multiplicity)`` pairs in the original variable;
    the endpoint knots of the free pattern are added here.
    """
    s = max(abs(iv.a), abs(iv.b))
    unscale = np.array([s**e for e in f.exps])
    fam = FunctionFamily.powers(f.exps)
    target = f.coeffs * unscale
    lo, hi = iv.a / s, iv.b / s
    fixed_star = list(fixed_star)
    fixed_upper = list(fixed_upper) + [(iv.b, 1)]
    if order % 2 == 0:
        if order > 0:
            fixed_upper.append((iv.a, 1))
        parity = 0
    else:
        fixed_star.append((iv.a, 1))
        parity = 1
    fs_u = [(x / s, m) for x, m in fixed_star]
    fu_u = [(x / s, m) for x, m in fixed_upper]
    cheb = lo + (hi - lo) * (1 - np.cos(np.linspace(0, np.pi, 4 * (f.order + 1)))) / 2
    metric = _chebyshev_metric(fam, cheb, np.ones_like(cheb))
    prob = _Problem(fam, target, order - 1 if order > 0 else 0,
                    parity, fs_u, fu_u, False, False, lo, hi, metric)
    return prob, unscale, (lambda t: np.asarray(t) * s), fixed_star, fixed_upper


def decompose_interval(f: SparsePolynomial, iv: Interval, tol: float = DEFAULT_TOL,
                       seed: int = 0, initial: Sequence[float] | None = None,
                       grid_size: int = GRID_SIZE) -> Decomposition:
    """Karlin decomposition of a strictly positive ``f`` on a closed interval.

    Parameters
    ----------
    tol
        Relative tolerance for the grid residual and the grid minima of both parts.
    initial
        Optional starting guess for the merged free knots (``n - 1`` values).

    Raises
    ------
    NotStrictlyPositive
        With the grid minimiser as ``witness``.
    BadLeadingCoefficient
        If ``a_n < 0``.
    NewtonDivergence
        If no start converges to a valid decomposition.
    """
    _prepare_interval(f, iv)
    xs = np.linspace(iv.a, iv.b, grid_size)
    _check_positive(f, xs)
    if f.leading_coefficient < 0:
        raise BadLeadingCoefficient("the coefficient of the top exponent must not be negative")
    n = f.order
    if n == 0:
        dec = _finish(f, FunctionFamily.powers(f.exps), iv, [], [], False, False,
                      np.array(f.coeffs), np.zeros(1), xs, tol, degenerate=True)
        return dec
    prob, unscale, x_of_t, fstar, fupper = _interval_problem(f, iv, n, [], [])
    return _solve(f, iv, prob, unscale, x_of_t, fstar, fupper, xs, tol, seed, initial)


def decompose_halfline(f: SparsePolynomial, tol: float = DEFAULT_TOL, seed: int = 0,
                       initial: Sequence[float] | None = None,
                       grid_size: int = GRID_SIZE) -> Decomposition:
    """Karlin decomposition of a strictly positive ``f`` on ``[0, inf)``.

    ``f^*`` carries no ``x**alpha_n`` term, so the top coefficient of ``f_*``
    equals ``a_n``. Free knots are searched as ``t in (0, 1)`` with
    ``x = L * t / (1 - t)`` and ``L = (a_0 / a_n) ** (1 / alpha_n)``.
    """
    _prepare_halfline(f)
    iv = Interval.halfline()
    xs = halfline_grid(f, grid_size)
    _check_positive(f, xs)
    n = f.order
    fam_x = FunctionFamily.powers(f.exps)
    if n == 0:
        return _finish(f, fam_x, iv, [], [], False, True, np.array(f.coeffs), np.zeros(1),
                       xs, tol, degenerate=True)
    scale = (f.coeffs[0] / f.coeffs[-1]) ** (1.0 / f.exps[-1])
    unscale = np.array([scale**e for e in f.exps])
    target = f.coeffs * unscale
    if n % 2 == 0:
        fixed_star, fixed_upper, parity = [], [(0.0, 1)], 0
        inf_star, inf_upper = False, True
    else:
        fixed_star, fixed_upper, parity = [(0.0, 1)], [], 1
        inf_star, inf_upper = False, True
    to_u = lambda t: np.asarray(t) / (1.0 - np.asarray(t))  # noqa: E731
    fam = FunctionFamily.powers(f.exps)
    tc = (1 - np.cos(np.linspace(0, np.pi, 4 * (n + 1) + 1)[:-1])) / 2
    uc = to_u(tc)
    metric = _chebyshev_metric(fam, uc, (1.0 + uc) ** -f.exps[-1])
    prob = _Problem(fam, target, n - 1, parity, fixed_star, fixed_upper, inf_star, inf_upper,
                    0.0, 1.0, metric, to_u)
    return _solve(f, iv, prob, unscale, lambda t: scale * to_u(t), fixed_star, fixed_upper,
                  xs, tol, seed, initial)


# ---------------------------------------------------------------------------
# nonnegative polynomials
# ---------------------------------------------------------------------------

def _zeros_with_multiplicity(f: SparsePolynomial, iv: Interval, xs: np.ndarray):
    """Zeros of a nonnegative ``f`` as ``(x, multiplicity)`` pairs."""
    norm = _sup(f(xs))
    zc = count_zeros(f, iv, grid_size=4000, rel_tol=1e-9)
    out = []
    for x, kind in zip(zc.locations, zc.kinds):
        if x in (iv.a, iv.b):
            # an endpoint zero is double when the slope vanishes as well
            d = f.derivative(x, 1) if (x > 0 or f.exps.all_integer or f.exps[1] >= 1) else math.inf
            m = 2 if abs(d) <= 1e-7 * norm * max(1.0, iv.b - iv.a) else 1
        else:
            m = 2
        out.append((float(x), m))
    return out


def certify_nonneg(f: SparsePolynomial, iv: Interval, tol: float = DEFAULT_TOL, seed: int = 0,
                   grid_size: int = GRID_SIZE) -> Decomposition:
    """Decomposition of a nonnegative ``f`` whose zeros are pinned in both parts.

    The zeros of ``f`` (with multiplicity ``r`` counted in rows) are fixed in
    both knot sets and the remaining pattern of order ``n - r`` is solved as
    for a positive polynomial. When ``r == n`` the result is the boundary case
    ``f_* = f, f^* = 0`` (or the reverse if ``f(b) = 0``), flagged ``degenerate``.

    Raises
    ------
    NegativeSomewhere
        With a witness where ``f < 0``.
    TooManyZeros
        If ``r > n``.
    """
    _prepare_interval(f, iv)
    xs = np.linspace(iv.a, iv.b, grid_size)
    vals = f(xs)
    norm = _sup(vals)
    if norm == 0:
        raise TooManyZeros("f vanishes identically")
    x0, v0 = _refine_min(f, xs, vals)
    if v0 < -1e-9 * norm:
        raise NegativeSomewhere(f"f({x0:.12g}) = {v0:.3g} < 0", witness=x0, minimum=v0)
    zeros = _zeros_with_multiplicity(f, iv, xs)
    r = sum(m for _, m in zeros)
    n = f.order
    if r > n:
        raise TooManyZeros(f"f has {r} zeros counted with multiplicity, order is {n}",
                           zeros=[x for x, _ in zeros])
    fam_x = FunctionFamily.powers(f.exps)
    if r == 0 and f.leading_coefficient >= 0:
        return decompose_interval(f, iv, tol=tol, seed=seed, grid_size=grid_size)
    if r == n:
        at_b = any(x == iv.b for x, _ in zeros)
        zero = np.zeros(n + 1)
        # the vanishing part keeps only a nominal endpoint knot
        if at_b:
            star, upper = [(iv.a, 1)], list(zeros)
            fs, fu = zero, np.array(f.coeffs)
        else:
            star, upper = list(zeros), [(iv.b, 1)]
            fs, fu = np.array(f.coeffs), zero
        dec = _finish(f, fam_x, iv, star, upper, False, False, fs, fu, xs, tol, degenerate=True)
        if dec is None:
            raise NewtonDivergence("degenerate decomposition failed validation")
        return dec

    prob, unscale, x_of_t, fstar, fupper = _interval_problem(f, iv, n - r, zeros, zeros)
    try:
        return _solve(f, iv, prob, unscale, x_of_t, fstar, fupper, xs, tol, seed, None)
    except ShapeError as exc:
        raise NewtonDivergence(str(exc)) from exc
