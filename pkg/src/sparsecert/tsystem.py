"""Function families, (confluent) alternant matrices and T-/ET-system checks.

The verdicts returned by :func:`is_t_system` and :func:`is_et_system` are
sampling based: a failing tuple is a genuine certificate, a pass is evidence
gathered on a finite set of tuples.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .core import ExponentVector, Interval, power_basis
from .errors import ConfigError, DomainError, ShapeError, UnsupportedOrder

#: Largest supported multiplicity of a node in a confluent alternant.
MAX_MULTIPLICITY = 3

_KINDS = ("powers", "exponentials", "cauchy", "scaled", "composed")


def _increasing(values: Sequence[float], what: str) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ShapeError(f"{what} must not be empty")
    for lo, hi in zip(vals, vals[1:]):
        if not lo < hi:
            raise ShapeError(f"{what} must be strictly increasing, got {vals}")
    return vals


def _numeric_derivative(fn: Callable, x: np.ndarray, order: int) -> np.ndarray:
    h = 1e-4 * (1.0 + np.abs(x))
    if order == 1:
        return (fn(x + h) - fn(x - h)) / (2 * h)
    if order == 2:
        return (fn(x + h) - 2 * fn(x) + fn(x - h)) / h**2
    raise UnsupportedOrder(f"numeric derivative of order {order} not supported")


@dataclass(frozen=True, eq=False)
class FunctionFamily:
    """A family ``f_0, ..., f_n`` of real functions of one variable.

    Use the classmethod constructors. ``scaled`` and ``composed`` wrap a base
    family with a user supplied callable; derivatives of that callable may be
    passed explicitly, otherwise they are approximated by central differences.
    """

    kind: str
    params: tuple = ()
    base: "FunctionFamily | None" = None
    handle: Callable | None = None
    handle_derivatives: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ShapeError(f"unknown family kind {self.kind!r}")

    # -- constructors -------------------------------------------------
    @classmethod
    def powers(cls, exponents) -> "FunctionFamily":
        exps = exponents if isinstance(exponents, ExponentVector) else ExponentVector(exponents)
        return cls("powers", (exps,))

    @classmethod
    def exponentials(cls, rates) -> "FunctionFamily":
        return cls("exponentials", _increasing(rates, "rates"))

    @classmethod
    def cauchy(cls, shifts) -> "FunctionFamily":
        return cls("cauchy", _increasing(shifts, "shifts"))

    @classmethod
    def scaled(cls, base: "FunctionFamily", weight: Callable, derivatives: Sequence[Callable] = ()):
        return cls("scaled", (), base, weight, tuple(derivatives))

    @classmethod
    def composed(cls, base: "FunctionFamily", inner: Callable, derivatives: Sequence[Callable] = ()):
        return cls("composed", (), base, inner, tuple(derivatives))

    # -- properties ---------------------------------------------------
    @property
    def order(self) -> int:
        if self.kind == "powers":
            return self.params[0].order
        if self.base is not None:
            return self.base.order
        return len(self.params) - 1

    @property
    def exponents(self) -> ExponentVector:
        if self.kind != "powers":
            raise AttributeError("only power families carry exponents")
        return self.params[0]

    def truncated(self, order: int) -> "FunctionFamily":
        """The subfamily ``f_0, ..., f_order``."""
        if self.kind == "powers":
            return FunctionFamily.powers(self.exponents.exponents[: order + 1])
        if self.base is not None:
            return FunctionFamily(self.kind, (), self.base.truncated(order), self.handle,
                                  self.handle_derivatives)
        return FunctionFamily(self.kind, self.params[: order + 1])

    def check_interval(self, iv: Interval) -> None:
        if self.kind == "powers":
            iv.check_exponents(self.exponents)
        elif self.kind == "cauchy":
            if not iv.a > -self.params[0]:
                raise DomainError("a Cauchy family needs a > -shift_0 on the interval")
        elif self.base is not None and self.kind == "scaled":
            self.base.check_interval(iv)

    # -- evaluation ---------------------------------------------------
    def _handle_derivative(self, x: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return np.asarray(self.handle(x), dtype=float)
        if len(self.handle_derivatives) >= order:
            return np.asarray(self.handle_derivatives[order - 1](x), dtype=float)
        return _numeric_derivative(self.handle, x, order)

    def values(self, x, order: int = 0) -> np.ndarray:
        """``d^order f_i / dx^order`` at ``x``; shape ``(len(x), order_n + 1)``."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if order > MAX_MULTIPLICITY - 1:
            raise UnsupportedOrder(f"derivative order {order} exceeds {MAX_MULTIPLICITY - 1}")
        if self.kind == "powers":
            return power_basis(self.exponents, xs, order)
        if self.kind == "exponentials":
            rates = np.asarray(self.params)
            return rates**order * np.exp(np.outer(xs, rates))
        if self.kind == "cauchy":
            shifts = np.asarray(self.params)
            denom = xs[:, None] + shifts
            if np.any(denom == 0):
                raise DomainError("Cauchy family evaluated at a pole")
            return (-1) ** order * math.factorial(order) / denom ** (order + 1)
        if self.kind == "scaled":
            out = np.zeros((xs.size, self.order + 1))
            for j in range(order + 1):
                r = self._handle_derivative(xs, j)
                out += math.comb(order, j) * r[:, None] * self.base.values(xs, order - j)
            if np.any(self.handle(xs) <= 0):
                raise DomainError("scaling weight must be positive")
            return out
        # composed: Faa di Bruno up to second order
        g = self._handle_derivative(xs, 0)
        if order == 0:
            return self.base.values(g, 0)
        g1 = self._handle_derivative(xs, 1)
        if order == 1:
            return self.base.values(g, 1) * g1[:, None]
        g2 = self._handle_derivative(xs, 2)
        return self.base.values(g, 2) * (g1**2)[:, None] + self.base.values(g, 1) * g2[:, None]

    def map_interval(self, iv: Interval) -> Interval:
        """Image of ``iv`` under the inner map of a composed family."""
        if self.kind != "composed":
            return iv
        lo, hi = (float(v) for v in self.handle(np.array([iv.a, iv.b])))
        return Interval.closed(lo, hi)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def _groups(pts: Sequence[float]) -> list[tuple[float, int]]:
    """Run-length encode a nondecreasing tuple into ``(value, multiplicity)``."""
    out: list[tuple[float, int]] = []
    for p in pts:
        if out and out[-1][0] == p:
            out[-1] = (p, out[-1][1] + 1)
        else:
            if out and p < out[-1][0]:
                raise ShapeError("points must be nondecreasing")
            out.append((p, 1))
    return out


def alternant_matrix(fam: FunctionFamily, pts: Sequence[float]) -> np.ndarray:
    """``M[j, i] = f_i(x_j)`` for pairwise distinct nodes."""
    xs = np.asarray(pts, dtype=float).reshape(-1)
    if xs.size != fam.order + 1:
        raise ShapeError(f"need {fam.order + 1} nodes, got {xs.size}")
    if np.unique(xs).size != xs.size:
        raise ShapeError("alternant nodes must be pairwise distinct")
    return fam.values(xs)


def knot_rows(fam: FunctionFamily, x: float, mult: int, limit_at_zero: bool = False) -> np.ndarray:
    """Rows ``f^(k)(x)`` for ``k < mult``.

    With ``limit_at_zero`` a power family with ``alpha_0 == 0`` whose derivatives
    blow up at ``x == 0`` gets the limiting rows of the coalescing-node
    construction instead: unit vectors ``e_0, ..., e_{mult-1}``.
    """
    if mult > MAX_MULTIPLICITY:
        raise UnsupportedOrder(f"multiplicity {mult} exceeds {MAX_MULTIPLICITY}")
    try:
        return np.vstack([fam.values([x], k) for k in range(mult)])
    except DomainError:
        if not (limit_at_zero and x == 0.0 and fam.kind == "powers"
                and fam.exponents[0] == 0.0 and mult <= fam.order + 1):
            raise
        return np.eye(fam.order + 1)[:mult]


def confluent_alternant(fam: FunctionFamily, pts: Sequence[float]) -> np.ndarray:
    """Alternant with derivative rows for repeated nodes.

    A node repeated ``m`` times contributes the rows ``f(x), f'(x), ...,
    f^(m-1)(x)`` in that order.
    """
    xs = [float(p) for p in pts]
    if len(xs) != fam.order + 1:
        raise ShapeError(f"need {fam.order + 1} nodes, got {len(xs)}")
    rows = [knot_rows(fam, x, m) for x, m in _groups(xs)]
    return np.vstack(rows)


def vandermonde_product(pts) -> float | np.ndarray:
    """``prod_{i<j} (x_j - x_i)``; the empty product is 1.

    A 2-D array is treated as a batch of tuples, one per row.
    """
    arr = np.asarray(pts, dtype=float)
    if arr.ndim == 2:
        i, j = np.triu_indices(arr.shape[1], k=1)
        return np.prod(arr[:, j] - arr[:, i], axis=1)
    xs = [float(p) for p in arr]
    out = 1.0
    for j in range(len(xs)):
        for i in range(j):
            out *= xs[j] - xs[i]
    return out


def scaled_det(mat: np.ndarray) -> tuple[float, float]:
    """Determinant after normalising every row to unit length.

    Returns ``(relative_det, log_row_scale)`` with
    ``det(mat) = relative_det * exp(log_row_scale)``. A zero row gives 0.
    """
    norms = np.linalg.norm(mat, axis=-1)
    if np.any(norms == 0):
        return 0.0, 0.0
    sign, logabs = np.linalg.slogdet(mat / norms[..., None])
    return float(sign * np.exp(logabs)), float(np.sum(np.log(norms)))


def _extended_det(mats: np.ndarray) -> np.ndarray:
    """Batched Gaussian elimination with partial pivoting in extended precision."""
    a = np.array(mats, dtype=np.longdouble, copy=True)
    bsz, n, _ = a.shape
    det = np.ones(bsz, dtype=np.longdouble)
    rows = np.arange(bsz)
    for k in range(n):
        piv = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            tmp = a[rows[swap], k].copy()
            a[rows[swap], k] = a[rows[swap], piv[swap]]
            a[rows[swap], piv[swap]] = tmp
            det[swap] = -det[swap]
        d = a[:, k, k].copy()
        det *= d
        safe = np.where(d == 0, 1, d)
        factors = a[:, k + 1:, k] / safe[:, None]
        a[:, k + 1:, k:] -= factors[:, :, None] * a[:, k:k + 1, k:]
    return det


def alternant_determinant(fam: FunctionFamily, pts) -> np.ndarray | float:
    """``det(f_i(x_j))`` for one node tuple or a batch of shape ``(B, n + 1)``.

    Power families are evaluated and eliminated in extended precision, which
    keeps the determinant accurate when nodes cluster; other families use
    :func:`determinant`.
    """
    xs = np.asarray(pts, dtype=float)
    single = xs.ndim == 1
    batch = np.atleast_2d(xs)
    if batch.shape[1] != fam.order + 1:
        raise ShapeError(f"need {fam.order + 1} nodes per tuple, got {batch.shape[1]}")
    if fam.kind != "powers" or np.any(batch < 0):
        out = np.array([determinant(alternant_matrix(fam, row)) for row in batch])
    else:
        if np.any(batch == 0) and fam.exponents.has_negative:
            raise DomainError("negative exponents are undefined at 0")
        alphas = fam.exponents.as_array().astype(np.longdouble)
        mats = np.power(batch.astype(np.longdouble)[:, :, None], alphas[None, None, :])
        dets = _extended_det(mats)
        out = dets.astype(float)
        if fam.exponents.all_integer and fam.exponents[0] >= 0:
            # Hadamard ratio bounds the amplification of rounding errors
            rows = np.prod(np.linalg.norm(mats.astype(float), axis=2), axis=1)
            with np.errstate(divide="ignore"):
                ratio = rows / np.abs(dets.astype(float))
            alpha_int = tuple(int(a) for a in fam.exponents)
            for k in np.flatnonzero(~(ratio * np.finfo(np.longdouble).eps <= 1e-11)):
                out[k] = _exact_power_det(alpha_int, batch[k])
    return float(out[0]) if single else out


def _exact_power_det(alphas: tuple[int, ...], xs: np.ndarray) -> float:
    """``det(x_j ** alpha_i)`` in exact integer arithmetic (fraction-free Bareiss)."""
    ratios = [float(x).as_integer_ratio() for x in xs]
    den = max(d for _, d in ratios)
    ints = [num * (den // d) for num, d in ratios]
    m = [[x ** a for a in alphas] for x in ints]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0.0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    # int / int rounds correctly, even for huge operands
    return sign * m[n - 1][n - 1] / den ** sum(alphas)


def determinant(mat: np.ndarray) -> float:
    rel, logscale = scaled_det(mat)
    return rel * math.exp(logscale) if rel != 0 else 0.0


def _complete_homogeneous(xs: Sequence[float], kmax: int) -> np.ndarray:
    h = np.zeros(kmax + 1)
    h[0] = 1.0
    for x in xs:
        for k in range(1, kmax + 1):
            h[k] += x * h[k - 1]
    return h


def _elementary(xs: Sequence[float], top: int) -> np.ndarray:
    """``e_0, ..., e_top`` of the points."""
    e = np.zeros(top + 1)
    e[0] = 1.0
    for x in xs:
        e[1:] = e[1:] + x * e[:-1].copy()
    return e


def _interlacing(lam: tuple[int, ...], k: int):
    """Partitions ``mu`` with at most ``k - 1`` parts and ``lam_{i+1} <= mu_i <= lam_i``."""
    lam = lam + (0,) * max(0, k - len(lam))
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(k - 1)]
    for mu in itertools.product(*ranges):
        yield tuple(v for v in mu if v > 0)


def schur_batch(lam: Sequence[int], pts: np.ndarray) -> np.ndarray:
    """``s_lambda`` at each row of ``pts`` by the branching rule.

    ``s_lambda(x_1..x_k) = sum_mu s_mu(x_1..x_{k-1}) x_k^{|lambda| - |mu|}``
    over interlacing ``mu``. For positive points every term is positive, so
    no cancellation occurs.
    """
    xs = np.atleast_2d(np.asarray(pts, dtype=float))
    nvars = xs.shape[1]
    lam = tuple(int(v) for v in lam if v > 0)

    @lru_cache(maxsize=None)
    def rec(mu: tuple[int, ...], k: int):
        if len(mu) > k:
            return None
        if k == 0:
            return np.ones(xs.shape[0])
        total = np.zeros(xs.shape[0])
        size = sum(mu)
        for nu in _interlacing(mu, k):
            sub = rec(nu, k - 1)
            if sub is not None:
                total = total + sub * xs[:, k - 1] ** (size - sum(nu))
        return total

    out = rec(lam, nvars)
    return np.zeros(xs.shape[0]) if out is None else out


def schur_values(alpha, pts: np.ndarray) -> np.ndarray:
    """:func:`schur_eval` (branching rule) for every row of a ``(B, n + 1)`` array."""
    exps = alpha if isinstance(alpha, ExponentVector) else ExponentVector(alpha)
    if not exps.all_integer or exps[0] < 0:
        raise ShapeError("Schur polynomials need nonnegative integer exponents")
    xs = np.atleast_2d(np.asarray(pts, dtype=float))
    n = exps.order
    if xs.shape[1] != n + 1:
        raise ShapeError(f"need {n + 1} points per row, got {xs.shape[1]}")
    return schur_batch([int(exps[n - i]) - (n - i) for i in range(n + 1)], xs)


def schur_eval(alpha, pts: Sequence[float], method: str = "branching") -> float:
    """Schur polynomial ``s_alpha`` for integer exponents ``alpha_0 < ... < alpha_n``.

    ``alpha`` encodes the partition ``lambda_i = alpha_{n-i} - (n - i)``, so
    ``det(x_j ** alpha_i) = vandermonde_product(x) * s_alpha(x)``.

    ``method="branching"`` (default) sums over semistandard tableaux through
    the branching rule and is subtraction free at positive points.
    ``method="jacobi-trudi"`` evaluates ``det(h_{lambda_i - i + j})`` (or the
    dual form in ``e_k``, whichever matrix is smaller). ``method="bialternant"`` divides the alternant by
    the Vandermonde determinant, switching to confluent alternants (the
    coalescing limit) when points repeat.
    """
    exps = alpha if isinstance(alpha, ExponentVector) else ExponentVector(alpha)
    if not exps.all_integer or exps[0] < 0:
        raise ShapeError("Schur polynomials need nonnegative integer exponents")
    xs = sorted(float(p) for p in pts)
    n = exps.order
    if len(xs) != n + 1:
        raise ShapeError(f"need {n + 1} points, got {len(xs)}")

    if method == "branching":
        lam = [int(exps[n - i]) - (n - i) for i in range(n + 1)]
        return float(schur_batch(lam, np.asarray(xs)[None, :])[0])
    if method == "bialternant":
        num = FunctionFamily.powers(exps)
        den = FunctionFamily.powers(range(n + 1))
        return determinant(confluent_alternant(num, xs)) / determinant(confluent_alternant(den, xs))
    if method != "jacobi-trudi":
        raise ConfigError(f"unknown method {method!r}")

    lam = [int(exps[n - i]) - (n - i) for i in range(n + 1)]
    # full columns factor out as powers of x_1 ... x_N
    c = lam[-1]
    lam = [v - c for v in lam if v - c > 0]
    front = math.prod(xs) ** c
    if not lam:
        return front
    conj = [sum(1 for v in lam if v > j) for j in range(lam[0])]
    if len(conj) < len(lam):
        # dual form det(e_{lambda'_i - i + j}) is the smaller matrix
        seq, parts = _elementary(xs, len(xs)), conj
    else:
        seq, parts = _complete_homogeneous(xs, lam[0] + len(lam)), lam
    ell = len(parts)
    jt = np.zeros((ell, ell))
    for i in range(ell):
        for j in range(ell):
            k = parts[i] - i + j
            jt[i, j] = seq[k] if 0 <= k < len(seq) else 0.0
    return front * float(np.linalg.det(jt))


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplingConfig:
    points_per_dim: int = 24
    max_tuples: int = 6000
    zero_tol: float = 1e-12
    seed: int = 0
    horizon: float = 10.0

    def __post_init__(self):
        if self.points_per_dim < 2 or self.max_tuples < 1:
            raise ConfigError("sampling grid is empty")


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass" | "fail" | "inconclusive"
    witness: tuple[float, ...] | None = None
    min_relative_det: float = math.nan
    sign: int = 0
    samples: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else list(self.witness),
            "min_relative_det": self.min_relative_det,
            "sign": self.sign,
            "samples": self.samples,
        }


def _scan_bounds(fam: FunctionFamily, iv: Interval, cfg: SamplingConfig) -> tuple[float, float]:
    if iv.is_closed:
        return iv.a, iv.b
    return 0.0, cfg.horizon


def _tuples(lo: float, hi: float, n_nodes: int, cfg: SamplingConfig, confluent: bool) -> np.ndarray:
    g = np.linspace(lo, hi, cfg.points_per_dim)
    if n_nodes <= 4:
        combos = (itertools.combinations_with_replacement if confluent else itertools.combinations)
        idx = np.array(list(combos(range(g.size), n_nodes)), dtype=int)
        if confluent:
            counts = np.array([np.max(np.unique(r, return_counts=True)[1]) for r in idx])
            idx = idx[counts <= MAX_MULTIPLICITY]
        if len(idx) > cfg.max_tuples:
            rng = np.random.default_rng(cfg.seed)
            keep = np.sort(rng.choice(len(idx), cfg.max_tuples, replace=False))
            # endpoint-heavy tuples are the adversarial ones; always keep them
            edge = np.flatnonzero((idx[:, 0] == 0) | (idx[:, -1] == g.size - 1))
            idx = idx[np.union1d(keep, edge[: cfg.max_tuples])]
        return g[idx]

    # stratified Latin hypercube: node j lives in the j-th slice of [lo, hi]
    sampler = qmc.LatinHypercube(d=n_nodes, seed=cfg.seed)
    u = sampler.random(cfg.max_tuples)
    width = (hi - lo) / n_nodes
    pts = lo + width * (np.arange(n_nodes) + u)
    adversarial = [np.linspace(lo, hi, n_nodes)]
    for k in range(1, n_nodes):
        adversarial.append(np.r_[np.full(1, lo), np.linspace(lo + (hi - lo) / 2, hi, n_nodes - 1)])
    pts = np.vstack([pts, *adversarial])
    if confluent:
        rng = np.random.default_rng(cfg.seed + 1)
        merged = pts.copy()
        for row in merged:
            j = rng.integers(0, n_nodes - 1)
            row[j + 1] = row[j]
        ends = []
        for m in range(2, min(MAX_MULTIPLICITY, n_nodes) + 1):
            rest = np.linspace(lo, hi, n_nodes - m + 2)[1:-1] if n_nodes > m else np.array([])
            ends.append(np.sort(np.r_[np.full(m, lo), rest]))
            ends.append(np.sort(np.r_[rest, np.full(m, hi)]))
        pts = np.vstack([pts, merged, *[e for e in ends if e.size == n_nodes]])
    return np.sort(pts, axis=1)


def _tuple_matrices(fam: FunctionFamily, tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stack of confluent alternants; second output flags undefined entries."""
    n1 = tuples.shape[1]
    nodes, inverse = np.unique(tuples, return_inverse=True)
    inverse = inverse.reshape(tuples.shape)
    # occurrence order of each node inside its run of equal values
    ordr = np.zeros_like(inverse)
    for j in range(1, n1):
        ordr[:, j] = np.where(inverse[:, j] == inverse[:, j - 1], ordr[:, j - 1] + 1, 0)
    max_ord = int(ordr.max())
    if max_ord >= MAX_MULTIPLICITY:
        raise UnsupportedOrder("multiplicity cap exceeded")
    vals = np.full((max_ord + 1, nodes.size, n1), np.nan)
    for k in range(max_ord + 1):
        try:
            vals[k] = fam.values(nodes, k)
            continue
        except DomainError:
            if k == 0:
                raise
        for i, x in enumerate(nodes):
            try:
                vals[k, i] = fam.values([x], k)[0]
            except DomainError:
                pass
    mats = vals[ordr, inverse]
    bad = np.any(~np.isfinite(mats), axis=(1, 2))
    return np.nan_to_num(mats, nan=0.0), bad


def _verdict(fam: FunctionFamily, tuples: np.ndarray, cfg: SamplingConfig) -> Verdict:
    mats, undefined = _tuple_matrices(fam, tuples)
    # positive column scaling leaves every sign unchanged and tames power growth
    colmax = np.max(np.abs(mats), axis=(0, 1))
    mats = mats / np.where(colmax == 0, 1.0, colmax)
    norms = np.linalg.norm(mats, axis=2)
    zero_row = np.any(norms == 0, axis=1) | undefined
    safe = np.where(norms == 0, 1.0, norms)
    sign, logabs = np.linalg.slogdet(mats / safe[:, :, None])
    # divide out the (positive) node separation so clustered tuples are not
    # mistaken for vanishing determinants
    span = float(np.ptp(tuples)) or 1.0
    diffs = (tuples[:, None, :] - tuples[:, :, None]) / span
    upper = np.triu(np.ones(diffs.shape[1:], dtype=bool), 1)
    gaps = np.where(upper & (diffs > 0), diffs, 1.0)
    logabs = logabs - np.sum(np.log(gaps), axis=(1, 2))
    rel = np.where(zero_row, 0.0, sign * np.exp(logabs))
    structural = zero_row | (sign == 0)
    samples = len(tuples)

    as_tuple = lambda k: tuple(float(v) for v in tuples[k])  # noqa: E731
    if np.any(structural):
        k = int(np.flatnonzero(structural)[0])
        return Verdict("fail", as_tuple(k), 0.0, 0, samples)
    big = np.abs(rel) > cfg.zero_tol
    min_rel = float(np.min(np.abs(rel)))
    if np.any(big):
        ref = int(np.sign(rel[np.flatnonzero(big)[0]]))
        flipped = np.flatnonzero(big & (np.sign(rel) != ref))
        if flipped.size:
            return Verdict("fail", as_tuple(int(flipped[0])), min_rel, 0, samples)
    else:
        ref = 0
    if not np.all(big):
        k = int(np.flatnonzero(~big)[0])
        return Verdict("inconclusive", as_tuple(k), min_rel, ref, samples)
    return Verdict("pass", None, min_rel, ref, samples)


def is_t_system(fam: FunctionFamily, iv: Interval, cfg: SamplingConfig | None = None) -> Verdict:
    """Sample the sign of ``det(f_i(x_j))`` over increasing node tuples in ``iv``."""
    cfg = cfg or SamplingConfig()
    fam.check_interval(iv)
    lo, hi = _scan_bounds(fam, iv, cfg)
    tuples = _tuples(lo, hi, fam.order + 1, cfg, confluent=False)
    if not iv.is_closed:
        # geometric tail beyond the scan horizon
        tail = np.sort(hi * np.geomspace(1.0, 100.0, fam.order + 2)[1:])
        tuples = np.vstack([tuples, tail])
    return _verdict(fam, tuples, cfg)


def is_et_system(fam: FunctionFamily, iv: Interval, cfg: SamplingConfig | None = None) -> Verdict:
    """Like :func:`is_t_system` but over nondecreasing tuples with confluent rows."""
    cfg = cfg or SamplingConfig()
    fam.check_interval(iv)
    lo, hi = _scan_bounds(fam, iv, cfg)
    tuples = _tuples(lo, hi, fam.order + 1, cfg, confluent=True)
    return _verdict(fam, tuples, cfg)
