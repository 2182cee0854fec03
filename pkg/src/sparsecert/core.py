"""Exponent vectors, intervals and sparse (Muntz) polynomials.

A sparse polynomial is a real combination ``sum_i a_i x**alpha_i`` over a
strictly increasing vector of real exponents. For ``x > 0`` every power is
evaluated as ``exp(alpha * log(x))`` so integer and non-integer exponents go
through the same code path. At ``x == 0`` the convention ``0**0 == 1`` holds,
positive powers vanish and negative powers are undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ShapeError, UnsupportedOrder

#: Highest derivative order supported by :func:`evaluate_derivative`.
MAX_DERIVATIVE_ORDER = 2


def _as_float_tuple(values: Iterable) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def falling_factorial(alpha: float, k: int) -> float:
    """``alpha * (alpha - 1) * ... * (alpha - k + 1)``; equals 1 for ``k == 0``."""
    out = 1.0
    for j in range(k):
        out *= alpha - j
    return out


@dataclass(frozen=True)
class ExponentVector:
    """Strictly increasing real exponents ``alpha_0 < ... < alpha_n``."""

    exponents: tuple[float, ...]

    def __init__(self, exponents: Iterable[float]):
        exps = _as_float_tuple(exponents)
        if len(exps) == 0:
            raise ShapeError("an exponent vector needs at least one exponent")
        if any(not math.isfinite(e) for e in exps):
            raise DomainError("exponents must be finite")
        for lo, hi in zip(exps, exps[1:]):
            if not lo < hi:
                raise ShapeError(f"exponents must be strictly increasing, got {exps}")
        object.__setattr__(self, "exponents", exps)

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]

    @property
    def order(self) -> int:
        return len(self.exponents) - 1

    @property
    def all_integer(self) -> bool:
        return all(float(e).is_integer() for e in self.exponents)

    @property
    def has_negative(self) -> bool:
        return self.exponents[0] < 0

    def as_array(self) -> np.ndarray:
        return np.asarray(self.exponents, dtype=float)

    def index_of(self, alpha: float) -> int:
        try:
            return self.exponents.index(float(alpha))
        except ValueError:
            raise KeyError(alpha) from None


@dataclass(frozen=True)
class Interval:
    """Either a closed interval ``[a, b]`` or the half-line ``[0, inf)``."""

    kind: str = "closed"
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("closed", "halfline"):
            raise DomainError(f"unknown interval kind {self.kind!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if self.kind == "closed":
            if not (math.isfinite(self.a) and math.isfinite(self.b)):
                raise DomainError("closed interval endpoints must be finite")
            if not self.a < self.b:
                raise DomainError(f"closed interval needs a < b, got [{self.a}, {self.b}]")
        else:
            object.__setattr__(self, "a", 0.0)
            object.__setattr__(self, "b", math.inf)

    @classmethod
    def closed(cls, a: float, b: float) -> "Interval":
        return cls("closed", a, b)

    @classmethod
    def halfline(cls) -> "Interval":
        return cls("halfline", 0.0, math.inf)

    @property
    def is_closed(self) -> bool:
        return self.kind == "closed"

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.a - tol <= x <= self.b + tol

    def check_exponents(self, exps: ExponentVector) -> None:
        """Raise :class:`DomainError` if the powers are not defined on the interval."""
        if exps.has_negative and not self.a > 0:
            raise DomainError("negative exponents need a left endpoint a > 0")
        if not exps.all_integer and self.a < 0:
            raise DomainError("non-integer exponents need a left endpoint a >= 0")

    def __str__(self) -> str:
        if self.is_closed:
            return f"[{self.a:g}, {self.b:g}]"
        return "[0, inf)"


def power_basis(exps: ExponentVector | Sequence[float], x, order: int = 0) -> np.ndarray:
    """Matrix of ``d^order/dx^order x**alpha_i`` with shape ``(len(x), n + 1)``.

    Raises :class:`DomainError` where a member (or its derivative) is undefined.
    """
    alphas = np.asarray(tuple(exps), dtype=float)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if order < 0:
        raise UnsupportedOrder("derivative order must be nonnegative")
    ff = np.array([falling_factorial(a, order) for a in alphas])
    shifted = alphas - order
    out = np.empty((xs.size, alphas.size))

    pos = xs > 0
    if np.any(pos):
        logx = np.log(xs[pos])[:, None]
        out[pos] = ff * np.exp(shifted * logx)

    zero = xs == 0
    if np.any(zero):
        row = np.zeros(alphas.size)
        for i, (c, s) in enumerate(zip(ff, shifted)):
            if c == 0.0:
                continue
            if s == 0.0:
                row[i] = c
            elif s < 0:
                raise DomainError(
                    f"x**{alphas[i]:g} has no finite derivative of order {order} at 0"
                )
        out[zero] = row

    neg = xs < 0
    if np.any(neg):
        if not all(float(a).is_integer() for a in alphas):
            raise DomainError("non-integer exponents are undefined for x < 0")
        xn = xs[neg][:, None]
        out[neg] = ff * np.power(xn, shifted)
        # ff == 0 kills the term regardless of the (possibly negative) power
        out[neg] = np.where(ff == 0.0, 0.0, out[neg])

    if not np.all(np.isfinite(out)):
        raise DomainError("power basis not finite at the requested points")
    return out


@dataclass(frozen=True)
class SparsePolynomial:
    """``sum_i coeffs[i] * x**exps[i]``."""

    exps: ExponentVector
    coeffs: np.ndarray = field(repr=False)

    def __init__(self, exps, coeffs):
        if not isinstance(exps, ExponentVector):
            exps = ExponentVector(exps)
        c = np.array(coeffs, dtype=float).reshape(-1)
        if c.size != len(exps):
            raise ShapeError(
                f"{c.size} coefficients given for {len(exps)} exponents"
            )
        c.setflags(write=False)
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "coeffs", c)

    def __repr__(self) -> str:
        terms = " + ".join(f"{c:.6g}*x^{a:g}" for a, c in zip(self.exps, self.coeffs))
        return f"SparsePolynomial({terms or '0'})"

    @property
    def order(self) -> int:
        return self.exps.order

    @property
    def leading_coefficient(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, x):
        return evaluate(self, x)

    def derivative(self, x, order: int = 1):
        return evaluate_derivative(self, x, order)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def _aligned(self, other: "SparsePolynomial") -> bool:
        return self.exps == other.exps

    def __add__(self, other):
        if isinstance(other, SparsePolynomial):
            if self._aligned(other):
                return SparsePolynomial(self.exps, self.coeffs + other.coeffs)
            merged = sorted(set(self.exps) | set(other.exps))
            c = np.zeros(len(merged))
            for a, v in zip(self.exps, self.coeffs):
                c[merged.index(a)] += v
            for a, v in zip(other.exps, other.coeffs):
                c[merged.index(a)] += v
            return SparsePolynomial(merged, c)
        return NotImplemented

    def __neg__(self):
        return SparsePolynomial(self.exps, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, SparsePolynomial):
            return self + (-other)
        return NotImplemented

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, np.floating)):
            return SparsePolynomial(self.exps, float(scalar) * self.coeffs)
        return NotImplemented

    __rmul__ = __mul__

    def coefficient(self, alpha: float) -> float:
        """Coefficient of ``x**alpha`` (zero if the exponent is absent)."""
        try:
            return float(self.coeffs[self.exps.index_of(alpha)])
        except KeyError:
            return 0.0

    def to_dict(self) -> dict:
        return {"exponents": list(self.exps), "coefficients": self.coeffs.tolist()}


def evaluate(p: SparsePolynomial, x):
    """Value of ``p`` at ``x`` (scalar or array)."""
    scalar = np.ndim(x) == 0
    vals = power_basis(p.exps, x) @ p.coeffs
    return float(vals[0]) if scalar else vals


def evaluate_derivative(p: SparsePolynomial, x, order: int = 1):
    """``order``-th derivative of ``p`` at ``x``; ``order == 0`` is plain evaluation."""
    if order > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrder(
            f"derivative order {order} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
        )
    scalar = np.ndim(x) == 0
    vals = power_basis(p.exps, x, order) @ p.coeffs
    return float(vals[0]) if scalar else vals


def grid(iv: Interval, size: int = 10_000, horizon: float | None = None) -> np.ndarray:
    """Uniform verification grid on ``iv`` (half-line truncated at ``horizon``)."""
    if iv.is_closed:
        return np.linspace(iv.a, iv.b, size)
    top = 10.0 if horizon is None else float(horizon)
    return np.linspace(0.0, top, size)
