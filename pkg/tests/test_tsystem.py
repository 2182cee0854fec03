import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsecert.core import Interval
from sparsecert.errors import DomainError
from sparsecert.tsystem import (
    FunctionFamily,
    SamplingConfig,
    alternant_determinant,
    alternant_matrix,
    confluent_alternant,
    determinant,
    is_et_system,
    is_t_system,
    schur_eval,
    vandermonde_product,
)

UNIT = Interval.closed(0, 1)


def _partition(alpha):
    n = len(alpha) - 1
    return [alpha[n - i] - (n - i) for i in range(n + 1)]


def _schur_at_ones(alpha):
    # oracle: hook-content product for s_lambda(1, ..., 1)
    lam = _partition(alpha)
    m = len(lam)
    out = 1.0
    for i, j in itertools.combinations(range(m), 2):
        out *= (lam[i] - lam[j] + j - i) / (j - i)
    return out


def test_schur_value_at_ones():
    assert schur_eval((0, 1, 3), (1, 1, 1)) == pytest.approx(3.0)
    assert schur_eval((0, 1, 3), (1, 1, 1), method="bialternant") == pytest.approx(3.0)


def test_schur_small_closed_forms():
    x = (0.3, 1.7, 2.2)
    # alpha = (0, 1, 3) is lambda = (1): the elementary sum
    assert schur_eval((0, 1, 3), x) == pytest.approx(sum(x))
    # alpha = (0, 2, 3) is lambda = (1, 1): e_2
    e2 = x[0] * x[1] + x[0] * x[2] + x[1] * x[2]
    assert schur_eval((0, 2, 3), x) == pytest.approx(e2)
    assert schur_eval((0, 1, 2), x) == pytest.approx(1.0)


@given(st.lists(st.integers(0, 7), min_size=2, max_size=5, unique=True))
def test_schur_at_ones_hook_content(alpha):
    alpha = tuple(sorted(alpha))
    ones = (1.0,) * len(alpha)
    assert schur_eval(alpha, ones) == pytest.approx(_schur_at_ones(alpha), rel=1e-10)


@given(st.lists(st.integers(0, 7), min_size=2, max_size=5, unique=True),
       st.lists(st.floats(0.1, 3), min_size=5, max_size=5, unique=True))
def test_vandermonde_schur_identity(alpha, pts):
    alpha = tuple(sorted(alpha))
    xs = sorted(pts[: len(alpha)])
    if min(np.diff(xs)) < 1e-3:
        return
    det = alternant_determinant(FunctionFamily.powers(alpha), xs)
    rhs = vandermonde_product(xs) * schur_eval(alpha, xs)
    assert det == pytest.approx(rhs, rel=1e-9)


def test_two_schur_routes_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        alpha = tuple(sorted(rng.choice(8, size=4, replace=False)))
        x = rng.uniform(0.1, 3, 4)
        a = schur_eval(alpha, x)
        b = schur_eval(alpha, x, method="bialternant")
        assert a == pytest.approx(b, rel=1e-8)


def test_confluent_wronskian():
    fam = FunctionFamily.powers([0, 1, 2])
    m = confluent_alternant(fam, [0.7, 0.7, 0.7])
    assert determinant(m) == pytest.approx(2.0)


def test_quadratic_powers_are_t_system():
    v = is_t_system(FunctionFamily.powers([0, 1, 2]), UNIT)
    assert v.status == "pass" and v.sign == 1


def test_powers_on_symmetric_interval_fail():
    v = is_t_system(FunctionFamily.powers([1, 2]), Interval.closed(-1, 1))
    assert v.status == "fail"
    assert v.witness is not None


def test_sqrt_is_t_but_not_et_at_zero():
    fam = FunctionFamily.powers([0, 0.5])
    assert is_t_system(fam, UNIT).passed
    assert is_et_system(fam, UNIT).status == "fail"


def test_et_counterexample_cubic():
    fam = FunctionFamily.powers([0, 1, 3])
    v = is_et_system(fam, UNIT)
    assert v.status == "fail"
    assert v.witness == (0.0, 0.0, 0.0)
    assert is_et_system(fam, Interval.closed(0.5, 1)).passed


def test_exponentials_and_cauchy():
    assert is_t_system(FunctionFamily.exponentials([0, 0.5, 1.3]), Interval.closed(-1, 2)).passed
    assert is_t_system(FunctionFamily.cauchy([1, 2, 3.5]), Interval.closed(0, 3)).passed
    with pytest.raises(DomainError):
        is_t_system(FunctionFamily.cauchy([-2, -1, -0.5]), Interval.closed(0, 3))


def test_halfline_scan():
    assert is_t_system(FunctionFamily.powers([0, 1.5, 2.2]), Interval.halfline()).passed


def test_higher_order_powers_are_decided():
    fam = FunctionFamily.powers([0, 0.4, 1.1, 1.9, 2.5, 3.3, 4.0])
    assert is_t_system(fam, Interval.closed(0, 2), SamplingConfig(max_tuples=2000)).passed


def test_scaled_family_keeps_sign():
    # a positive weight does not change the sign of the determinant
    fam = FunctionFamily.scaled(FunctionFamily.powers([0, 1, 2]), lambda x: np.exp(x),
                                [lambda x: np.exp(x), lambda x: np.exp(x)])
    assert is_t_system(fam, UNIT).passed


def test_composed_family():
    fam = FunctionFamily.composed(FunctionFamily.powers([0, 1, 2]), np.exp,
                                  [np.exp, np.exp])
    assert is_et_system(fam, UNIT).passed


def test_negative_exponent_at_zero_rejected():
    with pytest.raises(DomainError):
        is_t_system(FunctionFamily.powers([-1, 0]), UNIT)


def test_verdict_is_deterministic():
    fam = FunctionFamily.powers([0, 1.3, 2.1, 2.9])
    a = is_t_system(fam, UNIT, SamplingConfig(seed=3)).to_dict()
    b = is_t_system(fam, UNIT, SamplingConfig(seed=3)).to_dict()
    assert a == b


@given(st.lists(st.floats(0, 4), min_size=2, max_size=4, unique=True))
def test_increasing_real_exponents_on_positive_interval(exps):
    exps = sorted(exps)
    if min(np.diff(exps)) < 0.05:
        return
    v = is_t_system(FunctionFamily.powers(exps), Interval.closed(0.2, 2))
    assert v.status == "pass"


def test_vandermonde_product_empty():
    assert vandermonde_product([1.0]) == 1.0
    assert vandermonde_product([1.0, 3.0, 4.0]) == pytest.approx(2 * 3 * 1)
    assert math.isclose(vandermonde_product([]), 1.0)


def _exact_det(rows):
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for i in range(n):
        p = next(r for r in range(i, n) if m[r][i] != 0)
        if p != i:
            m[i], m[p] = m[p], m[i]
            det = -det
        det *= m[i][i]
        for r in range(i + 1, n):
            f = m[r][i] / m[i][i]
            for c in range(i, n):
                m[r][c] -= f * m[i][c]
    return det


def test_extended_determinant_against_rationals():
    # oracle: exact rational elimination on the same float nodes
    alpha = (3, 5, 6, 7, 9)
    xs = [1.096, 1.335, 1.355, 1.357, 1.363]
    exact = float(_exact_det([[Fraction(x) ** a for a in alpha] for x in xs]))
    got = alternant_determinant(FunctionFamily.powers(alpha), xs)
    assert got == pytest.approx(exact, rel=1e-12)


def test_alternant_determinant_batch_matches_scalar():
    fam = FunctionFamily.powers([0, 1.5, 2.5])
    pts = np.array([[0.1, 0.5, 0.9], [0.2, 1.0, 2.0]])
    batch = alternant_determinant(fam, pts)
    for row, val in zip(pts, batch):
        assert val == pytest.approx(determinant(alternant_matrix(fam, row)), rel=1e-12)


def test_vandermonde_batch_matches_scalar():
    pts = np.array([[0.1, 0.5, 0.9, 1.3], [2.0, 0.2, 1.0, 0.7]])
    batch = vandermonde_product(pts)
    for row, val in zip(pts, batch):
        assert val == pytest.approx(vandermonde_product(row), rel=1e-14)
