import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsecert.core import Interval, SparsePolynomial
from sparsecert.errors import (
    DegenerateDeterminant,
    IdenticallyZero,
    IndexTooLarge,
    SingularSystem,
)
from sparsecert.extremal import (
    KnotSet,
    count_zeros,
    index,
    interpolate,
    nonneg_poly_with_zeros,
    poly_with_nodal_nonnodal,
    poly_with_zeros,
)
from sparsecert.tsystem import FunctionFamily

UNIT = Interval.closed(0, 1)
XS = np.linspace(0, 1, 1001)


def powers(*e):
    return FunctionFamily.powers(e)


def test_index_counts():
    assert index(KnotSet(UNIT, [0.0, 0.5])) == 3
    assert index(KnotSet(UNIT, [])) == 0
    assert index(KnotSet(UNIT, [0.2, 0.7])) == 4


def test_interpolate_line():
    p = interpolate(powers(0, 1), [0, 1], [1, 2])
    assert np.allclose(p.coeffs, [1, 1])


def test_interpolate_zero_values():
    p = interpolate(powers(0, 1, 2), [0, 0.5, 1], [0, 0, 0])
    assert np.allclose(p.coeffs, 0)


def test_interpolate_hand_solved_system():
    # c0 + c1 = 2, c0 + 4 c1 = 5
    p = interpolate(powers(0, 2), [1, 2], [2, 5])
    assert np.allclose(p.coeffs, [1, 1])


def test_interpolate_singular():
    # x^2 does not separate -1 and 1
    with pytest.raises(SingularSystem):
        interpolate(powers(0, 2), [-1, 1], [1, 2])


def test_double_zero_leading_one():
    p = poly_with_zeros(powers(0, 1, 2), KnotSet(UNIT, [(0.5, 2)]))
    assert np.allclose(p.coeffs, [0.25, -1, 1])


def test_triple_knot_not_et():
    with pytest.raises(DegenerateDeterminant):
        poly_with_zeros(powers(0, 1, 3), KnotSet(UNIT, [(0.0, 3)]))


def test_cubic_through_value():
    # oracle: x (x - 1)(x - 2) = x^3 - 3 x^2 + 2 x
    p = poly_with_zeros(powers(0, 1, 2, 3), KnotSet(Interval.closed(0, 3), [0, 1, 2]),
                        normalization=(3.0, 6.0))
    assert np.allclose(p.coeffs, [0, 2, -3, 1], atol=1e-10)


def test_nonneg_double_zero():
    p = nonneg_poly_with_zeros(powers(0, 1, 2), KnotSet(UNIT, [0.5]))
    q = (XS - 0.5) ** 2
    ratio = p(XS) / np.where(q == 0, 1, q)
    assert np.all(p(XS) >= -1e-12)
    assert np.allclose(ratio[q > 1e-3], ratio[0])


def test_nonneg_endpoint():
    p = nonneg_poly_with_zeros(powers(0, 1), KnotSet(UNIT, [1.0]))
    assert p.coeffs[0] > 0
    assert np.allclose(p.coeffs / p.coeffs[0], [1, -1])


def test_nonneg_index_too_large():
    with pytest.raises(IndexTooLarge):
        nonneg_poly_with_zeros(powers(0, 1, 2), KnotSet(UNIT, [0.0, 0.5]))


def test_nonneg_sparse_padding():
    # one double zero with spare order: the result must still be >= 0
    fam = powers(0, 0.7, 1.3, 2.9)
    p = nonneg_poly_with_zeros(fam, KnotSet(UNIT, [0.4]))
    vals = p(XS)
    assert vals.min() >= -1e-10
    assert abs(p(0.4)) < 1e-10


def test_nodal_cubic():
    p = poly_with_nodal_nonnodal(powers(0, 1, 2, 3), [], [0.3, 0.6, 0.9], UNIT)
    # oracle: root factorisation up to scale
    q = (XS - 0.3) * (XS - 0.6) * (XS - 0.9)
    k = np.argmax(np.abs(q))
    assert np.allclose(p(XS), q * p(XS[k]) / q[k], atol=1e-10)
    zc = count_zeros(p, UNIT)
    assert (zc.nodal, zc.nonnodal) == (3, 0)


def test_nonnodal_square_shape():
    p = poly_with_nodal_nonnodal(powers(0, 1, 2), [0.5], [])
    assert np.allclose(p.coeffs / p.coeffs[-1], [0.25, -1, 1])


def test_nodal_index_too_large():
    with pytest.raises(IndexTooLarge):
        poly_with_nodal_nonnodal(powers(0, 1, 2), [0.5], [0.2])


def test_count_zeros_examples():
    sq = SparsePolynomial([0, 1, 2], [0.25, -1, 1])
    zc = count_zeros(sq, UNIT)
    assert (zc.nonnodal, zc.nodal) == (1, 0)
    assert zc.locations[0] == pytest.approx(0.5, abs=1e-6)
    zc = count_zeros(SparsePolynomial([0, 1], [-0.5, 1]), UNIT)
    assert (zc.nonnodal, zc.nodal) == (0, 1)
    zc = count_zeros(SparsePolynomial([1, 2], [-1, 1]), UNIT)
    assert (zc.nonnodal, zc.nodal) == (0, 2)
    assert zc.locations == pytest.approx((0.0, 1.0))


def test_count_zeros_identically_zero():
    with pytest.raises(IdenticallyZero):
        count_zeros(SparsePolynomial([0, 1], [0, 0]), UNIT)


def test_count_zeros_halfline():
    p = SparsePolynomial([0, 1, 2], [2, -3, 1])  # (x - 1)(x - 2)
    zc = count_zeros(p, Interval.halfline())
    assert zc.nodal == 2
    assert zc.locations == pytest.approx((1.0, 2.0), abs=1e-8)


@given(st.lists(st.floats(0.3, 3), min_size=2, max_size=6, unique=True),
       st.lists(st.floats(0.05, 0.95), min_size=1, max_size=3, unique=True))
def test_zero_bound_for_constructed_polynomials(gaps, roots):
    exps = np.r_[0, np.cumsum(gaps)]
    n = len(exps) - 1
    roots = sorted(roots)[:n]
    if len(roots) > 1 and np.min(np.diff(roots)) < 0.05:
        return
    p = poly_with_nodal_nonnodal(FunctionFamily.powers(exps), [], roots, UNIT)
    zc = count_zeros(p, UNIT)
    assert zc.index <= n
    assert zc.nodal >= len(roots)
