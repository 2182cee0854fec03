import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsecert.core import Interval, SparsePolynomial, power_basis
from sparsecert.errors import (
    ConfigError,
    DomainError,
    ExponentMismatch,
    InfeasibleSequence,
    NotDense,
    ShapeError,
    SingularSystem,
)
from sparsecert.moments import (
    AtomicMeasure,
    FeasibilityConfig,
    TruncatedMomentSequence,
    hankel_psd_checks,
    moments_of,
    recover_atoms,
    riesz,
    signed_representation,
    sparse_feasible,
)

UNIT = Interval.closed(0, 1)
HALF = AtomicMeasure([0.25, 0.75], [0.5, 0.5])


def seq(exps, values):
    return TruncatedMomentSequence(exps, values)


def test_riesz_examples():
    s = seq([0, 1, 2], [1, 1, 1])
    assert riesz(s, SparsePolynomial([0, 1], [1, -1])) == 0
    assert riesz(s, SparsePolynomial([0], [0])) == 0
    assert riesz(seq([0, 1, 2], [1, 2, 4]), SparsePolynomial([2], [1])) == 4


def test_riesz_exponent_mismatch():
    with pytest.raises(ExponentMismatch):
        riesz(seq([0, 1], [1, 1]), SparsePolynomial([0, 2], [1, 1]))


def test_moments_of_examples():
    assert np.allclose(moments_of(AtomicMeasure([1], [1]), [0, 1, 2]).values, [1, 1, 1])
    assert np.allclose(moments_of(HALF, [0, 1]).values, [1, 0.5])
    assert np.allclose(moments_of(HALF, [0, 1, 2]).values, [1, 0.5, 0.3125])


def test_moments_of_domain():
    with pytest.raises(DomainError):
        moments_of(AtomicMeasure([-1], [1]), [0, 0.5])


def test_atomic_measure_validation():
    with pytest.raises(DomainError):
        AtomicMeasure([0.1], [-1])
    with pytest.raises(ShapeError):
        AtomicMeasure([0.1, 0.1], [1, 1])


def test_hankel_examples():
    s = seq([0, 1, 2], [1, 0, 1])
    checks = hankel_psd_checks(s)
    assert checks["hamburger"].passed
    assert not checks["stieltjes"].passed
    assert hankel_psd_checks(seq([0, 1, 2], [1, 1, 1]))["hausdorff"].passed


def test_hankel_needs_dense():
    with pytest.raises(NotDense):
        hankel_psd_checks(seq([0, 1, 3], [1, 1, 1]))


def test_hausdorff_even_order_boundary():
    # x (1 - x)(x - 1/2)^2 >= 0 on [0, 1] has Riesz value -1/16 against delta_{1/2}-free data
    # built from delta_0 + delta_1 + delta_{1/2} minus a little mass at 1/2
    mu = AtomicMeasure([0.0, 0.5, 1.0], [1, 1, 1])
    good = moments_of(mu, range(5))
    assert hankel_psd_checks(good)["hausdorff"].passed
    bad = seq(range(5), good.values - 0.01 * moments_of(AtomicMeasure([0.2], [1]), range(5)).values)
    assert not hankel_psd_checks(bad)["hausdorff"].passed


def test_feasible_two_atoms():
    r = sparse_feasible(moments_of(HALF, [0, 1, 2]), UNIT)
    assert r.status == "feasible"


def test_infeasible_mass_bound():
    r = sparse_feasible(seq([0, 1], [1, 2]), UNIT)
    assert r.status == "infeasible"
    assert np.allclose(r.witness.coeffs, [1, -1])
    assert riesz(seq([0, 1], [1, 2]), r.witness) == pytest.approx(-1)


def test_zero_sequence_feasible():
    r = sparse_feasible(seq([0, 0.5, 1.5, 2], [0, 0, 0, 0]), UNIT)
    assert r.status == "feasible"


def test_feasible_config_errors():
    with pytest.raises(ConfigError):
        sparse_feasible(seq([0.5, 1], [1, 1]), UNIT)
    with pytest.raises(ConfigError):
        FeasibilityConfig(screen=0)


def test_negative_exponents_away_from_zero():
    mu = AtomicMeasure([0.7, 1.8], [1, 0.4])
    s = moments_of(mu, [-1.5, -0.5, 0.3, 1.2])
    assert sparse_feasible(s, Interval.closed(0.5, 2)).status == "feasible"


def test_halfline_boundary_sequence_is_marginal():
    # (1, 0, 1) lies in the closure of the moment cone on [0, inf) only
    r = sparse_feasible(seq([0, 1, 2], [1, 0, 1]), Interval.halfline())
    assert r.status == "marginal"
    assert riesz(seq([0, 1, 2], [1, 0, 1]), r.witness) == pytest.approx(0, abs=1e-12)


def test_halfline_infeasible():
    s = seq([0, 1, 2], [1, 1, 0.5])
    r = sparse_feasible(s, Interval.halfline())
    assert r.status == "infeasible"
    xs = np.linspace(0, 50, 2001)
    assert r.witness(xs).min() >= -1e-9
    assert riesz(s, r.witness) < 0


def test_halfline_round_trip():
    mu = AtomicMeasure([0.5, 3.0], [1, 2])
    s = moments_of(mu, [0, 1.5, 2.2, 3.1, 4.0])
    assert sparse_feasible(s, Interval.halfline()).status == "feasible"
    got = recover_atoms(s, Interval.halfline())
    assert np.allclose(moments_of(got, s.exps).values, s.values, rtol=1e-9)


def test_recover_two_atoms():
    mu = recover_atoms(moments_of(HALF, [0, 1, 2, 3]), UNIT)
    assert np.allclose(mu.atoms, [0.25, 0.75], atol=1e-6)
    assert np.allclose(mu.weights, [0.5, 0.5], atol=1e-6)


def test_recover_boundary_mass():
    mu = recover_atoms(seq([0, 1, 2], [1, 1, 1]), UNIT)
    assert np.allclose(mu.atoms, [1.0]) and np.allclose(mu.weights, [1.0])


def test_recover_infeasible():
    with pytest.raises(InfeasibleSequence) as err:
        recover_atoms(seq([0, 1], [1, 2]), UNIT)
    assert err.value.details["witness"] is not None


def test_signed_examples():
    assert np.allclose(signed_representation(seq([0, 1], [1, 5]), [0, 1]), [-4, 5])
    w = signed_representation(moments_of(HALF, [0, 1]), [0.25, 0.75])
    assert np.allclose(w, [0.5, 0.5])
    # oracle: numpy solve of the 3x3 alternant system
    a = np.array([[1, 1, 1], [0, 1, 2], [0, 1, 4]], dtype=float)
    w = signed_representation(seq([0, 1, 2], [1, 0, 1]), [0, 1, 2])
    assert np.allclose(w, np.linalg.solve(a, [1, 0, 1]))


def test_signed_singular():
    with pytest.raises(SingularSystem):
        signed_representation(seq([0, 2], [1, 1]), [-1, 1])
    with pytest.raises(ShapeError):
        signed_representation(seq([0, 2], [1, 1]), [1])


@st.composite
def measures(draw):
    k = draw(st.integers(1, 3))
    atoms = draw(st.lists(st.floats(0.05, 0.95), min_size=k, max_size=k, unique=True))
    if k > 1 and np.min(np.diff(sorted(atoms))) < 0.02:
        atoms = list(np.linspace(0.1, 0.9, k))
    weights = draw(st.lists(st.floats(0.1, 2), min_size=k, max_size=k))
    n = draw(st.integers(1, 5))
    gaps = draw(st.lists(st.floats(0.4, 1.5), min_size=n, max_size=n))
    return AtomicMeasure(atoms, weights), np.r_[0, np.cumsum(gaps)]


@settings(max_examples=10)
@given(measures())
def test_round_trip_property(case):
    mu, exps = case
    s = moments_of(mu, exps)
    assert sparse_feasible(s, UNIT).status == "feasible"
    got = recover_atoms(s, UNIT)
    assert len(got) <= len(exps)
    assert np.max(np.abs(moments_of(got, exps).values - s.values)) <= 1e-7


@settings(max_examples=10)
@given(measures(), st.floats(0.05, 0.5))
def test_witness_duality(case, eps):
    # on [0, 1] the total mass bounds every moment; undercut it by eps
    mu, exps = case
    vals = moments_of(mu, exps).values.copy()
    vals[0] = np.max(vals[1:]) - eps
    bad = TruncatedMomentSequence(exps, vals)
    r = sparse_feasible(bad, UNIT)
    assert r.status == "infeasible"
    xs = np.linspace(0, 1, 4001)
    assert r.witness(xs).min() >= -1e-9
    assert riesz(bad, r.witness) < 0


@given(st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_signed_representation_residual(vals):
    s = seq(range(5), vals)
    pts = [-2.0, -1.0, 0.0, 1.0, 2.0]
    w = signed_representation(s, pts)
    assert np.max(np.abs(power_basis(s.exps, pts).T @ w - s.values)) <= 1e-9 * (1 + np.max(np.abs(vals)))
