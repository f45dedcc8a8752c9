import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergshift.errors import ParameterError
from bergshift.simulator import (
    ShiftOperator,
    apply_right_inverse,
    apply_shift,
    gethner_shapiro_witness,
    orbit_trace,
    periodic_vector,
    shift_power,
)
from bergshift.spaces import BergmanSpace, PolyVector
from bergshift.weights import WeightSequence

A20 = BergmanSpace("standard:alpha=0", 2)

coeffs = st.lists(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False),
                  min_size=1, max_size=15)
weights = st.sampled_from([
    WeightSequence.const(2), WeightSequence.const(-0.5j), WeightSequence.powdecay(0.7),
    WeightSequence.ratio(), WeightSequence.logpow(2, 1, 2),
])


def T(w, space=A20):
    return ShiftOperator(w, space)


def test_shift_examples():
    assert apply_shift(T(WeightSequence.const(2)), PolyVector.monomial(3)) == PolyVector.monomial(2, 2)
    assert apply_shift(T(WeightSequence.const(2)), PolyVector([1])).is_zero
    out = apply_shift(T(WeightSequence.ratio()), PolyVector([1, 0, 3]))
    np.testing.assert_allclose(out.coeffs, [0, 2], rtol=1e-15)
    assert apply_right_inverse(T(WeightSequence.const(2)), PolyVector.monomial(2)) == PolyVector.monomial(3, 0.5)


def test_right_inverse_growth_for_decaying_weights():
    op = T(WeightSequence.powdecay(0.5))
    f = PolyVector([1])
    for _ in range(8):
        f = apply_right_inverse(op, f)
    # z^8 / (w_1...w_8) = z^8 * (9!)^(1/2)
    assert f.degree == 8
    assert abs(f.coeffs[8]) == pytest.approx(math.sqrt(math.factorial(9)), rel=1e-13)


@given(coeffs, weights)
@settings(max_examples=60, deadline=None)
def test_shift_undoes_right_inverse(a, w):
    f = PolyVector(a)
    op = T(w)
    g = apply_right_inverse(op, f)
    back = apply_shift(op, g)
    np.testing.assert_allclose(back.coeffs, f.coeffs, rtol=1e-14, atol=0)
    if not f.is_zero:
        assert g.degree == f.degree + 1
        if f.degree > 0:
            assert apply_shift(op, f).degree == f.degree - 1


@given(coeffs, coeffs, st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), weights)
@settings(max_examples=40, deadline=None)
def test_shift_is_linear(a, b, s, w):
    f, g = PolyVector(a), PolyVector(b)
    op = T(w)
    lhs = apply_shift(op, s * f + g)
    rhs = s * apply_shift(op, f) + apply_shift(op, g)
    n = max(len(lhs.coeffs), len(rhs.coeffs))
    x = np.zeros(n, complex)
    y = np.zeros(n, complex)
    x[: len(lhs.coeffs)] = lhs.coeffs
    y[: len(rhs.coeffs)] = rhs.coeffs
    scale = max(1.0, float(np.max(np.abs(y), initial=0)))
    assert np.max(np.abs(x - y), initial=0) <= 1e-12 * scale


@given(coeffs, st.integers(0, 6))
@settings(max_examples=30, deadline=None)
def test_shift_power_matches_iteration(a, k):
    op = T(WeightSequence.powdecay(0.3))
    f = PolyVector(a)
    g = f
    for _ in range(k):
        g = apply_shift(op, g)
    np.testing.assert_allclose(shift_power(op, f, k).coeffs, g.coeffs, rtol=1e-12)


def test_multiplier_only_sequences_are_rejected():
    w = WeightSequence.custom([0.0, 1.0, 2.0], for_dynamics=False)
    with pytest.raises(ParameterError):
        ShiftOperator(w, A20)


# -- witnesses ------------------------------------------------------------------

def test_witness_examples():
    op = T(WeightSequence.const(1))
    p, q = PolyVector([1, 1]), PolyVector.monomial(2)
    w10 = gethner_shapiro_witness(op, p, q, 10)
    assert w10.dist2 == 0.0
    assert w10.dist1 == pytest.approx(1 / math.sqrt(13), rel=1e-13)
    assert w10.truncation == 12
    w100 = gethner_shapiro_witness(op, p, q, 100)
    assert w100.dist1 == pytest.approx(1 / math.sqrt(103), rel=1e-13)
    assert w100.dist1 < w10.dist1
    assert w10.to_dict() == {"m": 10, "dist1": w10.dist1, "dist2": 0.0, "truncation": 12}


def test_witness_reports_growth_for_decaying_weights():
    op = T(WeightSequence.powdecay(1.0))
    p, q = PolyVector([1, 1]), PolyVector.monomial(2)
    logs = [gethner_shapiro_witness(op, p, q, m).log_dist1 for m in (10, 50, 100, 500)]
    assert np.all(np.diff(logs) > 0)
    big = gethner_shapiro_witness(op, p, q, 500)
    assert big.overflow and big.x is None


def test_witness_needs_m_above_degree():
    with pytest.raises(ParameterError):
        gethner_shapiro_witness(T(WeightSequence.const(2)), PolyVector([0, 0, 1]), PolyVector([1]), 2)


def test_witness_vector_satisfies_the_construction():
    op = T(WeightSequence.const(1.5))
    p, q = PolyVector([1, -1j, 2]), PolyVector([0.5, 3])
    wit = gethner_shapiro_witness(op, p, q, 7)
    np.testing.assert_allclose(shift_power(op, wit.x, 7).coeffs, q.coeffs, rtol=1e-14)


# -- periodic vectors -------------------------------------------------------------

def test_periodic_vector_examples():
    pv = periodic_vector(T(WeightSequence.const(1), BergmanSpace("standard:alpha=1", 2)), 1, N=1000)
    assert pv.residual == pytest.approx(pv.monomial_norm, rel=1e-12)
    assert pv.converges is True
    assert pv.tail_bound is not None and pv.tail_bound < 1e-2

    pv = periodic_vector(T(WeightSequence.const(1)), 2, N=1000)
    assert pv.converges is False
    part = pv.partial_norms
    # harmonic growth: squared partial norms grow like log N
    assert part[1000] ** 2 - part[100] ** 2 == pytest.approx(math.log(1001 / 101), abs=0.01)

    op = T(WeightSequence.const(1))
    pv = periodic_vector(op, 4, N=50)
    g = pv.f
    for _ in range(4):
        g = apply_shift(op, g)
    diff = np.zeros(51, complex)
    diff[: len(g.coeffs)] += g.coeffs
    diff -= pv.f.coeffs
    assert np.flatnonzero(np.abs(diff) > 0).tolist() == [47, 48, 49, 50]
    assert pv.lam == 1j


def test_periodic_vector_preconditions():
    with pytest.raises(ParameterError):
        periodic_vector(T(WeightSequence.const(2)), 3)
    with pytest.raises(ParameterError):
        periodic_vector(T(WeightSequence.const(1)), 5, N=3)


# -- orbits -------------------------------------------------------------------------

def test_orbit_examples():
    f = PolyVector.monomial(5)
    tr = orbit_trace(T(WeightSequence.const(1)), f, 8)
    expected = [1 / math.sqrt(6 - k) for k in range(6)] + [0.0] * 3
    np.testing.assert_allclose(tr.norms, expected, rtol=1e-13)
    assert tr.truncation == 5

    tr2 = orbit_trace(T(WeightSequence.const(2)), f, 6)
    np.testing.assert_allclose(tr2.norms[:6], [2**k / math.sqrt(6 - k) for k in range(6)], rtol=1e-13)
    assert tr2.norms[6] == 0.0

    zero = orbit_trace(T(WeightSequence.const(2)), PolyVector.zero(), 3)
    np.testing.assert_array_equal(zero.norms, 0.0)


def test_orbit_truncation_guard():
    with pytest.raises(ParameterError):
        orbit_trace(T(WeightSequence.const(1)), PolyVector.monomial(5), 3, truncN=2)
    with pytest.raises(ParameterError):
        orbit_trace(T(WeightSequence.const(1)), PolyVector.monomial(5), 0)


def test_orbit_on_nonquadratic_space():
    tr = orbit_trace(T(WeightSequence.const(1), BergmanSpace("standard:alpha=1", 3)), PolyVector.monomial(3), 4)
    space = BergmanSpace("standard:alpha=1", 3)
    np.testing.assert_allclose(tr.norms[:4], [space.monomial_norm(3 - k) for k in range(4)], rtol=1e-6)
    assert tr.norms[4] == 0.0
