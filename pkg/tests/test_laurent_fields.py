import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcflow.errors import DomainError, GridMismatchError
from qcflow.fields import BeltramiField, DiskHolomorphic
from qcflow.grid import DiskQuadrature, circle_nodes
from qcflow.laurent import LaurentMap, curve_contains, is_simple, winding_number

QUAD = DiskQuadrature()


# --- Laurent maps -------------------------------------------------------------------------


def test_evaluation_and_derivatives():
    f = LaurentMap(2.0, [0.5, 0.1, -0.2j])
    z = np.array([1.5, 2j, -1 + 1j])
    assert np.allclose(f(z), 2 * z + 0.5 + 0.1 / z - 0.2j / z**2, rtol=1e-15)
    assert np.allclose(f.deriv(z), 2 - 0.1 / z**2 + 0.4j / z**3, rtol=1e-15)
    assert np.allclose(f.deriv(z, 2), 0.2 / z**3 - 1.2j / z**4, rtol=1e-15)
    assert np.allclose(f.deriv(z, 3), -0.6 / z**4 + 4.8j / z**5, rtol=1e-15)
    with pytest.raises(ValueError):
        f.deriv(z, 4)


def test_state_round_trip_and_padding():
    f = LaurentMap(1.5, [0.1, 0.2])
    y = f.to_state(4)
    assert y.size == 6 and y[0] == 1.5 and y[-1] == 0
    g = LaurentMap.from_state(y)
    assert g.alpha == f.alpha and np.array_equal(g.a[:2], f.a)
    assert np.array_equal(f.padded(0), [0.1])


def test_area_formula_against_shoelace():
    f = LaurentMap(2.0, [0.3, 0.2, 0.1j, 0.05])
    c = f.boundary(4096)
    shoelace = 0.5 * np.sum(c.real * np.roll(c.imag, -1) - np.roll(c.real, -1) * c.imag)
    assert abs(f.area() - shoelace) < 1e-5


def test_min_abs_derivative():
    md, th = LaurentMap(1.0, [0.0, 0.5]).min_abs_derivative(256)
    assert abs(md - 0.5) < 1e-15 and th == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(1.05, 4.0), st.floats(0, 2 * math.pi))
def test_inverse(r, angle):
    f = LaurentMap(1.0, [0.1, 0.3, 0.05j])
    z = r * np.exp(1j * angle)
    assert abs(f.inverse(f(z)) - z) < 1e-12 * r


def test_tail_energy():
    f = LaurentMap(1.0, [0.0, 1.0, 0.5, 0.1])
    assert f.tail_energy(1) == pytest.approx(2 * 0.25 + 3 * 0.01, rel=1e-15)
    assert f.tail_energy(3) == 0


def test_schwarzian_requires_nonvanishing_derivative():
    with pytest.raises(DomainError):
        LaurentMap(1.0, [0.0, 1.0]).schwarzian(1.0)


# --- curve geometry ------------------------------------------------------------------------------


def test_winding_number_and_containment():
    circle = np.exp(1j * circle_nodes(256))
    assert winding_number(circle, 0.0) == 1
    assert np.array_equal(winding_number(circle, np.array([0.5, 2.0])), [1, 0])
    assert curve_contains(2 * circle, circle)
    assert not curve_contains(circle, 2 * circle)
    assert curve_contains(circle, circle, tol=1e-12)


def test_is_simple():
    th = circle_nodes(512)
    assert is_simple(np.exp(1j * th))
    assert not is_simple(np.exp(1j * th) + 1.5 * np.exp(-2j * th))
    assert not is_simple(LaurentMap(1.0, [0.0, 0.0, 0.6]).boundary(512))


# --- disk fields ----------------------------------------------------------------------------------


def test_beltrami_field_arithmetic():
    a = BeltramiField(lambda w: np.conj(w))
    b = BeltramiField.constant(0.5)
    w = np.array([0.2 + 0.1j, -0.3j])
    assert np.allclose((a + b)(w), np.conj(w) + 0.5)
    assert np.allclose((a * 2 - b)(w), 2 * np.conj(w) - 0.5)
    assert np.allclose(a.conj()(w), w)
    assert abs(a.ess_sup(QUAD) - np.max(np.abs(QUAD.points))) < 1e-15


def test_sample_backed_field():
    q = DiskQuadrature(4, 8)
    f = BeltramiField.from_samples(q, np.ones((4, 8)))
    assert np.array_equal(f.samples(q), np.ones((4, 8)))
    with pytest.raises(DomainError):
        f(0.1)
    with pytest.raises(GridMismatchError):
        BeltramiField.from_samples(q, np.ones((3, 8)))
    with pytest.raises(ValueError):
        BeltramiField()


def test_disk_holomorphic():
    p = DiskHolomorphic([1.0, 2.0, 3.0])
    z = np.array([0.1, 0.5j])
    assert np.allclose(p(z), 1 + 2 * z + 3 * z**2)
    assert np.allclose(p.derivative()(z), 2 + 6 * z)
    assert np.allclose((p * 2j)(z), 2j * p(z))
    assert np.allclose((p + DiskHolomorphic.monomial(3))(z), p(z) + z**3)
    assert p.degree == 2
