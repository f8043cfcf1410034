import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcflow.errors import DomainError, NearSingularError, PositivityError, SingularJacobianError
from qcflow.fields import BeltramiField, DiskHolomorphic
from qcflow.grid import CircleGrid, DiskQuadrature, cauchy_transform_disk, circle_nodes
from qcflow.laurent import LaurentMap
from qcflow.loewner import (CSplitChain, HerglotzFunction, InteriorMap, characteristics_check,
                            check_subordination, first_variation_richardson, generator_beta_rate,
                            growth_envelope_check, herglotz_from_field, herglotz_from_field_ode,
                            herglotz_from_nu, interior_F, lk_ode_integrate, lk_pde_evolve,
                            nu0_from_path, nu_from_superposition, p_from_superposition,
                            p_remark_form, pde_residual, semiflow, subordination_criterion,
                            whole_plane_G)
from qcflow.teich import lambda_star
from qcflow.vect import CircleField

QUAD = DiskQuadrature()
ONE = HerglotzFunction.constant(1.0)
P2 = HerglotzFunction([1.0, 0.0, 1.0])  # 1 + 1/zeta^2


def cos_(k, n=64):
    return CircleField.trig(cos={k: 1.0}, n=n)


# --- Herglotz functions -----------------------------------------------------------------------


def test_herglotz_from_nu_closed_forms():
    assert herglotz_from_nu(BeltramiField.zero(), 1.0, 0.0, 2.0, QUAD) == 1.0
    one = BeltramiField.constant(1.0)
    assert abs(herglotz_from_nu(one, 1.0, 0.0, 2.0, QUAD) - 1.25) < 1e-12
    z = np.array([1.01, -1.5j, 3 + 3j])
    assert np.max(np.abs(herglotz_from_nu(one, 1.0, 0.0, z, QUAD) - (1 + 1 / z**2))) < 1e-10


def test_herglotz_from_nu_positive_and_matches_coefficients():
    p = HerglotzFunction.from_nu(BeltramiField.constant(1.0), quad=QUAD)
    assert p.check_positive() > 0
    z = np.array([1.5, 2j, -4.0])
    direct = herglotz_from_nu(BeltramiField.constant(1.0), 1.0, 0.0, z, QUAD)
    assert np.max(np.abs(p(z) - direct)) < 1e-12


def test_herglotz_from_nu_domain():
    with pytest.raises(DomainError):
        herglotz_from_nu(BeltramiField.zero(), 1.0, 0.0, 0.5)


def test_herglotz_from_field_closed_forms():
    zero = CircleField(np.zeros(64))
    assert abs(herglotz_from_field(zero, 1.5, 0.2j, 2.0) - (1.5 + 0.1j)) < 1e-15
    # cos theta has no e^{-2 i theta} or lower modes, so the kernel vanishes
    for z in (10.0, 100.0):
        assert abs(herglotz_from_field(cos_(1), 1.0, 0.0, z) - 1.0) < 1e-15
    # cos 2 theta: the kernel is exactly 1/(2 zeta^2)
    for z in (10.0, 100.0):
        # subtracting p0 = 1 costs eps, which the z^2 factor amplifies
        assert abs((herglotz_from_field(cos_(2), 1.0, 0.0, z) - 1.0) * z**2 - 0.5) < 1e-14 * z**2


def test_herglotz_from_field_matches_coefficient_series():
    d = CircleField.trig(0.1, cos={2: 0.3, 3: -0.2}, sin={4: 0.1}, n=64)
    p = HerglotzFunction.from_field(d, 1.0, 0.1)
    z = np.array([1.02, 1.5j, -3.0 + 1j])
    assert np.max(np.abs(p(z) - herglotz_from_field(d, 1.0, 0.1, z))) < 1e-12


def test_herglotz_from_field_margin():
    with pytest.raises(NearSingularError):
        herglotz_from_field(cos_(2), 1.0, 0.0, 1.005)


def test_herglotz_from_field_circle_of_radius_alpha():
    # boundary data 1/|f'|^2 for f = alpha zeta is constant
    alpha = 1.7
    d = CircleField(np.full(64, -2 / alpha**2))
    from qcflow.grid import schwarz_integral
    sch = schwarz_integral(CircleGrid(np.full(64, 1 / alpha**2)), 2.0)
    assert abs(herglotz_from_field(d, 1 / alpha**2, 0.0, 2.0) - sch) < 1e-10


def test_herglotz_from_field_ode_identity_matches_field_kernel():
    g = LaurentMap.identity()
    assert abs(herglotz_from_field_ode(g, cos_(2), 1.0, 0.0, 2.0)
               - herglotz_from_field(cos_(2), 1.0, 0.0, 2.0)) < 1e-13
    zero = CircleField(np.zeros(64))
    assert abs(herglotz_from_field_ode(g, zero, 1.0, 0.5, 2.0) - 1.25) < 1e-15


def test_herglotz_from_field_ode_dilated_identity():
    a = math.exp(0.1)
    g = LaurentMap(a)
    # (zg'/g)^2 = 1 and the contour integral is a / (2 zeta^2) for d = cos 2 theta
    assert abs(herglotz_from_field_ode(g, cos_(2), 1.0, 0.0, 3.0) - (1 + a / 18)) < 1e-9


def test_herglotz_from_field_ode_rejects_interior_points():
    g = LaurentMap(1.0, [0.0, 0.2])
    with pytest.raises(DomainError):
        herglotz_from_field_ode(g, cos_(2), 1.0, 0.0, 0.5)
    with pytest.raises(NearSingularError):
        herglotz_from_field_ode(g, cos_(2), 1.0, 0.0, 1.205)


def test_positivity_gate():
    with pytest.raises(PositivityError) as exc:
        HerglotzFunction([1.0, 2.0]).check_positive()
    assert exc.value.value < 0
    with pytest.raises(ValueError):
        HerglotzFunction([-1.0])
    with pytest.raises(ValueError):
        HerglotzFunction([1.0 + 1j])
    assert P2.check_positive() > 0


# --- Beltrami paths ---------------------------------------------------------------------------


def test_nu0_closed_forms():
    chain = CSplitChain(2.0)
    assert abs(chain.nu0(0.3)) <= 1e-12
    mu_dot = np.array([0.1 + 0.2j, -0.3j])
    assert np.allclose(nu0_from_path(np.zeros(2), mu_dot), -mu_dot, atol=0, rtol=1e-15)
    nu = lambda_star(DiskHolomorphic([1.0, 0.5j]))
    w = np.array([0.2, 0.5j])
    assert np.allclose(nu0_from_path(0 * w, nu(w)), -nu(w), atol=1e-16)


def test_nu0_phase_term():
    # f_z = e^{i t}: d/dt(mu f_z/conj f_z) contributes 2i mu
    mu, phase_rate = 0.3, 0.7
    val = nu0_from_path(mu, 0.0, 1.0 + 0j, 1j * phase_rate)
    assert abs(val + 2j * mu * phase_rate / (1 - mu**2)) < 1e-15


def test_nu0_domain_and_support():
    with pytest.raises(DomainError):
        nu0_from_path(1.0, 0.0)
    pts = np.array([0.1, 0.95])
    with pytest.raises(DomainError):
        nu0_from_path(np.array([0.2, 0.2]), np.zeros(2), points=pts, support_delta=0.1)
    out = nu0_from_path(np.array([0.2, 0.0]), np.zeros(2), points=pts, support_delta=0.1)
    assert np.all(out == 0)


def test_subordination_criterion_examples():
    r0 = subordination_criterion(np.zeros(4))
    assert r0.ok and abs(r0.margin - 0.706859) < 1e-6
    assert subordination_criterion(np.full(4, 0.7)).ok
    assert not subordination_criterion(np.full(4, 0.71)).ok
    r = subordination_criterion(BeltramiField.constant(0.5), QUAD)
    assert abs(r.bound - 0.5 / r.constant) < 1e-15 and r.bound < 1


def test_growth_envelope():
    q = 0.8
    u = np.exp(1j * np.array([0.0, 1.0, 2.0]))
    const_path = [(t, 0.3 * u) for t in (0.0, 0.5, 1.0)]
    assert growth_envelope_check(const_path, q)
    path = [(t, np.tanh(q * t) * u) for t in np.linspace(0, 2, 21)]
    assert growth_envelope_check(path, q)
    jump = [(0.0, 0.0 * u), (0.1, 0.9 * u)]
    assert not growth_envelope_check(jump, q)


# --- Loewner-Kufarev PDE ----------------------------------------------------------------------


def test_pde_identity_shrinks_exponentially():
    states = lk_pde_evolve(LaurentMap.identity(), ONE, 1.0, 0.25, N=8)
    for s in states:
        assert abs(s.f.alpha - math.exp(-s.t)) < 1e-12
        assert np.max(np.abs(s.f.a)) < 1e-14


def test_pde_conformal_radius_law():
    states = lk_pde_evolve(LaurentMap(1.0, [0.0, 0.1]), ONE, 0.5, 0.1, N=8)
    for s in states:
        assert abs(s.diagnostics["alpha"] - math.exp(-s.t)) < 1e-12
        # the 1/zeta coefficient moves the other way
        assert abs(s.f.a[1] - 0.1 * math.exp(s.t)) < 1e-12


def test_pde_subordination_and_residual():
    states = lk_pde_evolve(LaurentMap(1.0, [0.0, 0.1]), P2, 0.2, 0.1, N=64)
    assert [round(s.t, 12) for s in states] == [0.0, 0.1, 0.2]
    assert check_subordination(states)
    f = states[-1].f
    y = f.to_state(64)
    from qcflow.loewner import lk_rhs_coeffs
    f_dot = LaurentMap.from_state(lk_rhs_coeffs(y, P2.padded(65)))
    assert pde_residual(f, f_dot, P2, radius=1.5) < 1e-10


def test_pde_rejects_nonpositive_p():
    with pytest.raises(PositivityError):
        lk_pde_evolve(LaurentMap.identity(), HerglotzFunction([1.0, 2.0]), 0.1, 0.1)


def test_pde_time_dependent_p():
    states = lk_pde_evolve(LaurentMap.identity(), lambda t: HerglotzFunction.constant(1.0 + t),
                           1.0, 0.5, N=4)
    assert abs(states[-1].f.alpha - math.exp(-1.5)) < 1e-10


# --- Loewner-Kufarev ODE ----------------------------------------------------------------------


def test_ode_closed_forms():
    tr = lk_ode_integrate(2.0, ONE, 1.0, 0.1, sign="expanding")
    assert np.max(np.abs(tr.w - 2 * np.exp(tr.t))) < 1e-10
    assert tr.exit_time is None
    assert np.max(np.abs(tr.normalized_minus - 2)) < 1e-10
    tr = lk_ode_integrate(2.0, ONE, 1.0, 0.1, sign="retracting")
    assert abs(tr.exit_time - math.log(2)) < 1e-10
    assert np.max(np.abs(tr.w - 2 * np.exp(-tr.t))) < 1e-10
    assert np.max(np.abs(tr.normalized_plus - 2)) < 1e-10


def test_ode_expanding_limit_converges():
    tr = lk_ode_integrate(2.0, P2, 5.0, 0.01, sign="expanding")
    lim = tr.normalized_minus
    assert abs(lim[-1] - lim[-2]) < 1e-6
    assert np.all(np.diff(np.abs(tr.w)) > 0)


@settings(max_examples=20, deadline=None)
@given(st.floats(1.05, 5), st.floats(0, 2 * math.pi))
def test_ode_expanding_modulus_nondecreasing(r, angle):
    tr = lk_ode_integrate(r * np.exp(1j * angle), P2, 0.5, 0.05, sign="expanding")
    assert np.all(np.diff(np.abs(tr.w)) >= 0)


def test_ode_domain():
    with pytest.raises(DomainError):
        lk_ode_integrate(0.5, ONE, 1.0, 0.1)
    with pytest.raises(ValueError):
        lk_ode_integrate(2.0, ONE, 1.0, 0.1, sign="sideways")


def test_characteristics():
    assert characteristics_check(LaurentMap.identity(), ONE, 0.0) == 0.0
    assert characteristics_check(LaurentMap.identity(), ONE, 0.2) < 1e-8
    f0 = LaurentMap(1.0, [0.0, 0.1])
    assert characteristics_check(f0, P2, 0.1, dt=1e-3) < 1e-6
    assert characteristics_check(f0, P2, 0.2, zeta0=[2.0, 1.5j, -3.0]) < 1e-6


# --- semigroup generator ------------------------------------------------------------------------


def test_transition_map_at_zero_is_identity():
    tm = semiflow(P2, 0.0)
    assert np.max(np.abs(tm.values - tm.zeta)) == 0
    assert abs(tm.beta - 1) < 1e-15 and abs(tm.b0) < 1e-15


@pytest.mark.parametrize("p", [ONE, P2, HerglotzFunction([2.0, 0.3j, 0.2])])
def test_generator_beta_rate(p):
    assert abs(generator_beta_rate(p) - p.p0) < 1e-8


def test_first_variation_of_semiflow():
    p = HerglotzFunction([1.0, 0.2, 0.3j, 0.1])
    zeta, est = first_variation_richardson(p)
    assert np.max(np.abs(est - zeta * p(zeta))) < 1e-6


def test_normalized_first_variation_is_cauchy_transform():
    nu = BeltramiField(lambda w: 0.3 * np.conj(w) + 0.2 * np.conj(w) ** 2)
    p = HerglotzFunction.from_nu(nu, quad=QUAD)
    zeta, est = first_variation_richardson(p, normalized=True)
    assert np.max(np.abs(est - cauchy_transform_disk(nu, zeta, QUAD))) < 1e-6


# --- whole-plane extension -------------------------------------------------------------------------


def test_c_split_example():
    chain = CSplitChain(2.0)
    assert abs(chain.G(0.5) - 0.5) < 1e-15
    assert abs(chain.G(2.0) - 2 * 17 / 15) < 1e-15
    rng = np.random.default_rng(3)
    for _ in range(5):
        z = 0.9 * rng.random() * np.exp(2j * np.pi * rng.random())
        assert abs(chain.G(z, t=0.3) - z) < 1e-15
        Z = (1.1 + 3 * rng.random()) * np.exp(2j * np.pi * rng.random())
        assert abs(chain.G(Z) - Z * (4 * Z**2 + 1) / (4 * Z**2 - 1)) < 1e-14 * abs(Z)


def test_whole_plane_G_conformal_collapse_and_errors():
    assert abs(whole_plane_G(0.3, f_z=2.0, f_zbar=0.0, f_dot=1.0 + 1j) + (1 + 1j) / 2) < 1e-15
    with pytest.raises(SingularJacobianError):
        whole_plane_G(0.3, f_z=1.0, f_zbar=1.0, f_dot=1.0)
    with pytest.raises(ValueError):
        whole_plane_G(2.0)


def test_interior_F_examples():
    th = circle_nodes(64)
    e = np.exp(1j * th)
    assert abs(interior_F(CircleGrid(e), 0.0, 0.3, QUAD) - 0.3) < 1e-14
    assert abs(interior_F(CircleGrid(e), BeltramiField.constant(1.0), 0.0, QUAD)) < 1e-12
    # w p(w) = w + 1/w: only w survives the projection
    assert abs(interior_F(CircleGrid(e + 1 / e), 0.0, 0.2, QUAD) - 0.2) < 1e-14
    fine = np.exp(1j * circle_nodes(128))
    assert abs(interior_F(CircleGrid(fine + 1 / fine), 0.0, 0.2, QUAD) - 0.2) < 1e-14
    with pytest.raises(NearSingularError):
        interior_F(CircleGrid(e), 0.0, 0.9995)


def test_superposition_collapses_at_identity():
    g = InteriorMap.affine()
    nu = lambda z: 0.2 * np.conj(z) + 0.1  # noqa: E731
    w = np.array([0.3, 0.5j])
    assert np.max(np.abs(nu_from_superposition(g, nu, w) - nu(w))) < 1e-15


def test_superposition_of_trivial_chain():
    g = InteriorMap.affine(2.0, 0.5)
    assert abs(nu_from_superposition(g, lambda z: 0.0, 0.7)) == 0


def test_remark_form_matches_composed_form():
    g = InteriorMap.affine(1.0, 0.05)
    mu_dot = lambda z: 0.2 * np.conj(z) + 0.1 * np.ones_like(z)  # noqa: E731
    w = g(2.0)
    a = p_from_superposition(g, mu_dot, w)
    b = p_remark_form(g, mu_dot, w, QUAD)
    assert abs(a - b) < 1e-6
    assert a.real > 0
