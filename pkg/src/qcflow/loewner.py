"""Loewner-Kufarev evolution driven by Herglotz functions.

Sign conventions:

* PDE: ``df/dt = -zeta f'(zeta, t) p(zeta, t)`` on |zeta| > 1.
* ODE: ``dw/dt = -w p(w, t)`` (retracting) or ``dw/dt = +w p(w, t)``
  (expanding); both are exposed through ``sign``.
* Herglotz functions are stored by their exterior Taylor coefficients
  ``p(zeta) = sum_k c_k zeta^{-k}``, so ``p0 = c_0`` and ``p1 = c_1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .errors import (DomainError, NearSingularError, PositivityError, SingularJacobianError,
                     SolverError, UnivalenceError)
from .fields import BeltramiField
from .grid import (CircleGrid, DiskQuadrature, _eval_inverse_power_series, _eval_power_series,
                   _samples, cauchy_transform_disk, circle_nodes, resolution_for,
                   subordination_constant)
from .laurent import LaurentMap, curve_contains, is_simple, winding_number
from .ode import integrate
from .vect import CircleField

POSITIVITY_RADII = (1.01, 1.1, 2.0, 10.0)
POSITIVITY_ANGLES = 64
FIELD_MARGIN = 1e-2
DEFAULT_N = 64


class HerglotzFunction:
    """p(zeta) = sum_k c_k zeta^{-k}, holomorphic in |zeta| > 1.

    ``func`` optionally gives a direct evaluator (used when the stored
    series only converges far from the circle).
    """

    def __init__(self, coeffs, *, func=None, source: str = "coefficients"):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if abs(coeffs[0].imag) > 1e-12 * max(1.0, abs(coeffs[0])):
            raise ValueError("p0 must be real")
        if coeffs[0].real <= 0.0:
            raise ValueError("p0 must be positive")
        self.coeffs = coeffs
        self._func = func
        self.source = source

    @classmethod
    def constant(cls, p0: float = 1.0, p1: complex = 0.0) -> "HerglotzFunction":
        return cls([p0, p1], source="constant")

    @classmethod
    def from_nu(cls, nu, p0: float = 1.0, p1: complex = 0.0,
                quad: DiskQuadrature | None = None) -> "HerglotzFunction":
        """p0 + p1/zeta - (1/pi) iint nu(w) / (zeta (w - zeta)) dsigma_w."""
        quad = quad or DiskQuadrature()
        m = quad.moments(_samples(nu, quad))
        coeffs = np.concatenate([[p0, p1], m / np.pi])
        return cls(coeffs, source="nu")

    @classmethod
    def from_field(cls, d: CircleField, p0: float = 1.0, p1: complex = 0.0) -> "HerglotzFunction":
        """p0 + p1/zeta - (1/2pi) int e^{2i theta} d / (zeta (e^{i theta} - zeta)) dtheta."""
        half = d.n // 2
        tail = np.array([d.coefficient(-k) for k in range(2, half + 1)])
        return cls(np.concatenate([[p0, p1], tail]), source="field")

    @classmethod
    def from_callable(cls, func, radius: float = 2.0, n: int = 256,
                      source: str = "callable") -> "HerglotzFunction":
        """Laurent coefficients of ``func`` from samples on |zeta| = radius."""
        z = radius * np.exp(1j * circle_nodes(n))
        c = np.fft.fft(np.asarray(func(z))) / n
        k = np.arange(n // 2)
        coeffs = c[(-k) % n] * radius ** k
        coeffs[0] = coeffs[0].real
        return cls(coeffs, func=func, source=source)

    @property
    def p0(self) -> float:
        return float(self.coeffs[0].real)

    @property
    def p1(self) -> complex:
        return complex(self.coeffs[1]) if self.coeffs.size > 1 else 0j

    def __call__(self, zeta):
        if self._func is not None:
            out = np.asarray(self._func(np.asarray(zeta, dtype=complex)))
        else:
            out = _eval_inverse_power_series(self.coeffs, zeta)
        return out if out.ndim else complex(out)

    def padded(self, K: int) -> np.ndarray:
        out = np.zeros(K + 1, dtype=complex)
        m = min(K + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def check_positive(self, radii=POSITIVITY_RADII, n_angles: int = POSITIVITY_ANGLES,
                       raise_on_fail: bool = True) -> float:
        """Minimum of Re p over the standard exterior grid; raises if not positive."""
        th = circle_nodes(n_angles)
        pts = np.concatenate([r * np.exp(1j * th) for r in radii])
        vals = np.real(np.asarray(self(pts)))
        j = int(np.argmin(vals))
        if raise_on_fail and not vals[j] > 0.0:
            raise PositivityError(f"Re p = {vals[j]:.3e} at zeta = {pts[j]:.4g}",
                                  point=complex(pts[j]), value=float(vals[j]))
        return float(vals[j])

    def __repr__(self):
        return f"HerglotzFunction(p0={self.p0:.6g}, p1={self.p1:.6g}, source={self.source})"


def _p_at(p, t: float) -> HerglotzFunction:
    return p if isinstance(p, HerglotzFunction) else p(t)


def _exterior(zeta, margin: float = 0.0) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta) <= 1.0):
        raise DomainError("point must lie outside the closed unit disk")
    if np.any(np.abs(zeta) < 1.0 + margin):
        raise NearSingularError(f"|zeta| must exceed 1 + {margin}")
    return zeta


def herglotz_from_nu(nu, p0: float, p1: complex, zeta, quad: DiskQuadrature | None = None):
    """p0 + p1/zeta + V(zeta)/zeta with V the disk Cauchy transform of nu."""
    zeta = _exterior(zeta)
    out = p0 + p1 / zeta + np.asarray(cauchy_transform_disk(nu, zeta, quad)) / zeta
    return out if out.ndim else complex(out)


def herglotz_from_field(d: CircleField, p0: float, p1: complex, zeta, margin: float = FIELD_MARGIN):
    """Trapezoid rule for p0 + p1/zeta - (1/2pi) int e^{2i theta} d / (zeta (e^{i theta} - zeta))."""
    zeta = _exterior(zeta, margin)
    flat = zeta.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, z in enumerate(flat):
        n = max(d.n, resolution_for(1.0 / abs(z)))
        e = np.exp(1j * circle_nodes(n))
        dv = d.resample(n).values if n != d.n else d.values
        out[i] = p0 + p1 / z - np.mean(e**2 * dv / (z * (e - z)))
    out = out.reshape(zeta.shape)
    return out if out.ndim else complex(out)


def _contour_kernel(g: LaurentMap, dv: np.ndarray, zeta: complex) -> complex:
    n = dv.size
    z = np.exp(1j * circle_nodes(n))
    gz = np.asarray(g(z))
    dg = np.asarray(g.deriv(z))
    # -(1/2 pi i) int (z g'/g)^2 d dz / (g - zeta), dz = i z dtheta
    return complex(-np.mean((z * dg / gz) ** 2 * dv * z / (gz - zeta)))


def herglotz_from_field_ode(g: LaurentMap, d: CircleField, p0: float, p1: complex, zeta,
                            margin: float = FIELD_MARGIN, tol: float = 1e-14,
                            n_max: int = 1 << 16):
    """p0 + p1/zeta - (1/2 pi i) contour integral of (z g'/g)^2 d(z) dz / (g(z) - zeta).

    ``zeta`` must lie in the exterior of the curve g(S^1) and at least
    ``margin`` away from it.  The node count is doubled until two successive
    values agree to ``tol``.
    """
    zeta_arr = np.asarray(zeta, dtype=complex)
    flat = zeta_arr.ravel()
    curve = g.boundary(max(1024, d.n))
    if np.any(winding_number(curve, flat) != 0):
        raise DomainError("zeta must lie outside the curve g(S^1)")
    dist = np.min(np.abs(curve[None, :] - flat[:, None]), axis=1)
    if np.any(dist < margin):
        raise NearSingularError("zeta is too close to g(S^1)")
    out = np.empty(flat.shape, dtype=complex)
    for i, z in enumerate(flat):
        n = max(d.n, 256)
        prev = _contour_kernel(g, d.resample(n).values if n != d.n else d.values, z)
        while True:
            n *= 2
            cur = _contour_kernel(g, d.resample(n).values, z)
            if abs(cur - prev) <= tol * max(1.0, abs(cur)) or n >= n_max:
                break
            prev = cur
        out[i] = p0 + p1 / z + cur
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def herglotz_ode_function(g: LaurentMap, d: CircleField, p0: float = 1.0,
                          p1: complex = 0.0) -> HerglotzFunction:
    """HerglotzFunction for the contour kernel, coefficients sampled outside g(S^1)."""
    radius = 2.0 * float(np.max(np.abs(g.boundary(512))))
    return HerglotzFunction.from_callable(
        lambda z: herglotz_from_field_ode(g, d, p0, p1, z, margin=0.0), radius=radius,
        source="field_ode")


# --- Beltrami paths -------------------------------------------------------


def nu0_from_path(mu, mu_dot, f_z=None, f_z_dot=None, *, points=None, support_delta: float | None = None):
    """Infinitesimal Beltrami coefficient of a chain with interior dilatation mu.

    Pointwise
        nu0 = -(conj(f_z)/f_z) d/dt(mu f_z / conj(f_z)) / (1 - |mu|^2)
            = -(mu_dot + 2i mu Im(f_z_dot / f_z)) / (1 - |mu|^2).
    With ``f_z``/``f_z_dot`` omitted the phase of f_z is taken as fixed.
    When ``support_delta`` and ``points`` are given, mu must vanish on
    |zeta| > 1 - support_delta.
    """
    mu = np.asarray(mu, dtype=complex)
    mu_dot = np.asarray(mu_dot, dtype=complex)
    if np.any(np.abs(mu) >= 1.0):
        raise DomainError("|mu| must be below 1")
    if support_delta is not None and points is not None:
        outer = np.abs(np.asarray(points)) > 1.0 - support_delta
        if np.any(np.abs(mu[outer] if mu.shape else mu) > 0.0):
            raise DomainError("mu does not vanish near the unit circle")
    phase = 0.0
    if f_z is not None and f_z_dot is not None:
        phase = np.imag(np.asarray(f_z_dot) / np.asarray(f_z))
    out = -(mu_dot + 2j * mu * phase) / (1.0 - np.abs(mu) ** 2)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class SubordinationReport:
    sup: float
    constant: float
    bound: float
    margin: float
    ok: bool


def subordination_criterion(nu0, quad: DiskQuadrature | None = None) -> SubordinationReport:
    """Compare ess sup |nu0| with pi / (4 int_0^1 s K(s) ds).

    ``bound`` is the integral estimate (4 sup / pi) int s K(s) ds of the
    Cauchy term, which is below 1 exactly when the criterion holds;
    ``margin`` is constant - sup.
    """
    if isinstance(nu0, BeltramiField):
        sup = nu0.ess_sup(quad)
    else:
        sup = float(np.max(np.abs(np.asarray(nu0))))
    const = subordination_constant()
    return SubordinationReport(sup, const, sup / const, const - sup, bool(sup < const))


def growth_envelope_check(mu_path, q: float, rtol: float = 1e-12) -> bool:
    """(1+|mu_t|)/(1-|mu_t|) <= e^{2 (t - t0) q} (1+|mu_0|)/(1-|mu_0|) at every sample.

    ``mu_path`` is a sequence of (t, samples) with increasing t.
    """
    path = list(mu_path)
    t0, m0 = path[0]
    a0 = np.abs(np.asarray(m0))
    base = (1.0 + a0) / (1.0 - a0)
    for t, m in path:
        a = np.abs(np.asarray(m))
        if np.any(a >= 1.0):
            return False
        lhs = (1.0 + a) / (1.0 - a)
        if np.any(lhs > np.exp(2.0 * (t - t0) * q) * base * (1.0 + rtol)):
            return False
    return True


# --- Loewner-Kufarev PDE ----------------------------------------------------


@dataclass
class EvolutionState:
    t: float
    f: LaurentMap
    mu: BeltramiField | None = None
    diagnostics: dict = field(default_factory=dict)


def lk_rhs_coeffs(y: np.ndarray, pc: np.ndarray) -> np.ndarray:
    """Coefficients of -zeta f' p for the state [alpha, a_0, ..., a_N]."""
    N = y.size - 2
    s = np.empty_like(y)
    s[0] = y[0]
    s[1] = 0.0
    s[2:] = -np.arange(1, N + 1) * y[2:]
    return -np.convolve(s, pc[: N + 2])[: N + 2]


def _diagnostics(f: LaurentMap, n: int = 256) -> dict:
    md, th = f.min_abs_derivative(n)
    return {"alpha": f.alpha.real, "area": f.area(), "min_df": md, "theta_min": th,
            "tail": f.tail_energy(f.N // 2)}


def lk_pde_evolve(f0: LaurentMap, p, t_end: float, dt: float, *, N: int = DEFAULT_N,
                  rtol: float = 1e-12, atol: float = 1e-14, min_df: float = 1e-3,
                  check_every: int = 10, n_check: int = 256) -> list[EvolutionState]:
    """Integrate df/dt = -zeta f' p on the Laurent coefficients.

    The product zeta f' p is formed exactly in coefficient space and
    truncated at degree N.  ``p`` is a HerglotzFunction or a callable
    t -> HerglotzFunction.  States are returned at multiples of ``dt``.
    """
    y0 = f0.to_state(N)
    const = isinstance(p, HerglotzFunction)
    margins = {}
    if const:
        margins[0.0] = p.check_positive()
        pc_const = p.padded(N + 1)

    def rhs(t, y):
        pc = pc_const if const else _p_at(p, t).padded(N + 1)
        return lk_rhs_coeffs(y, pc)

    states = [EvolutionState(0.0, LaurentMap.from_state(y0), diagnostics=_diagnostics(f0, n_check))]
    states[0].diagnostics["rep_margin"] = margins.get(0.0, _p_at(p, 0.0).check_positive())
    counter = {"k": 0}

    def monitor(t, y):
        counter["k"] += 1
        f = LaurentMap.from_state(y)
        md, th = f.min_abs_derivative(n_check)
        if md < min_df:
            raise UnivalenceError(f"min |f'| = {md:.3e} below tolerance at t = {t:.6g}",
                                  t=t, theta=th, states=states)
        if counter["k"] % check_every == 0 and not is_simple(f.boundary(n_check)):
            raise UnivalenceError(f"boundary self-intersects at t = {t:.6g}", t=t, states=states)

    times = _output_times(t_end, dt)
    y = y0
    t_prev = 0.0
    for t_out in times:
        res = integrate(rhs, t_prev, y, t_out, rtol=rtol, atol=atol, callback=monitor)
        y = res.y[-1]
        f = LaurentMap.from_state(y)
        diag = _diagnostics(f, n_check)
        diag["rep_margin"] = margins[0.0] if const else _p_at(p, t_out).check_positive()
        states.append(EvolutionState(t_out, f, diagnostics=diag))
        t_prev = t_out
    return states


def _output_times(t_end: float, dt: float) -> np.ndarray:
    if t_end <= 0 or dt <= 0:
        raise ValueError("t_end and dt must be positive")
    k = int(np.floor(t_end / dt + 1e-9))
    times = dt * np.arange(1, k + 1)
    if times.size == 0 or t_end - times[-1] > 1e-12 * t_end:
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


def pde_residual(f: LaurentMap, f_dot: LaurentMap, p: HerglotzFunction, radius: float = 1.0,
                 n: int = 256) -> float:
    """max over |zeta| = radius of |f_dot + zeta f' p|."""
    z = radius * np.exp(1j * circle_nodes(n))
    return float(np.max(np.abs(np.asarray(f_dot(z)) + z * np.asarray(f.deriv(z)) * np.asarray(p(z)))))


def check_subordination(states, n: int = 1024, refine: int = 8, tol: float = 1e-7) -> bool:
    """Each boundary curve lies inside the previous one, so the exterior domains grow.

    The enclosing curve is sampled ``refine`` times more finely than the
    enclosed one; points closer than ``tol`` to it count as inside (the
    curves touch where Re p vanishes on the circle).
    """
    for prev, cur in zip(states[:-1], states[1:]):
        if not curve_contains(prev.f.boundary(refine * n), cur.f.boundary(n), tol):
            return False
    return True


# --- Loewner-Kufarev ODE ----------------------------------------------------


@dataclass
class Trajectory:
    t: np.ndarray
    w: np.ndarray
    sign: str
    exit_time: float | None = None

    @property
    def normalized_minus(self) -> np.ndarray:
        """e^{-t} w(zeta, t)."""
        return np.exp(-self.t) * self.w

    @property
    def normalized_plus(self) -> np.ndarray:
        """e^{t} w(zeta, t)."""
        return np.exp(self.t) * self.w


def lk_ode_integrate(zeta0, p, t_end: float, dt: float, sign: str = "retracting",
                     rtol: float = 1e-12, atol: float = 1e-14) -> Trajectory:
    """dw/dt = -w p(w, t) (retracting) or +w p(w, t) (expanding), w(0) = zeta0.

    A retracting trajectory that reaches |w| = 1 stops there and the
    crossing time is stored in ``exit_time``.
    """
    if sign not in ("retracting", "expanding"):
        raise ValueError("sign must be 'retracting' or 'expanding'")
    zeta0 = np.atleast_1d(np.asarray(zeta0, dtype=complex))
    if np.any(np.abs(zeta0) <= 1.0):
        raise DomainError("starting points must lie outside the closed unit disk")
    s = -1.0 if sign == "retracting" else 1.0
    const = isinstance(p, HerglotzFunction)
    if const:
        p.check_positive()

    def rhs(t, w):
        return s * w * np.asarray(_p_at(p, t)(w))

    event = (lambda t, w: float(np.min(np.abs(w))) - 1.0) if sign == "retracting" else None
    res = integrate(rhs, 0.0, zeta0, t_end, t_eval=_output_times(t_end, dt), rtol=rtol,
                    atol=atol, event=event)
    w = res.y if zeta0.size > 1 else res.y[:, 0]
    return Trajectory(res.t, w, sign, res.event_time)


def characteristics_check(f0: LaurentMap, p, t: float, zeta0=2.0, *, dt: float | None = None,
                          N: int = DEFAULT_N, states=None) -> float:
    """|f(w(zeta0, t), t) - f0(zeta0)| with w from the expanding ODE and f from the PDE."""
    zeta0 = np.atleast_1d(np.asarray(zeta0, dtype=complex))
    if t == 0.0:
        return float(np.max(np.abs(np.asarray(f0(zeta0)) - np.asarray(f0(zeta0)))))
    dt = dt or t
    if states is None:
        states = lk_pde_evolve(f0, p, t, dt, N=N)
    f_t = states[-1].f
    traj = lk_ode_integrate(zeta0, p, t, dt, sign="expanding")
    w_t = traj.w[-1]
    return float(np.max(np.abs(np.asarray(f_t(w_t)) - np.asarray(f0(zeta0)))))


# --- semigroup generator ------------------------------------------------------


@dataclass
class TransitionMap:
    """Phi(zeta, tau) with dPhi/dtau = Phi p(Phi), sampled on |zeta| = radius."""

    tau: float
    radius: float
    zeta: np.ndarray
    values: np.ndarray

    @property
    def laurent(self) -> np.ndarray:
        """Coefficients [beta, b_0, b_1, ...] from the ring samples."""
        n = self.values.size
        c = np.fft.fft(self.values) / n
        k = np.arange(-1, n // 2 - 1)
        return c[(-k) % n] * self.radius ** k

    @property
    def beta(self) -> complex:
        return complex(self.laurent[0])

    @property
    def b0(self) -> complex:
        return complex(self.laurent[1])

    @property
    def b1(self) -> complex:
        return complex(self.laurent[2])


def semiflow(p: HerglotzFunction, tau: float, radius: float = 3.0, n: int = 64,
             rtol: float = 1e-13, atol: float = 1e-15) -> TransitionMap:
    zeta = radius * np.exp(1j * circle_nodes(n))
    if tau == 0.0:
        return TransitionMap(0.0, radius, zeta, zeta.copy())
    res = integrate(lambda t, w: w * np.asarray(p(w)), 0.0, zeta, tau, rtol=rtol, atol=atol)
    return TransitionMap(tau, radius, zeta, res.y[-1])


def _richardson(quotient, tau):
    """Two-level Richardson extrapolation of an O(tau) difference quotient."""
    d1, d2, d3 = quotient(tau), quotient(tau / 2), quotient(tau / 4)
    r1, r2 = 2.0 * d2 - d1, 2.0 * d3 - d2
    return (4.0 * r2 - r1) / 3.0


def generator_beta_rate(p: HerglotzFunction, tau: float = 1e-3, **kw) -> float:
    """Richardson estimate of d beta / d tau at tau = 0."""
    return float(_richardson(lambda h: (semiflow(p, h, **kw).beta.real - 1.0) / h, tau))


def first_variation_richardson(p: HerglotzFunction, tau: float = 1e-3, normalized: bool = False,
                               **kw):
    """Richardson limit of (Phi(zeta, tau) - zeta)/tau on the sampling ring.

    With ``normalized`` the map (Phi - b_0)/beta is used instead of Phi.
    Returns (zeta, estimate).
    """
    def quotient(h):
        tm = semiflow(p, h, **kw)
        vals = (tm.values - tm.b0) / tm.beta if normalized else tm.values
        return (vals - tm.zeta) / h

    zeta = semiflow(p, 0.0, **kw).zeta
    return zeta, _richardson(quotient, tau)


# --- whole-plane extension ----------------------------------------------------


def whole_plane_G(zeta, *, f_z=None, f_zbar=None, f_dot=None, p=None):
    """Velocity field G of the chain on the whole plane.

    Inside the disk G = (-conj(f_z) f_dot + f_zbar conj(f_dot)) / (|f_z|^2 - |f_zbar|^2)
    from the supplied derivatives; outside G = zeta p(zeta).
    """
    zeta = complex(zeta)
    if abs(zeta) > 1.0:
        if p is None:
            raise ValueError("p is needed outside the disk")
        return complex(zeta * p(zeta))
    jac = abs(f_z) ** 2 - abs(f_zbar) ** 2
    if abs(jac) < 1e-14:
        raise SingularJacobianError("degenerate Jacobian in whole_plane_G")
    return complex((-np.conj(f_z) * f_dot + f_zbar * np.conj(f_dot)) / jac)


@dataclass(frozen=True)
class CSplitChain:
    """f = e^{-t}(c zeta + conj(zeta)/c) in the disk, e^{-t}(c zeta + 1/(c zeta)) outside."""

    c: float = 2.0

    def __call__(self, zeta, t: float = 0.0):
        zeta = complex(zeta)
        if abs(zeta) <= 1.0:
            return np.exp(-t) * (self.c * zeta + np.conj(zeta) / self.c)
        return np.exp(-t) * (self.c * zeta + 1.0 / (self.c * zeta))

    def mu(self, zeta=None, t: float = 0.0) -> complex:
        return 1.0 / self.c**2

    def interior(self, zeta, t: float = 0.0):
        """(f_z, f_zbar, f_dot) in the disk."""
        e = np.exp(-t)
        return e * self.c, e / self.c, -self(zeta, t)

    def p(self, zeta, t: float = 0.0):
        """-f_dot / (zeta f') on the exterior."""
        c2z2 = self.c**2 * np.asarray(zeta) ** 2
        return (c2z2 + 1.0) / (c2z2 - 1.0)

    def G(self, zeta, t: float = 0.0) -> complex:
        if abs(zeta) <= 1.0:
            fz, fzb, fd = self.interior(zeta, t)
            return whole_plane_G(zeta, f_z=fz, f_zbar=fzb, f_dot=fd)
        return whole_plane_G(zeta, p=lambda z: self.p(z, t))

    def nu0(self, zeta, t: float = 0.0):
        fz, _, _ = self.interior(zeta, t)
        # mu and the phase of f_z are constant in t
        return nu0_from_path(self.mu(zeta, t), 0.0, fz, 0.0)


def interior_F(p_boundary: CircleGrid, nu0, zeta, quad: DiskQuadrature | None = None,
               margin: float = 1e-3):
    """(1/2 pi i) int w p(w)/(w - zeta) dw - (1/pi) iint nu0(w)/(w - zeta) dsigma_w, |zeta| < 1.

    ``p_boundary`` holds the samples of w p(w) on the circle; the contour
    term is their Cauchy (Szego) projection sum_{m>=0} g_m zeta^m.
    """
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta) >= 1.0 - margin):
        raise NearSingularError("zeta is too close to the unit circle")
    n = p_boundary.n
    c = p_boundary.fourier
    pos = c[: n // 2 + 1].copy()
    pos[n // 2] *= 0.5
    contour = _eval_power_series(pos, zeta)
    if not callable(nu0) and np.ndim(nu0) == 0:
        val = complex(nu0)
        nu0 = lambda w: np.full(np.shape(w), val)  # noqa: E731
    area = cauchy_transform_disk(nu0, zeta, quad)
    out = contour + np.asarray(area)
    return out if out.ndim else complex(out)


# --- superposition form -------------------------------------------------------


class InteriorMap:
    """A smooth map of the closed disk with known Wirtinger derivatives."""

    def __init__(self, func, dz, dzbar):
        self.func, self.dz, self.dzbar = func, dz, dzbar

    @classmethod
    def affine(cls, a: complex = 1.0, b: complex = 0.0) -> "InteriorMap":
        """zeta -> a zeta + b conj(zeta)."""
        return cls(lambda z: a * z + b * np.conj(z),
                   lambda z: a + 0 * np.asarray(z, dtype=complex),
                   lambda z: b + 0 * np.asarray(z, dtype=complex))

    def __call__(self, z):
        return self.func(z)

    def mu(self, z):
        return np.asarray(self.dzbar(z)) / np.asarray(self.dz(z))

    def inverse(self, w, z0=None, tol: float = 1e-14, maxiter: int = 60) -> complex:
        """Solve g(z) = w with Newton's method on (Re z, Im z)."""
        w = complex(w)
        z = complex(w if z0 is None else z0)
        for it in range(maxiter):
            F = complex(self.func(z)) - w
            A, B = complex(self.dz(z)), complex(self.dzbar(z))
            det = abs(A) ** 2 - abs(B) ** 2
            if abs(det) < 1e-300:
                raise SingularJacobianError("degenerate Jacobian in interior inversion")
            step = (-F * np.conj(A) + B * np.conj(F)) / det
            z += step
            if abs(step) <= tol * max(1.0, abs(z)):
                return z
        raise SolverError("interior inversion did not converge", residual=abs(F), iterations=maxiter)


def nu_from_superposition(g: InteriorMap, mu_dot, w):
    """(mu_dot / (1 - |mu|^2)) (g_z / conj(g_z)) evaluated at g^{-1}(w)."""
    w_arr = np.asarray(w, dtype=complex)
    flat = w_arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, wi in enumerate(flat):
        z = g.inverse(wi)
        mu = complex(g.mu(z))
        gz = complex(g.dz(z))
        out[i] = complex(mu_dot(z)) / (1.0 - abs(mu) ** 2) * gz / np.conj(gz)
    out = out.reshape(w_arr.shape)
    return out if out.ndim else complex(out)


def _star_region_quadrature(g: InteriorMap, n_s: int, n_theta: int):
    """Nodes and weights on g(U) through u = s g(e^{i theta}), for star-shaped g(U)."""
    x, wx = roots_legendre(n_s)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * wx
    th = circle_nodes(n_theta)
    e = np.exp(1j * th)
    gam = np.asarray(g(e))
    # d gamma / d theta = i e g_z - i conj(e) g_zbar
    dgam = 1j * e * np.asarray(g.dz(e)) - 1j * np.conj(e) * np.asarray(g.dzbar(e))
    jac = np.imag(np.conj(gam) * dgam)
    if np.any(jac <= 0.0):
        raise DomainError("g(U) is not star-shaped about the origin")
    nodes = s[:, None] * gam[None, :]
    weights = (s * ws)[:, None] * jac[None, :] * (2.0 * np.pi / n_theta)
    return nodes, weights


def p_from_superposition(g: InteriorMap, mu_dot, w, n_s: int = 48, n_theta: int = 128):
    """1 - (1/pi) iint_{g(U)} nu(u) / (w (u - w)) dsigma_u with nu from the superposition."""
    nodes, weights = _star_region_quadrature(g, n_s, n_theta)
    nu = nu_from_superposition(g, mu_dot, nodes)
    w_arr = np.asarray(w, dtype=complex)
    vals = np.array([1.0 - np.sum(weights * nu / (wi * (nodes - wi))) / np.pi for wi in w_arr.ravel()])
    vals = vals.reshape(w_arr.shape)
    return vals if vals.ndim else complex(vals)


def p_remark_form(g: InteriorMap, mu_dot, g_zeta, quad: DiskQuadrature | None = None):
    """1 - (1/pi) iint_U mu_dot g_u^2 / (g(zeta) (g(u) - g(zeta))) dsigma_u, given g(zeta)."""
    quad = quad or DiskQuadrature()
    u = quad.points
    num = np.asarray(mu_dot(u)) * np.asarray(g.dz(u)) ** 2 * quad.weights
    gu = np.asarray(g(u))
    w_arr = np.asarray(g_zeta, dtype=complex)
    vals = np.array([1.0 - np.sum(num / (wi * (gu - wi))) / np.pi for wi in w_arr.ravel()])
    vals = vals.reshape(w_arr.shape)
    return vals if vals.ndim else complex(vals)
