"""Conformally natural (barycentric) extension of circle homeomorphisms.

For a homeomorphism phi of the circle and zeta in the unit disk,

    F(zeta, w) = (1/2pi) int (phi(z) - w) / (1 - conj(w) phi(z)) P(zeta, z) dtheta,

with the Poisson kernel P(zeta, z) = (1 - |zeta|^2) / |zeta - z|^2.  The
extension h(zeta) is the unique zero of F(zeta, .) in the disk.  The
derivatives used below, with z = e^{i theta}, are

    dP/dzeta = z / (zeta - z)^2,
    dF/dw = -(1/2pi) int P / (1 - conj(w) phi) dtheta,
    dF/dwbar = (1/2pi) int (phi - w) phi P / (1 - conj(w) phi)^2 dtheta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import DomainError, SingularJacobianError, SolverError
from .grid import _eval_power_series, circle_nodes, resample_periodic, resolution_for
from .vect import CircleField

DE_TOL = 1e-12
DE_MAXITER = 50
DE_N = 1024
FD_STEP = 1e-4


class CircleHomeomorphism:
    """phi(e^{i theta}) = exp(i lift(theta)) with lift(theta + 2pi) = lift(theta) + 2pi.

    ``samples_func(n)`` returns phi on the uniform n-point grid; it is cached
    per resolution.  ``n`` is the minimum quadrature size.
    """

    def __init__(self, samples_func, n: int = DE_N, *, name: str = "", check: bool = True):
        self._samples_func = samples_func
        self.n = n
        self.name = name
        self._cache = {}
        if check:
            self.check()

    @classmethod
    def identity(cls, n: int = DE_N) -> "CircleHomeomorphism":
        return cls(lambda m: np.exp(1j * circle_nodes(m)), n, name="id")

    @classmethod
    def from_lift(cls, lift, n: int = DE_N, name: str = "") -> "CircleHomeomorphism":
        """From a vectorised real lift theta -> lift(theta)."""
        return cls(lambda m: np.exp(1j * np.asarray(lift(circle_nodes(m)), dtype=float)), n, name=name)

    @classmethod
    def from_field(cls, d: CircleField, tau: float, n: int = DE_N) -> "CircleHomeomorphism":
        """theta -> theta + tau d(e^{i theta}), d interpolated spectrally."""
        def samples(m):
            dv = resample_periodic(d.values, m) if m != d.n else d.values
            return np.exp(1j * (circle_nodes(m) + tau * dv))

        return cls(samples, max(n, d.n), name=f"field(tau={tau:g})")

    @classmethod
    def mobius(cls, a: complex = 0.0, rotation: float = 0.0, n: int = DE_N) -> "CircleHomeomorphism":
        """z -> e^{i rotation} (z - a) / (1 - conj(a) z), |a| < 1."""
        a = complex(a)
        if abs(a) >= 1.0:
            raise DomainError("Moebius parameter must lie in the unit disk")
        return cls(lambda m: mobius_map(np.exp(1j * circle_nodes(m)), a, rotation), n,
                   name=f"mobius({a:.3g})")

    def samples(self, n: int | None = None) -> np.ndarray:
        n = max(n or self.n, self.n)
        if n not in self._cache:
            self._cache[n] = np.asarray(self._samples_func(n), dtype=complex)
        return self._cache[n]

    def compose(self, sigma_a=0.0, sigma_rot=0.0, tau_a=0.0, tau_rot=0.0) -> "CircleHomeomorphism":
        """sigma o phi o tau for Moebius sigma, tau given by (a, rotation).

        tau is applied on the grid by evaluating phi at tau(z) through
        trigonometric interpolation of the lift on a fine grid.
        """
        base = self

        def samples(m):
            fine = max(4 * m, 4 * base.n)
            vals = base.samples(fine)
            lift = np.unwrap(np.angle(vals)) - circle_nodes(fine)
            z = mobius_map(np.exp(1j * circle_nodes(m)), tau_a, tau_rot)
            th = np.mod(np.angle(z), 2.0 * np.pi)
            c = np.fft.rfft(lift) / fine
            k = np.arange(c.size)
            weights = np.where((k == 0) | (k == fine // 2), 1.0, 2.0)
            periodic = np.real(np.exp(1j * np.outer(th, k)) @ (weights * c))
            return mobius_map(np.exp(1j * (th + periodic)), sigma_a, sigma_rot)

        return CircleHomeomorphism(samples, self.n, name="composed")

    def check(self, n: int | None = None):
        v = self.samples(n)
        if np.max(np.abs(np.abs(v) - 1.0)) > 1e-12:
            raise DomainError("circle map is not unimodular")
        steps = np.angle(np.roll(v, -1) / v)
        if np.any(steps <= 0.0) or abs(steps.sum() - 2.0 * np.pi) > 1e-8:
            raise DomainError("circle map lift is not strictly increasing")

    def __repr__(self):
        return f"CircleHomeomorphism({self.name})"


def mobius_map(z, a=0.0, rotation=0.0):
    a = complex(a)
    return np.exp(1j * rotation) * (z - a) / (1.0 - np.conj(a) * z)


@dataclass(frozen=True)
class BarycenterSolve:
    zeta: complex
    w: complex
    residual: float
    iterations: int


def _resolution(phi: CircleHomeomorphism, zeta, w=0.0) -> int:
    rho = max(abs(zeta), abs(w))
    return max(phi.n, resolution_for(rho, tol=1e-18, n_min=phi.n))


def _kernels(phi, zeta, w, n=None):
    n = n or _resolution(phi, zeta, w)
    z = np.exp(1j * circle_nodes(n))
    p = phi.samples(n)
    P = (1.0 - abs(zeta) ** 2) / np.abs(zeta - z) ** 2
    den = 1.0 - np.conj(w) * p
    return z, p, P, den


def evaluate_F(phi: CircleHomeomorphism, zeta, w, n: int | None = None) -> complex:
    zeta, w = complex(zeta), complex(w)
    if abs(zeta) >= 1.0 or abs(w) >= 1.0:
        raise DomainError("evaluate_F needs |zeta| < 1 and |w| < 1")
    z, p, P, den = _kernels(phi, zeta, w, n)
    return complex(np.mean((p - w) / den * P))


def partials(phi: CircleHomeomorphism, zeta, w, n: int | None = None) -> dict:
    """F and its four first-order Wirtinger derivatives at (zeta, w)."""
    zeta, w = complex(zeta), complex(w)
    z, p, P, den = _kernels(phi, zeta, w, n)
    g = (p - w) / den
    dP = z / (zeta - z) ** 2
    return {
        "F": complex(np.mean(g * P)),
        "F_zeta": complex(np.mean(g * dP)),
        "F_zetabar": complex(np.mean(g * np.conj(dP))),
        "F_w": complex(-np.mean(P / den)),
        "F_wbar": complex(np.mean((p - w) * p * P / den**2)),
    }


def poisson_average(phi: CircleHomeomorphism, zeta) -> complex:
    return evaluate_F(phi, zeta, 0.0)


def extend(phi: CircleHomeomorphism, zeta, tol: float = DE_TOL, maxiter: int = DE_MAXITER) -> BarycenterSolve:
    """Solve F(zeta, w) = 0 by Newton's method in (Re w, Im w).

    Starts from the Poisson average of phi.  A step that does not reduce
    |F| is halved until it does (at most 30 halvings).
    """
    zeta = complex(zeta)
    if abs(zeta) >= 1.0:
        raise DomainError("extend needs |zeta| < 1")
    w = poisson_average(phi, zeta)
    if abs(w) >= 1.0:
        w = w / abs(w) * 0.999
    res = abs(evaluate_F(phi, zeta, w))
    for it in range(1, maxiter + 1):
        if res <= tol:
            return BarycenterSolve(zeta, w, res, it - 1)
        d = partials(phi, zeta, w)
        A, B, F = d["F_w"], d["F_wbar"], d["F"]
        det = abs(A) ** 2 - abs(B) ** 2
        if abs(det) < 1e-300:
            raise SingularJacobianError("degenerate Jacobian in barycentre solve")
        step = (-F * np.conj(A) + B * np.conj(F)) / det
        lam = 1.0
        for _ in range(30):
            w_new = w + lam * step
            if abs(w_new) < 1.0:
                res_new = abs(evaluate_F(phi, zeta, w_new))
                if res_new < res or res_new <= tol:
                    break
            lam *= 0.5
        else:
            raise SolverError("line search failed in barycentre solve", residual=res, iterations=it)
        w, res = w_new, res_new
    if res <= tol:
        return BarycenterSolve(zeta, w, res, maxiter)
    raise SolverError(f"barycentre solve did not converge (|F| = {res:.3e})",
                      residual=res, iterations=maxiter)


def beltrami_of_extension(phi: CircleHomeomorphism, zeta, solve: BarycenterSolve | None = None) -> complex:
    """Complex dilatation of the extension at zeta from the implicit-function partials."""
    solve = solve or extend(phi, zeta)
    d = partials(phi, solve.zeta, solve.w)
    Fz, Fzb, Fw, Fwb = d["F_zeta"], d["F_zetabar"], d["F_w"], d["F_wbar"]
    num = np.conj(Fz) * Fwb - Fzb * np.conj(Fw)
    den = np.conj(Fzb) * Fwb - Fz * np.conj(Fw)
    if abs(den) < 1e-12:
        raise SingularJacobianError("degenerate denominator in Beltrami coefficient")
    return complex(num / den)


def _zeta_array(zeta):
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) >= 1.0):
        raise DomainError("point must lie in the unit disk")
    return zeta_arr


def _padded_values(d: CircleField, n: int) -> np.ndarray:
    return resample_periodic(d.values, n) if n != d.n else d.values


def nu_from_field(d: CircleField, zeta):
    """(3/2pi) int ((1 - |zeta|^2) / (1 - e^{i theta} conj(zeta))^2)^2 e^{2 i theta} d dtheta.

    Expanding the kernel in powers of e^{i theta} conj(zeta) turns the integral
    into 3 (1 - |zeta|^2)^2 sum_k C(k+3, 3) c_{-(k+2)} conj(zeta)^k, which is a
    finite sum for the trigonometric interpolant of d.  Near the circle this
    avoids the cancellation a direct quadrature of the peaked kernel suffers.
    """
    zeta_arr = _zeta_array(zeta)
    n = d.n
    half = n // 2
    c = d.grid.fourier
    k = np.arange(half - 1)
    coeffs = comb(k + 3, 3) * c[(-(k + 2)) % n]
    coeffs[-1] *= 0.5  # Nyquist mode is split evenly between +-n/2
    out = 3.0 * (1.0 - np.abs(zeta_arr) ** 2) ** 2 * _eval_power_series(coeffs, np.conj(zeta_arr))
    return out if out.ndim else complex(out)


def nu_by_parts(d: CircleField, zeta):
    """The twice integrated-by-parts form of nu_from_field, zeta != 0.

    nu = -((1 - |zeta|^2)^2 / (4 pi conj(zeta)^2))
         int (1 - e^{i theta} conj(zeta))^{-2} e^{-i theta} (u'' - i u') dtheta,
    with u = e^{i theta} d.
    """
    zeta_arr = _zeta_array(zeta)
    if np.any(zeta_arr == 0):
        raise DomainError("nu_by_parts is singular at zeta = 0")
    flat = zeta_arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for i, z in enumerate(flat):
        n = max(d.n, resolution_for(abs(z)))
        th = circle_nodes(n)
        e = np.exp(1j * th)
        u1, u2 = _u_derivatives(d, n)
        integral = 2.0 * np.pi * np.mean((u2 - 1j * u1) / (e * (1.0 - e * np.conj(z)) ** 2))
        out[i] = -(1.0 - abs(z) ** 2) ** 2 / (4.0 * np.pi * np.conj(z) ** 2) * integral
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def _u_derivatives(d: CircleField, n: int):
    """First and second theta-derivatives of u = e^{i theta} d on an n-grid."""
    th = circle_nodes(n)
    e = np.exp(1j * th)
    dv = _padded_values(d, n)
    dd = d.resample(n) if n != d.n else d
    d1 = dd.derivative(1).values
    d2 = dd.derivative(2).values
    u1 = e * (1j * dv + d1)
    u2 = e * (-dv + 2j * d1 + d2)
    return u1, u2


def variational_nu(d: CircleField, zeta, tau: float = FD_STEP, n: int = DE_N) -> complex:
    """Central difference in tau of the extension's Beltrami coefficient along theta + tau d."""
    zeta = complex(zeta)
    plus = CircleHomeomorphism.from_field(d, tau, n)
    minus = CircleHomeomorphism.from_field(d, -tau, n)
    return (beltrami_of_extension(plus, zeta) - beltrami_of_extension(minus, zeta)) / (2.0 * tau)


def sup_bound(d: CircleField, zeta):
    """3 q (1 + |zeta|^2) / (1 - |zeta|^2) with q = max |d|."""
    r2 = np.abs(np.asarray(zeta)) ** 2
    return 3.0 * d.max_abs() * (1.0 + r2) / (1.0 - r2)


def decay_constant(d: CircleField, n: int | None = None) -> float:
    """M = max |u'' - i u'| / 2, so |nu| <= M (1 - |zeta|^2) / |zeta|^2."""
    n = n or 4 * d.n
    u1, u2 = _u_derivatives(d, n)
    return float(np.max(np.abs(u2 - 1j * u1)) / 2.0)


def decay_ratio(d: CircleField, zeta):
    """|nu(zeta)| |zeta|^2 / (1 - |zeta|^2)."""
    zeta = np.asarray(zeta, dtype=complex)
    return np.abs(nu_from_field(d, zeta)) * np.abs(zeta) ** 2 / (1.0 - np.abs(zeta) ** 2)
