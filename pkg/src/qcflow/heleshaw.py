"""Polubarinova-Galin evolution of a Hele-Shaw bubble in Laurent coefficients.

The bubble boundary is f(S^1, t) with f(zeta) = alpha zeta + a_0 + sum a_k zeta^{-k}
and Re[f_dot conj(zeta f')] = -1 on the circle.  In Loewner-Kufarev form
f_dot = -zeta f' p with p the Schwarz integral of b = 1/|f'|^2, whose
exterior coefficients are p_0 = b_0 and p_m = 2 b_{-m}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BandLimitError, CuspError, DomainError, UnivalenceError
from .grid import DEFAULT_CIRCLE_N, CircleGrid, circle_nodes, resample_periodic, resolution_for
from .laurent import LaurentMap, is_simple
from .loewner import HerglotzFunction, lk_rhs_coeffs
from .ode import integrate
from .vect import CircleField

CUSP_TOL = 1e-3
TAIL_TOL = 1e-12
N_MOMENTS = 3


@dataclass
class PGState:
    t: float
    f: LaurentMap
    n: int = DEFAULT_CIRCLE_N
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.f.alpha.real > 0.0 or abs(self.f.alpha.imag) > 0.0:
            raise DomainError("alpha must be real and positive")

    @property
    def zeta(self) -> np.ndarray:
        return np.exp(1j * circle_nodes(self.n))

    @property
    def boundary(self) -> np.ndarray:
        return self.f.boundary(self.n)

    @property
    def boundary_derivative(self) -> np.ndarray:
        return self.f.boundary_derivative(self.n)

    def inverse_jacobian(self) -> np.ndarray:
        """b = 1/|f'|^2 on the circle grid."""
        return 1.0 / np.abs(self.boundary_derivative) ** 2

    def area(self) -> float:
        return self.f.area()

    def min_df(self) -> tuple[float, float]:
        return self.f.min_abs_derivative(self.n)

    def compute_diagnostics(self, K: int = N_MOMENTS) -> dict:
        md, th = self.min_df()
        m = moments(self, K)
        self.diagnostics.update({"area": self.area(), "min_df": md, "theta_min": th,
                                 "moments": m, "tail": self.f.tail_energy(self.f.N // 2)})
        return self.diagnostics


def herglotz_of_state(state: PGState) -> HerglotzFunction:
    """Schwarz integral of 1/|f'|^2 as exterior Taylor coefficients."""
    n = state.n
    c = np.fft.fft(state.inverse_jacobian()) / n
    k = np.arange(1, n // 2)
    return HerglotzFunction(np.concatenate([[c[0].real], 2.0 * c[(-k) % n]]), source="heleshaw")


def pgl_rhs(state: PGState, rhs_sign: float = 1.0, cusp_tol: float = CUSP_TOL) -> LaurentMap:
    """Coefficient velocity f_dot = -zeta f' p, truncated at the state's degree."""
    md, th = state.min_df()
    if md < cusp_tol:
        raise CuspError(f"min |f'| = {md:.3e} below cusp tolerance", t=state.t, theta=th)
    p = herglotz_of_state(state)
    y = state.f.to_state()
    return LaurentMap.from_state(rhs_sign * lk_rhs_coeffs(y, p.padded(y.size)))


def pg_residual(state: PGState, f_dot) -> CircleGrid:
    """Re[f_dot(e^{i theta}) conj(e^{i theta} f'(e^{i theta}))] + 1 on the grid."""
    if not isinstance(f_dot, LaurentMap):
        f_dot = LaurentMap.from_state(f_dot)
    z = state.zeta
    return CircleGrid(np.real(np.asarray(f_dot(z)) * np.conj(z * state.boundary_derivative)) + 1.0)


def moments(state: PGState, K: int = N_MOMENTS) -> np.ndarray:
    """M_k = (1/2 pi i) contour integral of conj(f) f^{-k} f' dzeta over |zeta| = 1, k = 1..K."""
    z = state.zeta
    fz = state.boundary
    base = np.conj(fz) * state.boundary_derivative * z
    return np.array([np.mean(base * fz ** (-k)) for k in range(1, K + 1)])


def estimate_blowup_time(times, min_df, points: int = 3) -> float:
    """Time where min |f'|^2, extrapolated linearly from the last samples, reaches 0."""
    t = np.asarray(times, dtype=float)[-points:]
    y = np.asarray(min_df, dtype=float)[-points:] ** 2
    if t.size < 2:
        return float("nan")
    slope, icpt = np.polyfit(t, y, 1)
    if slope >= 0.0:
        return float("inf")
    return float(-icpt / slope)


def evolve(state0: PGState, t_end: float, dt: float, *, N: int = 64, rtol: float = 1e-12,
           atol: float = 1e-14, cusp_tol: float = CUSP_TOL, check_every: int = 10,
           rhs_sign: float = 1.0, tail_tol: float = TAIL_TOL, K: int = N_MOMENTS) -> list[PGState]:
    """Adaptive Dormand-Prince integration of the Laurent coefficients.

    States are returned at multiples of ``dt``.  ``rhs_sign = -1`` runs the
    suction problem, which is ill-posed; such runs are labelled in the
    diagnostics.  A cusp (min |f'| < cusp_tol), a self-intersecting boundary
    or a vanishing area stops the run with an exception that carries the
    states computed so far.
    """
    n = state0.n
    y0 = state0.f.to_state(N).astype(complex)
    y0[0] = y0[0].real
    first = PGState(state0.t, LaurentMap.from_state(y0), n)
    first.compute_diagnostics(K)
    first.diagnostics["ill_posed"] = rhs_sign < 0
    states = [first]
    hist_t, hist_md = [first.t], [first.diagnostics["min_df"]]
    counter = {"k": 0}

    def rhs(t, y):
        y = y.copy()
        y[0] = y[0].real
        s = PGState(t, LaurentMap.from_state(y), n)
        return pgl_rhs(s, rhs_sign, cusp_tol=0.0).to_state()

    def monitor(t, y):
        counter["k"] += 1
        f = LaurentMap.from_state(y)
        md, th = f.min_abs_derivative(n)
        hist_t.append(t)
        hist_md.append(md)
        if f.area() <= 0.0:
            raise CuspError(f"bubble area vanished at t = {t:.6g}", t=t, states=states,
                            blowup_time=t)
        if md < cusp_tol:
            raise CuspError(f"cusp forming: min |f'| = {md:.3e} at theta = {th:.4f}, t = {t:.6g}",
                            t=t, theta=th, states=states,
                            blowup_time=estimate_blowup_time(hist_t, hist_md))
        if counter["k"] % check_every == 0 and not is_simple(f.boundary(n)):
            raise UnivalenceError(f"boundary self-intersects at t = {t:.6g}", t=t, states=states)

    t_prev = state0.t
    y = y0
    k = int(np.floor((t_end - t_prev) / dt + 1e-9))
    outs = t_prev + dt * np.arange(1, k + 1)
    if outs.size == 0 or t_end - outs[-1] > 1e-12 * max(1.0, t_end):
        outs = np.append(outs, t_end)
    for t_out in outs:
        res = integrate(rhs, t_prev, y, t_out, rtol=rtol, atol=atol, callback=monitor)
        y = res.y[-1].copy()
        y[0] = y[0].real
        st = PGState(t_out, LaurentMap.from_state(y), n)
        st.compute_diagnostics(K)
        st.diagnostics["ill_posed"] = rhs_sign < 0
        if st.diagnostics["tail"] > tail_tol:
            raise BandLimitError(f"coefficient tail energy {st.diagnostics['tail']:.2e} exceeds "
                                 f"{tail_tol:.0e} at t = {t_out:.6g}; increase N")
        states.append(st)
        t_prev = t_out
    return states


def export_field(state: PGState) -> tuple[float, complex, CircleField]:
    """(p0, p1, d) with p0 = mean of 1/|f'|^2, p1 = (1/pi) int e^{i theta}/|f'|^2, d = -2/|f'|^2."""
    b = state.inverse_jacobian()
    g = CircleGrid(b)
    return float(g.mean().real), 2.0 * g.coefficient(-1), CircleField(-2.0 * b)


def _kernel_quadrature(state: PGState, zeta, kernel):
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) >= 1.0):
        raise DomainError("point must lie in the unit disk")
    b0 = state.inverse_jacobian()
    flat = zeta_arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    cache = {}
    for i, z in enumerate(flat):
        n = max(state.n, resolution_for(abs(z)))
        if n not in cache:
            cache[n] = resample_periodic(b0, n) if n != state.n else b0
        e = np.exp(1j * circle_nodes(n))
        out[i] = 2.0 * np.pi * np.mean(kernel(z, e) * cache[n])
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def tangent_vector(state: PGState, zeta):
    """(-3/pi) int (1-|zeta|^2)^2 / (1 - e^{i theta} conj(zeta))^4 e^{2i theta} / |f'|^2 dtheta."""
    return _kernel_quadrature(
        state, zeta,
        lambda z, e: (-3.0 / np.pi) * (1.0 - abs(z) ** 2) ** 2 * e**2 / (1.0 - e * np.conj(z)) ** 4)


def cotangent_vector(state: PGState, zeta):
    """(6/pi) int e^{-2i theta} / ((1 - e^{-i theta} zeta)^4 |f'|^2) dtheta."""
    return _kernel_quadrature(
        state, zeta, lambda z, e: (6.0 / np.pi) * np.conj(e) ** 2 / (1.0 - np.conj(e) * z) ** 4)
