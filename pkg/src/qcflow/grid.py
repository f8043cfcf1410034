"""Numerical substrate: circle grids, disk quadrature, singular transforms.

Circle quantities are sampled on the uniform grid ``theta_j = 2 pi j / n`` and
integrated with the trapezoid rule.  Disk quantities use Gauss-Legendre nodes
in the radius and uniform nodes in the angle.  Integrals of a sampled field
against kernels that are holomorphic in ``w`` on a neighbourhood of the closed
disk are evaluated through the angular Fourier moments of the field, which is
exact for angularly band-limited data and insensitive to how close the kernel
singularity sits to the unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, GridMismatchError

DEFAULT_CIRCLE_N = 256
DEFAULT_DISK_N = 128


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(x: float) -> int:
    return 1 << max(0, math.ceil(math.log2(max(x, 1.0))))


def resolution_for(rho: float, *, tol: float = 1e-17, n_min: int = DEFAULT_CIRCLE_N,
                   n_max: int = 1 << 16) -> int:
    """Trapezoid node count for a periodic integrand with a pole at radius ``rho``.

    The aliasing error of the n-point rule decays like ``rho**n`` when the
    nearest singularity of the integrand sits at ``rho < 1`` (or ``1/rho``).
    """
    rho = float(rho)
    if rho >= 1.0:
        rho = 1.0 / rho if rho > 1.0 else 1.0
    if rho <= 0.0:
        return n_min
    if rho >= 1.0:
        return n_max
    n0 = math.log(tol) / math.log(rho)
    need = (math.log(tol) - 3.0 * math.log(n0)) / math.log(rho)
    return int(min(max(next_power_of_two(need), n_min), n_max))


def circle_nodes(n: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n) / n


def fourier_coefficients(values) -> np.ndarray:
    """c_m with ``values_j = sum_m c_m exp(i m theta_j)``, numpy FFT ordering."""
    values = np.asarray(values)
    return np.fft.fft(values, axis=-1) / values.shape[-1]


def fourier_synthesis(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    return np.fft.ifft(coeffs, axis=-1) * coeffs.shape[-1]


def resample_periodic(values, n_new: int) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto an ``n_new`` grid.

    The Nyquist mode of an even grid is split symmetrically so real data stays
    real.
    """
    values = np.asarray(values)
    n = values.shape[-1]
    if n_new == n:
        return values.copy()
    c = fourier_coefficients(values)
    out = np.zeros(values.shape[:-1] + (n_new,), dtype=complex)
    half = min(n, n_new) // 2
    out[..., :half] = c[..., :half]
    out[..., n_new - half + 1:] = c[..., n - half + 1:]
    if n_new > n:
        if n % 2 == 0:
            out[..., half] = 0.5 * c[..., half]
            out[..., n_new - half] = 0.5 * c[..., half]
        else:
            out[..., half] = c[..., half]
            out[..., n_new - half] = c[..., n - half]
    else:
        out[..., half] = c[..., half] + (c[..., n - half] if n - half != half else 0.0)
    result = fourier_synthesis(out)
    if np.isrealobj(values):
        return result.real
    return result


@dataclass(frozen=True)
class CircleGrid:
    """Samples of a function on the uniform grid of the unit circle."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 1:
            raise ValueError("CircleGrid values must be one-dimensional")
        if not is_power_of_two(values.size):
            raise ValueError(f"node count {values.size} is not a power of two")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, n: int = DEFAULT_CIRCLE_N) -> "CircleGrid":
        """Sample ``func(theta)`` on the n-point grid."""
        return cls(np.asarray(func(circle_nodes(n))))

    @classmethod
    def from_fourier(cls, coeffs) -> "CircleGrid":
        return cls(fourier_synthesis(coeffs))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def theta(self) -> np.ndarray:
        return circle_nodes(self.n)

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def is_real(self) -> bool:
        return np.isrealobj(self.values) or bool(np.all(np.abs(np.imag(self.values)) == 0.0))

    @cached_property
    def fourier(self) -> np.ndarray:
        return fourier_coefficients(self.values)

    def coefficient(self, m: int) -> complex:
        """c_m = (1/2pi) int v exp(-i m theta) dtheta; zero beyond the Nyquist band."""
        half = self.n // 2
        if abs(m) < half:
            return complex(self.fourier[m % self.n])
        if abs(m) == half:
            return complex(0.5 * self.fourier[half])
        return 0.0j

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def resample(self, n_new: int) -> "CircleGrid":
        return CircleGrid(resample_periodic(self.values, n_new))

    def derivative(self, order: int = 1) -> "CircleGrid":
        """Spectral theta-derivative."""
        n = self.n
        k = np.fft.fftfreq(n, d=1.0 / n)
        k[n // 2] = 0.0
        out = fourier_synthesis(self.fourier * (1j * k) ** order)
        return CircleGrid(out.real if self.is_real else out)

    def synthesize_check(self) -> float:
        """Round-trip error of analyze followed by synthesize."""
        return float(np.max(np.abs(fourier_synthesis(self.fourier) - self.values)))


def schwarz_integral(boundary: CircleGrid, zeta):
    """(1/2pi) int b(theta) (zeta + e^{i theta}) / (zeta - e^{i theta}) dtheta, |zeta| > 1.

    Uses the exterior expansion of the Schwarz kernel,
    ``1 + 2 sum_{m>=1} (e^{i theta}/zeta)^m``, so the value is
    ``c_0 + 2 sum_{m>=1} c_{-m} zeta^{-m}``.
    """
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta) <= 1.0):
        raise DomainError("schwarz_integral needs |zeta| > 1")
    n = boundary.n
    c = boundary.fourier
    m = np.arange(1, n // 2)
    neg = c[(-m) % n]
    coeffs = np.concatenate([[c[0]], 2.0 * neg])
    out = _eval_inverse_power_series(coeffs, zeta)
    return out if out.ndim else complex(out)


def _eval_inverse_power_series(coeffs, zeta):
    """sum_k coeffs[k] zeta^{-k} by Horner in 1/zeta."""
    zeta = np.asarray(zeta, dtype=complex)
    u = 1.0 / zeta
    acc = np.zeros_like(u)
    for ck in coeffs[::-1]:
        acc = acc * u + ck
    return acc


def _eval_power_series(coeffs, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    acc = np.zeros_like(zeta)
    for ck in coeffs[::-1]:
        acc = acc * zeta + ck
    return acc


@lru_cache(maxsize=32)
def _gauss_legendre_unit(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=16)
def _radial_diff_matrix(n: int) -> np.ndarray:
    """Polynomial differentiation matrix on the Gauss-Legendre nodes of (0, 1)."""
    x, w = _gauss_legendre_unit(n)
    # barycentric weights of Gauss-Legendre points (up to a common factor)
    t = 2.0 * x - 1.0
    lam = (-1.0) ** np.arange(n) * np.sqrt((1.0 - t**2) * 2.0 * w)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (lam[None, :] / lam[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class DiskQuadrature:
    """Polar product rule on the unit disk: Gauss-Legendre in r, trapezoid in theta."""

    n_r: int = DEFAULT_DISK_N
    n_theta: int = DEFAULT_DISK_N

    def __post_init__(self):
        if self.n_r < 1 or self.n_theta < 1:
            raise ValueError("quadrature sizes must be positive")

    @cached_property
    def r(self) -> np.ndarray:
        return _gauss_legendre_unit(self.n_r)[0]

    @cached_property
    def radial_weights(self) -> np.ndarray:
        return _gauss_legendre_unit(self.n_r)[1]

    @cached_property
    def theta(self) -> np.ndarray:
        return circle_nodes(self.n_theta)

    @cached_property
    def points(self) -> np.ndarray:
        """Complex nodes, shape (n_r, n_theta)."""
        return self.r[:, None] * np.exp(1j * self.theta)[None, :]

    @cached_property
    def weights(self) -> np.ndarray:
        """Area weights including the polar Jacobian, shape (n_r, n_theta)."""
        w = self.r * self.radial_weights * (2.0 * np.pi / self.n_theta)
        return np.repeat(w[:, None], self.n_theta, axis=1)

    def integrate(self, values) -> complex:
        values = np.asarray(values)
        if values.shape != (self.n_r, self.n_theta):
            raise GridMismatchError(
                f"samples of shape {values.shape} do not match quadrature {(self.n_r, self.n_theta)}")
        return complex(np.sum(self.weights * values))

    def sample(self, func) -> np.ndarray:
        return np.asarray(func(self.points)) * np.ones((self.n_r, self.n_theta))

    def moments(self, values, count: int | None = None) -> np.ndarray:
        """m_j = iint values(w) w^j dsigma for j = 0 .. count-1.

        Computed mode by mode: the angular coefficient of exp(-i j theta)
        against r^{j+1} in the radial Gauss-Legendre rule.
        """
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.n_r, self.n_theta):
            raise GridMismatchError("samples do not match quadrature")
        if count is None:
            count = self.n_theta // 2
        count = min(count, self.n_theta // 2)
        # coefficient of e^{-i j theta}: (1/n) sum v e^{+i j theta}
        neg_modes = np.fft.ifft(values, axis=1)[:, :count]
        j = np.arange(count)
        rpow = self.r[:, None] ** (j[None, :] + 1)
        return 2.0 * np.pi * np.einsum("r,rj,rj->j", self.radial_weights, rpow, neg_modes)

    def dbar(self, values) -> np.ndarray:
        """Spectral d/d(wbar) of samples: (e^{i theta}/2)(d_r + (i/r) d_theta)."""
        values = np.asarray(values, dtype=complex)
        D = _radial_diff_matrix(self.n_r)
        d_r = D @ values
        k = np.fft.fftfreq(self.n_theta, d=1.0 / self.n_theta)
        k[self.n_theta // 2] = 0.0
        d_t = np.fft.ifft(np.fft.fft(values, axis=1) * (1j * k)[None, :], axis=1)
        e = np.exp(1j * self.theta)[None, :]
        return 0.5 * e * (d_r + 1j * d_t / self.r[:, None])


def disk_integral(samples, quad: DiskQuadrature | None = None) -> complex:
    """Sum of quadrature weights times samples, approximating iint_U f dsigma."""
    quad = quad or DiskQuadrature()
    return quad.integrate(samples)


def _interior_cauchy(nu, zeta: complex, n_rho: int, n_phi: int) -> complex:
    """-(1/pi) iint_U nu(w)/(w - zeta) dsigma for |zeta| < 1 on a grid recentred at zeta.

    With w = zeta + rho e^{i phi} the area element rho drho dphi cancels the
    1/|w - zeta| singularity; rho runs to the circle along each ray.
    """
    phi = circle_nodes(n_phi)
    e = np.exp(1j * phi)
    b = np.real(np.conj(zeta) * e)
    R = -b + np.sqrt(b * b + 1.0 - abs(zeta) ** 2)
    x, wx = _gauss_legendre_unit(n_rho)
    rho = R[:, None] * x[None, :]
    w = zeta + rho * e[:, None]
    vals = np.asarray(nu(w)) * np.ones_like(w)
    inner = np.sum(vals * wx[None, :], axis=1) * R
    total = np.sum(inner * np.conj(e)) * (2.0 * np.pi / n_phi)
    return complex(-total / np.pi)


def cauchy_transform_disk(nu, zeta, quad: DiskQuadrature | None = None):
    """-(1/pi) iint_U nu(w) / (w - zeta) dsigma_w.

    ``nu`` is a callable field (BeltramiField or function of complex ``w``)
    or an array of samples on ``quad``.  Exterior points use the moment
    expansion of the kernel; interior points use a polar grid recentred at
    ``zeta`` and therefore need a callable field.
    """
    quad = quad or DiskQuadrature()
    zeta_arr = np.asarray(zeta, dtype=complex)
    flat = zeta_arr.ravel()
    out = np.empty(flat.shape, dtype=complex)
    outside = np.abs(flat) >= 1.0
    if np.any(outside):
        samples = _samples(nu, quad)
        m = quad.moments(samples)
        # -1/(w - z) = sum_j w^j / z^{j+1}
        coeffs = np.concatenate([[0.0], m]) / np.pi
        out[outside] = _eval_inverse_power_series(coeffs, flat[outside])
    if np.any(~outside):
        if not callable(nu):
            raise DomainError("interior Cauchy transform needs a callable field")
        for i in np.nonzero(~outside)[0]:
            out[i] = _interior_cauchy(nu, flat[i], quad.n_r, quad.n_theta)
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def _samples(nu, quad: DiskQuadrature) -> np.ndarray:
    if hasattr(nu, "samples"):
        return nu.samples(quad)
    if callable(nu):
        return quad.sample(nu)
    arr = np.asarray(nu, dtype=complex)
    if arr.ndim == 0:
        return np.full((quad.n_r, quad.n_theta), complex(arr))
    if arr.shape != (quad.n_r, quad.n_theta):
        raise GridMismatchError("samples do not match quadrature")
    return arr


def complete_elliptic_K(s):
    """Complete elliptic integral of the first kind, modulus ``s``, by AGM.

    K(s) = int_0^{pi/2} dt / sqrt(1 - s^2 sin^2 t) = pi / (2 AGM(1, sqrt(1 - s^2))).
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0) or np.any(s_arr >= 1.0) or np.any(~np.isfinite(s_arr)):
        raise DomainError("complete_elliptic_K needs 0 <= s < 1")
    a = np.ones_like(s_arr)
    b = np.sqrt((1.0 - s_arr) * (1.0 + s_arr))
    for _ in range(64):
        if np.all(np.abs(a - b) <= 4e-16 * a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    out = np.pi / (a + b)
    return out if out.ndim else float(out)


@lru_cache(maxsize=2)
def subordination_constant(convention: str = "parameter") -> float:
    """pi / (4 int_0^1 s K(s) ds).

    With ``convention="parameter"`` the elliptic integral is read with
    parameter m = s (K(sqrt(s)) in modulus form), which gives 0.7068583...;
    ``convention="modulus"`` gives pi/4, the value the bound chain produces
    when K is taken with modulus s.
    """
    if convention == "parameter":
        integrand = lambda s: s * complete_elliptic_K(math.sqrt(s))  # noqa: E731
    elif convention == "modulus":
        integrand = lambda s: s * complete_elliptic_K(s)  # noqa: E731
    else:
        raise ValueError(f"unknown convention {convention!r}")
    value, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    return math.pi / (4.0 * value)
