"""Smooth vector fields on the circle: bracket, Kirillov variation, area form."""

from __future__ import annotations

import numpy as np

from .errors import BandLimitError, GridMismatchError, NearSingularError
from .fields import BeltramiField
from .grid import (DEFAULT_CIRCLE_N, CircleGrid, DiskQuadrature, _eval_power_series,
                   cauchy_transform_disk, circle_nodes, resample_periodic, resolution_for)
from .laurent import LaurentMap

BAND_TOL = 1e-10
KIRILLOV_MARGIN = 1.05


class CircleField:
    """A real vector field d(e^{i theta}) sampled on a power-of-two circle grid.

    Construction rejects samples whose upper Fourier band (|m| >= 3n/8) is not
    below ``BAND_TOL`` relative to the largest coefficient.
    """

    def __init__(self, values, *, check: bool = True):
        values = np.asarray(values)
        if np.iscomplexobj(values):
            if np.max(np.abs(values.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(values))):
                raise ValueError("CircleField samples must be real")
            values = values.real
        self.grid = CircleGrid(values.astype(float))
        if check:
            self.check_band()

    @classmethod
    def from_function(cls, func, n: int = DEFAULT_CIRCLE_N) -> "CircleField":
        """Sample ``func(theta)`` (vectorised, real) on the n-point grid."""
        return cls(np.asarray(func(circle_nodes(n)), dtype=float) * np.ones(n))

    @classmethod
    def trig(cls, const: float = 0.0, cos: dict | None = None, sin: dict | None = None,
             n: int = DEFAULT_CIRCLE_N) -> "CircleField":
        """const + sum a_k cos k theta + sum b_k sin k theta."""
        th = circle_nodes(n)
        v = np.full(n, float(const))
        for k, a in (cos or {}).items():
            v += a * np.cos(k * th)
        for k, b in (sin or {}).items():
            v += b * np.sin(k * th)
        return cls(v)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    @property
    def theta(self) -> np.ndarray:
        return self.grid.theta

    def coefficient(self, m: int) -> complex:
        return self.grid.coefficient(m)

    def cos_sin(self, k: int) -> tuple[float, float]:
        """Real coefficients (a_k, b_k) of cos k theta and sin k theta."""
        c = self.coefficient(k)
        if k == 0:
            return float(c.real), 0.0
        return float(2.0 * c.real), float(-2.0 * c.imag)

    def band_ratio(self) -> float:
        c = np.abs(self.grid.fourier)
        m = np.abs(np.fft.fftfreq(self.n, d=1.0 / self.n))
        top = c[m >= 3 * self.n // 8].max(initial=0.0)
        scale = max(c.max(initial=0.0), 1e-300)
        return float(top / scale)

    def check_band(self):
        if np.max(np.abs(self.values), initial=0.0) == 0.0:
            return
        r = self.band_ratio()
        if r > BAND_TOL:
            raise BandLimitError(
                f"field is not resolved on {self.n} nodes (upper-band ratio {r:.2e}); "
                "sample on a finer grid")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def resample(self, n_new: int) -> "CircleField":
        return CircleField(resample_periodic(self.values, n_new), check=False)

    def derivative(self, order: int = 1) -> "CircleField":
        return CircleField(self.grid.derivative(order).values, check=False)

    def __call__(self, theta):
        """Trigonometric interpolation at arbitrary angles."""
        theta = np.asarray(theta, dtype=float)
        c = self.grid.fourier
        n = self.n
        m = np.fft.fftfreq(n, d=1.0 / n)
        w = c.copy()
        w[n // 2] *= 0.5
        out = np.exp(1j * np.multiply.outer(theta, m)) @ w
        out = out + 0.5 * c[n // 2] * np.exp(1j * (n // 2) * theta)
        out = np.real(out)
        return out if out.ndim else float(out)

    def _check_same(self, other: "CircleField"):
        if not isinstance(other, CircleField) or other.n != self.n:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, CircleField):
            self._check_same(other)
            return CircleField(self.values + other.values, check=False)
        return CircleField(self.values + float(other), check=False)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return CircleField(self.values * float(c), check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return f"CircleField(n={self.n})"


def poisson_lie_bracket(d1: CircleField, d2: CircleField) -> CircleField:
    """[d1, d2] = d1 d2' - d2 d1', products formed on a doubled grid."""
    d1._check_same(d2)
    n = d1.n
    u, v = d1.resample(2 * n), d2.resample(2 * n)
    du, dv = u.derivative().values, v.derivative().values
    prod = u.values * dv - v.values * du
    # derivatives carry FFT noise proportional to the values themselves
    scale = (u.max_abs() * (np.max(np.abs(dv)) + v.max_abs())
             + v.max_abs() * (np.max(np.abs(du)) + u.max_abs()))
    c = np.fft.fft(prod) / (2 * n)
    # coefficients under the round-off floor of the product carry no information
    c[np.abs(c) < 64 * np.finfo(float).eps * scale] = 0.0
    m = np.abs(np.fft.fftfreq(2 * n, d=1.0 / (2 * n)))
    if scale > 0.0 and np.max(np.abs(c[m >= 3 * n // 8])) > BAND_TOL * scale:
        raise BandLimitError(f"bracket is not resolved on {n} nodes; sample on a finer grid")
    return CircleField(resample_periodic(np.real(np.fft.ifft(c * (2 * n))), n), check=False)


def kirillov_variation(f: LaurentMap, d: CircleField, zeta, margin: float = KIRILLOV_MARGIN,
                       n: int | None = None):
    """-(1/2 pi i) contour integral of (w f'/f)^2 w d(w) dw / (f(w) - f(zeta)) over |w| = 1.

    The contour is traversed counterclockwise.  With w = e^{i theta} the
    integrand becomes -(1/2 pi) (w f'/f)^2 w^2 d / (f(w) - f(zeta)) dtheta.
    """
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) < margin):
        raise NearSingularError(f"|zeta| must be at least {margin} for the contour quadrature")
    if n is None:
        n = max(d.n, resolution_for(1.0 / np.min(np.abs(zeta_arr)), tol=1e-16))
    dv = d.resample(n).values if n != d.n else d.values
    w = np.exp(1j * circle_nodes(n))
    fw = np.asarray(f(w))
    dfw = np.asarray(f.deriv(w))
    g = (w * dfw / fw) ** 2 * w**2 * dv
    fz = np.asarray(f(zeta_arr.ravel()))
    out = -np.mean(g[None, :] / (fw[None, :] - fz[:, None]), axis=1)
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def harmonic_extension(d: CircleField) -> BeltramiField:
    """Poisson extension sum c_m r^{|m|} e^{i m theta} of d into the disk."""
    n = d.n
    half = n // 2
    pos = np.array([d.coefficient(m) for m in range(half + 1)])
    neg = np.array([d.coefficient(-m) for m in range(half + 1)])
    neg[0] = 0.0

    def ext(w):
        w = np.asarray(w, dtype=complex)
        return (_eval_power_series(pos, w) + _eval_power_series(neg, np.conj(w))).real + 0j

    return BeltramiField(ext, name="harmonic extension")


def variation_area_form(d_ext, zeta, quad: DiskQuadrature | None = None):
    """-(1/pi) iint_U d/dwbar(w d_ext(w)) / (w - zeta) dsigma_w for |zeta| > 1.

    ``d_ext`` is a callable extension of a circle field into the disk; the
    wbar-derivative is taken spectrally on the polar grid.
    """
    quad = quad or DiskQuadrature()
    if hasattr(d_ext, "samples"):
        samples = d_ext.samples(quad)
    else:
        samples = quad.sample(d_ext)
    integrand = quad.dbar(quad.points * samples)
    return cauchy_transform_disk(integrand, zeta, quad)
