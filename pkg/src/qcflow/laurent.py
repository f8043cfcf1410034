"""Truncated exterior Laurent maps and boundary-curve geometry."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, SingularJacobianError, SolverError
from .grid import DEFAULT_CIRCLE_N, circle_nodes


class LaurentMap:
    """f(zeta) = alpha zeta + a_0 + sum_{k>=1} a_k zeta^{-k} on |zeta| >= 1.

    ``a`` holds ``[a_0, a_1, ..., a_N]``.
    """

    def __init__(self, alpha, a=None):
        self.alpha = complex(alpha)
        a = np.zeros(1, dtype=complex) if a is None else np.atleast_1d(np.asarray(a, dtype=complex))
        if a.ndim != 1:
            raise ValueError("Laurent coefficients must be one-dimensional")
        self.a = a.copy()

    @classmethod
    def identity(cls) -> "LaurentMap":
        return cls(1.0)

    @classmethod
    def from_state(cls, y) -> "LaurentMap":
        y = np.asarray(y, dtype=complex)
        return cls(y[0], y[1:])

    def to_state(self, N: int | None = None) -> np.ndarray:
        a = self.a if N is None else self.padded(N)
        return np.concatenate([[self.alpha], a])

    def padded(self, N: int) -> np.ndarray:
        """Coefficients a_0..a_N, zero-padded or truncated."""
        out = np.zeros(N + 1, dtype=complex)
        m = min(N + 1, self.a.size)
        out[:m] = self.a[:m]
        return out

    @property
    def N(self) -> int:
        return self.a.size - 1

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        u = 1.0 / zeta
        acc = np.zeros_like(u)
        for ck in self.a[:0:-1]:
            acc = (acc + ck) * u
        out = self.alpha * zeta + self.a[0] + acc
        return out if out.ndim else complex(out)

    def deriv(self, zeta, order: int = 1):
        """order-th derivative, order in 1..3."""
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        zeta = np.asarray(zeta, dtype=complex)
        k = np.arange(1, self.a.size)
        # d^o/dz^o z^{-k} = (-1)^o k (k+1) ... (k+o-1) z^{-k-o}
        fac = np.ones_like(k, dtype=float)
        for j in range(order):
            fac = fac * (k + j)
        coeffs = (-1) ** order * fac * self.a[1:]
        u = 1.0 / zeta
        acc = np.zeros_like(u)
        for ck in coeffs[::-1]:
            acc = (acc + ck) * u
        out = acc * u ** order
        if order == 1:
            out = out + self.alpha
        return out if out.ndim else complex(out)

    def boundary(self, n: int = DEFAULT_CIRCLE_N) -> np.ndarray:
        return np.asarray(self(np.exp(1j * circle_nodes(n))))

    def boundary_derivative(self, n: int = DEFAULT_CIRCLE_N) -> np.ndarray:
        return np.asarray(self.deriv(np.exp(1j * circle_nodes(n))))

    def min_abs_derivative(self, n: int = DEFAULT_CIRCLE_N) -> tuple[float, float]:
        """(min |f'| on the circle, angle where it is attained)."""
        df = np.abs(self.boundary_derivative(n))
        j = int(np.argmin(df))
        return float(df[j]), float(2.0 * np.pi * j / n)

    def area(self) -> float:
        """Area enclosed by f(S^1): pi (|alpha|^2 - sum k |a_k|^2)."""
        k = np.arange(1, self.a.size)
        return float(np.pi * (abs(self.alpha) ** 2 - np.sum(k * np.abs(self.a[1:]) ** 2)))

    def inverse(self, w, zeta0=None, tol: float = 1e-14, maxiter: int = 60):
        """Solve f(zeta) = w for zeta in the exterior by Newton's method."""
        w = complex(w)
        z = complex(zeta0) if zeta0 is not None else (w - self.a[0]) / self.alpha
        for it in range(maxiter):
            fz = self(z) - w
            d = self.deriv(z)
            if d == 0:
                raise SingularJacobianError("f' vanished during inversion")
            step = fz / d
            z -= step
            if abs(step) <= tol * max(1.0, abs(z)):
                return z
        raise SolverError("Laurent inversion did not converge", residual=abs(fz), iterations=maxiter)

    def schwarzian(self, zeta):
        f1 = np.asarray(self.deriv(zeta, 1))
        if np.any(f1 == 0):
            raise DomainError("f' vanishes at an evaluation point")
        f2 = np.asarray(self.deriv(zeta, 2))
        f3 = np.asarray(self.deriv(zeta, 3))
        out = f3 / f1 - 1.5 * (f2 / f1) ** 2
        return out if out.ndim else complex(out)

    def tail_energy(self, start: int) -> float:
        """sum_{k > start} k |a_k|^2."""
        k = np.arange(1, self.a.size)
        sel = k > start
        return float(np.sum(k[sel] * np.abs(self.a[1:][sel]) ** 2))

    def __repr__(self):
        return f"LaurentMap(alpha={self.alpha:.6g}, N={self.N})"


def winding_number(curve, point) -> np.ndarray:
    """Winding number of a closed polygon about one or more points."""
    curve = np.asarray(curve, dtype=complex)
    point = np.asarray(point, dtype=complex)
    d = curve[None, :] - point.reshape(-1, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ang = np.angle(np.roll(d, -1, axis=1) / d)
    out = np.rint(ang.sum(axis=1) / (2.0 * np.pi)).astype(int)
    return out.reshape(point.shape) if point.ndim else int(out[0])


def _segments_cross(p1, p2, q1, q2):
    def cross(a, b):
        return a.real * b.imag - a.imag * b.real

    d1 = cross(q2 - q1, p1 - q1)
    d2 = cross(q2 - q1, p2 - q1)
    d3 = cross(p2 - p1, q1 - p1)
    d4 = cross(p2 - p1, q2 - p1)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def is_simple(curve) -> bool:
    """True when the closed polygon has no crossings between non-adjacent edges."""
    c = np.asarray(curve, dtype=complex)
    n = c.size
    a, b = c, np.roll(c, -1)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    return not bool(np.any(_segments_cross(a[i], b[i], a[j], b[j])))


def curve_contains(outer, inner, tol: float = 0.0) -> bool:
    """Whether the region bounded by ``inner`` lies inside the one bounded by ``outer``.

    Vertices of ``inner`` must have winding number one about ``outer`` or lie
    within ``tol`` of it; curves that touch are accepted up to ``tol``.
    """
    outer = np.asarray(outer, dtype=complex)
    inner = np.asarray(inner, dtype=complex)
    wn = winding_number(outer, inner)
    bad = inner[wn != 1]
    if bad.size == 0:
        return True
    dist = np.min(np.abs(bad[:, None] - outer[None, :]), axis=1)
    return bool(np.all(dist <= tol))
