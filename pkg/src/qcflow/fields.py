"""Fields on the unit disk: Beltrami coefficients and holomorphic functions."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, GridMismatchError
from .grid import DiskQuadrature, _eval_power_series


class BeltramiField:
    """A complex field on the unit disk, used as a Beltrami coefficient or a tangent direction.

    Backed by a vectorised callable ``func(w)``; samples on a
    :class:`DiskQuadrature` are computed on demand and cached.  A field built
    with :meth:`from_samples` only exists on its grid.
    """

    def __init__(self, func=None, *, name: str = "", quad: DiskQuadrature | None = None,
                 samples=None):
        if func is None and samples is None:
            raise ValueError("BeltramiField needs a callable or samples")
        self._func = func
        self.name = name
        self._cache = {}
        if samples is not None:
            quad = quad or DiskQuadrature()
            samples = np.asarray(samples, dtype=complex)
            if samples.shape != (quad.n_r, quad.n_theta):
                raise GridMismatchError("samples do not match quadrature")
            self._cache[quad] = samples
        self._grid = quad if func is None else None

    @classmethod
    def from_samples(cls, quad: DiskQuadrature, samples, name: str = "") -> "BeltramiField":
        return cls(None, quad=quad, samples=samples, name=name)

    @classmethod
    def constant(cls, c: complex) -> "BeltramiField":
        c = complex(c)
        return cls(lambda w: np.full(np.shape(w), c, dtype=complex), name=f"const({c})")

    @classmethod
    def zero(cls) -> "BeltramiField":
        return cls.constant(0.0)

    @property
    def is_callable(self) -> bool:
        return self._func is not None

    def __call__(self, w):
        if self._func is None:
            raise DomainError("field is only known on its quadrature grid")
        w = np.asarray(w, dtype=complex)
        return np.asarray(self._func(w), dtype=complex) * np.ones(w.shape)

    def samples(self, quad: DiskQuadrature | None = None) -> np.ndarray:
        quad = quad or self._grid or DiskQuadrature()
        if quad not in self._cache:
            if self._func is None:
                raise GridMismatchError("field is sampled on a different grid")
            self._cache[quad] = self(quad.points)
        return self._cache[quad]

    def ess_sup(self, quad: DiskQuadrature | None = None) -> float:
        return float(np.max(np.abs(self.samples(quad))))

    def _combine(self, other, op):
        if isinstance(other, BeltramiField):
            if self._func is None or other._func is None:
                grid = self._grid or other._grid
                return BeltramiField.from_samples(grid, op(self.samples(grid), other.samples(grid)))
            f, g = self._func, other._func
            return BeltramiField(lambda w: op(np.asarray(f(w)), np.asarray(g(w))))
        c = complex(other)
        if self._func is None:
            return BeltramiField.from_samples(self._grid, op(self.samples(self._grid), c))
        f = self._func
        return BeltramiField(lambda w: op(np.asarray(f(w)), c))

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def conj(self) -> "BeltramiField":
        if self._func is None:
            return BeltramiField.from_samples(self._grid, np.conj(self.samples(self._grid)))
        f = self._func
        return BeltramiField(lambda w: np.conj(f(w)))

    def __repr__(self):
        return f"BeltramiField({self.name or 'callable' if self._func else 'sampled'})"


class DiskHolomorphic:
    """A holomorphic function on the unit disk given by Taylor coefficients."""

    def __init__(self, coeffs):
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if coeffs.ndim != 1:
            raise ValueError("Taylor coefficients must be one-dimensional")
        self.coeffs = coeffs

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "DiskHolomorphic":
        coeffs = np.zeros(k + 1, dtype=complex)
        coeffs[k] = c
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, zeta):
        out = _eval_power_series(self.coeffs, zeta)
        return out if np.ndim(out) else complex(out)

    def derivative(self) -> "DiskHolomorphic":
        if self.coeffs.size == 1:
            return DiskHolomorphic([0.0])
        return DiskHolomorphic(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def samples(self, quad: DiskQuadrature | None = None) -> np.ndarray:
        quad = quad or DiskQuadrature()
        return np.asarray(self(quad.points))

    def __add__(self, other):
        a, b = self.coeffs, np.asarray(other.coeffs)
        n = max(a.size, b.size)
        return DiskHolomorphic(np.pad(a, (0, n - a.size)) + np.pad(b, (0, n - b.size)))

    def __mul__(self, c):
        return DiskHolomorphic(self.coeffs * complex(c))

    __rmul__ = __mul__

    def b_norm(self, quad: DiskQuadrature | None = None, ring: float = 0.99,
               n_ring: int = 512) -> float:
        """sup |phi| (1 - |zeta|^2)^2 over the grid plus a ring near the circle."""
        quad = quad or DiskQuadrature()
        pts = quad.points
        vals = np.abs(self(pts)) * (1.0 - np.abs(pts) ** 2) ** 2
        ring_pts = ring * np.exp(2j * np.pi * np.arange(n_ring) / n_ring)
        ring_vals = np.abs(self(ring_pts)) * (1.0 - ring**2) ** 2
        return float(max(vals.max(), ring_vals.max()))

    def a1_norm(self, quad: DiskQuadrature | None = None) -> float:
        quad = quad or DiskQuadrature()
        return float(quad.integrate(np.abs(self.samples(quad))).real)

    def a2_norm(self, quad: DiskQuadrature | None = None) -> float:
        """iint |phi|^2 (1 - |zeta|^2)^2 dsigma (the weighted integral itself, no root)."""
        quad = quad or DiskQuadrature()
        w = quad.points
        return float(quad.integrate(np.abs(self(w)) ** 2 * (1 - np.abs(w) ** 2) ** 2).real)

    def __repr__(self):
        return f"DiskHolomorphic(degree={self.degree})"
