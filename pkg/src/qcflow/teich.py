"""Linear operators at the base point of the universal Teichmueller space.

Conventions:

* ``coupling(mu, phi) = iint_U mu phi dsigma``
* ``petersson_product(phi1, phi2) = iint_U phi1 conj(phi2) (1 - |w|^2)^2 dsigma``
* ``lambda_star(phi) = -(1/2) conj(phi) (1 - |w|^2)^2``
* ``lambda_dot(nu)(zeta) = zeta^{-4} conj(V'''(1 / conj(zeta)))`` where
  ``V'''(z) = -(6/pi) iint_U nu(w) (w - z)^{-4} dsigma_w``.

For |z| > 1 the kernel ``(w - z)^{-4}`` expands in powers of ``w``, so
``lambda_dot(nu)(zeta) = -(6/pi) sum_j C(j+3, 3) conj(m_j) zeta^j`` with
``m_j = iint nu w^j dsigma``.  With these factors ``lambda_dot`` is a left
inverse of ``lambda_star`` on polynomials and
``<nu - lambda_star(lambda_dot(nu)), phi> = 0``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import comb

from .errors import DomainError
from .fields import BeltramiField, DiskHolomorphic
from .grid import DiskQuadrature, _eval_inverse_power_series, _samples, cauchy_transform_disk
from .laurent import LaurentMap


def _quad(quad):
    return quad or DiskQuadrature()


def _holo_samples(phi, quad: DiskQuadrature) -> np.ndarray:
    if isinstance(phi, DiskHolomorphic):
        return phi.samples(quad)
    return _samples(phi, quad)


def bergman_reproduce(phi, zeta, quad: DiskQuadrature | None = None):
    """(3/pi) iint_U phi(w) (1 - |w|^2)^2 / (1 - conj(w) zeta)^4 dsigma_w, |zeta| < 1."""
    quad = _quad(quad)
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) >= 1.0):
        raise DomainError("bergman_reproduce needs |zeta| < 1")
    w = quad.points
    base = _holo_samples(phi, quad) * (1.0 - np.abs(w) ** 2) ** 2 * quad.weights
    flat = zeta_arr.ravel()
    out = np.array([np.sum(base / (1.0 - np.conj(w) * z) ** 4) for z in flat]) * (3.0 / np.pi)
    out = out.reshape(zeta_arr.shape)
    return out if out.ndim else complex(out)


def lambda_star(phi) -> BeltramiField:
    """Harmonic Beltrami differential -(1/2) conj(phi(w)) (1 - |w|^2)^2."""
    def nu(w):
        w = np.asarray(w, dtype=complex)
        return -0.5 * np.conj(np.asarray(phi(w))) * (1.0 - np.abs(w) ** 2) ** 2

    return BeltramiField(nu, name="lambda_star")


def lambda_dot_series(nu, quad: DiskQuadrature | None = None, count: int | None = None) -> DiskHolomorphic:
    """Taylor coefficients of lambda_dot(nu): -(6/pi) C(j+3,3) conj(m_j)."""
    quad = _quad(quad)
    m = quad.moments(_samples(nu, quad), count)
    j = np.arange(m.size)
    return DiskHolomorphic(-(6.0 / np.pi) * comb(j + 3, 3) * np.conj(m))


def lambda_dot(nu, zeta, quad: DiskQuadrature | None = None):
    """Evaluate lambda_dot(nu) at points of the unit disk."""
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) >= 1.0):
        raise DomainError("lambda_dot needs |zeta| < 1")
    return lambda_dot_series(nu, quad)(zeta)


def harmonic_projection(nu, quad: DiskQuadrature | None = None) -> BeltramiField:
    """lambda_star(lambda_dot(nu)): the harmonic representative of nu."""
    return lambda_star(lambda_dot_series(nu, quad))


def coupling(mu, phi, quad: DiskQuadrature | None = None) -> complex:
    quad = _quad(quad)
    return quad.integrate(_samples(mu, quad) * _holo_samples(phi, quad))


def petersson_product(phi1, phi2, quad: DiskQuadrature | None = None) -> complex:
    quad = _quad(quad)
    w = quad.points
    return quad.integrate(_holo_samples(phi1, quad) * np.conj(_holo_samples(phi2, quad))
                          * (1.0 - np.abs(w) ** 2) ** 2)


def wp_pairing(nu1, nu2, quad: DiskQuadrature | None = None) -> complex:
    """{nu1, nu2} = <nu1, lambda_dot(nu2)>."""
    quad = _quad(quad)
    return coupling(nu1, lambda_dot_series(nu2, quad), quad)


def first_variation(nu, zeta, quad: DiskQuadrature | None = None):
    """V(zeta) = -(1/pi) iint_U nu(w)/(w - zeta) dsigma_w."""
    return cauchy_transform_disk(nu, zeta, quad)


def first_variation_third(nu, zeta, quad: DiskQuadrature | None = None):
    """V'''(zeta) = -(6/pi) iint_U nu(w)/(w - zeta)^4 dsigma_w for |zeta| > 1."""
    quad = _quad(quad)
    zeta_arr = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta_arr) <= 1.0):
        raise DomainError("first_variation_third needs |zeta| > 1")
    m = quad.moments(_samples(nu, quad))
    j = np.arange(m.size)
    # (w - z)^{-4} = sum_j C(j+3,3) w^j z^{-j-4}
    coeffs = np.concatenate([np.zeros(4), -(6.0 / np.pi) * comb(j + 3, 3) * m])
    out = _eval_inverse_power_series(coeffs, zeta_arr)
    return out if out.ndim else complex(out)


def schwarzian(f, zeta):
    """S_f = (f''/f')' - (1/2)(f''/f')^2 for a LaurentMap or any object with ``schwarzian``."""
    return f.schwarzian(zeta)


def b_norm(f: LaurentMap, quad: DiskQuadrature | None = None, ring: float = 0.99,
           n_ring: int = 512) -> float:
    """sup over the disk of |S_g(zeta)| (1 - |zeta|^2)^2 for g(zeta) = f(1/zeta).

    S_g(zeta) = S_f(1/zeta) zeta^{-4}; the supremum is taken over the
    quadrature nodes and a ring of radius ``ring``.
    """
    quad = _quad(quad)
    pts = np.concatenate([quad.points.ravel(), ring * np.exp(2j * np.pi * np.arange(n_ring) / n_ring)])
    s = np.asarray(f.schwarzian(1.0 / pts)) * pts ** -4
    return float(np.max(np.abs(s) * (1.0 - np.abs(pts) ** 2) ** 2))
