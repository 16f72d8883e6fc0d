"""Test-matrix generators.

- Haar-factor matrices A = U Σ Vᵀ with a prescribed singular-value decay.
- Cyclic-rows matrices whose scaled Gram matrix (1/n)AᵀA is a given G∘.
- Elliptical-rows matrices with i.i.d. rows a_i = sqrt(d) ν_i G∘^{1/2} U_i.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg as sla
from scipy import special

from . import rng, settings
from .exceptions import ConfigError, DimensionError, NotPositiveDefiniteError
from .linalg import DenseMatrix

logger = logging.getLogger(__name__)


class DecayKind(str, enum.Enum):
    POWER_LAW = 'power_law'
    EXPONENTIAL = 'exponential'
    EXPLICIT = 'explicit'


@dataclass(frozen=True)
class DecayProfile:
    kind: DecayKind
    parameter: Optional[float] = None
    values: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        kind = DecayKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        if kind is DecayKind.EXPLICIT:
            values = tuple(float(value) for value in self.values or ())
            if not values or min(values) <= 0:
                raise ConfigError('explicit singular values must be positive')
            if any(later > earlier for earlier, later in zip(values, values[1:])):
                raise ConfigError('explicit singular values must be nonincreasing')
            object.__setattr__(self, 'values', values)
        elif self.parameter is None or float(self.parameter) <= 0:
            raise ConfigError(f'{kind.value} decay needs a positive parameter')

    @classmethod
    def power_law(cls, beta):
        """σ_j = j^(-beta)"""
        return cls(DecayKind.POWER_LAW, float(beta))

    @classmethod
    def exponential(cls, gamma):
        """σ_j = 10^(-gamma j)"""
        return cls(DecayKind.EXPONENTIAL, float(gamma))

    @classmethod
    def explicit(cls, values):
        return cls(DecayKind.EXPLICIT, values=tuple(values))

    @classmethod
    def from_dict(cls, payload):
        # {'kind': 'power_law', 'beta': 1.0} or {'kind': 'exponential', 'gamma': 0.1}
        kind = DecayKind(payload['kind'])
        if kind is DecayKind.POWER_LAW:
            return cls.power_law(payload['beta'])
        if kind is DecayKind.EXPONENTIAL:
            return cls.exponential(payload['gamma'])
        return cls.explicit(payload['values'])

    def to_dict(self):
        if self.kind is DecayKind.POWER_LAW:
            return {'kind': self.kind.value, 'beta': self.parameter}
        if self.kind is DecayKind.EXPONENTIAL:
            return {'kind': self.kind.value, 'gamma': self.parameter}
        return {'kind': self.kind.value, 'values': list(self.values)}

    def singular_values(self, d):
        j = np.arange(1, d + 1, dtype=np.float64)
        if self.kind is DecayKind.POWER_LAW:
            return j ** (-self.parameter)
        if self.kind is DecayKind.EXPONENTIAL:
            return 10.0 ** (-self.parameter * j)
        if len(self.values) != d:
            raise DimensionError(
                f'explicit profile has {len(self.values)} values, expected d={d}'
            )
        return np.array(self.values)


def haar_orthonormal(n, d, generator):
    """n x d matrix with Haar-distributed orthonormal columns.

    QR of a Gaussian matrix, with the signs of R's diagonal moved into Q so
    that the distribution is exactly Haar.
    """
    q, r = sla.qr(generator.standard_normal((n, d)), mode='economic')
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def haar_factor_matrix(n, d, profile: DecayProfile, seed) -> DenseMatrix:
    if not n >= d >= 1:
        raise DimensionError(f'need n >= d >= 1, got n={n}, d={d}')
    sigma = profile.singular_values(d)
    generator = rng.stream(seed, rng.HAAR)
    u = haar_orthonormal(n, d, generator)
    v = haar_orthonormal(d, d, generator)
    return DenseMatrix((u * sigma) @ v.T)


class NuDistribution(str, enum.Enum):
    CONSTANT_ONE = 'constant'
    SCALED_CHI = 'scaled_chi'


def spd_sqrt(g_circ):
    """Symmetric positive-definite square root via eigendecomposition."""
    g = np.asarray(g_circ, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionError(f'G must be square, got shape {g.shape}')
    if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise NotPositiveDefiniteError('G must be symmetric')

    eigenvalues, eigenvectors = sla.eigh(g)
    if eigenvalues[0] <= 0:
        raise NotPositiveDefiniteError(
            f'G must be positive definite, smallest eigenvalue {eigenvalues[0]!r}'
        )
    if np.any(np.diff(eigenvalues) <= 1e-12 * eigenvalues[-1]):
        logger.warning('G has repeated eigenvalues; its eigenvectors are not isolated')

    root = (eigenvectors * np.sqrt(eigenvalues)) @ eigenvectors.T
    return 0.5 * (root + root.T)


def cyclic_rows_matrix(n, g_circ) -> DenseMatrix:
    """Rows of sqrt(d) G∘^{1/2}, repeated cyclically until there are n."""
    root = spd_sqrt(g_circ)
    d = root.shape[0]
    if n < d:
        raise DimensionError(f'need n >= d, got n={n}, d={d}')
    base = np.sqrt(d) * root
    return DenseMatrix(base[np.arange(n) % d])


def scaled_chi_second_moment(dof, cap=None):
    """E[min(χ²_dof / dof, cap)], from regularized incomplete gamma functions."""
    cap = settings.SCALED_CHI_CAP if cap is None else cap
    # χ²_dof / dof is Gamma(dof/2, scale 2/dof) with mean 1
    shape, x = dof / 2.0, cap * dof / 2.0
    return float(special.gammainc(shape + 1.0, x) + cap * special.gammaincc(shape, x))


def scaled_chi_nu(n, dof, generator, cap=None):
    """ν = sqrt(min(χ²_dof / dof, cap) / m) with m the clipped second moment.

    Bounded by sqrt(cap / m) and E[ν²] = 1.
    """
    cap = settings.SCALED_CHI_CAP if cap is None else cap
    if dof <= 0 or cap <= 0:
        raise ConfigError(f'dof and cap must be positive, got dof={dof}, cap={cap}')
    squares = np.minimum(generator.chisquare(dof, size=n) / dof, cap)
    return np.sqrt(squares / scaled_chi_second_moment(dof, cap))


def elliptical_rows_matrix(n, g_circ, nu_dist=NuDistribution.CONSTANT_ONE,
                           seed=0, dof=None) -> DenseMatrix:
    """i.i.d. rows sqrt(d) ν_i G∘^{1/2} U_i, U_i uniform on the unit sphere.

    ``scaled_chi`` draws a clipped, rescaled χ_dof / sqrt(dof) (dof defaults
    to d); see :func:`scaled_chi_nu`.
    """
    root = spd_sqrt(g_circ)
    d = root.shape[0]
    nu_dist = NuDistribution(nu_dist)
    generator = rng.stream(seed, rng.ELLIPTICAL)

    z = generator.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    directions = np.divide(z, norms, out=np.zeros_like(z), where=norms > 0)

    if nu_dist is NuDistribution.CONSTANT_ONE:
        nu = np.ones(n)
    else:
        nu = scaled_chi_nu(n, dof or d, generator)

    return DenseMatrix((np.sqrt(d) * nu[:, np.newaxis] * directions) @ root)
