"""Grid and sine-basis representations of states in L2(0, 1).

States are plain 1-D numpy arrays holding samples at the interior nodes
``x_i = i*h``, ``i = 1..n``; the homogeneous Dirichlet boundary values are
implied. The spectral basis is ``phi_j(x) = sqrt(2) sin(j pi x)``.

With the zero-endpoint trapezoid rule the sampled basis is exactly
orthonormal for ``j, k <= n`` (discrete sine transform of type I), so
Parseval and round-trip identities hold to rounding error.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DimensionError

__all__ = [
    "SpatialGrid",
    "inner_product",
    "l2_norm",
    "weighted_norm",
    "to_spectral",
    "from_spectral",
]


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid of ``n`` interior points on (0, 1)."""

    n: int = 201

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ConfigurationError(f"grid needs n >= 3 interior points, got {self.n!r}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @cached_property
    def x(self) -> np.ndarray:
        """Interior node positions."""
        return np.arange(1, self.n + 1) * self.h

    @cached_property
    def x_closed(self) -> np.ndarray:
        """Nodes including both endpoints, for sampling non-Dirichlet data."""
        return np.arange(0, self.n + 2) * self.h

    @cached_property
    def sine_matrix(self) -> np.ndarray:
        """``S[i, j-1] = phi_j(x_i)`` for all ``n`` modes."""
        j = np.arange(1, self.n + 1)
        return np.sqrt(2.0) * np.sin(np.pi * np.outer(self.x, j))

    def basis(self, modes: int) -> np.ndarray:
        if modes < 1 or modes > self.n:
            raise ConfigurationError(f"mode count must be in [1, {self.n}], got {modes}")
        return self.sine_matrix[:, :modes]

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)

    def sample(self, fn) -> np.ndarray:
        return np.asarray(fn(self.x), dtype=float) * np.ones(self.n)


def _check(u, g):
    u = np.asarray(u, dtype=float)
    if u.shape != (g.n,):
        raise DimensionError(f"field has shape {u.shape}, grid expects ({g.n},)")
    return u


def inner_product(u, v, g: SpatialGrid) -> float:
    """Trapezoid approximation of the integral of ``u*v`` with zero endpoints."""
    u = _check(u, g)
    v = _check(v, g)
    return float(g.h * np.dot(u, v))


def weighted_norm(u, weight: float = 1.0) -> float:
    """``sqrt(weight * sum(u**2))`` computed without under/overflow."""
    u = np.asarray(u, dtype=float)
    scale = np.max(np.abs(u)) if u.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        return float(scale)
    r = u / scale
    return float(scale * np.sqrt(weight * np.dot(r, r)))


def l2_norm(u, g: SpatialGrid) -> float:
    return weighted_norm(_check(u, g), g.h)


def to_spectral(u, g: SpatialGrid, modes: int) -> np.ndarray:
    """Coefficients ``c_j = <u, phi_j>`` for ``j = 1..modes``."""
    u = _check(u, g)
    return g.h * (g.basis(modes).T @ u)


def from_spectral(c, g: SpatialGrid) -> np.ndarray:
    """Grid samples of ``sum_j c_j phi_j``."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or c.size < 1:
        raise DimensionError("spectral coefficients must be a non-empty vector")
    if not np.all(np.isfinite(c)):
        raise DimensionError("spectral coefficients must be finite")
    return g.basis(c.size) @ c
