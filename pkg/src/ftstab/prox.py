"""Resolvents of the convex functionals behind the feedback laws.

Each map returns the minimizer of ``0.5*||y - v||^2 + tau*g(y)`` where the
norm is ``||u|| = sqrt(weight * sum(u**2))`` and ``m`` is the (positive)
multiplier of ``B = B*``:

==========================  ==========================================
``prox_weighted_norm``      ``g(y) = ||m y||``
``prox_power_functional``   ``g(y) = ||m y||^(2+zeta) / (2+zeta)``
``prox_phi``                ``g(y) = ||m y||^(2-mu)/(2-mu) + ||m y||^(2+mu)/(2+mu) + nu/2 ||m y||^2``
==========================  ==========================================

All three minimizers have the form ``y = v / (1 + tau * c(s) * m**2)`` with a
scalar ``s = ||m y||`` that solves a monotone equation. The equations are
written so the residual is increasing in ``s`` and free of negative powers,
then solved by bisection on a geometric scale (the root can be hundreds of
decades below ``||m v||`` near the origin).
"""

import numpy as np

from .errors import ProxConvergenceError
from .spectral import weighted_norm

__all__ = [
    "prox_weighted_norm",
    "prox_power_functional",
    "prox_phi",
    "objective_weighted_norm",
    "objective_power_functional",
    "objective_phi",
    "DEFAULT_RTOL",
    "DEFAULT_MAX_ITER",
]

DEFAULT_RTOL = 1e-12
DEFAULT_MAX_ITER = 200
# floor for the lower end of the bracket, relative to the upper end
_FLOOR = 1e-300


def _bisect(residual, lo, hi, rtol, max_iter, what):
    """Root of an increasing ``residual`` in ``[lo, hi]`` with ``0 < lo <= hi``.

    Returns ``lo`` when the root lies below it (the prox output is then
    smaller than anything representable relative to ``||v||``).
    """
    if residual(lo) >= 0:
        return lo
    for it in range(max_iter):
        if hi - lo <= rtol * hi:
            return hi
        if hi > 4.0 * lo:
            mid = np.sqrt(lo) * np.sqrt(hi)
        else:
            mid = 0.5 * (lo + hi)
        if residual(mid) > 0:
            hi = mid
        else:
            lo = mid
    if hi - lo <= rtol * hi:
        return hi
    raise ProxConvergenceError(
        f"{what}: bisection did not converge in {max_iter} iterations (bracket [{lo:.6e}, {hi:.6e}])",
        bracket=(lo, hi),
        iterations=max_iter,
    )


def _prepare(v, m, tau):
    v = np.asarray(v, dtype=float)
    m = np.broadcast_to(np.asarray(m, dtype=float), v.shape)
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if np.any(m <= 0):
        raise ValueError("multiplier must be positive")
    return v, m


def prox_weighted_norm(v, tau, m, weight=1.0, rtol=DEFAULT_RTOL, max_iter=DEFAULT_MAX_ITER):
    """Resolvent of ``tau * B sign(B* .)``; maps a whole ball onto zero.

    Zero exactly when ``||v/m|| <= tau``. Otherwise ``y = v s/(s + tau m^2)``
    with ``s`` solving ``||m v / (s + tau m^2)|| = 1``.
    """
    v, m = _prepare(v, m, tau)
    if weighted_norm(v / m, weight) <= tau:
        return np.zeros_like(v)
    mv = m * v
    tm2 = tau * m * m

    def residual(s):
        return 1.0 - weighted_norm(mv / (s + tm2), weight)

    hi = weighted_norm(mv, weight)
    s = _bisect(residual, hi * _FLOOR, hi, rtol, max_iter, "prox_weighted_norm")
    return v * (s / (s + tm2))


def prox_power_functional(v, tau, m, zeta, weight=1.0, rtol=DEFAULT_RTOL, max_iter=DEFAULT_MAX_ITER):
    """Resolvent of ``tau * ||B* .||^zeta BB*``: ``y = v / (1 + tau s^zeta m^2)``."""
    v, m = _prepare(v, m, tau)
    if not zeta > 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    mv = m * v
    hi = weighted_norm(mv, weight)
    if hi == 0.0:
        return np.zeros_like(v)
    tm2 = tau * m * m

    def residual(s):
        return s - weighted_norm(mv / (1.0 + tm2 * s**zeta), weight)

    # s >= ||m v|| / (1 + tau hi^zeta max m^2) gives a tight lower end
    lo = max(hi / (1.0 + tm2.max() * hi**zeta), hi * _FLOOR)
    s = _bisect(residual, lo, hi, rtol, max_iter, "prox_power_functional")
    return v / (1.0 + tm2 * s**zeta)


def prox_phi(v, tau, m, mu, nu=0.0, weight=1.0, rtol=DEFAULT_RTOL, max_iter=DEFAULT_MAX_ITER):
    """Resolvent of the nonlinear fixed-time feedback operator ``B C(B* .)``.

    With ``s = ||m y||`` the output is
    ``y = v s^mu / (s^mu (1 + tau nu m^2) + tau m^2 (1 + s^(2mu)))`` and ``s``
    solves ``s^(1-mu) = G(s) := ||m v / (s^mu (1 + tau nu m^2) + tau m^2 (1 + s^(2mu)))||``.
    ``G`` decreases from ``||v/(tau m)||``, which brackets the root between
    ``G(s_hi)^(1/(1-mu))`` and ``G(0)^(1/(1-mu))``. No dead zone: ``v != 0``
    maps to a nonzero output unless it underflows.
    """
    v, m = _prepare(v, m, tau)
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    mv = m * v
    norm_mv = weighted_norm(mv, weight)
    if norm_mv == 0.0:
        return np.zeros_like(v)
    tm2 = tau * m * m
    lin = 1.0 + tau * nu * m * m
    p = 1.0 / (1.0 - mu)

    def G(s):
        sm = s**mu
        return weighted_norm(mv / (sm * lin + tm2 * (1.0 + sm * sm)), weight)

    def residual(s):
        return s ** (1.0 - mu) - G(s)

    hi = min(norm_mv, weighted_norm(v / (tau * m), weight) ** p)
    if hi == 0.0:
        return np.zeros_like(v)
    lo = max(G(hi) ** p, hi * _FLOOR)
    if lo == 0.0:
        lo = np.nextafter(0.0, 1.0)
    lo = min(lo, hi)
    s = _bisect(residual, lo, hi, rtol, max_iter, "prox_phi")
    sm = s**mu
    return v * (sm / (sm * lin + tm2 * (1.0 + sm * sm)))


# -- objectives (used by tests and diagnostics) ------------------------------


def objective_weighted_norm(y, v, tau, m, weight=1.0):
    y = np.asarray(y, dtype=float)
    return 0.5 * weighted_norm(y - v, weight) ** 2 + tau * weighted_norm(m * y, weight)


def objective_power_functional(y, v, tau, m, zeta, weight=1.0):
    y = np.asarray(y, dtype=float)
    s = weighted_norm(m * y, weight)
    return 0.5 * weighted_norm(y - v, weight) ** 2 + tau * s ** (2 + zeta) / (2 + zeta)


def objective_phi(y, v, tau, m, mu, nu=0.0, weight=1.0):
    y = np.asarray(y, dtype=float)
    s = weighted_norm(m * y, weight)
    g = s ** (2 - mu) / (2 - mu) + s ** (2 + mu) / (2 + mu) + 0.5 * nu * s * s
    return 0.5 * weighted_norm(y - v, weight) ** 2 + tau * g
