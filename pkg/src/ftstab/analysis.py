"""Lyapunov monitoring, settling-time measurement and the theoretical bounds.

Bounds (``||y0||`` initial norm, ``beta`` coercivity, ``M`` disturbance bound):

* finite-time switching law: ``T <= ||y0|| / (rho beta - M)``
* fixed-time law: ``T <= 1/(rho beta - M) + 1/(zeta beta^(zeta+2))``
* nonlinear fixed-time law: ``T <= arctan(beta^mu ||y0||^mu)/(beta^2 mu) < pi/(2 beta^2 mu)``

The matching Lyapunov inequalities for ``V = ||y||^2`` are checked on
recorded trajectories by :func:`check_differential_inequality`.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GainError

__all__ = [
    "SettlingReport",
    "InequalityReport",
    "lyapunov_series",
    "detect_settling",
    "finite_time_bound",
    "fixed_time_bound",
    "nonlinear_fixed_time_bound",
    "arctan_estimate",
    "check_differential_inequality",
    "inequality_parameters",
]


def lyapunov_series(traj) -> np.ndarray:
    return np.asarray(traj.norms, dtype=float) ** 2


def detect_settling(traj, tol: float = 0.0) -> Optional[float]:
    """First recorded time after which every norm stays ``<= tol``; ``None`` if never."""
    if tol < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    norms = np.asarray(traj.norms)
    above = np.flatnonzero(norms > tol)
    if above.size == 0:
        return float(traj.times[0])
    last = above[-1]
    if last == norms.size - 1:
        return None
    return float(traj.times[last + 1])


def _margin(rho, beta, M):
    gap = rho * beta - M
    if not gap > 0:
        raise GainError(f"rho*beta = {rho * beta:.6g} does not exceed M = {M:.6g}; bound undefined", threshold=M / beta)
    return gap


def finite_time_bound(norm_y0, rho, beta, M) -> float:
    return float(norm_y0 / _margin(rho, beta, M))


def fixed_time_bound(rho, beta, M, zeta) -> float:
    if not zeta > 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    return float(1.0 / _margin(rho, beta, M) + 1.0 / (zeta * beta ** (zeta + 2)))


def _check_mu_beta(beta, mu):
    if not 0 < mu < 1:
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")


def nonlinear_fixed_time_bound(beta, mu) -> float:
    _check_mu_beta(beta, mu)
    return float(np.pi / (2.0 * beta**2 * mu))


def arctan_estimate(norm_y0, beta, mu) -> float:
    """Initial-state-dependent settling estimate; tends to the uniform bound as ``||y0|| -> inf``."""
    _check_mu_beta(beta, mu)
    return float(np.arctan(beta**mu * norm_y0**mu) / (beta**2 * mu))


@dataclass
class SettlingReport:
    t_settle: Optional[float]
    bounds: list
    h: float
    slack_steps: float = 2.0

    @property
    def margins(self) -> list:
        if self.t_settle is None:
            return [(name, None) for name, _ in self.bounds]
        return [(name, value - self.t_settle) for name, value in self.bounds]

    @property
    def settled(self) -> bool:
        return self.t_settle is not None

    @property
    def passed(self) -> bool:
        if not self.settled:
            return False
        return all(m >= -self.slack_steps * self.h for _, m in self.margins)

    def as_dict(self) -> dict:
        return {
            "t_settle": self.t_settle,
            "settled": self.settled,
            "bounds": {name: value for name, value in self.bounds},
            "margins": {name: m for name, m in self.margins},
            "slack": self.slack_steps * self.h,
            "passed": self.passed,
        }


@dataclass
class InequalityReport:
    worst_violation: float
    violation_times: list
    parameters: dict
    tolerance: float
    samples_checked: int = 0
    worst_time: Optional[float] = None

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "worst_violation": self.worst_violation,
            "worst_time": self.worst_time,
            "tolerance": self.tolerance,
            "violations": len(self.violation_times),
            "first_violation_times": self.violation_times[:20],
            "samples_checked": self.samples_checked,
            "parameters": self.parameters,
            "passed": self.passed,
        }


def check_differential_inequality(
    traj, c, theta, c2=None, alpha=None, tol=None, floor=0.0
) -> InequalityReport:
    """Worst signed violation of ``dV/dt + c V^theta (+ c2 V^alpha) <= 0``.

    ``dV/dt`` is a central difference (one-sided at the ends). Samples with
    ``V <= floor`` are skipped, and so is any sample whose successor is
    ``<= floor``: the last step into exact zero drops faster than any power
    law, which only errs on the safe side.
    """
    V = lyapunov_series(traj)
    h = float(traj.h)
    if tol is None:
        tol = 10.0 * h
    params = {"c": c, "theta": theta}
    if c2 is not None:
        params.update(c2=c2, alpha=alpha)
    if V.size < 2:
        return InequalityReport(0.0, [], params, tol)
    dV = np.gradient(V, h)
    target = c * np.power(V, theta)
    if c2 is not None:
        target = target + c2 * np.power(V, alpha)
    lhs = dV + target
    keep = V > floor
    keep[:-1] &= V[1:] > floor
    if not np.any(keep):
        return InequalityReport(0.0, [], params, tol)
    idx = np.flatnonzero(keep)
    vals = lhs[idx]
    j = int(np.argmax(vals))
    worst = float(vals[j])
    times = traj.times[idx[vals > tol]].tolist()
    return InequalityReport(worst, times, params, tol, int(idx.size), float(traj.times[idx[j]]))


def inequality_parameters(law, beta, M) -> dict:
    """Coefficients of the Lyapunov inequality each law's analysis provides.

    For the switching laws ``c = 2(rho beta - M)`` is clipped at 0 when the
    gain fails: no positive rate is then available and the check reduces to
    plain decrease of ``V``.
    """
    from .feedback import FiniteTimeLaw, FixedTimeLaw, NonlinearFixedTimeLaw

    if isinstance(law, FixedTimeLaw):
        return {
            "c": 2.0 * max(law.rho * beta - M, 0.0),
            "theta": 0.5,
            "c2": 2.0 * beta ** (law.zeta + 2),
            "alpha": 1.0 + law.zeta / 2,
        }
    if isinstance(law, FiniteTimeLaw):
        return {"c": 2.0 * max(law.rho * beta - M, 0.0), "theta": 0.5}
    if isinstance(law, NonlinearFixedTimeLaw):
        mu = law.mu
        return {
            "c": 2.0 * beta ** (2 - mu),
            "theta": 1.0 - mu / 2,
            "c2": 2.0 * beta ** (2 + mu),
            "alpha": 1.0 + mu / 2,
        }
    raise TypeError(f"unsupported law {law!r}")
