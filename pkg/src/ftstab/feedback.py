"""Stabilizing feedback laws and the gain condition.

The explicit evaluators below are for diagnostics and logging. The time
stepper never evaluates the discontinuous laws pointwise; it applies the
matching resolvents from :mod:`ftstab.prox` instead.

At ``y = 0`` every law selects ``u = 0`` (for the switching laws this is the
element of the set-valued branch that keeps the origin an equilibrium).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .operators import InputOperator, apply_Bstar

__all__ = [
    "FiniteTimeLaw",
    "FixedTimeLaw",
    "NonlinearFixedTimeLaw",
    "GainReport",
    "gain_threshold",
    "validate_gain",
    "eval_finite_time_control",
    "eval_fixed_time_control",
    "eval_nonlinear_control",
    "eval_control",
]


@dataclass(frozen=True)
class FiniteTimeLaw:
    """``u = -lambda_lin B*y - rho B*y / ||B*y||``."""

    rho: float
    lambda_lin: float = 0.0

    name = "finite_time"

    def __post_init__(self):
        if not self.rho > 0:
            raise ConfigurationError(f"switching gain rho must be positive, got {self.rho}")
        if self.lambda_lin < 0:
            raise ConfigurationError(f"linear gain must be nonnegative, got {self.lambda_lin}")

    @classmethod
    def from_operators(cls, rho, omega, beta):
        return cls(rho=rho, lambda_lin=omega / beta**2)


@dataclass(frozen=True)
class FixedTimeLaw:
    """Finite-time law plus the power term ``-||B*y||^zeta B*y``."""

    rho: float
    zeta: float
    lambda_lin: float = 0.0

    name = "fixed_time"

    def __post_init__(self):
        if not self.rho > 0:
            raise ConfigurationError(f"switching gain rho must be positive, got {self.rho}")
        if not self.zeta > 0:
            raise ConfigurationError(f"exponent zeta must be positive, got {self.zeta}")
        if self.lambda_lin < 0:
            raise ConfigurationError(f"linear gain must be nonnegative, got {self.lambda_lin}")

    @classmethod
    def from_operators(cls, rho, zeta, omega, beta):
        return cls(rho=rho, zeta=zeta, lambda_lin=omega / beta**2)


@dataclass(frozen=True)
class NonlinearFixedTimeLaw:
    """``u = -(||B*y||^-mu + ||B*y||^mu + nu) B*y``, zero at the origin."""

    mu: float
    nu: float = 0.0

    name = "nonlinear_fixed_time"

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise ConfigurationError(f"mu must lie in (0, 1), got {self.mu}")
        if self.nu < 0:
            raise ConfigurationError(f"nu must be nonnegative, got {self.nu}")

    @classmethod
    def from_operators(cls, mu, kappa, omega, beta):
        return cls(mu=mu, nu=kappa + omega / beta**2)


@dataclass(frozen=True)
class GainReport:
    passed: bool
    threshold: float
    rho: float
    terms: tuple

    def __bool__(self):
        return self.passed


def gain_threshold(M, beta, inv_norm):
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not inv_norm > 0:
        raise ValueError(f"inv_norm must be positive, got {inv_norm}")
    if M < 0:
        raise ValueError(f"M must be nonnegative, got {M}")
    terms = (M / beta, M * np.sqrt(inv_norm))
    return max(terms), terms


def validate_gain(rho, M, beta, inv_norm) -> GainReport:
    """Check ``rho > max(M/beta, M*sqrt(||(BB*)^-1||))`` (strict)."""
    threshold, terms = gain_threshold(M, beta, inv_norm)
    return GainReport(bool(rho > threshold), float(threshold), float(rho), tuple(float(t) for t in terms))


def _switching(z, rho, op, eps):
    nz = op.norm(z)
    denom = max(nz, eps)
    if denom == 0.0:
        return np.zeros_like(z)
    return -rho * z / denom


def eval_finite_time_control(y, law: FiniteTimeLaw, op: InputOperator, eps: float = 0.0) -> np.ndarray:
    z = apply_Bstar(y, op)
    if not np.any(z):
        return np.zeros_like(z)
    return -law.lambda_lin * z + _switching(z, law.rho, op, eps)


def eval_fixed_time_control(y, law: FixedTimeLaw, op: InputOperator, eps: float = 0.0) -> np.ndarray:
    z = apply_Bstar(y, op)
    if not np.any(z):
        return np.zeros_like(z)
    nz = op.norm(z)
    return -(law.lambda_lin + nz**law.zeta) * z + _switching(z, law.rho, op, eps)


def eval_nonlinear_control(y, law: NonlinearFixedTimeLaw, op: InputOperator, eps: float = 0.0) -> np.ndarray:
    z = apply_Bstar(y, op)
    if not np.any(z):
        return np.zeros_like(z)
    nz = op.norm(z)
    return -(max(nz, eps) ** (-law.mu) + nz**law.mu + law.nu) * z


def eval_control(y, law, op: InputOperator, eps: float = 0.0) -> np.ndarray:
    if isinstance(law, FixedTimeLaw):
        return eval_fixed_time_control(y, law, op, eps)
    if isinstance(law, FiniteTimeLaw):
        return eval_finite_time_control(y, law, op, eps)
    if isinstance(law, NonlinearFixedTimeLaw):
        return eval_nonlinear_control(y, law, op, eps)
    raise TypeError(f"unsupported law {law!r}")
