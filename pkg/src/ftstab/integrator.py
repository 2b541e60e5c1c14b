"""Time stepping for the closed-loop inclusions.

``step_prox_splitting`` is a Lie splitting that ends every step with a
resolvent, so ``||y||`` never grows through the control sub-steps and the
switching law captures the origin exactly (dead zone of
:func:`ftstab.prox.prox_weighted_norm`). Sub-steps, in order:

1. source: ``eta(t)`` explicitly at the left endpoint; the ``f(y) y`` term
   with its coefficient frozen at the current state, the nonpositive part of
   ``f`` taken implicitly and the nonnegative part explicitly;
2. exact diffusion in the sine basis;
3. implicit linear feedback ``y / (1 + h lambda_lin m^2)``;
4. resolvent of the nonsmooth feedback (power term first, switching last).

``step_explicit_regularized`` is the cross-check baseline: smoothed laws and
forward Euler for everything except diffusion.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError, NumericalError
from .feedback import FiniteTimeLaw, FixedTimeLaw, NonlinearFixedTimeLaw, eval_control
from .operators import DiffusionOperator, InputOperator, Nonlinearity, Perturbation, apply_B
from .prox import DEFAULT_MAX_ITER, DEFAULT_RTOL, prox_phi, prox_power_functional, prox_weighted_norm
from .spectral import SpatialGrid, weighted_norm

__all__ = [
    "SchemeConfig",
    "ClosedLoop",
    "Trajectory",
    "step_prox_splitting",
    "step_explicit_regularized",
    "run",
    "SCHEMES",
]

SCHEMES = ("prox_splitting", "explicit_regularized")
_BLOWUP = 1e12


@dataclass(frozen=True)
class SchemeConfig:
    h: float = 1e-3
    t_max: float = 10.0
    scheme: str = "prox_splitting"
    eps_reg: float = 1e-6
    prox_tol: float = DEFAULT_RTOL
    prox_max_iter: int = DEFAULT_MAX_ITER
    stride: int = 100

    def __post_init__(self):
        if not self.h > 0:
            raise ConfigurationError(f"time step must be positive, got {self.h}")
        if not self.t_max > 0:
            raise ConfigurationError(f"horizon must be positive, got {self.t_max}")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; choose from {list(SCHEMES)}")
        if not self.eps_reg > 0:
            raise ConfigurationError(f"eps_reg must be positive, got {self.eps_reg}")
        if not 0 < self.prox_tol <= 1e-10:
            raise ConfigurationError(f"prox_tol must lie in (0, 1e-10], got {self.prox_tol}")
        if self.prox_max_iter < 1:
            raise ConfigurationError("prox_max_iter must be at least 1")
        if self.stride < 1:
            raise ConfigurationError("snapshot stride must be at least 1")

    @property
    def steps(self) -> int:
        return int(round(self.t_max / self.h))


@dataclass
class ClosedLoop:
    """Diffusion, actuator, feedback law and optional disturbance/nonlinearity on one grid."""

    grid: SpatialGrid
    diffusion: DiffusionOperator
    actuator: InputOperator
    law: object
    perturbation: Optional[Perturbation] = None
    nonlinearity: Optional[Nonlinearity] = None
    _propagators: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.actuator.grid.n != self.grid.n:
            raise ConfigurationError("actuator and closed loop use different grids")
        if self.diffusion.modes > self.grid.n:
            raise ConfigurationError(f"{self.diffusion.modes} modes exceed the {self.grid.n} grid points")
        if self.perturbation is not None and self.perturbation.is_zero:
            self.perturbation = None
        if self.nonlinearity is not None and self.nonlinearity.is_zero:
            self.nonlinearity = None

    @property
    def unperturbed(self) -> bool:
        return self.perturbation is None

    def propagator(self, h: float) -> np.ndarray:
        """Grid matrix of ``S(h)`` restricted to the retained modes."""
        P = self._propagators.get(h)
        if P is None:
            basis = self.grid.basis(self.diffusion.modes)
            decay = np.exp(self.diffusion.eigenvalues * h)
            P = (basis * decay) @ basis.T * self.grid.h
            self._propagators[h] = P
        return P

    def diffuse(self, y: np.ndarray, h: float) -> np.ndarray:
        if self.diffusion.is_frozen:
            return y
        return self.propagator(h) @ y

    def eta(self, t: float) -> np.ndarray:
        return self.perturbation(t, self.grid.x)

    def control(self, y: np.ndarray, eps: float = 0.0) -> np.ndarray:
        return eval_control(y, self.law, self.actuator, eps)

    def norm(self, y) -> float:
        return weighted_norm(y, self.grid.h)


@dataclass
class Trajectory:
    times: np.ndarray
    norms: np.ndarray
    control_norms: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray
    h: float
    scheme: str = "prox_splitting"

    @property
    def lyapunov(self) -> np.ndarray:
        return self.norms**2

    def __len__(self):
        return self.times.size


def _check_finite(y, where):
    if not np.all(np.isfinite(y)):
        raise NumericalError(f"non-finite state after {where}; the time step is likely too large")
    return y


def step_prox_splitting(y, t: float, cfg: SchemeConfig, loop: ClosedLoop) -> np.ndarray:
    h = cfg.h
    y = np.asarray(y, dtype=float)
    if loop.unperturbed and not np.any(y):
        return np.zeros_like(y)
    op = loop.actuator
    w = loop.grid.h

    if loop.perturbation is not None:
        y = y + h * loop.eta(t)
    if loop.nonlinearity is not None and np.any(y):
        f = loop.nonlinearity(y, op)
        # frozen coefficient: f<=0 implicitly, f>=0 explicitly
        y = y * (1.0 + h * np.maximum(f, 0.0)) / (1.0 - h * np.minimum(f, 0.0))
    y = _check_finite(y, "source sub-step")

    y = loop.diffuse(y, h)

    law = loop.law
    lam = getattr(law, "lambda_lin", 0.0)
    if lam > 0:
        y = y / (1.0 + h * lam * op.a)

    m = op.multiplier
    kw = dict(weight=w, rtol=cfg.prox_tol, max_iter=cfg.prox_max_iter)
    if isinstance(law, FixedTimeLaw):
        y = prox_power_functional(y, h, m, law.zeta, **kw)
        y = prox_weighted_norm(y, h * law.rho, m, **kw)
    elif isinstance(law, FiniteTimeLaw):
        y = prox_weighted_norm(y, h * law.rho, m, **kw)
    elif isinstance(law, NonlinearFixedTimeLaw):
        y = prox_phi(y, h, m, law.mu, law.nu, **kw)
    else:
        raise TypeError(f"unsupported law {law!r}")
    return _check_finite(y, "prox sub-step")


def step_explicit_regularized(y, t: float, cfg: SchemeConfig, loop: ClosedLoop) -> np.ndarray:
    h = cfg.h
    eps = cfg.eps_reg
    y = np.asarray(y, dtype=float)
    op = loop.actuator
    rate = apply_B(loop.control(y, eps), op)
    if loop.perturbation is not None:
        rate = rate + loop.eta(t)
    if loop.nonlinearity is not None:
        rate = rate + loop.nonlinearity(y, op, eps) * y
    y_new = loop.diffuse(y + h * rate, h)
    if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > _BLOWUP * max(1.0, np.max(np.abs(y))):
        raise NumericalError(f"explicit baseline blew up at t={t:.6g}; reduce h (now {h})")
    return y_new


def run(loop: ClosedLoop, y0, cfg: SchemeConfig) -> Trajectory:
    """March from ``y0`` over ``[0, t_max]`` recording norms every step."""
    step = step_prox_splitting if cfg.scheme == "prox_splitting" else step_explicit_regularized
    eps = cfg.eps_reg if cfg.scheme == "explicit_regularized" else 0.0
    y = np.array(y0, dtype=float)
    if y.shape != (loop.grid.n,):
        raise ConfigurationError(f"initial state has shape {y.shape}, grid expects ({loop.grid.n},)")
    _check_finite(y, "initialization")
    n_steps = cfg.steps
    times = np.arange(n_steps + 1) * cfg.h
    norms = np.empty(n_steps + 1)
    unorms = np.empty(n_steps + 1)
    snap_idx = list(range(0, n_steps + 1, cfg.stride))
    if snap_idx[-1] != n_steps:
        snap_idx.append(n_steps)
    snaps = np.empty((len(snap_idx), loop.grid.n))
    next_snap = 0
    w = loop.grid.h
    for k in range(n_steps + 1):
        norms[k] = weighted_norm(y, w)
        unorms[k] = weighted_norm(loop.control(y, eps), w) if norms[k] > 0 else 0.0
        if next_snap < len(snap_idx) and snap_idx[next_snap] == k:
            snaps[next_snap] = y
            next_snap += 1
        if k < n_steps:
            y = step(y, times[k], cfg, loop)
    return Trajectory(
        times=times,
        norms=norms,
        control_norms=unorms,
        snapshot_times=times[snap_idx],
        snapshots=snaps,
        h=cfg.h,
        scheme=cfg.scheme,
    )
