"""Heat-equation realizations of the system operators and their constants.

* ``DiffusionOperator``: the Dirichlet Laplacian on (0, 1) in its eigenbasis,
  ``lambda_j = -(j pi)^2``; generates a contraction semigroup (type 0).
* ``InputOperator``: multiplication by ``sqrt(a(x))``; self-adjoint, so
  ``B = B*``. Coercive with constant ``beta = sqrt(inf a)``.
* ``Perturbation``: matched disturbance ``eta(t, x)`` with declared bound ``M``.
* ``Nonlinearity``: the scalar-field coefficient ``f(y)`` in ``f(y) y``.

Coefficients, disturbances and nonlinearities are selected by name from the
registries below; there is no expression parser.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DimensionError, ModelError
from .spectral import SpatialGrid, l2_norm, to_spectral, weighted_norm

__all__ = [
    "Coefficient",
    "DiffusionOperator",
    "InputOperator",
    "Perturbation",
    "Nonlinearity",
    "apply_B",
    "apply_Bstar",
    "estimate_beta",
    "perturbation_bound",
    "semigroup_step",
    "dissipativity_check",
    "make_coefficient",
    "make_perturbation",
    "make_nonlinearity",
    "COEFFICIENTS",
    "PERTURBATIONS",
    "NONLINEARITIES",
]


# -- diffusion ---------------------------------------------------------------


@dataclass(frozen=True)
class DiffusionOperator:
    eigenvalues: np.ndarray
    omega: float = 0.0

    @classmethod
    def heat(cls, modes: int) -> "DiffusionOperator":
        lam = -(np.pi * np.arange(1, modes + 1)) ** 2
        return cls(eigenvalues=lam, omega=0.0)

    @classmethod
    def frozen(cls, modes: int) -> "DiffusionOperator":
        """No diffusion at all (every eigenvalue zero); used for scalar oracles."""
        return cls(eigenvalues=np.zeros(modes), omega=0.0)

    @property
    def modes(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def is_frozen(self) -> bool:
        return not np.any(self.eigenvalues)

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", lam)
        if lam.ndim != 1 or lam.size < 1:
            raise ConfigurationError("diffusion operator needs at least one mode")
        if np.any(lam > self.omega):
            raise ModelError("eigenvalues must not exceed the semigroup type omega")


def semigroup_step(c, h: float, op: DiffusionOperator) -> np.ndarray:
    """Exact propagation ``c_j -> exp(lambda_j h) c_j``."""
    if h < 0:
        raise ValueError(f"semigroup step needs h >= 0, got {h}")
    c = np.asarray(c, dtype=float)
    if c.shape != op.eigenvalues.shape:
        raise DimensionError(f"expected {op.modes} coefficients, got {c.shape}")
    return np.exp(op.eigenvalues * h) * c


def dissipativity_check(y, op: DiffusionOperator, g: SpatialGrid) -> float:
    """``<Ay, y> - omega ||y||^2`` evaluated spectrally; nonpositive for valid data."""
    c = to_spectral(y, g, op.modes)
    return float(np.dot(op.eigenvalues, c * c) - op.omega * np.dot(c, c))


# -- input operator ----------------------------------------------------------


@dataclass(frozen=True)
class Coefficient:
    """Named control-gain profile ``a(x)`` with its analytic infimum on (0, 1)."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    ess_inf: Optional[float] = None
    params: tuple = ()

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float) * np.ones_like(x, dtype=float)


def _unit():
    return Coefficient("unit", lambda x: np.ones_like(x), ess_inf=1.0)


def _x2_plus_001():
    return Coefficient("x2_plus_001", lambda x: x * x + 0.01, ess_inf=0.01)


def _constant(value):
    value = float(value)
    return Coefficient("constant", lambda x: np.full_like(x, value), ess_inf=value, params=(value,))


COEFFICIENTS = {"unit": _unit, "x2_plus_001": _x2_plus_001, "constant": _constant}


def make_coefficient(name: str, params=()) -> Coefficient:
    try:
        factory = COEFFICIENTS[name]
    except KeyError:
        raise ConfigurationError(f"unknown coefficient {name!r}; choose from {sorted(COEFFICIENTS)}") from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters {list(params)} for coefficient {name!r}: {exc}") from None


@dataclass(frozen=True)
class InputOperator:
    """Multiplication by ``m(x) = sqrt(a(x))`` on a fixed grid."""

    grid: SpatialGrid
    multiplier: np.ndarray
    beta: float
    inv_norm_bbstar: float
    coefficient: Optional[Coefficient] = field(default=None, compare=False)

    @classmethod
    def from_coefficient(cls, a: Coefficient, grid: SpatialGrid, beta=None, inv_norm=None) -> "InputOperator":
        """Sample ``a`` on ``grid``.

        ``beta`` and ``inv_norm`` may be numbers, ``"grid"`` (use grid minima)
        or ``"analytic"`` / ``None`` (use the coefficient's declared infimum,
        falling back to grid minima when none is declared).
        """
        values = a(grid.x)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ModelError(f"coefficient {a.name!r} must be positive and finite on the grid")
        m = np.sqrt(values)
        a_min = float(values.min())
        analytic = a.ess_inf
        if beta is None or beta == "analytic":
            beta = np.sqrt(analytic) if analytic is not None else np.sqrt(a_min)
        elif beta == "grid":
            beta = np.sqrt(a_min)
        if inv_norm is None or inv_norm == "analytic":
            inv_norm = 1.0 / analytic if analytic is not None else 1.0 / a_min
        elif inv_norm == "grid":
            inv_norm = 1.0 / a_min
        return cls(grid, m, float(beta), float(inv_norm), a)

    def __post_init__(self):
        m = np.asarray(self.multiplier, dtype=float)
        object.__setattr__(self, "multiplier", m)
        if m.shape != (self.grid.n,):
            raise DimensionError(f"multiplier has shape {m.shape}, grid expects ({self.grid.n},)")
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise ModelError("multiplier sqrt(a) must be positive and finite")
        if not self.beta > 0:
            raise ModelError(f"coercivity constant must be positive, got {self.beta}")
        if self.beta > m.min() * (1 + 1e-12):
            raise ModelError(f"beta={self.beta} exceeds the smallest multiplier {m.min()}")
        if self.inv_norm_bbstar < (1.0 / np.max(m * m)) * (1 - 1e-12):
            raise ModelError("inv_norm_bbstar is below 1/max a, which no multiplier can satisfy")

    @property
    def a(self) -> np.ndarray:
        return self.multiplier * self.multiplier

    def norm(self, u) -> float:
        return weighted_norm(u, self.grid.h)


def apply_B(z, op: InputOperator) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != op.multiplier.shape:
        raise DimensionError(f"field has shape {z.shape}, operator expects {op.multiplier.shape}")
    return op.multiplier * z


# multiplication operators are self-adjoint
apply_Bstar = apply_B


def estimate_beta(op: InputOperator, g: SpatialGrid) -> float:
    """Grid minimum of ``sqrt(a)``; conservative values come via ``op.beta``."""
    if op.coefficient is not None:
        values = op.coefficient(g.x)
    else:
        if g.n != op.grid.n:
            raise DimensionError("operator was sampled on a different grid")
        values = op.a
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise ModelError("a(x) must be positive at every node")
    return float(np.sqrt(values.min()))


# -- perturbation ------------------------------------------------------------


@dataclass(frozen=True)
class Perturbation:
    """Disturbance ``eta(t, x)``; ``sampler`` must broadcast over arrays."""

    name: str
    sampler: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bound: float
    params: tuple = ()

    def __call__(self, t, x) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.sampler(t, x), np.broadcast_shapes(t.shape, x.shape)).astype(float)

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def _zero_eta():
    return Perturbation("zero", lambda t, x: np.zeros(np.broadcast_shapes(np.shape(t), np.shape(x))), 0.0)


def _sin_t_cos_x():
    # sup_t ||sin t cos x||_{L2(0,1)} = sqrt(1/2 + sin(2)/4)
    return Perturbation("sin_t_cos_x", lambda t, x: np.sin(t) * np.cos(x), float(np.sqrt(0.5 + np.sin(2.0) / 4)))


def _constant_eta(value):
    value = float(value)
    return Perturbation(
        "constant",
        lambda t, x: np.full(np.broadcast_shapes(np.shape(t), np.shape(x)), value),
        abs(value),
        (value,),
    )


PERTURBATIONS = {"zero": _zero_eta, "sin_t_cos_x": _sin_t_cos_x, "constant": _constant_eta}


def make_perturbation(name: str, params=()) -> Perturbation:
    try:
        factory = PERTURBATIONS[name]
    except KeyError:
        raise ConfigurationError(f"unknown perturbation {name!r}; choose from {sorted(PERTURBATIONS)}") from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters {list(params)} for perturbation {name!r}: {exc}") from None


def perturbation_bound(p: Perturbation, horizon: float, samples: int, g: SpatialGrid, chunk: int = 4096) -> float:
    """Largest sampled ``||eta(t, .)||`` over ``samples`` uniform times in [0, horizon].

    The disturbance is a function on the closed interval, so the spatial norm
    uses the full trapezoid rule including endpoint values.
    """
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    samples = max(int(samples), 2)
    x = g.x_closed
    w = np.full(x.size, g.h)
    w[0] = w[-1] = 0.5 * g.h
    times = np.linspace(0.0, horizon, samples)
    best = 0.0
    for start in range(0, samples, chunk):
        t = times[start : start + chunk, None]
        vals = p(t, x[None, :])
        if not np.all(np.isfinite(vals)):
            raise ModelError(f"perturbation {p.name!r} produced non-finite samples")
        sq = (vals * vals) @ w
        best = max(best, float(np.sqrt(sq.max())))
    return best


# -- nonlinearity ------------------------------------------------------------


@dataclass(frozen=True)
class Nonlinearity:
    """``f(y)`` as a field over the grid, so that the source term is ``f(y) * y``.

    ``coefficient(y, op, eps)`` returns that field; ``eps > 0`` clamps singular
    norms from below (used only by the regularized baseline).
    """

    name: str
    coefficient: Callable
    kappa: float = 0.0
    params: tuple = ()

    def __call__(self, y, op: InputOperator, eps: float = 0.0) -> np.ndarray:
        return self.coefficient(np.asarray(y, dtype=float), op, eps)

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def _zero_f():
    return Nonlinearity("zero", lambda y, op, eps: np.zeros_like(y), 0.0)


def _case2_f(mu=0.5, kappa=0.0):
    mu = float(mu)
    if not 0 < mu < 1:
        raise ConfigurationError(f"case2_f needs 0 < mu < 1, got {mu}")

    def coefficient(y, op, eps):
        r = op.norm(op.multiplier * y)
        if r == 0.0 and eps == 0.0:
            return np.zeros_like(y)
        r_eff = max(r, eps)
        return -(r_eff ** (-mu)) * op.a / (1.0 + r * r)

    return Nonlinearity("case2_f", coefficient, float(kappa), (mu, float(kappa)))


NONLINEARITIES = {"zero": _zero_f, "case2_f": _case2_f}


def make_nonlinearity(name: str, params=()) -> Nonlinearity:
    try:
        factory = NONLINEARITIES[name]
    except KeyError:
        raise ConfigurationError(f"unknown nonlinearity {name!r}; choose from {sorted(NONLINEARITIES)}") from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters {list(params)} for nonlinearity {name!r}: {exc}") from None


def one_sided_bound_violation(f: Nonlinearity, op: InputOperator, states) -> float:
    """Worst ``<f(y) y, y> - kappa ||y||^2`` over sample states (<= 0 when kappa is valid)."""
    worst = -np.inf
    for y in states:
        y = np.asarray(y, dtype=float)
        val = op.grid.h * np.dot(f(y, op) * y, y) - f.kappa * l2_norm(y, op.grid) ** 2
        worst = max(worst, float(val))
    return worst
