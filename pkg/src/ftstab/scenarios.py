"""Heat-equation scenarios, configuration files, batch sweeps and output files.

A configuration is a JSON document with optional sections::

    {
      "case": "case1_perturbed" | "case2_nonlinear" | "custom",
      "operators": {"a": ..., "eta": ..., "f": ..., "diffusion": "heat" | "none",
                    "beta": number | "analytic" | "grid", "inv_norm": ..., "M": number, "kappa": number},
      "initial":   {"y0": "sin_pi_x", "scale": 1.0, "coeffs": [..]},
      "law":       {"name": ..., "rho": .., "zeta": .., "mu": .., "nu_override": .., "lambda_override": ..},
      "grid":      {"n": 201, "modes": 100},
      "scheme":    {"name": "prox_splitting", "h": 1e-3, "t_max": 10.0, "eps_reg": 1e-6,
                    "settle_tol": 1e-9, "prox_tol": 1e-12, "prox_max_iter": 200, "stride": 100},
      "output":    {"dir": "out", "prefix": null}
    }

Function-valued entries (``a``, ``eta``, ``f``) are a built-in name or
``{"name": ..., "params": [...]}``. The case fills in every operator left
unspecified. See README.md for the full schema.
"""

import csv
import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .analysis import (
    InequalityReport,
    SettlingReport,
    arctan_estimate,
    check_differential_inequality,
    detect_settling,
    finite_time_bound,
    fixed_time_bound,
    inequality_parameters,
    nonlinear_fixed_time_bound,
)
from .errors import ConfigurationError, FtstabError, GainError, ModelError
from .feedback import FiniteTimeLaw, FixedTimeLaw, NonlinearFixedTimeLaw, validate_gain
from .integrator import ClosedLoop, SchemeConfig, Trajectory, run
from .operators import (
    DiffusionOperator,
    InputOperator,
    dissipativity_check,
    estimate_beta,
    make_coefficient,
    make_nonlinearity,
    make_perturbation,
    perturbation_bound,
)
from .spectral import SpatialGrid, from_spectral, l2_norm

__all__ = [
    "FunctionSpec",
    "ScenarioConfig",
    "Scenario",
    "RunOutput",
    "SweepRow",
    "INITIAL_CONDITIONS",
    "CASES",
    "LAWS",
    "OUT_DIR_ENV",
    "parse_config",
    "config_from_dict",
    "config_to_dict",
    "build_case1",
    "build_case2",
    "build_scenario",
    "validate_scenario",
    "run_scenario",
    "sweep_initial_conditions",
    "initial_state",
]

CASES = ("case1_perturbed", "case2_nonlinear", "custom")
LAWS = ("finite_time", "fixed_time", "nonlinear_fixed_time")
OUT_DIR_ENV = "FTSTAB_OUT_DIR"


def _unit_constant(x):
    return np.ones_like(x)


INITIAL_CONDITIONS = {
    "sin_pi_x": lambda x: np.sin(np.pi * x),
    "sin_2pi_x": lambda x: np.sin(2 * np.pi * x),
    "x_times_1mx": lambda x: x * (1 - x),
    "gauss_bump": lambda x: np.exp(-5 * (x - 0.5) ** 2),
    # normalized to unit L2 norm on the grid (scalar sign-ODE oracle)
    "unit_constant": _unit_constant,
}


# -- configuration dataclasses -----------------------------------------------


@dataclass
class FunctionSpec:
    name: str
    params: list = field(default_factory=list)


@dataclass
class OperatorsConfig:
    a: Optional[FunctionSpec] = None
    eta: Optional[FunctionSpec] = None
    f: Optional[FunctionSpec] = None
    diffusion: str = "heat"
    beta: Union[float, str] = "analytic"
    inv_norm: Union[float, str] = "analytic"
    M: Optional[float] = None
    kappa: Optional[float] = None


@dataclass
class InitialConfig:
    y0: str = "sin_pi_x"
    scale: float = 1.0
    coeffs: Optional[list] = None


@dataclass
class LawConfig:
    name: Optional[str] = None
    rho: Optional[float] = None
    zeta: Optional[float] = None
    mu: Optional[float] = None
    nu_override: Optional[float] = None
    lambda_override: Optional[float] = None


@dataclass
class GridConfig:
    n: int = 201
    modes: int = 100


@dataclass
class SchemeSection:
    name: str = "prox_splitting"
    h: float = 1e-3
    t_max: float = 10.0
    eps_reg: float = 1e-6
    settle_tol: float = 1e-9
    prox_tol: float = 1e-12
    prox_max_iter: int = 200
    stride: int = 100


@dataclass
class OutputConfig:
    dir: str = "out"
    prefix: Optional[str] = None


@dataclass
class ScenarioConfig:
    case: str = "custom"
    operators: OperatorsConfig = field(default_factory=OperatorsConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    law: LawConfig = field(default_factory=LawConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    scheme: SchemeSection = field(default_factory=SchemeSection)
    output: OutputConfig = field(default_factory=OutputConfig)

    def replace(self, **sections) -> "ScenarioConfig":
        """Copy with some section fields changed, e.g. ``replace(scheme={"h": 1e-4})``."""
        import typing

        new = {}
        for name, changes in sections.items():
            if name == "case":
                new["case"] = _coerce(changes, str, "case")
                continue
            section = getattr(self, name)
            hints = typing.get_type_hints(type(section))
            unknown = sorted(set(changes) - set(hints))
            if unknown:
                raise ConfigurationError(f"{name}: unknown key(s) {unknown}; valid keys are {list(hints)}")
            coerced = {k: _coerce(v, hints[k], f"{name}.{k}") for k, v in changes.items()}
            new[name] = dataclasses.replace(section, **coerced)
        return dataclasses.replace(self, **new)


# -- parsing -----------------------------------------------------------------


_TYPE_NAMES = {float: "a number", int: "an integer", str: "a string", list: "a list"}


def _type_name(tp):
    if tp in _TYPE_NAMES:
        return _TYPE_NAMES[tp]
    if tp is FunctionSpec:
        return "a built-in name or {name, params}"
    return getattr(tp, "__name__", str(tp))


def _coerce(value, tp, path):
    """Check ``value`` against a (simple) annotation, converting ints to floats."""
    origin = getattr(tp, "__origin__", None)
    if origin is Union:
        options = tp.__args__
        if value is None and type(None) in options:
            return None
        concrete = [o for o in options if o is not type(None)]
        if len(concrete) == 1:
            return _coerce(value, concrete[0], path)
        for opt in options:
            if opt is type(None):
                continue
            try:
                return _coerce(value, opt, path)
            except ConfigurationError:
                pass
        expected = " or ".join(_type_name(o) for o in options if o is not type(None))
        raise ConfigurationError(f"{path}: expected {expected}, got {type(value).__name__} {value!r}")
    if tp is FunctionSpec:
        if isinstance(value, FunctionSpec):
            return value
        if isinstance(value, str):
            return FunctionSpec(value)
        if isinstance(value, dict):
            return _build(FunctionSpec, value, path)
        raise ConfigurationError(f"{path}: expected a built-in name or {{name, params}}, got {value!r}")
    if dataclasses.is_dataclass(tp):
        if not isinstance(value, dict):
            raise ConfigurationError(f"{path}: expected an object, got {type(value).__name__}")
        return _build(tp, value, path)
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{path}: expected a number, got {type(value).__name__} {value!r}")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{path}: expected an integer, got {type(value).__name__} {value!r}")
        return value
    if tp is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"{path}: expected a string, got {type(value).__name__} {value!r}")
        return value
    if tp is list:
        if not isinstance(value, list):
            raise ConfigurationError(f"{path}: expected a list, got {type(value).__name__}")
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigurationError(f"{path}[{i}]: expected a number, got {item!r}")
        return [float(v) for v in value]
    raise TypeError(f"unsupported annotation {tp!r}")


def _build(cls, data, path):
    import typing

    hints = typing.get_type_hints(cls)
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = sorted(set(data) - set(names))
    if unknown:
        where = path or "top level"
        raise ConfigurationError(f"{where}: unknown key(s) {unknown}; valid keys are {names}")
    kwargs = {}
    for key, value in data.items():
        sub = f"{path}.{key}" if path else key
        kwargs[key] = _coerce(value, hints[key], sub)
    return cls(**kwargs)


def config_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object at the top level")
    cfg = _build(ScenarioConfig, data, "")
    if cfg.case not in CASES:
        raise ConfigurationError(f"case: unknown case {cfg.case!r}; choose from {list(CASES)}")
    return cfg


def parse_config(path) -> ScenarioConfig:
    """Read a JSON scenario file, applying defaults for everything omitted."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    cfg = config_from_dict(data)
    if cfg.output.prefix is None:
        cfg.output.prefix = path.stem
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return dataclasses.asdict(cfg)


# -- builders ----------------------------------------------------------------


def build_case1(y0_spec="sin_pi_x", rho=10.0, zeta=None, **sections) -> ScenarioConfig:
    """Perturbed heat equation with the finite-time law, or the fixed-time law if ``zeta`` is given.

    Raises :class:`GainError` when ``rho`` does not clear the rejection threshold.
    """
    law = {"name": "finite_time" if zeta is None else "fixed_time", "rho": float(rho)}
    if zeta is not None:
        law["zeta"] = float(zeta)
    cfg = ScenarioConfig(case="case1_perturbed", initial=InitialConfig(y0=y0_spec), law=LawConfig(**law))
    cfg = cfg.replace(**sections) if sections else cfg
    validate_scenario(cfg)
    return cfg


def build_case2(y0_spec="sin_pi_x", mu=0.5, **sections) -> ScenarioConfig:
    """Nonlinear heat equation with the non-singular fixed-time law (nu = kappa + omega/beta^2)."""
    if mu is None or not 0 < mu < 1:
        raise ConfigurationError(f"mu must lie in the open interval (0, 1), got {mu}")
    cfg = ScenarioConfig(
        case="case2_nonlinear",
        initial=InitialConfig(y0=y0_spec),
        law=LawConfig(name="nonlinear_fixed_time", mu=float(mu)),
    )
    cfg = cfg.replace(**sections) if sections else cfg
    build_scenario(cfg)
    return cfg


@dataclass
class Scenario:
    """Runtime objects resolved from a :class:`ScenarioConfig`."""

    config: ScenarioConfig
    grid: SpatialGrid
    loop: ClosedLoop
    y0: np.ndarray
    scheme: SchemeConfig
    beta: float
    inv_norm: float
    M: float
    omega: float
    kappa: float

    @property
    def settle_tol(self) -> float:
        return 0.0 if self.scheme.scheme == "prox_splitting" else self.config.scheme.settle_tol


def _case_defaults(cfg: ScenarioConfig):
    ops, law = cfg.operators, cfg.law
    if cfg.case == "case1_perturbed":
        a = ops.a or FunctionSpec("x2_plus_001")
        eta = ops.eta or FunctionSpec("sin_t_cos_x")
        f = ops.f or FunctionSpec("zero")
        name = law.name or ("fixed_time" if law.zeta is not None else "finite_time")
        if name not in ("finite_time", "fixed_time"):
            raise ConfigurationError(f"law.name: case1_perturbed uses a switching law, got {name!r}")
    elif cfg.case == "case2_nonlinear":
        a = ops.a or FunctionSpec("x2_plus_001")
        eta = ops.eta or FunctionSpec("zero")
        f = ops.f or FunctionSpec("case2_f", [law.mu] if law.mu is not None else [])
        name = law.name or "nonlinear_fixed_time"
        if name != "nonlinear_fixed_time":
            raise ConfigurationError(f"law.name: case2_nonlinear uses nonlinear_fixed_time, got {name!r}")
    else:
        a = ops.a or FunctionSpec("unit")
        eta = ops.eta or FunctionSpec("zero")
        f = ops.f or FunctionSpec("zero")
        name = law.name
        if name is None:
            raise ConfigurationError(f"law.name is required for custom scenarios; choose from {list(LAWS)}")
    if name not in LAWS:
        raise ConfigurationError(f"law.name: unknown law {name!r}; choose from {list(LAWS)}")
    return a, eta, f, name


def initial_state(cfg: ScenarioConfig, grid: SpatialGrid) -> np.ndarray:
    init = cfg.initial
    if init.coeffs is not None:
        if len(init.coeffs) == 0 or len(init.coeffs) > grid.n:
            raise ConfigurationError(f"initial.coeffs: need between 1 and {grid.n} coefficients")
        y0 = from_spectral(np.asarray(init.coeffs, dtype=float), grid)
    else:
        try:
            fn = INITIAL_CONDITIONS[init.y0]
        except KeyError:
            raise ConfigurationError(
                f"initial.y0: unknown initial condition {init.y0!r}; choose from {sorted(INITIAL_CONDITIONS)}"
            ) from None
        y0 = grid.sample(fn)
        if init.y0 == "unit_constant":
            y0 = y0 / l2_norm(y0, grid)
    if not np.isfinite(init.scale):
        raise ConfigurationError("initial.scale must be finite")
    return init.scale * y0


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    """Resolve named built-ins into operators, a feedback law and a closed loop."""
    a_spec, eta_spec, f_spec, law_name = _case_defaults(cfg)
    ops, law_cfg, sch = cfg.operators, cfg.law, cfg.scheme
    grid = SpatialGrid(cfg.grid.n)
    if not 1 <= cfg.grid.modes <= grid.n:
        raise ConfigurationError(f"grid.modes must lie in [1, {grid.n}], got {cfg.grid.modes}")
    if ops.diffusion == "heat":
        diffusion = DiffusionOperator.heat(cfg.grid.modes)
    elif ops.diffusion == "none":
        diffusion = DiffusionOperator.frozen(cfg.grid.modes)
    else:
        raise ConfigurationError(f"operators.diffusion: expected 'heat' or 'none', got {ops.diffusion!r}")
    for key in ("beta", "inv_norm"):
        val = getattr(ops, key)
        if isinstance(val, str) and val not in ("analytic", "grid"):
            raise ConfigurationError(f"operators.{key}: expected a number, 'analytic' or 'grid', got {val!r}")
    try:
        actuator = InputOperator.from_coefficient(make_coefficient(a_spec.name, a_spec.params), grid, ops.beta, ops.inv_norm)
    except ModelError as exc:
        raise ConfigurationError(f"operators.a: {exc}") from None
    eta = make_perturbation(eta_spec.name, eta_spec.params)
    f = make_nonlinearity(f_spec.name, f_spec.params)
    kappa = ops.kappa if ops.kappa is not None else f.kappa
    if kappa < 0:
        raise ConfigurationError(f"operators.kappa must be nonnegative, got {kappa}")
    M = ops.M if ops.M is not None else eta.bound
    if M < 0:
        raise ConfigurationError(f"operators.M must be nonnegative, got {M}")
    omega = diffusion.omega
    beta = actuator.beta

    if law_name in ("finite_time", "fixed_time"):
        if law_cfg.rho is None:
            raise ConfigurationError(f"law.rho is required for the {law_name} law")
        lam = law_cfg.lambda_override if law_cfg.lambda_override is not None else omega / beta**2
        if law_name == "finite_time":
            law = FiniteTimeLaw(law_cfg.rho, lam)
        else:
            if law_cfg.zeta is None:
                raise ConfigurationError("law.zeta is required for the fixed_time law")
            law = FixedTimeLaw(law_cfg.rho, law_cfg.zeta, lam)
    else:
        if law_cfg.mu is None:
            raise ConfigurationError("law.mu is required for the nonlinear_fixed_time law")
        if not 0 < law_cfg.mu < 1:
            raise ConfigurationError(f"law.mu must lie in (0, 1), got {law_cfg.mu}")
        nu = law_cfg.nu_override if law_cfg.nu_override is not None else kappa + omega / beta**2
        law = NonlinearFixedTimeLaw(law_cfg.mu, nu)

    scheme = SchemeConfig(
        h=sch.h,
        t_max=sch.t_max,
        scheme=sch.name,
        eps_reg=sch.eps_reg,
        prox_tol=sch.prox_tol,
        prox_max_iter=sch.prox_max_iter,
        stride=sch.stride,
    )
    if sch.settle_tol < 0:
        raise ConfigurationError("scheme.settle_tol must be nonnegative")
    loop = ClosedLoop(grid, diffusion, actuator, law, eta, f)
    y0 = initial_state(cfg, grid)
    return Scenario(cfg, grid, loop, y0, scheme, beta, actuator.inv_norm_bbstar, float(M), omega, float(kappa))


def validate_scenario(cfg_or_scenario) -> dict:
    """Assumption and gain checks; raises on a failed gain or an undersized ``M``."""
    sc = cfg_or_scenario if isinstance(cfg_or_scenario, Scenario) else build_scenario(cfg_or_scenario)
    loop, grid = sc.loop, sc.grid
    info = {
        "beta": sc.beta,
        "beta_grid": estimate_beta(loop.actuator, grid),
        "inv_norm_bbstar": sc.inv_norm,
        "omega": sc.omega,
        "kappa": sc.kappa,
        "M": sc.M,
        "law": loop.law.name,
        "norm_y0": l2_norm(sc.y0, grid),
        "dissipativity_y0": dissipativity_check(sc.y0, loop.diffusion, grid) if not loop.diffusion.is_frozen else 0.0,
    }
    if loop.perturbation is not None:
        samples = int(round(10 * sc.scheme.t_max / sc.scheme.h))
        M_hat = perturbation_bound(loop.perturbation, sc.scheme.t_max, samples, grid)
        info["M_sampled"] = M_hat
        if M_hat > sc.M * (1 + 1e-9):
            raise ConfigurationError(f"declared M = {sc.M:.6g} is below the sampled bound {M_hat:.6g}")
    elif sc.M > 0:
        info["M_sampled"] = 0.0
    if isinstance(loop.law, (FiniteTimeLaw, FixedTimeLaw)):
        gain = validate_gain(loop.law.rho, sc.M, sc.beta, sc.inv_norm)
        info["gain_threshold"] = gain.threshold
        info["gain_passed"] = gain.passed
        if not gain.passed:
            raise GainError(
                f"rho = {loop.law.rho:.6g} does not exceed the gain threshold "
                f"max(M/beta, M*sqrt(||(BB*)^-1||)) = {gain.threshold:.6g}",
                threshold=gain.threshold,
            )
    elif isinstance(loop.law, NonlinearFixedTimeLaw):
        info["nu"] = loop.law.nu
    return info


# -- running -----------------------------------------------------------------


def _bounds(sc: Scenario, norm_y0: float):
    law = sc.loop.law
    if isinstance(law, FixedTimeLaw):
        return [
            ("fixed_time", fixed_time_bound(law.rho, sc.beta, sc.M, law.zeta)),
            ("finite_time", finite_time_bound(norm_y0, law.rho, sc.beta, sc.M)),
        ]
    if isinstance(law, FiniteTimeLaw):
        return [("finite_time", finite_time_bound(norm_y0, law.rho, sc.beta, sc.M))]
    return [
        ("nonlinear_uniform", nonlinear_fixed_time_bound(sc.beta, law.mu)),
        ("nonlinear_arctan", arctan_estimate(norm_y0, sc.beta, law.mu)),
    ]


def uniform_bound(sc: Scenario) -> float:
    law = sc.loop.law
    if isinstance(law, FixedTimeLaw):
        return fixed_time_bound(law.rho, sc.beta, sc.M, law.zeta)
    if isinstance(law, NonlinearFixedTimeLaw):
        return nonlinear_fixed_time_bound(sc.beta, law.mu)
    raise ConfigurationError("the finite-time law has no settling bound uniform in y0")


@dataclass
class RunOutput:
    timeseries_path: Optional[Path]
    snapshot_path: Optional[Path]
    report_path: Optional[Path]
    report: dict
    trajectory: Trajectory
    settling: SettlingReport
    inequality: InequalityReport

    @property
    def exit_code(self) -> int:
        return 0 if self.settling.passed else 2


def _fmt(v) -> str:
    return format(float(v), ".12e")


def write_timeseries(path: Path, traj: Trajectory, t_settle):
    V = traj.lyapunov
    with open(path, "w", newline="") as fh:
        fh.write("t,norm_y,V,norm_u,settled\n")
        for k in range(len(traj)):
            settled = 1 if t_settle is not None and traj.times[k] >= t_settle else 0
            fh.write(f"{_fmt(traj.times[k])},{_fmt(traj.norms[k])},{_fmt(V[k])},{_fmt(traj.control_norms[k])},{settled}\n")


def write_snapshots(path: Path, traj: Trajectory, loop: ClosedLoop):
    x = loop.grid.x_closed
    with open(path, "w", newline="") as fh:
        fh.write("t,x,y,u\n")
        for t, y in zip(traj.snapshot_times, traj.snapshots):
            u = loop.control(y) if np.any(y) else np.zeros_like(y)
            yy = np.concatenate(([0.0], y, [0.0]))
            uu = np.concatenate(([0.0], u, [0.0]))
            for xi, yi, ui in zip(x, yy, uu):
                fh.write(f"{_fmt(t)},{_fmt(xi)},{_fmt(yi)},{_fmt(ui)}\n")


def _resolve_out_dir(cfg: ScenarioConfig, out_dir=None) -> Path:
    """``$FTSTAB_OUT_DIR`` beats an explicit ``out_dir``, which beats ``output.dir``."""
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env)
    if out_dir is not None:
        return Path(out_dir)
    return Path(cfg.output.dir)


def run_scenario(cfg: ScenarioConfig, out_dir=None, write=True) -> RunOutput:
    """Validate, integrate, analyse and (optionally) write the three output files."""
    sc = build_scenario(cfg)
    info = validate_scenario(sc)
    traj = run(sc.loop, sc.y0, sc.scheme)
    norm_y0 = float(traj.norms[0])
    t_settle = detect_settling(traj, sc.settle_tol)
    settling = SettlingReport(t_settle, _bounds(sc, norm_y0), sc.scheme.h)
    params = inequality_parameters(sc.loop.law, sc.beta, sc.M)
    ineq = check_differential_inequality(traj, tol=10 * sc.scheme.h, floor=sc.settle_tol**2, **params)
    report = {
        "scenario": config_to_dict(cfg),
        "constants": info,
        "settling": settling.as_dict(),
        "inequality": ineq.as_dict(),
        "final_norm": float(traj.norms[-1]),
        "steps": len(traj) - 1,
    }
    paths = [None, None, None]
    if write:
        directory = _resolve_out_dir(cfg, out_dir)
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigurationError(f"cannot create output directory {directory}: {exc}") from None
        prefix = cfg.output.prefix or cfg.case
        paths = [directory / f"{prefix}_timeseries.csv", directory / f"{prefix}_snapshots.csv", directory / f"{prefix}_report.json"]
        write_timeseries(paths[0], traj, t_settle)
        write_snapshots(paths[1], traj, sc.loop)
        paths[2].write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return RunOutput(*paths, report, traj, settling, ineq)


@dataclass
class SweepRow:
    y0: str
    scale: float
    norm_y0: float
    t_settle: Optional[float]
    uniform_bound: float
    arctan_estimate: Optional[float]
    passed: bool
    error: str = ""

    def as_csv(self):
        def opt(v):
            return "" if v is None else _fmt(v)

        return [
            self.y0,
            _fmt(self.scale),
            _fmt(self.norm_y0),
            opt(self.t_settle),
            _fmt(self.uniform_bound),
            opt(self.arctan_estimate),
            int(self.passed),
            self.error,
        ]


SWEEP_COLUMNS = ["y0", "scale", "norm_y0", "t_settle", "uniform_bound", "arctan_estimate", "passed", "error"]


def _sweep_member(args):
    cfg, y0_name, scale, out_dir, write = args
    base = cfg.output.prefix or cfg.case
    tag = f"{base}_{y0_name}_x{scale:g}"
    member = cfg.replace(initial={"y0": y0_name, "scale": float(scale), "coeffs": None}, output={"prefix": tag})
    sc = build_scenario(member)
    ub = uniform_bound(sc)
    norm_y0 = l2_norm(sc.y0, sc.grid)
    est = None
    if isinstance(sc.loop.law, NonlinearFixedTimeLaw):
        est = arctan_estimate(norm_y0, sc.beta, sc.loop.law.mu)
    try:
        out = run_scenario(member, out_dir=out_dir, write=write)
    except FtstabError as exc:
        return SweepRow(y0_name, float(scale), norm_y0, None, ub, est, False, f"{type(exc).__name__}: {exc}")
    slack = 2 * sc.scheme.h
    ts = out.settling.t_settle
    passed = ts is not None and ts <= ub + slack and (est is None or ts <= est + slack)
    return SweepRow(y0_name, float(scale), norm_y0, ts, ub, est, bool(passed))


def sweep_initial_conditions(cfg: ScenarioConfig, y0_list, scales=(1.0,), jobs=1, out_dir=None, write=True):
    """One run per ``(y0, scale)``; returns the rows and the path of the comparison table.

    A member run that raises is recorded as a failed row rather than aborting the sweep.
    """
    sc = build_scenario(cfg)
    uniform_bound(sc)  # finite-time law -> ConfigurationError
    tasks = [(cfg, name, float(s), out_dir, write) for name in y0_list for s in scales]
    for _, name, *_ in tasks:
        if name not in INITIAL_CONDITIONS:
            raise ConfigurationError(f"unknown initial condition {name!r}; choose from {sorted(INITIAL_CONDITIONS)}")
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_member, tasks))
    else:
        rows = [_sweep_member(t) for t in tasks]
    table_path = None
    if write:
        directory = _resolve_out_dir(cfg, out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        table_path = directory / f"{cfg.output.prefix or cfg.case}_sweep.csv"
        with open(table_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SWEEP_COLUMNS)
            for row in rows:
                writer.writerow(row.as_csv())
    return rows, table_path
