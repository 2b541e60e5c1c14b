"""Closed-form checks that exercise the solver end to end.

The scalar oracle freezes diffusion and takes ``m = 1``, so the closed loop
reduces to ``dr/dt = -rho`` for ``r = ||y||``, which settles at ``||y0||/rho``.
The prox oracles compare one-dimensional resolvents with roots of the
polynomials their optimality conditions reduce to.
"""

from dataclasses import dataclass

import numpy as np

from .analysis import detect_settling
from .prox import prox_phi, prox_power_functional, prox_weighted_norm
from .integrator import run
from .scenarios import build_scenario, config_from_dict

__all__ = ["OracleResult", "scalar_settling", "run_oracles", "format_result"]


@dataclass
class OracleResult:
    name: str
    passed: bool
    detail: str


def _real_positive_root(coeffs):
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-12].real
    return float(real[real > 0].min())


def scalar_settling(h: float, rho: float = 2.0, n: int = 5) -> float:
    """Measured settling time of the degenerate loop with ``||y0|| = 1``."""
    cfg = config_from_dict(
        {
            "case": "custom",
            "operators": {"diffusion": "none", "a": "unit"},
            "initial": {"y0": "unit_constant"},
            "law": {"name": "finite_time", "rho": rho},
            "grid": {"n": n, "modes": n},
            "scheme": {"h": h, "t_max": 1.5 / rho, "stride": 10**9},
        }
    )
    sc = build_scenario(cfg)
    traj = run(sc.loop, sc.y0, sc.scheme)
    t = detect_settling(traj, 0.0)
    if t is None:
        raise AssertionError(f"scalar loop did not settle for h={h}")
    return t


def run_oracles(h_values=(1e-3, 1e-4)) -> list:
    results = []
    rho = 2.0
    for h in h_values:
        errs = []
        for step in (h, h / 2):
            errs.append(abs(scalar_settling(step, rho) - 1.0 / rho))
        ok = errs[0] <= 2 * h
        if errs[0] == 0.0:
            ratio = 0.5 if errs[1] == 0.0 else np.inf
        else:
            ratio = errs[1] / errs[0]
        ok = ok and 0.4 <= ratio <= 0.6
        results.append(
            OracleResult(f"scalar settling h={h:g}", ok, f"|T-0.5| = {errs[0]:.3e} (<= {2 * h:.1e}), halving ratio {ratio:.3f}")
        )

    y = prox_weighted_norm(np.array([2.0]), 0.5, 1.0)
    results.append(OracleResult("soft threshold", abs(y[0] - 1.5) < 1e-12, f"prox(2; 0.5) = {y[0]:.15g}"))
    y = prox_weighted_norm(np.array([0.3]), 0.5, 1.0)
    results.append(OracleResult("dead zone", y[0] == 0.0, f"prox(0.3; 0.5) = {y[0]:.3g}"))

    # s^3 + s - 1 = 0
    s_ref = _real_positive_root([1.0, 0.0, 1.0, -1.0])
    y = prox_power_functional(np.array([1.0]), 1.0, 1.0, 2.0)
    s = abs(y[0])
    results.append(OracleResult("power prox", abs(s - s_ref) < 1e-10, f"s = {s:.12f}, root {s_ref:.12f}"))

    # s + s^0.5 + s^1.5 = 1; with u = sqrt(s): u^3 + u^2 + u - 1 = 0
    s_ref = _real_positive_root([1.0, 1.0, 1.0, -1.0]) ** 2
    y = prox_phi(np.array([1.0]), 1.0, 1.0, 0.5, 0.0)
    s = abs(y[0])
    results.append(OracleResult("phi prox", abs(s - s_ref) < 1e-10, f"s = {s:.12f}, root {s_ref:.12f}"))
    return results


def format_result(r: OracleResult) -> str:
    return f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}"
