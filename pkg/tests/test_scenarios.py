import csv
import json

import numpy as np
import pytest

from ftstab.errors import ConfigurationError, GainError
from ftstab.feedback import FiniteTimeLaw, FixedTimeLaw, NonlinearFixedTimeLaw
from ftstab.scenarios import (
    OUT_DIR_ENV,
    build_case1,
    build_case2,
    build_scenario,
    config_from_dict,
    parse_config,
    run_scenario,
    sweep_initial_conditions,
    validate_scenario,
)
from ftstab.spectral import l2_norm

FAST = {"grid": {"n": 31, "modes": 31}}


def write(tmp_path, text, name="cfg.json"):
    p = tmp_path / name
    p.write_text(text)
    return p


def fast(cfg, **scheme):
    return cfg.replace(grid={"n": 31, "modes": 31}, scheme=scheme) if scheme else cfg.replace(grid={"n": 31, "modes": 31})


class TestParse:
    def test_minimal_case2_defaults(self, tmp_path):
        cfg = parse_config(write(tmp_path, '{"case": "case2_nonlinear", "law": {"mu": 0.5}}'))
        assert cfg.grid.n == 201 and cfg.grid.modes == 100
        assert cfg.scheme.h == 1e-3 and cfg.scheme.t_max == 10.0
        assert cfg.output.prefix == "cfg"

    def test_unknown_key_lists_valid(self, tmp_path):
        with pytest.raises(ConfigurationError, match=r"scheme: unknown key\(s\) \['hh'\].*'h'"):
            parse_config(write(tmp_path, '{"scheme": {"hh": 1}}'))
        with pytest.raises(ConfigurationError, match="top level.*valid keys"):
            parse_config(write(tmp_path, '{"cases": "custom"}'))

    def test_type_mismatch_has_path(self, tmp_path):
        with pytest.raises(ConfigurationError, match=r"law\.rho: expected a number"):
            parse_config(write(tmp_path, '{"law": {"rho": "ten"}}'))
        with pytest.raises(ConfigurationError, match=r"grid\.n: expected an integer"):
            parse_config(write(tmp_path, '{"grid": {"n": 20.5}}'))
        with pytest.raises(ConfigurationError, match=r"initial\.coeffs\[1\]"):
            parse_config(write(tmp_path, '{"initial": {"coeffs": [1, "x"]}}'))

    def test_malformed_reports_line(self, tmp_path):
        with pytest.raises(ConfigurationError, match="line 3"):
            parse_config(write(tmp_path, '{\n  "case": "custom",\n  "law": {,}\n}'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="cannot read"):
            parse_config(tmp_path / "nope.json")

    def test_unknown_case(self):
        with pytest.raises(ConfigurationError, match="unknown case"):
            config_from_dict({"case": "case3"})

    def test_function_spec_forms(self):
        cfg = config_from_dict({"operators": {"a": "unit", "eta": {"name": "constant", "params": [0.5]}}})
        assert cfg.operators.a.name == "unit" and cfg.operators.eta.params == [0.5]

    def test_rho_below_threshold_parses_then_rejects(self, tmp_path):
        cfg = parse_config(write(tmp_path, '{"case": "case1_perturbed", "law": {"rho": 5.0}}'))
        with pytest.raises(GainError) as info:
            validate_scenario(fast(cfg, t_max=0.1))
        assert info.value.threshold == pytest.approx(8.5283, abs=1e-4)


class TestBuilders:
    def test_case1_finite(self):
        cfg = build_case1("sin_pi_x", 10.0, **FAST)
        sc = build_scenario(cfg)
        assert isinstance(sc.loop.law, FiniteTimeLaw) and sc.beta == pytest.approx(0.1)
        info = validate_scenario(sc)
        assert info["gain_passed"] and info["gain_threshold"] == pytest.approx(8.5283, abs=1e-4)
        assert info["M_sampled"] <= info["M"]

    def test_case1_rejects_rho5(self):
        with pytest.raises(GainError, match="8.528"):
            build_case1("sin_pi_x", 5.0, **FAST)

    def test_case1_fixed(self):
        sc = build_scenario(build_case1("sin_pi_x", 10.0, zeta=1.0, **FAST))
        assert isinstance(sc.loop.law, FixedTimeLaw) and sc.loop.law.zeta == 1.0

    def test_case2(self):
        sc = build_scenario(build_case2("gauss_bump", 0.5, **FAST))
        assert isinstance(sc.loop.law, NonlinearFixedTimeLaw) and sc.loop.law.nu == 0.0
        assert sc.loop.nonlinearity.name == "case2_f" and sc.loop.perturbation is None
        assert sc.y0 == pytest.approx(np.exp(-5 * (sc.grid.x - 0.5) ** 2))

    @pytest.mark.parametrize("mu", [0.0, 1.0, -0.5, None])
    def test_case2_mu_range(self, mu):
        with pytest.raises(ConfigurationError):
            build_case2("sin_pi_x", mu)

    def test_declared_M_too_small(self):
        cfg = config_from_dict({"case": "case1_perturbed", "operators": {"M": 0.5}, "law": {"rho": 10.0}, **FAST})
        with pytest.raises(ConfigurationError, match="below the sampled bound"):
            validate_scenario(cfg)

    def test_custom_needs_law(self):
        with pytest.raises(ConfigurationError, match="law.name is required"):
            build_scenario(config_from_dict({}))

    def test_initial_coeffs(self):
        cfg = config_from_dict({"law": {"name": "finite_time", "rho": 1.0}, "initial": {"coeffs": [0, 2.0]}, **FAST})
        sc = build_scenario(cfg)
        assert l2_norm(sc.y0, sc.grid) == pytest.approx(2.0)

    def test_unknown_initial(self):
        cfg = config_from_dict({"law": {"name": "finite_time", "rho": 1.0}, "initial": {"y0": "tent"}})
        with pytest.raises(ConfigurationError, match="choose from"):
            build_scenario(cfg)

    def test_replace_coerces_and_checks(self):
        cfg = config_from_dict({"law": {"name": "finite_time", "rho": 1}})
        assert cfg.replace(scheme={"h": 1}).scheme.h == 1.0
        with pytest.raises(ConfigurationError, match="unknown key"):
            cfg.replace(scheme={"dt": 1e-3})


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestRun:
    def test_zero_initial_state(self, tmp_path):
        cfg = config_from_dict(
            {"law": {"name": "finite_time", "rho": 1.0}, "initial": {"scale": 0.0}, "scheme": {"t_max": 0.05}, **FAST}
        )
        out = run_scenario(cfg, out_dir=tmp_path)
        assert out.settling.t_settle == 0.0 and out.exit_code == 0
        rows = read_csv(out.timeseries_path)
        assert rows[0] == ["t", "norm_y", "V", "norm_u", "settled"]
        assert all(float(r[1]) == 0 and float(r[3]) == 0 and r[4] == "1" for r in rows[1:])

    def test_case1_outputs(self, tmp_path):
        cfg = build_case1("sin_pi_x", 10.0, grid={"n": 31, "modes": 31}, scheme={"t_max": 0.3, "stride": 50})
        out = run_scenario(cfg, out_dir=tmp_path)
        assert out.exit_code == 0 and out.settling.t_settle <= 4.8052
        ts = read_csv(out.timeseries_path)
        assert all(len(r) == 5 for r in ts)
        body = np.array([[float(v) for v in r] for r in ts[1:]])
        assert np.all(np.isfinite(body)) and np.all(np.diff(body[:, 0]) > 0)
        snaps = read_csv(out.snapshot_path)
        assert snaps[0] == ["t", "x", "y", "u"]
        # 7 snapshot times (0, 0.05, ..., 0.3) over 33 closed-grid nodes
        assert len(snaps) - 1 == 7 * 33
        report = json.loads(out.report_path.read_text())
        assert report["settling"]["bounds"]["finite_time"] == pytest.approx(4.8048, abs=1e-3)
        assert report["inequality"]["passed"]

    def test_case2_report_has_both_bounds(self, tmp_path):
        cfg = build_case2("sin_pi_x", 0.5, grid={"n": 31, "modes": 31}, scheme={"t_max": 1.0})
        out = run_scenario(cfg, out_dir=tmp_path)
        bounds = out.report["settling"]["bounds"]
        assert set(bounds) == {"nonlinear_uniform", "nonlinear_arctan"}
        assert out.settling.settled and out.exit_code == 0

    def test_not_settled_exit_code(self, tmp_path):
        cfg = build_case2("sin_pi_x", 0.5, grid={"n": 31, "modes": 31}, scheme={"t_max": 0.01})
        assert run_scenario(cfg, out_dir=tmp_path).exit_code == 2

    def test_deterministic(self, tmp_path):
        cfg = build_case1("sin_pi_x", 10.0, grid={"n": 31, "modes": 31}, scheme={"t_max": 0.2})
        a = run_scenario(cfg, out_dir=tmp_path / "a")
        b = run_scenario(cfg, out_dir=tmp_path / "b")
        assert a.timeseries_path.read_bytes() == b.timeseries_path.read_bytes()
        assert a.snapshot_path.read_bytes() == b.snapshot_path.read_bytes()

    def test_env_overrides_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env"))
        cfg = config_from_dict({"law": {"name": "finite_time", "rho": 1.0}, "scheme": {"t_max": 0.01}, **FAST})
        out = run_scenario(cfg, out_dir=tmp_path / "flag")
        assert out.report_path.parent == tmp_path / "env"

    def test_explicit_regularized_uses_settle_tol(self, tmp_path):
        cfg = build_case1("sin_pi_x", 10.0, grid={"n": 31, "modes": 31}, scheme={"t_max": 0.3, "h": 1e-4})
        cfg = cfg.replace(scheme={"name": "explicit_regularized", "settle_tol": 1e-2})
        out = run_scenario(cfg, write=False)
        assert out.settling.settled and out.trajectory.norms[-1] > 0


class TestSweep:
    def test_empty(self, tmp_path):
        cfg = build_case2("sin_pi_x", 0.5, **FAST)
        rows, path = sweep_initial_conditions(cfg, [], out_dir=tmp_path)
        assert rows == [] and len(read_csv(path)) == 1

    def test_requires_uniform_bound(self):
        with pytest.raises(ConfigurationError):
            sweep_initial_conditions(build_case1("sin_pi_x", 10.0, **FAST), ["sin_pi_x"], write=False)

    def test_scaled_rows_consistent_with_reruns(self, tmp_path):
        cfg = build_case2("sin_pi_x", 0.5, operators={"a": "unit"}, grid={"n": 31, "modes": 31}, scheme={"t_max": 1.5})
        rows, path = sweep_initial_conditions(cfg, ["sin_pi_x", "gauss_bump"], [1, 10, 100], jobs=2, out_dir=tmp_path)
        assert len(rows) == 6 and all(r.passed for r in rows)
        norms = [r.norm_y0 for r in rows[:3]]
        assert norms[2] / norms[0] == pytest.approx(100.0)
        assert max(r.t_settle for r in rows) <= np.pi
        single = run_scenario(cfg.replace(initial={"y0": "gauss_bump", "scale": 10.0}), write=False)
        assert single.settling.t_settle == rows[4].t_settle
        table = read_csv(path)
        assert table[0][:7] == ["y0", "scale", "norm_y0", "t_settle", "uniform_bound", "arctan_estimate", "passed"]
        assert (tmp_path / "case2_nonlinear_gauss_bump_x10_timeseries.csv").exists()

    def test_failing_member_flagged(self):
        cfg = build_case2("sin_pi_x", 0.5, grid={"n": 31, "modes": 31}, scheme={"t_max": 0.05, "prox_max_iter": 1})
        rows, _ = sweep_initial_conditions(cfg, ["sin_pi_x"], write=False)
        assert not rows[0].passed and "ProxConvergenceError" in rows[0].error
