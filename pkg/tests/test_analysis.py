import numpy as np
import pytest

from ftstab.analysis import (
    SettlingReport,
    arctan_estimate,
    check_differential_inequality,
    detect_settling,
    finite_time_bound,
    fixed_time_bound,
    inequality_parameters,
    lyapunov_series,
    nonlinear_fixed_time_bound,
)
from ftstab.errors import GainError
from ftstab.feedback import FiniteTimeLaw, FixedTimeLaw, NonlinearFixedTimeLaw
from ftstab.integrator import Trajectory

M = 0.8528331353239158


def traj_from(norms, h=0.1):
    norms = np.asarray(norms, dtype=float)
    times = np.arange(norms.size) * h
    return Trajectory(times, norms, np.zeros_like(norms), times[:1], np.zeros((1, 3)), h)


class TestSeries:
    def test_lyapunov(self):
        assert np.array_equal(lyapunov_series(traj_from([0.5, 0.0])), [0.25, 0.0])
        assert not np.any(lyapunov_series(traj_from(np.zeros(4))))

    def test_settling(self):
        assert detect_settling(traj_from([0, 0, 0])) == 0.0
        assert detect_settling(traj_from([1, 0.5, 0, 0])) == pytest.approx(0.2)
        # a return to nonzero resets the settling time
        assert detect_settling(traj_from([1, 0, 0.1, 0, 0])) == pytest.approx(0.3)
        assert detect_settling(traj_from([1, 0.5, 0.1])) is None
        assert detect_settling(traj_from([1, 1e-10, 1e-12]), tol=1e-9) == pytest.approx(0.1)

    def test_negative_tol(self):
        with pytest.raises(ValueError):
            detect_settling(traj_from([0]), -1.0)


class TestBounds:
    def test_finite_time(self):
        assert finite_time_bound(0.0, 10, 0.1, M) == 0.0
        assert finite_time_bound(np.sqrt(0.5), 10, 0.1, M) == pytest.approx(4.8048, abs=1e-4)
        assert finite_time_bound(0.3, 1.0, 1.0, 0.0) == pytest.approx(0.3)

    def test_fixed_time(self):
        assert fixed_time_bound(2.0, 1.0, 0.85284, 1.0) == pytest.approx(1.8717, abs=1e-4)
        assert fixed_time_bound(1.0, 1.0, 0.0, 1.0) == pytest.approx(2.0)

    def test_gain_error(self):
        with pytest.raises(GainError):
            finite_time_bound(1.0, 1.0, 0.1, M)
        with pytest.raises(GainError):
            fixed_time_bound(1.0, 1.0, 1.0, 1.0)

    def test_nonlinear(self):
        assert nonlinear_fixed_time_bound(1.0, 0.5) == pytest.approx(np.pi)
        assert nonlinear_fixed_time_bound(0.1, 0.5) == pytest.approx(314.159, abs=1e-3)
        with pytest.raises(ValueError):
            nonlinear_fixed_time_bound(1.0, 1.0)

    def test_arctan(self):
        assert arctan_estimate(0.0, 1.0, 0.5) == 0.0
        assert arctan_estimate(np.sqrt(0.5), 1.0, 0.5) == pytest.approx(2 * np.arctan(0.5**0.25), rel=1e-14)
        assert arctan_estimate(1e12, 1.0, 0.5) < nonlinear_fixed_time_bound(1.0, 0.5)
        assert arctan_estimate(1e30, 1.0, 0.5) == pytest.approx(np.pi, rel=1e-6)


class TestSettlingReport:
    def test_pass_with_slack(self):
        rep = SettlingReport(1.001, [("b", 1.0)], h=1e-3)
        assert rep.passed
        assert not SettlingReport(1.01, [("b", 1.0)], h=1e-3).passed

    def test_not_settled(self):
        rep = SettlingReport(None, [("b", 1.0)], h=1e-3)
        assert not rep.settled and not rep.passed
        assert rep.as_dict()["margins"] == {"b": None}


class TestInequality:
    def test_exact_finite_time_profile(self):
        # V = (1 - t)^2 satisfies dV/dt = -2 sqrt(V) with equality
        h = 1e-3
        t = np.arange(0, 1.2, h)
        r = np.maximum(1 - t, 0)
        rep = check_differential_inequality(traj_from(r, h), c=2.0, theta=0.5)
        # O(h) from the one-sided difference at t = 0; central differences are exact here
        assert rep.passed and abs(rep.worst_violation) <= 2 * h

    def test_detects_slow_decay(self):
        h = 1e-3
        t = np.arange(0, 1, h)
        rep = check_differential_inequality(traj_from(np.exp(-t), h), c=5.0, theta=0.5)
        assert not rep.passed and rep.violation_times

    def test_final_drop_to_zero_ignored(self):
        rep = check_differential_inequality(traj_from([1.0, 0.999, 0.0, 0.0], 0.1), c=0.0, theta=0.5)
        assert rep.samples_checked == 1

    def test_parameters(self):
        p = inequality_parameters(FiniteTimeLaw(10.0), 0.1, M)
        assert p == {"c": pytest.approx(2 * (1 - M)), "theta": 0.5}
        p = inequality_parameters(FixedTimeLaw(2.0, 1.0), 1.0, M)
        assert p["c2"] == 2.0 and p["alpha"] == 1.5
        p = inequality_parameters(NonlinearFixedTimeLaw(0.5), 1.0, 0.0)
        assert p == {"c": 2.0, "theta": 0.75, "c2": 2.0, "alpha": 1.25}
        # failing gain: no certified rate
        assert inequality_parameters(FiniteTimeLaw(1.0), 0.1, M)["c"] == 0.0
