import numpy as np
import pytest

from ftstab.errors import ConfigurationError
from ftstab.feedback import (
    FiniteTimeLaw,
    FixedTimeLaw,
    NonlinearFixedTimeLaw,
    eval_control,
    eval_finite_time_control,
    eval_fixed_time_control,
    eval_nonlinear_control,
    gain_threshold,
    validate_gain,
)
from ftstab.operators import InputOperator, make_coefficient
from ftstab.spectral import l2_norm

M = 0.8528331353239158


@pytest.fixture(scope="module")
def unit_op(grid):
    return InputOperator.from_coefficient(make_coefficient("unit"), grid)


@pytest.fixture(scope="module")
def case1_op(grid):
    return InputOperator.from_coefficient(make_coefficient("x2_plus_001"), grid)


class TestGain:
    def test_case1_threshold(self):
        threshold, terms = gain_threshold(M, 0.1, 100.0)
        assert threshold == pytest.approx(8.5283, abs=1e-4)
        assert terms[0] == pytest.approx(terms[1])

    def test_accept_and_reject(self):
        assert validate_gain(10.0, M, 0.1, 100.0)
        report = validate_gain(5.0, M, 0.1, 100.0)
        assert not report and report.threshold == pytest.approx(8.5283, abs=1e-4)

    def test_strict_inequality(self):
        assert not validate_gain(1.0, 1.0, 1.0, 1.0)

    def test_no_perturbation(self):
        assert validate_gain(1e-9, 0.0, 0.5, 4.0)

    def test_bad_beta(self):
        with pytest.raises(ValueError):
            gain_threshold(1.0, 0.0, 1.0)


class TestLaws:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            FiniteTimeLaw(0.0)
        with pytest.raises(ConfigurationError):
            FixedTimeLaw(1.0, 0.0)
        with pytest.raises(ConfigurationError):
            NonlinearFixedTimeLaw(1.0)
        with pytest.raises(ConfigurationError):
            NonlinearFixedTimeLaw(0.5, -1.0)

    def test_from_operators(self):
        assert FiniteTimeLaw.from_operators(2.0, omega=0.0, beta=0.1).lambda_lin == 0.0
        assert FixedTimeLaw.from_operators(2.0, 1.0, omega=1.0, beta=0.5).lambda_lin == pytest.approx(4.0)
        assert NonlinearFixedTimeLaw.from_operators(0.5, kappa=0.3, omega=1.0, beta=1.0).nu == pytest.approx(1.3)


class TestControls:
    def test_zero_state_selects_zero(self, unit_op, grid):
        y = grid.zeros()
        for law in (FiniteTimeLaw(2.0), FixedTimeLaw(2.0, 1.0), NonlinearFixedTimeLaw(0.5)):
            assert not np.any(eval_control(y, law, unit_op))

    def test_finite_time_unit_magnitude(self, case1_op, grid, rng):
        y = rng.normal(size=grid.n)
        u = eval_finite_time_control(y, FiniteTimeLaw(3.0), case1_op)
        assert l2_norm(u, grid) == pytest.approx(3.0)

    def test_fixed_time_extra_term(self, unit_op, grid):
        y = 2 * grid.basis(1)[:, 0]
        u = eval_fixed_time_control(y, FixedTimeLaw(1.0, 1.0), unit_op)
        # -(||y||^1 + 1/||y||) y = -(2 + 0.5) y
        assert np.allclose(u, -2.5 * y)

    def test_nonlinear_first_mode(self, unit_op, grid):
        y = grid.basis(1)[:, 0]
        u = eval_nonlinear_control(y, NonlinearFixedTimeLaw(0.5, 0.25), unit_op)
        assert np.allclose(u, -(1 + 1 + 0.25) * y)

    def test_nonlinear_tends_to_zero(self, unit_op, grid):
        phi = grid.basis(1)[:, 0]
        law = NonlinearFixedTimeLaw(0.5)
        mags = [l2_norm(eval_nonlinear_control(10.0**-k * phi, law, unit_op), grid) for k in range(1, 12)]
        assert all(b < a for a, b in zip(mags, mags[1:]))
        # ||u|| ~ ||y||^(1 - mu) near the origin
        assert mags[-1] == pytest.approx(10.0**-5.5, rel=1e-3)

    def test_regularized_switching(self, unit_op, grid):
        y = 1e-9 * grid.basis(1)[:, 0]
        u = eval_finite_time_control(y, FiniteTimeLaw(1.0), unit_op, eps=1e-6)
        assert l2_norm(u, grid) == pytest.approx(1e-3)

    def test_dispatch_prefers_fixed_time(self, unit_op, grid):
        y = grid.basis(1)[:, 0]
        assert np.allclose(eval_control(y, FixedTimeLaw(1.0, 1.0), unit_op), -2.0 * y)

    def test_unknown_law(self, unit_op, grid):
        with pytest.raises(TypeError):
            eval_control(grid.zeros(), object(), unit_op)
