import numpy as np
import pytest

from cryomux.errors import DegenerateData, NoConvergence
from cryomux.fitting import (
    fit_electron_temperature,
    levenberg_marquardt,
    sech2_model,
)

ALPHA = 0.5
T_E = 0.360
V0 = 0.450


def lineshape(vg, amplitude=1.0, offset=0.0, t_e=T_E, v0=V0):
    return sech2_model(vg, amplitude, v0, t_e, offset, ALPHA)


class TestLevenbergMarquardt:
    def test_quadratic_bowl(self):
        target = np.array([2.0, -3.0])

        def residual(x):
            return x - target

        x, n_iter, converged = levenberg_marquardt(residual, np.zeros(2))
        assert converged
        assert np.allclose(x, target, atol=1e-8)

    def test_nonlinear_exponential(self):
        t = np.linspace(0, 1, 50)
        y = 3.0 * np.exp(-2.0 * t)

        def residual(x):
            return x[0] * np.exp(-x[1] * t) - y

        x, _, converged = levenberg_marquardt(residual, np.array([1.0, 1.0]))
        assert converged
        assert np.allclose(x, [3.0, 2.0], rtol=1e-6)

    def test_no_convergence_raises(self):
        def residual(x):
            return np.array([np.nan, np.nan])

        with pytest.raises(NoConvergence):
            levenberg_marquardt(residual, np.array([1.0]))


class TestFitElectronTemperature:
    def test_noiseless_round_trip(self):
        vg = np.linspace(V0 - 1.5e-3, V0 + 1.5e-3, 401)
        y = lineshape(vg, amplitude=2.5e-4, offset=1e-5)
        result = fit_electron_temperature(vg, y, ALPHA)
        assert result["converged"]
        assert result["t_e"] == pytest.approx(T_E, rel=1e-6)
        assert result["v0"] == pytest.approx(V0, abs=1e-9)
        assert result["amplitude"] == pytest.approx(2.5e-4, rel=1e-6)
        assert result["offset"] == pytest.approx(1e-5, rel=1e-3)

    def test_noisy_recovery_within_5_percent(self):
        rng = np.random.default_rng(1234)
        vg = np.linspace(V0 - 1.5e-3, V0 + 1.5e-3, 500)
        clean = lineshape(vg, amplitude=1.0)
        y = clean + 0.05 * rng.standard_normal(vg.size)
        result = fit_electron_temperature(vg, y, ALPHA)
        assert result["t_e"] == pytest.approx(T_E, rel=0.05)
        assert result["v0"] == pytest.approx(V0, abs=5e-5)

    def test_inverted_dip_lineshape(self):
        vg = np.linspace(V0 - 1.5e-3, V0 + 1.5e-3, 401)
        y = lineshape(vg, amplitude=-0.8, offset=0.9)
        result = fit_electron_temperature(vg, y, ALPHA)
        assert result["t_e"] == pytest.approx(T_E, rel=1e-5)
        assert result["amplitude"] == pytest.approx(-0.8, rel=1e-5)

    def test_offset_peak_position(self):
        vg = np.linspace(0.440, 0.460, 801)
        y = lineshape(vg, v0=0.4532)
        result = fit_electron_temperature(vg, y, ALPHA)
        assert result["v0"] == pytest.approx(0.4532, abs=1e-8)

    def test_constant_signal_degenerate(self):
        vg = np.linspace(0.44, 0.46, 100)
        with pytest.raises(DegenerateData):
            fit_electron_temperature(vg, np.full(100, 0.7), ALPHA)

    def test_too_few_samples_degenerate(self):
        vg = np.linspace(0.44, 0.46, 5)
        with pytest.raises(DegenerateData):
            fit_electron_temperature(vg, lineshape(vg), ALPHA)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            fit_electron_temperature(np.zeros(20), np.zeros(19), ALPHA)

    def test_deterministic_repeat(self):
        rng = np.random.default_rng(7)
        vg = np.linspace(V0 - 1e-3, V0 + 1e-3, 300)
        y = lineshape(vg) + 0.01 * rng.standard_normal(vg.size)
        a = fit_electron_temperature(vg, y, ALPHA)
        b = fit_electron_temperature(vg, y, ALPHA)
        assert a == b
