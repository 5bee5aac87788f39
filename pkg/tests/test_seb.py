import numpy as np
import pytest
from scipy.constants import e as Q_E
from scipy.constants import k as K_B

from cryomux.components import MatchNetSpec, synthesize_match
from cryomux.rfcore import FrequencyGrid, check_passivity, check_reciprocity
from cryomux.seb import (
    SebParams,
    lineshape_fwhm,
    seb_admittance,
    seb_baseline_admittance,
    seb_transmission,
    seb_two_port,
    tunneling_capacitance,
)

P = SebParams()


def reference_matchnet():
    y = seb_baseline_admittance(559e6, P, device_resistance=150e3)
    return synthesize_match(559e6, 50.0, 1.0 / y)


class TestTunnelingCapacitance:
    def test_peak_value(self):
        # C_t(v0) = e^2 alpha^2 / (4 kB Te)
        expected = Q_E**2 * P.alpha**2 / (4 * K_B * P.t_e)
        assert tunneling_capacitance(P.v0, P) == pytest.approx(expected, rel=1e-12)

    def test_symmetric_about_v0(self):
        dv = np.linspace(0, 2e-3, 50)
        left = tunneling_capacitance(P.v0 - dv, P)
        right = tunneling_capacitance(P.v0 + dv, P)
        assert np.allclose(left, right, rtol=1e-12)

    def test_vanishes_far_from_degeneracy(self):
        far = tunneling_capacitance(P.v0 + 0.05, P)
        assert far < 1e-6 * tunneling_capacitance(P.v0, P)

    def test_fwhm_analytic(self):
        # 4 ln(1 + sqrt 2) kB Te / (e alpha) = 219 uV at 360 mK, alpha 0.5
        assert lineshape_fwhm(P) == pytest.approx(219e-6, abs=1e-6)
        # numerical check against the curve itself
        vg = P.v0 + np.linspace(-1e-3, 1e-3, 200001)
        ct = tunneling_capacitance(vg, P)
        above = vg[ct >= ct.max() / 2]
        assert above[-1] - above[0] == pytest.approx(lineshape_fwhm(P), rel=1e-4)

    def test_peak_scales_inversely_with_temperature(self):
        hot = SebParams(t_e=2 * P.t_e)
        ratio = tunneling_capacitance(P.v0, P) / tunneling_capacitance(hot.v0, hot)
        assert ratio == pytest.approx(2.0, rel=1e-12)

    def test_fwhm_scales_linearly_with_temperature(self):
        hot = SebParams(t_e=2 * P.t_e)
        assert lineshape_fwhm(hot) == pytest.approx(2 * lineshape_fwhm(P), rel=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            SebParams(alpha=0.0)
        with pytest.raises(ValueError):
            SebParams(t_e=-0.1)
        with pytest.raises(ValueError):
            SebParams(gamma=0.0)


class TestAdmittance:
    def test_far_from_degeneracy_is_geometric_capacitance(self):
        f = 559e6
        y = seb_admittance(P.v0 + 0.05, f, P)
        assert y.imag == pytest.approx(2 * np.pi * f * P.c_geom, rel=1e-4)
        assert abs(y.real) < 1e-9 * abs(y.imag)

    def test_fast_tunneling_limit_is_purely_capacitive(self):
        fast = SebParams(gamma=2 * np.pi * 1e15)
        y = seb_admittance(P.v0, 559e6, fast)
        w = 2 * np.pi * 559e6
        expected = w * (P.c_geom + tunneling_capacitance(P.v0, P))
        assert y.imag == pytest.approx(expected, rel=1e-5)
        assert y.real < 1e-5 * y.imag

    def test_sisyphus_peak_at_matched_rate(self):
        # at w = gamma the dissipative part is w C_t / 2
        f = 559e6
        slow = SebParams(gamma=2 * np.pi * f)
        y = seb_admittance(P.v0, f, slow)
        w = 2 * np.pi * f
        ct = tunneling_capacitance(P.v0, slow)
        assert y.real == pytest.approx(w * ct / 2, rel=1e-12)

    def test_real_part_positive(self):
        vg = np.linspace(P.v0 - 1e-3, P.v0 + 1e-3, 101)
        y = seb_admittance(vg, 559e6, P)
        assert np.all(y.real >= 0)


class TestTransmission:
    def test_peak_at_charge_degeneracy(self):
        mn = reference_matchnet()
        vg = np.linspace(P.v0 - 1.5e-3, P.v0 + 1.5e-3, 2001)
        s21 = seb_transmission(vg, 559e6, P, mn, device_resistance=150e3)
        response = np.abs(s21 - s21[0])
        assert vg[np.argmax(response)] == pytest.approx(P.v0, abs=2e-6)

    def test_response_width_tracks_lineshape(self):
        mn = reference_matchnet()
        vg = np.linspace(P.v0 - 1.5e-3, P.v0 + 1.5e-3, 20001)
        s21 = seb_transmission(vg, 559e6, P, mn, device_resistance=150e3)
        response = np.abs(s21 - s21[0])
        above = vg[response >= response.max() / 2]
        width = above[-1] - above[0]
        assert width == pytest.approx(lineshape_fwhm(P), rel=0.10)

    def test_broadcasting_vg_and_f(self):
        mn = reference_matchnet()
        vg = np.linspace(0.449, 0.451, 7)
        out = seb_transmission(vg, 559e6, P, mn)
        assert out.shape == (7,)
        f = np.array([559e6, 560e6])
        out2 = seb_transmission(P.v0, f, P, mn)
        assert out2.shape == (2,)

    def test_device_resistance_damps_response(self):
        mn = reference_matchnet()
        lossy = abs(
            seb_transmission(P.v0, 559e6, P, mn, device_resistance=150e3)
            - seb_transmission(P.v0 + 0.05, 559e6, P, mn, device_resistance=150e3)
        )
        sharp = abs(
            seb_transmission(P.v0, 559e6, P, mn)
            - seb_transmission(P.v0 + 0.05, 559e6, P, mn)
        )
        assert lossy != sharp

    def test_matches_two_port_s21(self):
        mn = reference_matchnet()
        grid = FrequencyGrid.linear(500e6, 600e6, 51)
        net = seb_two_port(grid, P.v0, P, mn, device_resistance=150e3)
        direct = seb_transmission(
            P.v0, grid.points, P, mn, device_resistance=150e3
        )
        assert np.allclose(net.s[:, 1, 0], direct, atol=1e-12)


class TestTwoPort:
    def test_passive_and_reciprocal_across_gate_voltages(self):
        mn = reference_matchnet()
        grid = FrequencyGrid.linear(400e6, 900e6, 201)
        for vg in (P.v0 - 5e-4, P.v0, P.v0 + 5e-4, 0.3):
            net = seb_two_port(grid, vg, P, mn, device_resistance=150e3)
            assert check_passivity(net, tol=1e-9).ok
            assert check_reciprocity(net).ok

    def test_baseline_admittance_excludes_tunneling(self):
        # baseline is the C_t = 0 node admittance including the gate branch
        f = 559e6
        w = 2 * np.pi * f
        y = seb_baseline_admittance(f, P, drive_coupling=100e-18, z0=50.0)
        gate_branch = 1.0 / (50.0 + 1.0 / (1j * w * 100e-18))
        expected = 1j * w * P.c_geom + gate_branch
        assert y == pytest.approx(expected, rel=1e-12)
        with_r = seb_baseline_admittance(f, P, device_resistance=150e3)
        assert (with_r - y).real == pytest.approx(1.0 / 150e3, rel=1e-9)
