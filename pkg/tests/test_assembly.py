import numpy as np
import pytest
from scipy.constants import k as K_B

from cryomux import assembly
from cryomux.config import AUTO
from cryomux.errors import IncompleteConfig


def db(x):
    return 20 * np.log10(np.abs(x))


class TestChainTransmission:
    def test_addressed_path_responds_to_its_gate(self, cfg):
        p0 = cfg.path_by_index(0)
        on = assembly.chain_transmission(cfg, 0, p0.params.v0, 0.44, p0.f_target)
        off = assembly.chain_transmission(cfg, 0, p0.vg_baseline, 0.44, p0.f_target)
        assert abs(on - off) > 0

    def test_modulation_depth_is_percent_level(self, cfg):
        p0 = cfg.path_by_index(0)
        on = assembly.chain_transmission(cfg, 0, p0.params.v0, 0.44, p0.f_target)
        off = assembly.chain_transmission(cfg, 0, p0.vg_baseline, 0.44, p0.f_target)
        depth = abs(on - off) / abs(off)
        assert 0.02 < depth < 0.30

    def test_cross_matchnet_suppression(self, cfg):
        # wiggling gate 1 while reading channel 0 must be >= 13 dB weaker
        # than wiggling gate 0
        p0 = cfg.path_by_index(0)
        p1 = cfg.path_by_index(1)
        f = p0.f_target
        base = assembly.chain_transmission(cfg, 0, p0.vg_baseline, p1.vg_baseline, f)
        own = assembly.chain_transmission(cfg, 0, p0.params.v0, p1.vg_baseline, f)
        other = assembly.chain_transmission(cfg, 0, p0.vg_baseline, p1.params.v0, f)
        suppression = db(own - base) - db(other - base)
        assert suppression >= 13.0

    def test_unused_channel_suppression(self, cfg):
        # selecting an empty switch channel kills the gate response >= 39 dB
        p0 = cfg.path_by_index(0)
        f = p0.f_target
        sel = abs(
            assembly.chain_transmission(cfg, 0, p0.params.v0, 0.44, f)
            - assembly.chain_transmission(cfg, 0, p0.vg_baseline, 0.44, f)
        )
        unused = abs(
            assembly.chain_transmission(cfg, 2, p0.params.v0, 0.44, f)
            - assembly.chain_transmission(cfg, 2, p0.vg_baseline, 0.44, f)
        )
        assert 20 * np.log10(sel / unused) >= 39.0

    def test_broadcast_over_frequency(self, cfg):
        f = cfg.grid.points[:17]
        out = assembly.chain_transmission(cfg, 0, 0.44, 0.44, f)
        assert out.shape == (17,)

    def test_incomplete_config_rejected(self, cfg):
        from dataclasses import replace

        broken = replace(cfg, seb_paths=())
        with pytest.raises(IncompleteConfig):
            assembly.chain_transmission(broken, 0, 0.44, 0.44, 559e6)


class TestSweeps:
    def test_reflectometry_dips_at_both_targets(self, cfg):
        from cryomux.analysis import extract_resonances

        net = assembly.reflectometry_trace(cfg)
        res = extract_resonances(net)
        found = sorted(r.f_hz for r in res)
        assert len(found) == 2
        assert found[0] == pytest.approx(559e6, abs=1e6)
        assert found[1] == pytest.approx(681e6, abs=1e6)

    def test_transmission_sweep_peaks_at_selected_resonance(self, cfg):
        # the addressed path's matching resonance dominates the sweep
        for channel in (0, 1):
            path = cfg.path_for_channel(channel)
            net = assembly.transmission_sweep(cfg, channel)
            f_best = cfg.grid.points[np.argmax(np.abs(net.s[:, 1, 0]))]
            assert f_best == pytest.approx(path.f_target, abs=2e6)


class TestNoiseBudget:
    def test_matches_manual_friis(self, cfg):
        f = 559e6
        t = 0.0
        gain = 1.0
        for loss_db, t_phys in cfg.attenuators:
            loss = 10 ** (loss_db / 10)
            t += (loss - 1) * t_phys / gain
            gain /= loss
        il = 10 ** (float(cfg.switch.il_at(f)) / 10)
        t += (il - 1) * cfg.switch.t_phys / gain
        gain /= il
        t += cfg.lna.noise_temperature_k(f) / gain
        assert assembly.system_noise_temperature(cfg, f) == pytest.approx(t, rel=1e-12)

    def test_noise_sigma_formula(self, cfg):
        f = 559e6
        t_sys = assembly.system_noise_temperature(cfg, f)
        expected = np.sqrt(K_B * t_sys * cfg.demod_bandwidth * cfg.z0)
        assert assembly.noise_sigma(cfg, f) == pytest.approx(expected, rel=1e-12)

    def test_attenuators_dominate_input_referred_noise(self, cfg):
        # 20 dB at 4 K alone contributes (100 - 1) * 4 = 396 K
        t_sys = assembly.system_noise_temperature(cfg, 559e6)
        assert t_sys > 396.0


class TestDriveCalibration:
    def test_resolution_replaces_auto(self, cfg):
        assert cfg.drive_amplitude == AUTO
        resolved = assembly.resolve_drive_amplitude(cfg)
        assert isinstance(resolved.drive_amplitude, float)
        assert resolved.drive_amplitude > 0

    def test_resolution_is_idempotent(self, cfg):
        once = assembly.resolve_drive_amplitude(cfg)
        twice = assembly.resolve_drive_amplitude(once)
        assert twice.drive_amplitude == once.drive_amplitude

    def test_calibration_hits_the_snr_target(self, cfg):
        # SNR = n |amp dS21|^2 / sigma^2 must equal the configured target
        resolved = assembly.resolve_drive_amplitude(cfg)
        path = resolved.path_by_index(0)
        n = round(resolved.snr_target_tau * resolved.sample_rate)
        sep = resolved.drive_amplitude * assembly.two_level_separation(resolved, 0)
        sigma = assembly.noise_sigma(resolved, path.f_target)
        snr = n * sep**2 / sigma**2
        assert snr == pytest.approx(resolved.snr_target, rel=1e-9)

    def test_explicit_amplitude_untouched(self, cfg):
        from dataclasses import replace

        fixed = replace(cfg, drive_amplitude=0.01)
        assert assembly.resolve_drive_amplitude(fixed).drive_amplitude == 0.01
