"""Full-chain evaluation: complex transmission through the assembly,
S-parameter sweeps, system noise temperature and drive calibration.

Signal flow: drive -> attenuators -> SP8T switch -> addressed SEB +
matching network -> LNA -> demodulator.  Non-addressed paths leak in
through switch isolation plus a scalar cross-coupling between the two
readout paths at the sensor chiplet.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
from scipy.constants import k as K_B

from .config import AUTO, AssemblyConfig
from .errors import IncompleteConfig
from .rfcore import FrequencyGrid, TwoPortNetwork
from .seb import seb_transmission


def _require_complete(cfg: AssemblyConfig):
    missing = [
        name
        for name, value in (
            ("switch", cfg.switch),
            ("lna", cfg.lna),
            ("seb_paths", cfg.seb_paths),
        )
        if not value
    ]
    if missing:
        raise IncompleteConfig(f"assembly config missing: {', '.join(missing)}")


def attenuator_amplitude(cfg: AssemblyConfig) -> float:
    """Combined amplitude gain of the input attenuation stages."""
    total_db = sum(loss for loss, _ in cfg.attenuators)
    return 10.0 ** (-total_db / 20.0)


def _switch_amplitude(cfg, mux, channel, f):
    if mux is not None and mux == channel:
        return 10.0 ** (-cfg.switch.il_at(f) / 20.0)
    return 10.0 ** (-cfg.switch.isolation_at(f) / 20.0)


def _path_transmission(path, vg, f, z0):
    return seb_transmission(
        vg,
        f,
        path.params,
        path.mn,
        drive_coupling=path.drive_coupling,
        device_resistance=path.device_resistance,
        z0=z0,
    )


def chain_transmission(cfg: AssemblyConfig, mux, vg0, vg1, f):
    """Complex source-to-demodulator S21 at frequency f.

    mux is the selected switch channel (None = all off); vg0/vg1 drive
    the two sensor gates.  Arguments broadcast, so f or the gate
    voltages may be arrays.
    """
    _require_complete(cfg)
    f = np.asarray(f, dtype=float)
    att = attenuator_amplitude(cfg)
    lna = 10.0 ** (cfg.lna.gain_db(f) / 20.0)
    kappa = 10.0 ** (cfg.cross_coupling_db / 20.0)
    gate = {0: vg0, 1: vg1}

    total = 0.0
    trans = {}
    for path in cfg.seb_paths:
        vg = gate.get(path.params.label, path.vg_baseline)
        t = _path_transmission(path, vg, f, cfg.z0)
        trans[path.channel] = t
        total = total + _switch_amplitude(cfg, mux, path.channel, f) * t
    if mux is not None and mux in trans:
        sw_on = _switch_amplitude(cfg, mux, mux, f)
        for channel, t in trans.items():
            if channel != mux:
                total = total + kappa * sw_on * t
    return att * total * lna


def reflectometry_trace(cfg: AssemblyConfig, grid: FrequencyGrid | None = None):
    """Reflection-mode sweep over both matching resonators.

    The combined trace is the product of the per-path reflection
    coefficients at their RX ports (baseline gate voltages), which dips
    sharply at each matched frequency.  Returned as a TwoPortNetwork
    with the trace in S21/S12.
    """
    _require_complete(cfg)
    grid = grid or cfg.grid
    f = grid.points
    gamma = np.ones(len(grid), dtype=complex)
    for path in cfg.seb_paths:
        from .components import matchnet_input_impedance
        from .seb import seb_baseline_admittance

        y_dev = seb_baseline_admittance(
            f,
            path.params,
            drive_coupling=path.drive_coupling,
            device_resistance=path.device_resistance,
            z0=cfg.z0,
        )
        z_in = matchnet_input_impedance(path.mn, f, 1.0 / y_dev)
        gamma = gamma * (z_in - cfg.z0) / (z_in + cfg.z0)
    return TwoPortNetwork.from_s21(grid, gamma, z0=cfg.z0)


def transmission_sweep(cfg: AssemblyConfig, mux, grid: FrequencyGrid | None = None):
    """Full-chain transmission sweep at baseline gate voltages."""
    grid = grid or cfg.grid
    vg = {p.params.label: p.vg_baseline for p in cfg.seb_paths}
    s21 = chain_transmission(
        cfg, mux, vg.get(0, 0.0), vg.get(1, 0.0), grid.points
    )
    return TwoPortNetwork.from_s21(grid, s21, s12=np.zeros(len(grid)), z0=cfg.z0)


def system_noise_temperature(cfg: AssemblyConfig, f):
    """Input-referred T_sys of attenuators, selected switch path and LNA.

    The sensor path loss is part of the signal transmission, not of the
    injected noise reference, so it is deliberately not a Friis stage.
    """
    _require_complete(cfg)
    f = np.asarray(f, dtype=float)
    t_sys = np.zeros(np.shape(f))
    running_gain = 1.0
    for loss_db, t_phys in cfg.attenuators:
        loss = 10.0 ** (loss_db / 10.0)
        t_sys = t_sys + (loss - 1.0) * t_phys / running_gain
        running_gain = running_gain / loss
    il = 10.0 ** (cfg.switch.il_at(f) / 10.0)
    t_sys = t_sys + (il - 1.0) * cfg.switch.t_phys / running_gain
    running_gain = running_gain / il
    t_sys = t_sys + cfg.lna.noise_temperature_k(f) / running_gain
    return t_sys if t_sys.ndim else float(t_sys)


def noise_sigma(cfg: AssemblyConfig, f) -> float:
    """Per-quadrature noise std dev: sigma^2 = kB T_sys B z0."""
    t_sys = system_noise_temperature(cfg, f)
    return np.sqrt(K_B * t_sys * cfg.demod_bandwidth * cfg.z0)


def two_level_separation(cfg: AssemblyConfig, path_index: int = 0) -> float:
    """|S21(peak) - S21(baseline)| of the addressed path at its tone."""
    path = cfg.path_by_index(path_index)
    f = path.f_target
    top = chain_transmission(cfg, path.channel, *_gate_pair(cfg, path, at_peak=True), f)
    bot = chain_transmission(cfg, path.channel, *_gate_pair(cfg, path, at_peak=False), f)
    return float(abs(top - bot))


def _gate_pair(cfg, path, at_peak):
    vg = {p.params.label: p.vg_baseline for p in cfg.seb_paths}
    vg[path.params.label] = path.params.v0 if at_peak else path.vg_baseline
    return vg.get(0, 0.0), vg.get(1, 0.0)


def resolve_drive_amplitude(cfg: AssemblyConfig) -> AssemblyConfig:
    """Replace drive_amplitude='auto' with the calibrated value.

    Calibration targets the configured power SNR at the configured
    integration time for the two-level scenario on SEB 0:
    SNR = n |amp dS21|^2 / sigma^2 with n samples per integration block.
    """
    if cfg.drive_amplitude != AUTO:
        return cfg
    _require_complete(cfg)
    path = cfg.path_by_index(0)
    sigma = noise_sigma(cfg, path.f_target)
    d_s21 = two_level_separation(cfg, 0)
    n = max(int(round(cfg.snr_target_tau * cfg.sample_rate)), 1)
    amp = np.sqrt(cfg.snr_target / n) * sigma / d_s21
    return replace(cfg, drive_amplitude=float(amp))
