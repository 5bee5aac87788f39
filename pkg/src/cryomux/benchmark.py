"""Calibrated two-level SNR benchmark of the assembly.

Drives SEB 0 at its tone, holding the gate at the oscillation top for
one window and at the baseline for a second window, then estimates the
power SNR from integrated IQ blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis, assembly
from .analysis import SnrReport
from .config import AssemblyConfig
from .errors import WindowTooShort
from .tdma import GateWaveform, MuxState, ScheduleEntry, TdmaSchedule, simulate

DEFAULT_BLOCKS = 2000


@dataclass(frozen=True)
class BenchmarkResult:
    report: SnrReport
    fidelity: float
    top_blocks: np.ndarray
    bottom_blocks: np.ndarray
    drive_amplitude: float
    tone_frequency: float


def two_level_schedule(cfg: AssemblyConfig, window: float) -> TdmaSchedule:
    path = cfg.path_by_index(0)
    others = {p.params.label: p.vg_baseline for p in cfg.seb_paths}
    gate_other = GateWaveform("static", v=others.get(1, 0.0))
    top = GateWaveform("static", v=path.params.v0)
    bottom = GateWaveform("static", v=path.vg_baseline)
    g0_top, g1_top = (top, gate_other) if path.params.label == 0 else (gate_other, top)
    g0_bot, g1_bot = (
        (bottom, gate_other) if path.params.label == 0 else (gate_other, bottom)
    )
    return TdmaSchedule(
        (
            ScheduleEntry(0.0, window, MuxState(path.channel), g0_top, g1_top),
            ScheduleEntry(window, 2 * window, MuxState(path.channel), g0_bot, g1_bot),
        )
    )


def run_snr_benchmark(
    cfg: AssemblyConfig,
    tau: float,
    n_blocks: int = DEFAULT_BLOCKS,
    noise: bool = True,
    seed: int | None = None,
) -> BenchmarkResult:
    """Simulate the two-level scenario and estimate SNR at tau."""
    cfg = assembly.resolve_drive_amplitude(cfg)
    if int(round(tau * cfg.sample_rate)) < 1:
        raise WindowTooShort(
            f"tau = {tau:g} s is below one sample at {cfg.sample_rate:g} S/s"
        )
    path = cfg.path_by_index(0)
    window = n_blocks * tau
    schedule = two_level_schedule(cfg, window)
    trace = simulate(schedule, [path.f_target], cfg, noise=noise, seed=seed)[0]
    report = analysis.estimate_snr(trace, (0.0, window), (window, 2 * window), tau)
    n = int(round(tau * cfg.sample_rate))
    t = trace.times()
    top = analysis._block_means(trace.samples[(t >= 0) & (t < window)], n)
    bottom = analysis._block_means(trace.samples[t >= window], n)
    return BenchmarkResult(
        report=report,
        fidelity=analysis.readout_fidelity(report.snr_power),
        top_blocks=top,
        bottom_blocks=bottom,
        drive_amplitude=float(cfg.drive_amplitude),
        tone_frequency=path.f_target,
    )
