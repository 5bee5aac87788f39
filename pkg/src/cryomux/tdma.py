"""Time-domain engine: SPI switch control, TDMA schedules, gate
waveforms and per-tone baseband IQ trace synthesis.

The chain is evaluated quasi-statically at every sample; RF carriers
are never sampled, each tone is tracked as a complex envelope.  Mux
changes are atomic between samples.  With the noise source disabled the
simulation is bit-exact reproducible; with a fixed master seed each
tone draws from an independent stream derived by SeedSequence.spawn.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import yaml
from scipy.signal import lfilter

from . import assembly
from .config import AssemblyConfig
from .errors import BadChannel, ConfigError, ReservedBitsSet
from .units import parse_quantity

ENABLE_BIT = 0x80
CHANNEL_MASK = 0x07
RESERVED_MASK = 0x78


@dataclass(frozen=True)
class MuxState:
    """Single-pole switch state: one selected channel or none."""

    selected: int | None = None

    def __post_init__(self):
        if self.selected is not None and not (0 <= self.selected <= 7):
            raise BadChannel(f"channel {self.selected} outside [0, 7]")


@dataclass(frozen=True)
class SpiFrame:
    """8-bit control word: bit7 enable, bits2..0 channel, bits6..3 reserved."""

    raw: int

    def __post_init__(self):
        if not (0 <= self.raw <= 0xFF):
            raise ValueError(f"frame {self.raw:#x} is not an 8-bit word")


def encode_frame(state: MuxState) -> SpiFrame:
    if state.selected is None:
        return SpiFrame(0x00)
    return SpiFrame(ENABLE_BIT | state.selected)


def decode_frame(frame: SpiFrame) -> MuxState:
    if frame.raw & RESERVED_MASK:
        raise ReservedBitsSet(
            f"frame {frame.raw:#010b} has reserved bits 6..3 set"
        )
    if not frame.raw & ENABLE_BIT:
        return MuxState(None)
    return MuxState(frame.raw & CHANNEL_MASK)


def apply_frame(current: MuxState, frame: SpiFrame) -> MuxState:
    """Atomic state update; break-before-make collapses to a swap."""
    return decode_frame(frame)


@dataclass(frozen=True)
class GateWaveform:
    """Static level or linear ramp (optionally repeating)."""

    kind: str
    v: float = 0.0
    v_start: float = 0.0
    v_end: float = 0.0
    t_start: float = 0.0
    t_end: float = 0.0
    repeat: bool = False

    def __post_init__(self):
        if self.kind not in ("static", "ramp"):
            raise ValueError(f"unknown waveform kind {self.kind!r}")
        if self.kind == "ramp" and self.t_end <= self.t_start:
            raise ValueError("ramp needs t_end > t_start")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "static":
            return np.broadcast_to(self.v, t.shape).copy()
        span = self.t_end - self.t_start
        if self.repeat:
            frac = np.mod(t - self.t_start, span) / span
        else:
            frac = np.clip((t - self.t_start) / span, 0.0, 1.0)
        return self.v_start + (self.v_end - self.v_start) * frac


@dataclass(frozen=True)
class ScheduleEntry:
    t_start: float
    t_end: float
    mux: MuxState
    gate0: GateWaveform
    gate1: GateWaveform

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ValueError("schedule entry needs t_end > t_start")


@dataclass(frozen=True)
class TdmaSchedule:
    """Sorted, non-overlapping timed mux states and gate waveforms."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("schedule needs at least one entry")
        for a, b in zip(entries, entries[1:]):
            if b.t_start < a.t_end:
                raise ValueError(
                    f"entries overlap at t = {b.t_start:g} s; "
                    f"schedule must be sorted and non-overlapping"
                )

    @property
    def span(self):
        return self.entries[0].t_start, self.entries[-1].t_end


def load_schedule(path) -> TdmaSchedule:
    """Read a schedule file (YAML, unit-tagged quantities)."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict) or "entries" not in raw:
        raise ConfigError([f"{path}: schedule file needs an 'entries' list"])
    entries = []
    for i, e in enumerate(raw["entries"]):
        where = f"entries[{i}]"
        mux_raw = e.get("mux", "none")
        mux = MuxState(None if mux_raw in (None, "none") else int(mux_raw))
        gates = []
        for g in ("gate0", "gate1"):
            graw = e.get(g, {"kind": "static", "v": "0 V"})
            kind = graw.get("kind", "static")
            if kind == "static":
                gates.append(
                    GateWaveform(
                        "static",
                        v=parse_quantity(graw["v"], "voltage", f"{where}.{g}.v"),
                    )
                )
            else:
                gates.append(
                    GateWaveform(
                        "ramp",
                        v_start=parse_quantity(
                            graw["v_start"], "voltage", f"{where}.{g}.v_start"
                        ),
                        v_end=parse_quantity(
                            graw["v_end"], "voltage", f"{where}.{g}.v_end"
                        ),
                        t_start=parse_quantity(
                            graw["t_start"], "time", f"{where}.{g}.t_start"
                        ),
                        t_end=parse_quantity(
                            graw["t_end"], "time", f"{where}.{g}.t_end"
                        ),
                        repeat=bool(graw.get("repeat", False)),
                    )
                )
        entries.append(
            ScheduleEntry(
                t_start=parse_quantity(e["t_start"], "time", f"{where}.t_start"),
                t_end=parse_quantity(e["t_end"], "time", f"{where}.t_end"),
                mux=mux,
                gate0=gates[0],
                gate1=gates[1],
            )
        )
    return TdmaSchedule(tuple(sorted(entries, key=lambda e: e.t_start)))


@dataclass(frozen=True)
class IqTrace:
    """Uniformly sampled complex baseband time series for one tone."""

    tone_frequency: float
    sample_rate: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        s = np.asarray(self.samples, dtype=complex)
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def times(self):
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    def rms(self) -> float:
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_seconds", "i_volts", "q_volts"])
            for t, s in zip(self.times(), self.samples):
                writer.writerow([f"{t:.9e}", f"{s.real:.12e}", f"{s.imag:.12e}"])

    @classmethod
    def read_csv(cls, path, tone_frequency=0.0):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t = data[:, 0]
        fs = 1.0 / np.mean(np.diff(t))
        return cls(tone_frequency, fs, data[:, 1] + 1j * data[:, 2], t0=float(t[0]))


def schedule_state(schedule: TdmaSchedule, t: np.ndarray):
    """Per-sample (mux_selected, vg0, vg1); gaps are mux=none, gates held.

    Gap gate levels hold the last value of the preceding entry (or the
    first entry's initial value before the schedule starts).
    """
    mux = np.full(t.size, -1, dtype=int)
    vg0 = np.empty(t.size)
    vg1 = np.empty(t.size)
    first = schedule.entries[0]
    hold0 = first.gate0.value(first.t_start)
    hold1 = first.gate1.value(first.t_start)
    prev_end = None
    covered = np.zeros(t.size, dtype=bool)
    for entry in schedule.entries:
        mask = (t >= entry.t_start) & (t < entry.t_end)
        covered |= mask
        sel = entry.mux.selected
        mux[mask] = -1 if sel is None else sel
        vg0[mask] = entry.gate0.value(t[mask])
        vg1[mask] = entry.gate1.value(t[mask])
    # fill gaps with held gate values, walking segments in time order
    gap = ~covered
    if np.any(gap):
        boundaries = [(-np.inf, float(hold0), float(hold1))]
        for entry in schedule.entries:
            boundaries.append(
                (
                    entry.t_end,
                    float(entry.gate0.value(entry.t_end)),
                    float(entry.gate1.value(entry.t_end)),
                )
            )
        gap_t = t[gap]
        g0 = np.empty(gap_t.size)
        g1 = np.empty(gap_t.size)
        for t_edge, v0_hold, v1_hold in boundaries:
            m = gap_t >= t_edge if np.isfinite(t_edge) else np.ones(gap_t.size, bool)
            g0[m] = v0_hold
            g1[m] = v1_hold
        vg0[gap] = g0
        vg1[gap] = g1
        mux[gap] = -1
    return mux, vg0, vg1


def simulate(
    schedule: TdmaSchedule,
    tones,
    cfg: AssemblyConfig,
    noise: bool = True,
    seed: int | None = None,
):
    """Synthesize one baseband IqTrace per tone.

    Per sample: quasi-static chain transmission times the drive
    amplitude, plus (optionally) complex white Gaussian noise with
    per-quadrature variance kB T_sys(f) B z0, then a single-pole
    low-pass at the demod bandwidth.
    """
    cfg = assembly.resolve_drive_amplitude(cfg)
    tones = list(tones)
    seed = cfg.seed if seed is None else seed
    t_lo, t_hi = schedule.span
    n = int(round((t_hi - t_lo) * cfg.sample_rate))
    t = t_lo + np.arange(n) / cfg.sample_rate
    mux_arr, vg0, vg1 = schedule_state(schedule, t)
    streams = np.random.SeedSequence(seed).spawn(len(tones))
    alpha = 1.0 - np.exp(-2.0 * np.pi * cfg.demod_bandwidth / cfg.sample_rate)

    traces = []
    for f_tone, stream in zip(tones, streams):
        x = np.empty(n, dtype=complex)
        for sel in np.unique(mux_arr):
            mask = mux_arr == sel
            mux = None if sel < 0 else int(sel)
            x[mask] = chain_transmission_samples(
                cfg, mux, vg0[mask], vg1[mask], f_tone
            )
        x *= cfg.drive_amplitude
        if noise:
            rng = np.random.default_rng(stream)
            sigma = assembly.noise_sigma(cfg, f_tone)
            x = x + sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        zi = np.array([(1.0 - alpha) * x[0]])
        y, _ = lfilter([alpha], [1.0, -(1.0 - alpha)], x, zi=zi)
        traces.append(IqTrace(f_tone, cfg.sample_rate, y, t0=t_lo))
    return traces


def chain_transmission_samples(cfg, mux, vg0, vg1, f_tone):
    """Vectorized chain transmission at one tone for sample arrays."""
    return assembly.chain_transmission(cfg, mux, vg0, vg1, f_tone)
