"""Parametric frequency-domain models of the chain's building blocks.

Each builder renders a component as a TwoPortNetwork (plus a StageSpec
where the component contributes noise): band-pass LNA, SP8T switch path,
and the high-pass L-section matching network with its synthesis routine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadChannel, NoMatchExists, UnachievableProfile
from .noise import StageSpec, passive_noise_temperature
from .rfcore import (
    AbcdMatrix,
    FrequencyGrid,
    TwoPortNetwork,
    abcd_to_s,
    series_impedance,
    shunt_admittance,
)


@dataclass(frozen=True)
class Profile:
    """Piecewise-linear per-frequency value in dB (e.g. a measured curve)."""

    frequency_hz: np.ndarray
    value_db: np.ndarray

    def __call__(self, f_hz):
        return np.interp(f_hz, self.frequency_hz, self.value_db)

    @classmethod
    def from_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1])


def _eval_db(value, f_hz):
    """Evaluate a flat dB value or a Profile on frequencies."""
    if isinstance(value, Profile):
        return np.asarray(value(f_hz), dtype=float)
    return np.broadcast_to(float(value), np.shape(f_hz)).copy()


def isolation_rolloff(iso_ref_db: float, f_ref_hz: float, grid: FrequencyGrid) -> Profile:
    """Capacitive-feedthrough isolation: iso_ref at f_ref, +20 dB/decade below.

    Models a series-off switch whose leakage is dominated by parasitic
    capacitance, so isolation improves toward low frequency.
    """
    f = grid.points
    return Profile(f, iso_ref_db + 20.0 * np.log10(f_ref_hz / f))


@dataclass(frozen=True)
class LnaSpec:
    """Band-pass amplifier: gain band, noise-temperature profile, match."""

    peak_gain_db: float = 35.5
    f_center: float = 780e6
    f_low_3db: float = 709e6
    f_high_3db: float = 827e6
    nt_min_k: float = 4.2
    f_nt_min: float = 650e6
    nt_avg_k: float = 6.2
    in_band_return_loss_db: float = 10.0

    def __post_init__(self):
        if not (self.f_low_3db < self.f_center < self.f_high_3db):
            raise ValueError("need f_low_3db < f_center < f_high_3db")
        if self.nt_min_k > self.nt_avg_k:
            raise UnachievableProfile(
                f"NT minimum {self.nt_min_k} K exceeds NT average {self.nt_avg_k} K"
            )

    @property
    def f_peak(self) -> float:
        """Gain maximum of the second-order response (geometric band mean)."""
        return float(np.sqrt(self.f_low_3db * self.f_high_3db))

    def gain_db(self, f_hz):
        """|S21| in dB: single second-order resonator magnitude response."""
        f = np.asarray(f_hz, dtype=float)
        f0 = self.f_peak
        q = f0 / (self.f_high_3db - self.f_low_3db)
        x = f / f0 - f0 / f
        return self.peak_gain_db - 10.0 * np.log10(1.0 + (q * x) ** 2)

    def noise_temperature_k(self, f_hz):
        """Convex NT(f): quadratic through (f_nt_min, nt_min), in-band mean nt_avg."""
        f = np.asarray(f_hz, dtype=float)
        fl, fh, fm = self.f_low_3db, self.f_high_3db, self.f_nt_min
        # exact in-band mean of (f - fm)^2
        mean_sq = ((fh - fm) ** 3 - (fl - fm) ** 3) / (3.0 * (fh - fl))
        a = (self.nt_avg_k - self.nt_min_k) / mean_sq
        return self.nt_min_k + a * (f - fm) ** 2


def lna_two_port(spec: LnaSpec, grid: FrequencyGrid, z0: float = 50.0):
    """Render the LNA as (TwoPortNetwork, StageSpec).

    S21 carries the band-pass gain with zero phase; S11/S22 sit at the
    in-band return-loss floor (magnitude only, zero phase); S12 = 0
    (unilateral amplifier).
    """
    f = grid.points
    s21 = 10.0 ** (spec.gain_db(f) / 20.0)
    s11 = 10.0 ** (-spec.in_band_return_loss_db / 20.0)
    net = TwoPortNetwork.from_s21(grid, s21, s11=s11, s12=np.zeros_like(f), z0=z0)
    stage = StageSpec(
        "lna",
        gain=10.0 ** (spec.gain_db(f) / 10.0),
        noise_temperature=spec.noise_temperature_k(f),
    )
    return net, stage


@dataclass(frozen=True)
class SwitchSpec:
    """SP8T series switch: per-path insertion loss, isolation, match, noise."""

    n_channels: int = 8
    il_db: object = 1.1
    isolation_db: object = 35.0
    return_loss_db: float = 10.0
    t_phys: float = 4.0
    # provenance of isolation_db for canonical re-emission, e.g.
    # ("flat", 35.0) or ("capacitive", 35.0, 2e9)
    isolation_desc: tuple | None = None

    def il_at(self, f_hz):
        return _eval_db(self.il_db, f_hz)

    def isolation_at(self, f_hz):
        iso = _eval_db(self.isolation_db, f_hz)
        il = self.il_at(f_hz)
        if np.any(iso <= il):
            raise ValueError("switch isolation must exceed insertion loss")
        return iso


def switch_two_port(
    spec: SwitchSpec,
    selected,
    path: int,
    grid: FrequencyGrid,
    z0: float = 50.0,
):
    """One switch path as (TwoPortNetwork, StageSpec).

    selected is the active channel (or None for all-off); path is the
    channel this two-port represents.  A deselected path transmits at
    the isolation level.  Port reflections are placed in quadrature with
    the (real) transmission so the rendered matrix stays passive.
    """
    if not (0 <= path < spec.n_channels):
        raise BadChannel(f"path {path} outside [0, {spec.n_channels})")
    if selected is not None and not (0 <= selected < spec.n_channels):
        raise BadChannel(f"selected {selected} outside [0, {spec.n_channels})")
    f = grid.points
    on = selected == path
    level_db = spec.il_at(f) if on else spec.isolation_at(f)
    s21 = 10.0 ** (-level_db / 20.0)
    s11 = 1j * 10.0 ** (-spec.return_loss_db / 20.0)
    net = TwoPortNetwork.from_s21(grid, s21, s11=s11, z0=z0)
    il_lin = 10.0 ** (spec.il_at(f) / 10.0)
    stage = StageSpec(
        f"switch_ch{path}" + ("" if on else "_isolated"),
        gain=(1.0 / il_lin) if on else 10.0 ** (-spec.isolation_at(f) / 10.0),
        noise_temperature=passive_noise_temperature(il_lin, spec.t_phys)
        if on
        else None,
        physical_temperature=None if on else spec.t_phys,
    )
    return net, stage


@dataclass(frozen=True)
class MatchNetSpec:
    """High-pass L-section: series C toward the 50 ohm port, shunt L at the device."""

    c: float
    l: float
    z0: float = 50.0

    def __post_init__(self):
        if self.c <= 0 or self.l <= 0:
            raise ValueError("L-section elements must be positive")


def matchnet_abcd(spec: MatchNetSpec, grid: FrequencyGrid) -> AbcdMatrix:
    """Chain matrix, port 1 = 50 ohm side, port 2 = device side."""
    w = 2.0 * np.pi * grid.points
    zc = 1.0 / (1j * w * spec.c)
    yl = 1.0 / (1j * w * spec.l)
    m = series_impedance(grid, zc).m @ shunt_admittance(grid, yl).m
    return AbcdMatrix(grid, m)


def matchnet_two_port(spec: MatchNetSpec, grid: FrequencyGrid) -> TwoPortNetwork:
    """Exact lumped-element S-parameters of the L-section at its z0."""
    return abcd_to_s(matchnet_abcd(spec, grid), spec.z0)


def matchnet_input_impedance(spec: MatchNetSpec, f_hz, z_load):
    """Impedance at the 50 ohm port with the device side terminated in z_load."""
    w = 2.0 * np.pi * np.asarray(f_hz, dtype=float)
    zl = 1j * w * spec.l
    z_node = zl * z_load / (zl + z_load)
    return 1.0 / (1j * w * spec.c) + z_node


def _bisect(func, lo, hi, iterations=200):
    """Plain bisection; assumes func(lo) and func(hi) bracket a root."""
    flo = func(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def synthesize_match(
    f_target: float, z0: float, device_impedance: complex, rel_tol: float = 1e-6
) -> MatchNetSpec:
    """Design the high-pass L-section matching device_impedance to z0.

    Closed-form L-section values, then a bisection polish of each
    element on the impedance residual.  The topology requires the
    device conductance to satisfy Re(Y_dev) * z0 < 1.
    """
    zd = complex(device_impedance)
    if zd.real <= 0:
        raise NoMatchExists(f"device impedance {zd} has non-positive real part")
    if abs(zd - z0) / z0 < 1e-9:
        raise NoMatchExists(
            f"device impedance {zd} already equals z0 = {z0}; the L-section "
            f"degenerates (C -> infinity) and no finite network is needed"
        )
    w = 2.0 * np.pi * f_target
    yd = 1.0 / zd
    gd, bd = yd.real, yd.imag
    if gd * z0 >= 1.0:
        raise NoMatchExists(
            f"Re(1/Z_dev) = {gd:g} S is too large for a high-pass L-section "
            f"into {z0} ohm (needs Re(Y_dev) * z0 < 1)"
        )
    # shunt inductor: total node susceptance -sqrt(Gd (1/z0 - Gd))
    b_target = -np.sqrt(gd * (1.0 / z0 - gd))
    u = bd - b_target  # u = 1 / (w L)
    if u <= 0:
        raise NoMatchExists(
            f"device susceptance {bd:g} S cannot be tuned inductive at "
            f"{f_target:g} Hz with this topology"
        )

    def re_residual(u_val):
        y_node = yd - 1j * u_val
        return (1.0 / y_node).real - z0

    du = max(abs(u) * 1e-3, 1e-12)
    if re_residual(u - du) * re_residual(u + du) < 0:
        u = _bisect(re_residual, u - du, u + du)
    y_node = yd - 1j * u
    x_series = -(1.0 / y_node).imag  # reactance the series C must supply
    if x_series >= 0:
        raise NoMatchExists("node reactance not capacitive-cancellable")
    v = -1.0 / x_series  # v = w C

    def im_residual(v_val):
        return (1.0 / y_node - 1j / v_val).imag

    dv = max(abs(v) * 1e-3, 1e-20)
    if im_residual(v - dv) * im_residual(v + dv) < 0:
        v = _bisect(im_residual, v - dv, v + dv)
    spec = MatchNetSpec(c=v / w, l=1.0 / (u * w), z0=z0)
    z_in = matchnet_input_impedance(spec, f_target, zd)
    if abs(z_in - z0) / z0 > rel_tol:
        raise NoMatchExists(
            f"synthesis residual |Zin - z0|/z0 = {abs(z_in - z0) / z0:g} "
            f"exceeds {rel_tol:g}"
        )
    return spec
