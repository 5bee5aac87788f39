"""Small-signal single-electron-box model.

The gate-dependent tunneling capacitance follows the thermally broadened
sech^2 lineshape; a single-pole admittance adds the dissipative
(Sisyphus) component.  The box is embedded between a gate coupling
capacitor and the high-pass L-section to give gate-to-RX transmission.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import e as Q_E
from scipy.constants import k as K_B

from .components import MatchNetSpec
from .rfcore import FrequencyGrid, TwoPortNetwork


@dataclass(frozen=True)
class SebParams:
    """Charge-sensor parameters.

    gamma is the angular tunnel rate (rad/s); alpha the gate lever arm.
    """

    alpha: float = 0.5
    v0: float = 0.450
    t_e: float = 0.360
    gamma: float = 2.0 * np.pi * 5e9
    c_geom: float = 50e-18
    label: int = 0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("lever arm must be in (0, 1]")
        if self.t_e <= 0:
            raise ValueError("electron temperature must be > 0")
        if self.gamma <= 0:
            raise ValueError("tunnel rate must be > 0")
        if self.c_geom < 0:
            raise ValueError("geometric capacitance must be >= 0")


def tunneling_capacitance(vg, p: SebParams):
    """Thermally broadened tunneling capacitance in farads.

    C_t(vg) = (e^2 a^2 / 4 kB Te) sech^2(e a (vg - v0) / 2 kB Te)
    """
    vg = np.asarray(vg, dtype=float)
    scale = Q_E**2 * p.alpha**2 / (4.0 * K_B * p.t_e)
    x = Q_E * p.alpha * (vg - p.v0) / (2.0 * K_B * p.t_e)
    # sech(x) written to avoid cosh overflow far from degeneracy
    sech = 2.0 * np.exp(-np.abs(x)) / (1.0 + np.exp(-2.0 * np.abs(x)))
    return scale * sech**2


def lineshape_fwhm(p: SebParams) -> float:
    """Full width at half maximum of C_t in gate voltage: 4 ln(1+sqrt 2) kB Te / (e a)."""
    return 4.0 * np.log(1.0 + np.sqrt(2.0)) * K_B * p.t_e / (Q_E * p.alpha)


def seb_admittance(vg, f, p: SebParams):
    """Complex gate admittance: geometric + single-pole tunneling term.

    Y = jw c_geom + jw C_t / (1 + jw/gamma); the pole supplies the
    dissipative real part when tunneling lags the drive.
    """
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    ct = tunneling_capacitance(vg, p)
    return 1j * w * p.c_geom + 1j * w * ct / (1.0 + 1j * w / p.gamma)


def seb_transmission(
    vg,
    f,
    p: SebParams,
    mn: MatchNetSpec,
    drive_coupling: float = 100e-18,
    device_resistance: float | None = None,
    z0: float = 50.0,
):
    """Gate-port to RX-port S21 of the embedded box.

    Topology: series drive_coupling capacitor from the gate port, the SEB
    admittance (plus the device's shunt RF resistance, when given) at the
    internal node, then shunt L and series C of the L-section to the RX
    port.  vg and f broadcast against each other.
    """
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    y = seb_admittance(vg, f, p) + 1.0 / (1j * w * mn.l)
    if device_resistance is not None:
        y = y + 1.0 / device_resistance
    z1 = 1.0 / (1j * w * drive_coupling)
    z2 = 1.0 / (1j * w * mn.c)
    a = 1.0 + z1 * y
    b = z2 * a + z1
    c = y
    d = 1.0 + y * z2
    return 2.0 / (a + b / z0 + c * z0 + d)


def seb_baseline_admittance(
    f,
    p: SebParams,
    drive_coupling: float = 100e-18,
    device_resistance: float | None = None,
    z0: float = 50.0,
):
    """Node admittance far from charge degeneracy (C_t = 0), seen by the L-section.

    Includes the geometric capacitance, the device shunt resistance and
    the gate branch (source z0 behind the coupling capacitor).  This is
    the impedance the matching synthesis targets.
    """
    w = 2.0 * np.pi * np.asarray(f, dtype=float)
    y = 1j * w * p.c_geom + 1.0 / (z0 + 1.0 / (1j * w * drive_coupling))
    if device_resistance is not None:
        y = y + 1.0 / device_resistance
    return y


def seb_two_port(
    grid: FrequencyGrid,
    vg: float,
    p: SebParams,
    mn: MatchNetSpec,
    drive_coupling: float = 100e-18,
    device_resistance: float | None = None,
    z0: float = 50.0,
) -> TwoPortNetwork:
    """Gate-to-RX two-port over a grid at a fixed gate voltage.

    S11/S22 are filled from the exact ABCD of the same ladder so the
    result is a complete, passive, reciprocal two-port.
    """
    w = 2.0 * np.pi * grid.points
    y = seb_admittance(vg, grid.points, p) + 1.0 / (1j * w * mn.l)
    if device_resistance is not None:
        y = y + 1.0 / device_resistance
    z1 = 1.0 / (1j * w * drive_coupling)
    z2 = 1.0 / (1j * w * mn.c)
    n = len(grid)
    m = np.empty((n, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0 + z1 * y
    m[:, 0, 1] = z2 * (1.0 + z1 * y) + z1
    m[:, 1, 0] = y
    m[:, 1, 1] = 1.0 + y * z2
    from .rfcore import AbcdMatrix, abcd_to_s

    return abcd_to_s(AbcdMatrix(grid, m), z0)
