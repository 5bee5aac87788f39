"""Frequency-domain two-port algebra.

Canonical representation is the scattering matrix at a real reference
impedance (default 50 ohm); chain (ABCD) matrices are used transiently
for cascading.  All containers are immutable; every operation is a pure
function over them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, OutOfSpan, SingularConversion

PASSIVITY_TOL = 1e-9
RECIPROCITY_TOL = 1e-9


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, positive frequency points in Hz."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("frequency grid needs at least 2 points")
        if pts[0] <= 0:
            raise ValueError("frequencies must be positive")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("frequencies must be strictly increasing")

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, FrequencyGrid):
            return NotImplemented
        return self.points.shape == other.points.shape and np.array_equal(
            self.points, other.points
        )

    @classmethod
    def linear(cls, start_hz, stop_hz, points):
        return cls(np.linspace(start_hz, stop_hz, int(points)))


@dataclass(frozen=True)
class TwoPortNetwork:
    """Per-frequency 2x2 complex S-matrix at reference impedance z0."""

    grid: FrequencyGrid
    s: np.ndarray
    z0: float = 50.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.shape != (len(self.grid), 2, 2):
            raise ValueError(
                f"S array shape {s.shape} does not match grid of "
                f"{len(self.grid)} points"
            )
        s.flags.writeable = False
        object.__setattr__(self, "s", s)
        if self.z0 <= 0:
            raise ValueError("z0 must be positive")

    def s_db(self, i, j):
        """|S_ij| in dB (1-based port indices)."""
        mag = np.abs(self.s[:, i - 1, j - 1])
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(mag)

    @classmethod
    def thru(cls, grid, z0=50.0):
        s = np.zeros((len(grid), 2, 2), dtype=complex)
        s[:, 0, 1] = 1.0
        s[:, 1, 0] = 1.0
        return cls(grid, s, z0)

    @classmethod
    def from_s21(cls, grid, s21, s11=0.0, s22=None, s12=None, z0=50.0):
        """Build from per-point scalars; s12 defaults to s21 (reciprocal)."""
        n = len(grid)
        s = np.zeros((n, 2, 2), dtype=complex)
        s[:, 1, 0] = np.broadcast_to(np.asarray(s21, dtype=complex), n)
        s[:, 0, 1] = s[:, 1, 0] if s12 is None else np.broadcast_to(
            np.asarray(s12, dtype=complex), n
        )
        s[:, 0, 0] = np.broadcast_to(np.asarray(s11, dtype=complex), n)
        s[:, 1, 1] = s[:, 0, 0] if s22 is None else np.broadcast_to(
            np.asarray(s22, dtype=complex), n
        )
        return cls(grid, s, z0)


@dataclass(frozen=True)
class AbcdMatrix:
    """Per-frequency 2x2 complex chain matrix."""

    grid: FrequencyGrid
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (len(self.grid), 2, 2):
            raise ValueError("ABCD array shape does not match grid")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)


def s_to_abcd(net: TwoPortNetwork) -> AbcdMatrix:
    """Convert S-parameters to a chain matrix at the network's z0.

    Singular whenever the transmission coefficient vanishes.
    """
    s11 = net.s[:, 0, 0]
    s12 = net.s[:, 0, 1]
    s21 = net.s[:, 1, 0]
    s22 = net.s[:, 1, 1]
    bad = s21 == 0
    if np.any(bad):
        f = net.grid.points[bad][0]
        raise SingularConversion(f"S21 = 0 at {f:g} Hz; conversion singular")
    z0 = net.z0
    d = 2.0 * s21
    m = np.empty_like(net.s)
    m[:, 0, 0] = ((1 + s11) * (1 - s22) + s12 * s21) / d
    m[:, 0, 1] = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / d
    m[:, 1, 0] = ((1 - s11) * (1 - s22) - s12 * s21) / (z0 * d)
    m[:, 1, 1] = ((1 - s11) * (1 + s22) + s12 * s21) / d
    return AbcdMatrix(net.grid, m)


def abcd_to_s(m: AbcdMatrix, z0: float = 50.0) -> TwoPortNetwork:
    """Convert a chain matrix back to S-parameters at z0."""
    a = m.m[:, 0, 0]
    b = m.m[:, 0, 1]
    c = m.m[:, 1, 0]
    d = m.m[:, 1, 1]
    denom = a + b / z0 + c * z0 + d
    bad = denom == 0
    if np.any(bad):
        f = m.grid.points[bad][0]
        raise SingularConversion(
            f"A + B/z0 + C*z0 + D = 0 at {f:g} Hz; conversion singular"
        )
    s = np.empty_like(m.m)
    s[:, 0, 0] = (a + b / z0 - c * z0 - d) / denom
    s[:, 0, 1] = 2.0 * (a * d - b * c) / denom
    s[:, 1, 0] = 2.0 / denom
    s[:, 1, 1] = (-a + b / z0 - c * z0 + d) / denom
    return TwoPortNetwork(m.grid, s, z0)


def cascade(nets) -> TwoPortNetwork:
    """Cascade networks left-to-right in signal-flow order.

    All operands must share the same grid and z0.
    """
    nets = list(nets)
    if not nets:
        raise ValueError("cascade of an empty list")
    first = nets[0]
    for net in nets[1:]:
        if net.grid != first.grid:
            raise GridMismatch("cascade operands on different frequency grids")
        if net.z0 != first.z0:
            raise GridMismatch("cascade operands at different z0")
    total = s_to_abcd(first).m
    for net in nets[1:]:
        total = total @ s_to_abcd(net).m
    return abcd_to_s(AbcdMatrix(first.grid, total), first.z0)


def resample(net: TwoPortNetwork, grid: FrequencyGrid) -> TwoPortNetwork:
    """Linear interpolation of Re and Im parts onto a new grid."""
    src = net.grid.points
    dst = grid.points
    if dst[0] < src[0] or dst[-1] > src[-1]:
        raise OutOfSpan(
            f"target grid [{dst[0]:g}, {dst[-1]:g}] Hz exceeds source span "
            f"[{src[0]:g}, {src[-1]:g}] Hz"
        )
    s = np.empty((len(grid), 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            s[:, i, j] = np.interp(dst, src, net.s[:, i, j].real) + 1j * np.interp(
                dst, src, net.s[:, i, j].imag
            )
    return TwoPortNetwork(grid, s, net.z0)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a passivity or reciprocity scan."""

    ok: bool
    worst: float
    violations: np.ndarray = field(default_factory=lambda: np.array([]))

    def __bool__(self):
        return self.ok


def check_passivity(net: TwoPortNetwork, tol: float = PASSIVITY_TOL) -> CheckReport:
    """Largest singular value of S must not exceed 1 + tol anywhere."""
    sv = np.linalg.svd(net.s, compute_uv=False)[:, 0]
    bad = sv > 1.0 + tol
    return CheckReport(
        ok=not np.any(bad), worst=float(sv.max()), violations=net.grid.points[bad]
    )


def check_reciprocity(net: TwoPortNetwork, tol: float = RECIPROCITY_TOL) -> CheckReport:
    """|S12 - S21| must not exceed tol anywhere."""
    diff = np.abs(net.s[:, 0, 1] - net.s[:, 1, 0])
    bad = diff > tol
    return CheckReport(
        ok=not np.any(bad), worst=float(diff.max()), violations=net.grid.points[bad]
    )


def series_impedance(grid: FrequencyGrid, z) -> AbcdMatrix:
    """Chain matrix of a series impedance (scalar or per-point)."""
    n = len(grid)
    m = np.zeros((n, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 0, 1] = np.broadcast_to(np.asarray(z, dtype=complex), n)
    return AbcdMatrix(grid, m)


def shunt_admittance(grid: FrequencyGrid, y) -> AbcdMatrix:
    """Chain matrix of a shunt admittance (scalar or per-point)."""
    n = len(grid)
    m = np.zeros((n, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 1, 0] = np.broadcast_to(np.asarray(y, dtype=complex), n)
    return AbcdMatrix(grid, m)
