"""Touchstone v1 .s2p export/import (RI format, frequency in Hz)."""

from __future__ import annotations

import numpy as np

from .errors import CryomuxError
from .rfcore import FrequencyGrid, TwoPortNetwork

_UNIT_SCALE = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}


def write_s2p(net: TwoPortNetwork, path) -> None:
    """Write a two-port as Touchstone v1: '# HZ S RI R <z0>'.

    Data column order per the v1 convention: S11 S21 S12 S22.
    """
    with open(path, "w") as fh:
        fh.write("! cryomux two-port export\n")
        fh.write(f"# HZ S RI R {net.z0:g}\n")
        for f, s in zip(net.grid.points, net.s):
            row = [
                s[0, 0], s[1, 0], s[0, 1], s[1, 1],
            ]
            cols = " ".join(f"{v.real:.12e} {v.imag:.12e}" for v in row)
            fh.write(f"{f:.12e} {cols}\n")


def read_s2p(path) -> TwoPortNetwork:
    """Read a Touchstone v1 two-port file (RI format only)."""
    z0 = 50.0
    scale = 1.0
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("#"):
                tokens = line[1:].upper().split()
                if "S" not in tokens:
                    raise CryomuxError(f"{path}: only S-parameter files supported")
                if "RI" not in tokens:
                    raise CryomuxError(f"{path}: only RI format supported")
                unit = next((t for t in tokens if t in _UNIT_SCALE), "GHZ")
                scale = _UNIT_SCALE[unit]
                if "R" in tokens:
                    z0 = float(tokens[tokens.index("R") + 1])
                continue
            values = [float(t) for t in line.split()]
            if len(values) != 9:
                raise CryomuxError(
                    f"{path}: expected 9 columns per data line, got {len(values)}"
                )
            rows.append(values)
    if len(rows) < 2:
        raise CryomuxError(f"{path}: fewer than 2 frequency points")
    data = np.asarray(rows)
    grid = FrequencyGrid(data[:, 0] * scale)
    s = np.empty((len(grid), 2, 2), dtype=complex)
    s[:, 0, 0] = data[:, 1] + 1j * data[:, 2]
    s[:, 1, 0] = data[:, 3] + 1j * data[:, 4]
    s[:, 0, 1] = data[:, 5] + 1j * data[:, 6]
    s[:, 1, 1] = data[:, 7] + 1j * data[:, 8]
    return TwoPortNetwork(grid, s, z0)
