"""System noise-temperature cascade for a chain of gain/loss stages.

Stage noise is expressed as an equivalent input noise temperature in
kelvin.  Passive stages derive their noise temperature from physical
temperature and loss, which keeps gain and noise consistent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, InvalidLoss
from .rfcore import FrequencyGrid


def passive_noise_temperature(loss_linear, t_phys: float):
    """Noise temperature (L - 1) * T_phys of a matched passive loss.

    loss_linear is the linear power loss (>= 1); the paired stage gain
    is 1 / loss_linear.
    """
    loss = np.asarray(loss_linear, dtype=float)
    if np.any(loss < 1.0):
        raise InvalidLoss(f"loss {loss_linear} < 1 is gain, not loss")
    if t_phys < 0:
        raise InvalidLoss(f"physical temperature {t_phys} K < 0")
    result = (loss - 1.0) * t_phys
    return float(result) if result.ndim == 0 else result


def noise_figure_db(t_noise_k, t_ref: float = 290.0):
    """Reporting helper: NF(dB) = 10 log10(1 + T / 290 K)."""
    return 10.0 * np.log10(1.0 + np.asarray(t_noise_k, dtype=float) / t_ref)


@dataclass(frozen=True)
class StageSpec:
    """One chain element: per-frequency linear power gain plus noise.

    Exactly one of noise_temperature / physical_temperature is given.
    For a passive stage (physical_temperature), gain must be <= 1 and
    the noise temperature is derived as (1/G - 1) * T_phys.
    """

    label: str
    gain: np.ndarray
    noise_temperature: np.ndarray | None = None
    physical_temperature: float | None = None

    def __post_init__(self):
        gain = np.atleast_1d(np.asarray(self.gain, dtype=float))
        object.__setattr__(self, "gain", gain)
        if np.any(gain <= 0):
            raise ValueError(f"stage '{self.label}': gain must be > 0")
        given = (self.noise_temperature is not None) + (
            self.physical_temperature is not None
        )
        if given != 1:
            raise ValueError(
                f"stage '{self.label}': exactly one of noise_temperature / "
                f"physical_temperature must be provided"
            )
        if self.noise_temperature is not None:
            nt = np.atleast_1d(np.asarray(self.noise_temperature, dtype=float))
            if np.any(nt < 0):
                raise ValueError(f"stage '{self.label}': noise temperature < 0")
            object.__setattr__(self, "noise_temperature", nt)
        else:
            if np.any(gain > 1.0):
                raise ValueError(
                    f"stage '{self.label}': passive stage must have gain <= 1"
                )

    def noise_temperature_at(self, n_points: int) -> np.ndarray:
        """Per-frequency noise temperature broadcast to n_points."""
        if self.noise_temperature is not None:
            nt = self.noise_temperature
        else:
            nt = passive_noise_temperature(1.0 / self.gain, self.physical_temperature)
            nt = np.atleast_1d(nt)
        return np.broadcast_to(nt, n_points)

    def gain_at(self, n_points: int) -> np.ndarray:
        return np.broadcast_to(self.gain, n_points)

    @classmethod
    def attenuator(cls, label: str, loss_db: float, t_phys: float):
        """Matched attenuator at a physical temperature."""
        gain = 10.0 ** (-abs(loss_db) / 10.0)
        return cls(label, gain=np.array([gain]), physical_temperature=t_phys)


@dataclass(frozen=True)
class SystemNoiseResult:
    """Friis cascade output: total and per-stage input-referred kelvin."""

    grid: FrequencyGrid
    t_sys: np.ndarray
    per_stage_contribution: dict

    def write_csv(self, path) -> None:
        labels = list(self.per_stage_contribution)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_hz", "t_sys_k"] + [f"{l}_k" for l in labels])
            for i, f in enumerate(self.grid.points):
                row = [f"{f:.9e}", f"{self.t_sys[i]:.9e}"]
                row += [f"{self.per_stage_contribution[l][i]:.9e}" for l in labels]
                writer.writerow(row)


def friis_cascade(stages, grid: FrequencyGrid) -> SystemNoiseResult:
    """Input-referred system noise temperature of an ordered chain.

    T_sys(f) = T1 + T2/G1 + T3/(G1 G2) + ...
    """
    stages = list(stages)
    if not stages:
        raise GridMismatch("friis_cascade needs at least one stage")
    n = len(grid)
    for st in stages:
        if st.gain.size not in (1, n):
            raise GridMismatch(
                f"stage '{st.label}' has {st.gain.size} gain points, grid has {n}"
            )
        if st.noise_temperature is not None and st.noise_temperature.size not in (1, n):
            raise GridMismatch(
                f"stage '{st.label}' noise profile does not match the grid"
            )
    contributions = {}
    running_gain = np.ones(n)
    t_sys = np.zeros(n)
    for st in stages:
        contrib = st.noise_temperature_at(n) / running_gain
        contributions[st.label] = contrib
        t_sys = t_sys + contrib
        running_gain = running_gain * st.gain_at(n)
    return SystemNoiseResult(grid, t_sys, contributions)
