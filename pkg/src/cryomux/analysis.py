"""Post-processing: SNR estimation, integration-time scaling, resonance
extraction and the documented readout-fidelity model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks
from scipy.special import erfc

from .errors import NoResonanceFound, WindowOverlap, WindowTooShort

MIN_BLOCKS = 10

FIDELITY_MODEL = (
    "symmetric two-Gaussian model with midpoint threshold: "
    "error per shot = 0.5 * erfc(sqrt(SNR) / (2 sqrt(2))); "
    "assumes equal-variance Gaussian IQ distributions and a single shot "
    "at the stated integration time"
)


@dataclass(frozen=True)
class SnrReport:
    """Power SNR at integration time tau, with the SNR=1 extrapolation."""

    snr_power: float
    tau: float
    signal_sq: float
    noise_sq: float
    t_min: float
    noiseless: bool = False

    def lines(self):
        yield f"tau_s: {self.tau:.9e}"
        yield f"signal_sq_v2: {self.signal_sq:.9e}"
        yield f"noise_sq_v2: {self.noise_sq:.9e}"
        yield f"snr_power: {self.snr_power:.6g}"
        yield f"t_min_s: {self.t_min:.9e}"
        if self.noiseless:
            yield "flag: noiseless input, SNR reported as +inf"


def _block_means(samples: np.ndarray, n: int) -> np.ndarray:
    usable = (samples.size // n) * n
    return samples[:usable].reshape(-1, n).mean(axis=1)


def estimate_snr(trace, top_window, bottom_window, tau: float) -> SnrReport:
    """Power SNR between two voltage levels of an IQ trace.

    Boxcar-averages the complex trace in blocks of tau inside each
    window; signal is the squared separation of the window means, noise
    the squared average standard deviation of the block means projected
    on the line joining the two states.
    """
    t0_top, t1_top = float(top_window[0]), float(top_window[1])
    t0_bot, t1_bot = float(bottom_window[0]), float(bottom_window[1])
    if max(t0_top, t0_bot) < min(t1_top, t1_bot):
        raise WindowOverlap(
            f"windows [{t0_top}, {t1_top}] and [{t0_bot}, {t1_bot}] overlap"
        )
    fs = trace.sample_rate
    n = int(round(tau * fs))
    if n < 1:
        raise WindowTooShort(
            f"integration time {tau:g} s is shorter than one sample at {fs:g} S/s"
        )
    t = trace.times()
    blocks = {}
    for name, (w0, w1) in (("top", (t0_top, t1_top)), ("bottom", (t0_bot, t1_bot))):
        sel = trace.samples[(t >= w0) & (t < w1)]
        means = _block_means(sel, n)
        if means.size < MIN_BLOCKS:
            raise WindowTooShort(
                f"{name} window holds {means.size} integration periods; "
                f"need >= {MIN_BLOCKS}"
            )
        blocks[name] = means
    d = blocks["top"].mean() - blocks["bottom"].mean()
    signal_sq = float(abs(d) ** 2)
    if d == 0:
        raise WindowTooShort("windows have identical means; no signal axis")
    u = d / abs(d)
    sds = [
        float(np.std((blocks[k] * np.conj(u)).real, ddof=1)) for k in ("top", "bottom")
    ]
    noise_sq = ((sds[0] + sds[1]) / 2.0) ** 2
    # block means of identical samples still differ at the ulp level, so
    # "no noise" means indistinguishable from rounding, not exactly zero
    if noise_sq <= signal_sq * 1e-24:
        return SnrReport(math.inf, tau, signal_sq, 0.0, 0.0, noiseless=True)
    snr = signal_sq / noise_sq
    return SnrReport(snr, tau, signal_sq, noise_sq, tau / snr)


def snr_scaling(snr_at_tau: float, tau: float, tau_new: float) -> float:
    """White-noise scaling: power SNR is linear in integration time."""
    if snr_at_tau <= 0 or tau <= 0 or tau_new <= 0:
        raise ValueError("snr and integration times must be positive")
    return snr_at_tau * (tau_new / tau)


@dataclass(frozen=True)
class Resonance:
    f_hz: float
    depth_db: float
    bandwidth_3db_hz: float


def extract_resonances(sweep, i=2, j=1, prominence_db: float = 3.0):
    """Dips of |S_ij| with parabolic sub-bin refinement.

    Returns resonances sorted by frequency; each carries its prominence
    (depth_db) and the width 3 dB above the dip floor.
    """
    f = sweep.grid.points
    mag = np.abs(sweep.s[:, i - 1, j - 1])
    db = 20.0 * np.log10(np.maximum(mag, 1e-300))
    idx, props = find_peaks(-db, prominence=prominence_db)
    if idx.size == 0:
        raise NoResonanceFound(
            f"no dip with prominence >= {prominence_db} dB in the sweep"
        )
    out = []
    for n, k in enumerate(idx):
        f_res = f[k]
        if 0 < k < f.size - 1:
            y0, y1, y2 = db[k - 1], db[k], db[k + 1]
            denom = y0 - 2.0 * y1 + y2
            if denom > 0:
                delta = 0.5 * (y0 - y2) / denom
                f_res = f[k] + delta * (f[k + 1] - f[k])
        floor = db[k]
        target = floor + 3.0
        lo = f[0]
        for m in range(k, 0, -1):
            if db[m - 1] >= target:
                lo = np.interp(target, [db[m], db[m - 1]], [f[m], f[m - 1]])
                break
        hi = f[-1]
        for m in range(k, f.size - 1):
            if db[m + 1] >= target:
                hi = np.interp(target, [db[m], db[m + 1]], [f[m], f[m + 1]])
                break
        out.append(
            Resonance(
                f_hz=float(f_res),
                depth_db=float(props["prominences"][n]),
                bandwidth_3db_hz=float(hi - lo),
            )
        )
    return sorted(out, key=lambda r: r.f_hz)


def readout_fidelity(snr_power: float) -> float:
    """Single-shot fidelity under the two-Gaussian threshold model.

    See FIDELITY_MODEL for the assumptions; every report quoting this
    number must carry that tag.
    """
    if snr_power < 0:
        raise ValueError("SNR must be >= 0")
    if math.isinf(snr_power):
        return 1.0
    return 1.0 - 0.5 * float(erfc(math.sqrt(snr_power) / (2.0 * math.sqrt(2.0))))
