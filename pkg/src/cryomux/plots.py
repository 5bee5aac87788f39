"""Matplotlib rendering of the report outputs.

Figures are written next to the delimited data files; the CSV remains
the primary artifact and every figure is derived from the same arrays.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_sweep(path, f_hz, curves, ylabel="dB", title=None, marks_hz=()):
    """One panel of per-frequency curves; curves maps label -> array."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    for label, values in curves.items():
        ax.plot(f_hz / 1e6, values, label=label, lw=1.2)
    for fm in marks_hz:
        ax.axvline(fm / 1e6, color="0.6", ls="--", lw=0.8)
    ax.set_xlabel("frequency (MHz)")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_lineshape(path, vg, z, title=None):
    """I/Q components and magnitude of a gate-voltage sweep."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    ax.plot(vg * 1e3, z.real, label="I", lw=1.2)
    ax.plot(vg * 1e3, z.imag, label="Q", lw=1.2)
    ax.plot(vg * 1e3, np.abs(z), label="|signal|", lw=1.0, ls="--", color="0.4")
    ax.set_xlabel("gate voltage (mV)")
    ax.set_ylabel("demodulated signal (V)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tdma(path, schedule, traces):
    """Gate waveforms (top panels) and demodulated magnitude per tone."""
    n_panels = 2 + len(traces)
    fig, axes = plt.subplots(
        n_panels, 1, figsize=(7.0, 1.9 * n_panels), sharex=True
    )
    t_lo, t_hi = schedule.span
    t = np.linspace(t_lo, t_hi, 4000)
    from .tdma import schedule_state

    _, vg0, vg1 = schedule_state(schedule, t)
    axes[0].plot(t * 1e3, vg0 * 1e3, lw=1.0)
    axes[0].set_ylabel("gate 0 (mV)")
    axes[1].plot(t * 1e3, vg1 * 1e3, lw=1.0)
    axes[1].set_ylabel("gate 1 (mV)")
    for ax, trace in zip(axes[2:], traces):
        tt = trace.times()
        ax.plot(tt * 1e3, np.abs(trace.samples), lw=0.5)
        ax.set_ylabel(f"|{trace.tone_frequency / 1e6:.0f} MHz| (V)")
    axes[-1].set_xlabel("time (ms)")
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_iq_blocks(path, top_blocks, bottom_blocks, title=None):
    """Scatter of integrated block means in the IQ plane."""
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    ax.plot(top_blocks.real, top_blocks.imag, ".", ms=2, alpha=0.5, label="top")
    ax.plot(
        bottom_blocks.real, bottom_blocks.imag, ".", ms=2, alpha=0.5, label="bottom"
    )
    ax.set_xlabel("I (V)")
    ax.set_ylabel("Q (V)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
