"""Deterministic simulator and analysis toolkit for a cryogenic
multiplexed RF readout chain: two-port algebra, noise cascade,
component models, single-electron-box charge sensing, time-division
multiplexing and SNR benchmarking."""

__version__ = "0.1.0"

from .rfcore import (  # noqa: F401
    AbcdMatrix,
    FrequencyGrid,
    TwoPortNetwork,
    abcd_to_s,
    cascade,
    check_passivity,
    check_reciprocity,
    resample,
    s_to_abcd,
)
