"""Declarative assembly configuration: parsing, validation, normal form.

The file format is YAML with every physical quantity written as a
unit-tagged string ("559 MHz", "4 K"); bare numbers on physical fields
are rejected.  validate() resolves synthesis targets into concrete
matching networks and emits a deterministic normal form.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .components import (
    LnaSpec,
    MatchNetSpec,
    Profile,
    SwitchSpec,
    isolation_rolloff,
    synthesize_match,
)
from .errors import ConfigError
from .rfcore import FrequencyGrid
from .seb import SebParams, seb_baseline_admittance
from .units import format_quantity, parse_quantity

AUTO = "auto"


@dataclass(frozen=True)
class SebPath:
    """One readout path: switch channel, box parameters, matching network."""

    channel: int
    params: SebParams
    f_target: float
    mn: MatchNetSpec | None
    drive_coupling: float = 100e-18
    device_resistance: float = 150e3
    vg_baseline: float = 0.440


@dataclass(frozen=True)
class AssemblyConfig:
    """Complete chain description binding all component models."""

    z0: float
    grid: FrequencyGrid
    attenuators: tuple
    switch: SwitchSpec
    lna: LnaSpec
    seb_paths: tuple
    tones: tuple
    demod_bandwidth: float
    sample_rate: float
    drive_amplitude: object = AUTO
    snr_target: float = 140.0
    snr_target_tau: float = 10e-6
    cross_coupling_db: float = -16.0
    seed: int = 42
    warnings: tuple = field(default_factory=tuple)
    source: str = "<builtin>"

    def path_for_channel(self, channel: int) -> SebPath | None:
        for p in self.seb_paths:
            if p.channel == channel:
                return p
        return None

    def path_by_index(self, i: int) -> SebPath:
        from .errors import BadSebIndex

        for p in self.seb_paths:
            if p.params.label == i:
                return p
        raise BadSebIndex(f"no SEB with index {i} in the configuration")


def _q(raw, key, dimension, errors, default=None):
    if key not in raw:
        if default is not None:
            return default
        errors.append(f"{key}: missing required quantity ({dimension})")
        return None
    try:
        return parse_quantity(raw[key], dimension, field=key)
    except ConfigError as exc:
        errors.extend(exc.diagnostics)
        return None


def _build_switch(raw, grid, errors):
    il = _q(raw, "insertion_loss", "decibel", errors, default=1.1)
    rl = _q(raw, "return_loss", "decibel", errors, default=10.0)
    t_phys = _q(raw, "t_phys", "temperature", errors, default=4.0)
    iso_raw = raw.get("isolation", {"model": "flat", "value": "35 dB"})
    if isinstance(iso_raw, str):
        iso_raw = {"model": "flat", "value": iso_raw}
    model = iso_raw.get("model", "flat")
    if model == "flat":
        isolation = _q(iso_raw, "value", "decibel", errors, default=35.0)
        desc = ("flat", isolation)
    elif model == "capacitive":
        ref_db = _q(iso_raw, "value", "decibel", errors, default=35.0)
        f_ref = _q(iso_raw, "f_ref", "frequency", errors, default=2e9)
        isolation = isolation_rolloff(ref_db, f_ref, grid)
        desc = ("capacitive", ref_db, f_ref)
    elif model == "profile_csv":
        isolation = Profile.from_csv(iso_raw["path"])
        desc = ("profile_csv", str(iso_raw["path"]))
    else:
        errors.append(f"switch.isolation.model: unknown model {model!r}")
        isolation = 35.0
        desc = ("flat", 35.0)
    return SwitchSpec(
        n_channels=int(raw.get("n_channels", 8)),
        il_db=il,
        isolation_db=isolation,
        return_loss_db=rl,
        t_phys=t_phys,
        isolation_desc=desc,
    )


def _build_lna(raw, errors):
    return LnaSpec(
        peak_gain_db=_q(raw, "peak_gain", "decibel", errors, default=35.5),
        f_center=_q(raw, "f_center", "frequency", errors, default=780e6),
        f_low_3db=_q(raw, "f_low_3db", "frequency", errors, default=709e6),
        f_high_3db=_q(raw, "f_high_3db", "frequency", errors, default=827e6),
        nt_min_k=_q(raw, "nt_min", "temperature", errors, default=4.2),
        f_nt_min=_q(raw, "f_nt_min", "frequency", errors, default=650e6),
        nt_avg_k=_q(raw, "nt_avg", "temperature", errors, default=6.2),
        in_band_return_loss_db=_q(raw, "return_loss", "decibel", errors, default=10.0),
    )


def _build_path(raw, index, z0, errors):
    prefix = f"seb_paths[{index}]"
    try:
        channel = int(raw["channel"])
    except (KeyError, TypeError, ValueError):
        errors.append(f"{prefix}.channel: missing or non-integer")
        channel = index
    alpha = raw.get("alpha", 0.5)
    if isinstance(alpha, str):
        errors.append(f"{prefix}.alpha: dimensionless, give a plain number")
        alpha = 0.5
    gamma_hz = _q(raw, "tunnel_rate", "frequency", errors, default=5e9)
    params = SebParams(
        alpha=float(alpha),
        v0=_q(raw, "v0", "voltage", errors, default=0.450),
        t_e=_q(raw, "t_e", "temperature", errors, default=0.360),
        gamma=2.0 * np.pi * gamma_hz,
        c_geom=_q(raw, "c_geom", "capacitance", errors, default=50e-18),
        label=int(raw.get("seb_index", index)),
    )
    drive_coupling = _q(raw, "drive_coupling", "capacitance", errors, default=100e-18)
    device_resistance = _q(raw, "device_resistance", "resistance", errors, default=150e3)
    f_target = _q(raw, "f_target", "frequency", errors)
    mn = None
    if "matchnet" in raw:
        mraw = raw["matchnet"]
        mn = MatchNetSpec(
            c=_q(mraw, "c", "capacitance", errors),
            l=_q(mraw, "l", "inductance", errors),
            z0=z0,
        )
    return SebPath(
        channel=channel,
        params=params,
        f_target=f_target if f_target is not None else 0.0,
        mn=mn,
        drive_coupling=drive_coupling,
        device_resistance=device_resistance,
        vg_baseline=_q(raw, "vg_baseline", "voltage", errors, default=0.440),
    )


def build_config(raw: dict, source: str = "<dict>") -> AssemblyConfig:
    """Parse a raw mapping into a validated AssemblyConfig.

    Collects per-field diagnostics and raises a single ConfigError
    listing all of them.
    """
    errors: list[str] = []
    warnings: list[str] = []
    z0 = _q(raw, "z0", "resistance", errors, default=50.0)
    graw = raw.get("grid", {})
    start = _q(graw, "start", "frequency", errors, default=400e6)
    stop = _q(graw, "stop", "frequency", errors, default=900e6)
    points = int(graw.get("points", 2001))
    grid = None
    if start is not None and stop is not None:
        if start >= stop:
            errors.append("grid: start must be below stop")
        else:
            grid = FrequencyGrid.linear(start, stop, points)

    attenuators = []
    for i, araw in enumerate(raw.get("attenuators", [])):
        loss = _q(araw, "loss", "decibel", errors)
        t_phys = _q(araw, "t_phys", "temperature", errors)
        if loss is not None and t_phys is not None:
            attenuators.append((loss, t_phys))

    switch = None
    lna = None
    if grid is not None:
        try:
            switch = _build_switch(raw.get("switch", {}), grid, errors)
        except (ValueError, ConfigError) as exc:
            errors.append(f"switch: {exc}")
        try:
            lna = _build_lna(raw.get("lna", {}), errors)
        except (ValueError, ConfigError) as exc:
            errors.append(f"lna: {exc}")

    paths = []
    for i, praw in enumerate(raw.get("seb_paths", [])):
        paths.append(_build_path(praw, i, z0 if z0 else 50.0, errors))
    if not paths:
        errors.append("seb_paths: at least one SEB path is required")
    channels = [p.channel for p in paths]
    if len(set(channels)) != len(channels):
        errors.append(f"seb_paths: channels {channels} are not distinct")
    if switch is not None:
        for p in paths:
            if not (0 <= p.channel < switch.n_channels):
                errors.append(
                    f"seb_paths: channel {p.channel} outside "
                    f"[0, {switch.n_channels})"
                )

    tones = []
    for i, t in enumerate(raw.get("tones", [])):
        try:
            tones.append(parse_quantity(t, "frequency", field=f"tones[{i}]"))
        except ConfigError as exc:
            errors.extend(exc.diagnostics)

    demod_bw = _q(raw, "demod_bandwidth", "frequency", errors, default=3e6)
    fs = _q(raw, "sample_rate", "frequency", errors, default=1e6)
    drive = raw.get("drive_amplitude", AUTO)
    if drive != AUTO:
        try:
            drive = parse_quantity(drive, "voltage", field="drive_amplitude")
        except ConfigError as exc:
            errors.extend(exc.diagnostics)
            drive = AUTO
    cross = _q(raw, "cross_coupling", "decibel", errors, default=-16.0)
    snr_target = float(raw.get("snr_target", 140.0))
    snr_tau = _q(raw, "snr_target_tau", "time", errors, default=10e-6)
    seed = int(raw.get("seed", 42))

    if errors:
        raise ConfigError(errors)

    # expand synthesis targets into concrete matching networks
    resolved = []
    for p in paths:
        mn = p.mn
        if mn is None:
            if p.f_target <= 0:
                raise ConfigError(
                    [f"seb_paths channel {p.channel}: need matchnet or f_target"]
                )
            y_dev = seb_baseline_admittance(
                p.f_target,
                p.params,
                drive_coupling=p.drive_coupling,
                device_resistance=p.device_resistance,
                z0=z0,
            )
            mn = synthesize_match(p.f_target, z0, 1.0 / y_dev)
        resolved.append(replace(p, mn=mn))

    f_targets = [p.f_target for p in resolved]
    for t in tones:
        if not any(abs(t - ft) < 1e3 for ft in f_targets):
            warnings.append(
                f"tone {t:g} Hz does not match any path resonance {f_targets}"
            )
    if lna is not None:
        for t in tones:
            if not (lna.f_low_3db <= t <= lna.f_high_3db):
                warnings.append(f"tone {t:g} Hz is outside the LNA 3 dB band")

    return AssemblyConfig(
        z0=z0,
        grid=grid,
        attenuators=tuple(attenuators),
        switch=switch,
        lna=lna,
        seb_paths=tuple(resolved),
        tones=tuple(tones),
        demod_bandwidth=demod_bw,
        sample_rate=fs,
        drive_amplitude=drive,
        snr_target=snr_target,
        snr_target_tau=snr_tau,
        cross_coupling_db=cross,
        seed=seed,
        warnings=tuple(warnings),
        source=source,
    )


def load_config(path) -> AssemblyConfig:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    return build_config(raw, source=str(path))


def default_config() -> AssemblyConfig:
    """The shipped two-SEB assembly scenario."""
    ref = importlib.resources.files("cryomux.data").joinpath("assembly.yaml")
    raw = yaml.safe_load(ref.read_text())
    return build_config(raw, source="builtin:assembly.yaml")


def _isolation_doc(switch: SwitchSpec) -> dict:
    desc = switch.isolation_desc
    if desc is None:
        desc = ("flat", float(switch.isolation_db))
    if desc[0] == "flat":
        return {"model": "flat", "value": format_quantity(desc[1], "decibel")}
    if desc[0] == "capacitive":
        return {
            "model": "capacitive",
            "value": format_quantity(desc[1], "decibel"),
            "f_ref": format_quantity(desc[2], "frequency"),
        }
    return {"model": "profile_csv", "path": desc[1]}


def validate(cfg: AssemblyConfig) -> AssemblyConfig:
    """Re-validate an already-built config; idempotent by construction."""
    return build_config(yaml.safe_load(to_normal_form(cfg)), source=cfg.source)


def to_normal_form(cfg: AssemblyConfig) -> str:
    """Deterministic canonical text of a validated config (SI units)."""
    fq = format_quantity
    doc = {
        "z0": fq(cfg.z0, "resistance"),
        "grid": {
            "start": fq(cfg.grid.points[0], "frequency"),
            "stop": fq(cfg.grid.points[-1], "frequency"),
            "points": len(cfg.grid),
        },
        "attenuators": [
            {"loss": fq(l, "decibel"), "t_phys": fq(t, "temperature")}
            for l, t in cfg.attenuators
        ],
        "switch": {
            "n_channels": cfg.switch.n_channels,
            "insertion_loss": fq(float(cfg.switch.il_db), "decibel"),
            "isolation": _isolation_doc(cfg.switch),
            "return_loss": fq(cfg.switch.return_loss_db, "decibel"),
            "t_phys": fq(cfg.switch.t_phys, "temperature"),
        },
        "lna": {
            "peak_gain": fq(cfg.lna.peak_gain_db, "decibel"),
            "f_center": fq(cfg.lna.f_center, "frequency"),
            "f_low_3db": fq(cfg.lna.f_low_3db, "frequency"),
            "f_high_3db": fq(cfg.lna.f_high_3db, "frequency"),
            "nt_min": fq(cfg.lna.nt_min_k, "temperature"),
            "f_nt_min": fq(cfg.lna.f_nt_min, "frequency"),
            "nt_avg": fq(cfg.lna.nt_avg_k, "temperature"),
            "return_loss": fq(cfg.lna.in_band_return_loss_db, "decibel"),
        },
        "seb_paths": [
            {
                "channel": p.channel,
                "seb_index": p.params.label,
                "alpha": p.params.alpha,
                "v0": fq(p.params.v0, "voltage"),
                "t_e": fq(p.params.t_e, "temperature"),
                "tunnel_rate": fq(p.params.gamma / (2.0 * np.pi), "frequency"),
                "c_geom": fq(p.params.c_geom, "capacitance"),
                "drive_coupling": fq(p.drive_coupling, "capacitance"),
                "device_resistance": fq(p.device_resistance, "resistance"),
                "vg_baseline": fq(p.vg_baseline, "voltage"),
                "f_target": fq(p.f_target, "frequency"),
                "matchnet": {
                    "c": fq(p.mn.c, "capacitance"),
                    "l": fq(p.mn.l, "inductance"),
                },
            }
            for p in cfg.seb_paths
        ],
        "tones": [fq(t, "frequency") for t in cfg.tones],
        "demod_bandwidth": fq(cfg.demod_bandwidth, "frequency"),
        "sample_rate": fq(cfg.sample_rate, "frequency"),
        "drive_amplitude": cfg.drive_amplitude
        if cfg.drive_amplitude == AUTO
        else fq(cfg.drive_amplitude, "voltage"),
        "snr_target": cfg.snr_target,
        "snr_target_tau": fq(cfg.snr_target_tau, "time"),
        "cross_coupling": fq(cfg.cross_coupling_db, "decibel"),
        "seed": cfg.seed,
    }
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=False)
