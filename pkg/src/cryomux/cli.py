"""Command-line front end.

Every run writes its data files plus a run manifest into the output
directory; `--plot` additionally renders matplotlib figures next to the
delimited output.  Exit status: 0 success, 1 domain error, 2 usage
error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__, analysis, assembly, benchmark
from .config import default_config, load_config, to_normal_form
from .errors import BadSebIndex, ConfigError, CryomuxError
from .fitting import fit_electron_temperature
from .seb import seb_transmission
from .tdma import load_schedule, simulate
from .touchstone import write_s2p
from .units import parse_quantity

ENV_CONFIG_DIR = "CRYOMUX_CONFIG_DIR"


def _load_cfg(args):
    if args.config is None:
        return default_config()
    path = Path(args.config)
    if not path.exists():
        env_dir = os.environ.get(ENV_CONFIG_DIR)
        if env_dir and not path.is_absolute():
            candidate = Path(env_dir) / path
            if candidate.exists():
                path = candidate
    return load_config(path)


def _quantity_arg(text, dimension):
    """CLI quantities: unit-tagged string, or a bare number in SI units."""
    try:
        return float(text)
    except ValueError:
        return parse_quantity(text, dimension)


class Manifest:
    """Records command, inputs and every output file; written even on failure."""

    def __init__(self, out_dir: Path, command: str, config_path, seed):
        self.out_dir = out_dir
        self.data = {
            "command": command,
            "config": str(config_path) if config_path else "<builtin>",
            "seed": seed,
            "tool_version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "status": "failed",
            "outputs": [],
        }

    def add(self, path) -> Path:
        self.data["outputs"].append(str(path))
        return Path(path)

    def write(self, status: str):
        self.data["status"] = status
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(self.data, fh, indent=2)
            fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_sweep(args, manifest):
    cfg = _load_cfg(args)
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.grid
    f = grid.points
    if args.what == "lna":
        from .components import lna_two_port

        net, stage = lna_two_port(cfg.lna, grid, cfg.z0)
        gain = cfg.lna.gain_db(f)
        nt = cfg.lna.noise_temperature_k(f)
        _write_csv(
            manifest.add(out / "sweep_lna.csv"),
            ["frequency_hz", "gain_db", "nt_k"],
            zip(f, gain, nt),
        )
        write_s2p(net, manifest.add(out / "sweep_lna.s2p"))
        if args.plot:
            from . import plots

            plots.save_sweep(
                manifest.add(out / "sweep_lna.png"),
                f,
                {"gain (dB)": gain, "NT (K)": nt},
                ylabel="dB / K",
                title="LNA gain and noise temperature",
            )
    elif args.what == "switch":
        from .components import switch_two_port

        net, _ = switch_two_port(cfg.switch, 0, 0, grid, cfg.z0)
        il = cfg.switch.il_at(f)
        iso = cfg.switch.isolation_at(f)
        from .noise import passive_noise_temperature

        nt = passive_noise_temperature(10.0 ** (il / 10.0), cfg.switch.t_phys)
        _write_csv(
            manifest.add(out / "sweep_switch.csv"),
            ["frequency_hz", "insertion_loss_db", "isolation_db", "nt_k"],
            zip(f, np.broadcast_to(il, f.shape), iso, np.broadcast_to(nt, f.shape)),
        )
        write_s2p(net, manifest.add(out / "sweep_switch.s2p"))
        if args.plot:
            from . import plots

            plots.save_sweep(
                manifest.add(out / "sweep_switch.png"),
                f,
                {"insertion loss (dB)": il, "isolation (dB)": iso},
                title="SP8T switch",
            )
    elif args.what == "assembly-s12":
        net = assembly.reflectometry_trace(cfg, grid)
        db = net.s_db(2, 1)
        _write_csv(
            manifest.add(out / "sweep_assembly_s12.csv"),
            ["frequency_hz", "s12_db", "s12_re", "s12_im"],
            zip(f, db, net.s[:, 1, 0].real, net.s[:, 1, 0].imag),
        )
        write_s2p(net, manifest.add(out / "sweep_assembly_s12.s2p"))
        resonances = analysis.extract_resonances(net)
        _write_csv(
            manifest.add(out / "resonances.csv"),
            ["f_hz", "depth_db", "bw_hz"],
            [(r.f_hz, r.depth_db, r.bandwidth_3db_hz) for r in resonances],
        )
        if args.plot:
            from . import plots

            plots.save_sweep(
                manifest.add(out / "sweep_assembly_s12.png"),
                f,
                {"|S12| (dB)": db},
                title="Assembly reflectometry",
                marks_hz=[r.f_hz for r in resonances],
            )
    else:  # assembly-s13
        mux = args.mux
        net = assembly.transmission_sweep(cfg, mux, grid)
        db = net.s_db(2, 1)
        name = f"sweep_assembly_s13_mux{mux}"
        _write_csv(
            manifest.add(out / f"{name}.csv"),
            ["frequency_hz", "s13_db", "s13_re", "s13_im"],
            zip(f, db, net.s[:, 1, 0].real, net.s[:, 1, 0].imag),
        )
        write_s2p(net, manifest.add(out / f"{name}.s2p"))
        if args.plot:
            from . import plots

            plots.save_sweep(
                manifest.add(out / f"{name}.png"),
                f,
                {f"|S13| MUX:{mux} (dB)": db},
                title="Assembly transmission",
            )
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_lineshape(args, manifest):
    cfg = assembly.resolve_drive_amplitude(_load_cfg(args))
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    indices = (
        [args.seb]
        if args.seb is not None
        else sorted(p.params.label for p in cfg.seb_paths)
    )
    for i in indices:
        path = cfg.path_by_index(i)
        v0 = path.params.v0
        vg_start = (
            _quantity_arg(args.vg_start, "voltage")
            if args.vg_start
            else v0 - 1.5e-3
        )
        vg_stop = (
            _quantity_arg(args.vg_stop, "voltage") if args.vg_stop else v0 + 1.5e-3
        )
        vg = np.linspace(vg_start, vg_stop, args.points)
        z = cfg.drive_amplitude * seb_transmission(
            vg,
            path.f_target,
            path.params,
            path.mn,
            drive_coupling=path.drive_coupling,
            device_resistance=path.device_resistance,
            z0=cfg.z0,
        )
        name = f"lineshape_seb{i}"
        _write_csv(
            manifest.add(out / f"{name}.csv"),
            ["vg_volts", "i_signal", "q_signal"],
            zip(vg, z.real, z.imag),
        )
        if args.plot:
            from . import plots

            plots.save_lineshape(
                manifest.add(out / f"{name}.png"),
                vg,
                z,
                title=f"SEB {i} at {path.f_target / 1e6:.0f} MHz",
            )
    return 0


def cmd_tdma(args, manifest):
    cfg = assembly.resolve_drive_amplitude(_load_cfg(args))
    schedule = load_schedule(args.schedule)
    noise = args.noise == "on"
    seed = args.seed if args.seed is not None else cfg.seed
    manifest.data["seed"] = seed
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    traces = simulate(schedule, cfg.tones, cfg, noise=noise, seed=seed)
    for trace in traces:
        name = f"trace_tone_{trace.tone_frequency / 1e6:.3f}MHz.csv"
        trace.write_csv(manifest.add(out / name))
    if args.plot:
        from . import plots

        plots.save_tdma(manifest.add(out / "tdma_traces.png"), schedule, traces)
    return 0


def cmd_snr(args, manifest):
    cfg = _load_cfg(args)
    tau = _quantity_arg(args.tau, "time")
    seed = args.seed if args.seed is not None else cfg.seed
    manifest.data["seed"] = seed
    result = benchmark.run_snr_benchmark(cfg, tau, seed=seed)
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report_path = manifest.add(out / "snr_report.txt")
    with open(report_path, "w") as fh:
        fh.write(f"tone_hz: {result.tone_frequency:.9e}\n")
        fh.write(f"drive_amplitude_v: {result.drive_amplitude:.9e}\n")
        for line in result.report.lines():
            fh.write(line + "\n")
        fh.write(f"fidelity: {result.fidelity:.6f}\n")
        fh.write(f"fidelity_model: {analysis.FIDELITY_MODEL}\n")
    _write_csv(
        manifest.add(out / "snr_blocks.csv"),
        ["window", "i_volts", "q_volts"],
        [("top", b.real, b.imag) for b in result.top_blocks]
        + [("bottom", b.real, b.imag) for b in result.bottom_blocks],
    )
    if args.plot:
        from . import plots

        plots.save_iq_blocks(
            manifest.add(out / "snr_blocks.png"),
            result.top_blocks,
            result.bottom_blocks,
            title=f"SNR = {result.report.snr_power:.1f} at tau = {tau:g} s",
        )
    print(
        f"snr_power={result.report.snr_power:.2f} tau={tau:g}s "
        f"t_min={result.report.t_min * 1e9:.1f}ns fidelity={result.fidelity:.4f}"
    )
    return 0


def cmd_fit(args, manifest):
    data = np.loadtxt(args.data, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise ConfigError([f"{args.data}: need vg plus at least one signal column"])
    vg = data[:, 0]
    if data.shape[1] >= 3:
        z = data[:, 1] + 1j * data[:, 2]
        zc = z - z.mean()
        # principal IQ axis; falls back to I when the cloud is degenerate
        second_moment = np.mean(zc**2)
        axis = np.exp(1j * 0.5 * np.angle(second_moment)) if second_moment != 0 else 1.0
        signal = (z * np.conj(axis)).real
    else:
        signal = data[:, 1]
    result = fit_electron_temperature(vg, signal, alpha=args.alpha)
    out = manifest.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report_path = manifest.add(out / "fit_report.txt")
    lines = [
        f"model: sech2 thermal lineshape (alpha = {args.alpha})",
        f"t_e_k: {result['t_e']:.9e}",
        f"v0_volts: {result['v0']:.9e}",
        f"amplitude: {result['amplitude']:.9e}",
        f"offset: {result['offset']:.9e}",
        f"n_iter: {result['n_iter']}",
        f"converged: {result['converged']}",
    ]
    with open(report_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0


def cmd_config(args, manifest):
    cfg = _load_cfg(args)
    if args.print_normalized:
        sys.stdout.write(to_normal_form(cfg))
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cryomux",
        description="Cryogenic multiplexed RF readout chain simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="assembly config file (YAML)")
    common.add_argument("--out", default="cryomux_out", help="output directory")
    common.add_argument("--plot", action="store_true", help="render figures too")
    common.add_argument("--seed", type=int, default=None, help="master RNG seed")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="S-parameter sweeps")
    p.add_argument(
        "--what",
        required=True,
        choices=["lna", "switch", "assembly-s12", "assembly-s13"],
    )
    p.add_argument("--mux", type=int, default=0, help="active channel for s13")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lineshape", parents=[common], help="gate-voltage sweep")
    p.add_argument("--seb", type=int, default=None, help="SEB index (default: all)")
    p.add_argument("--vg-start", default=None)
    p.add_argument("--vg-stop", default=None)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_lineshape)

    p = sub.add_parser("tdma", parents=[common], help="time-domain simulation")
    p.add_argument("schedule", help="schedule file (YAML)")
    p.add_argument("--noise", choices=["on", "off"], default="on")
    p.set_defaults(func=cmd_tdma)

    p = sub.add_parser("snr", parents=[common], help="two-level SNR benchmark")
    p.add_argument("--tau", default="10 us", help="integration time")
    p.set_defaults(func=cmd_snr)

    p = sub.add_parser("fit", parents=[common], help="fit a lineshape CSV")
    p.add_argument("data", help="CSV: vg_volts, i_signal[, q_signal]")
    p.add_argument("--model", choices=["sech2"], default="sech2")
    p.add_argument("--alpha", type=float, default=0.5)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("config", parents=[common], help="inspect configuration")
    p.add_argument("--print-normalized", action="store_true")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = Manifest(
        Path(args.out),
        command=args.command,
        config_path=getattr(args, "config", None),
        seed=getattr(args, "seed", None),
    )
    try:
        rc = args.func(args, manifest)
    except (CryomuxError, OSError, yaml.YAMLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        manifest.write("failed")
        return 1
    manifest.write("ok")
    return rc


if __name__ == "__main__":
    sys.exit(main())
