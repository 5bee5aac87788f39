import json

import numpy as np
import pytest
import yaml

from cryomux.cli import main

SCHEDULE = """\
entries:
  - t_start: 0 s
    t_end: 8 ms
    mux: 0
    gate0:
      kind: ramp
      v_start: 449 mV
      v_end: 451 mV
      t_start: 0 s
      t_end: 2 ms
      repeat: true
    gate1:
      v: 440 mV
  - t_start: 8 ms
    t_end: 12 ms
    mux: none
  - t_start: 12 ms
    t_end: 20 ms
    mux: 1
    gate0:
      v: 440 mV
    gate1:
      kind: ramp
      v_start: 449 mV
      v_end: 451 mV
      t_start: 12 ms
      t_end: 14 ms
      repeat: true
"""


def read_manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


def test_sweep_lna(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--what", "lna", "--out", str(out)]) == 0
    data = np.loadtxt(out / "sweep_lna.csv", delimiter=",", skiprows=1)
    assert data[:, 1].max() >= 35.0
    manifest = read_manifest(out)
    assert manifest["status"] == "ok"
    assert str(out / "sweep_lna.s2p") in manifest["outputs"]


def test_sweep_switch(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--what", "switch", "--out", str(out)]) == 0
    data = np.loadtxt(out / "sweep_switch.csv", delimiter=",", skiprows=1)
    # isolation minus insertion loss stays at or above the 33.9 dB contrast
    assert np.all(data[:, 2] - data[:, 1] >= 33.9)


def test_sweep_assembly_s12_finds_both_resonances(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--what", "assembly-s12", "--out", str(out)]) == 0
    res = np.loadtxt(out / "resonances.csv", delimiter=",", skiprows=1, ndmin=2)
    assert res.shape[0] == 2
    assert res[0, 0] == pytest.approx(559e6, abs=1e6)
    assert res[1, 0] == pytest.approx(681e6, abs=1e6)


def test_sweep_assembly_s13_channel_contrast(tmp_path):
    for mux in (0, 2):
        assert (
            main(
                [
                    "sweep", "--what", "assembly-s13", "--mux", str(mux),
                    "--out", str(tmp_path / f"m{mux}"),
                ]
            )
            == 0
        )
    sel = np.loadtxt(
        tmp_path / "m0" / "sweep_assembly_s13_mux0.csv", delimiter=",", skiprows=1
    )
    unused = np.loadtxt(
        tmp_path / "m2" / "sweep_assembly_s13_mux2.csv", delimiter=",", skiprows=1
    )
    k = np.argmin(np.abs(sel[:, 0] - 559e6))
    assert sel[k, 1] - unused[k, 1] >= 30.0


def test_lineshape_and_fit_round_trip(tmp_path):
    out = tmp_path / "o"
    assert main(["lineshape", "--seb", "0", "--out", str(out)]) == 0
    csv_path = out / "lineshape_seb0.csv"
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    z = data[:, 1] + 1j * data[:, 2]
    response = np.abs(z - z[0])
    assert data[np.argmax(response), 0] == pytest.approx(0.450, abs=1e-5)

    fit_out = tmp_path / "fit"
    assert main(["fit", str(csv_path), "--alpha", "0.5", "--out", str(fit_out)]) == 0
    report = (fit_out / "fit_report.txt").read_text()
    t_e = float(next(l for l in report.splitlines() if l.startswith("t_e_k")).split()[-1])
    # the finite resonator depth biases the projected lineshape slightly,
    # so the electron temperature comes back at the percent level
    assert t_e == pytest.approx(0.360, rel=1e-2)


def test_lineshape_all_sensors(tmp_path):
    out = tmp_path / "o"
    assert main(["lineshape", "--out", str(out)]) == 0
    assert (out / "lineshape_seb0.csv").exists()
    assert (out / "lineshape_seb1.csv").exists()


def test_tdma_noise_off_is_byte_reproducible(tmp_path):
    sched = tmp_path / "sched.yaml"
    sched.write_text(SCHEDULE)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert (
            main(["tdma", str(sched), "--noise", "off", "--out", str(out)]) == 0
        )
        outs.append((out / "trace_tone_559.000MHz.csv").read_bytes())
    assert outs[0] == outs[1]


def test_tdma_seeds_differ_but_reproduce(tmp_path):
    sched = tmp_path / "sched.yaml"
    sched.write_text(SCHEDULE)
    blobs = {}
    for name, seed in (("s1", 1), ("s1b", 1), ("s2", 2)):
        out = tmp_path / name
        assert (
            main(["tdma", str(sched), "--seed", str(seed), "--out", str(out)]) == 0
        )
        blobs[name] = (out / "trace_tone_681.000MHz.csv").read_bytes()
    assert blobs["s1"] == blobs["s1b"]
    assert blobs["s1"] != blobs["s2"]


def test_snr_report_values(tmp_path):
    out = tmp_path / "o"
    assert main(["snr", "--tau", "10 us", "--out", str(out)]) == 0
    report = dict(
        line.split(": ", 1)
        for line in (out / "snr_report.txt").read_text().splitlines()
        if ": " in line
    )
    snr = float(report["snr_power"])
    t_min = float(report["t_min_s"])
    assert snr == pytest.approx(140.0, rel=0.15)
    assert 65e-9 <= t_min <= 75e-9
    assert float(report["fidelity"]) > 0.999
    assert "fidelity_model" in report


def test_snr_subsample_tau_fails_cleanly(tmp_path):
    out = tmp_path / "o"
    assert main(["snr", "--tau", "0.1 us", "--out", str(out)]) == 1
    assert read_manifest(out)["status"] == "failed"


def test_missing_config_fails_with_manifest(tmp_path):
    out = tmp_path / "o"
    rc = main(
        ["sweep", "--what", "lna", "--config", str(tmp_path / "nope.yaml"),
         "--out", str(out)]
    )
    assert rc == 1
    assert read_manifest(out)["status"] == "failed"


def test_config_dir_env_fallback(tmp_path, monkeypatch, cfg):
    from cryomux.config import to_normal_form

    cfg_dir = tmp_path / "configs"
    cfg_dir.mkdir()
    (cfg_dir / "assembly.yaml").write_text(to_normal_form(cfg))
    monkeypatch.setenv("CRYOMUX_CONFIG_DIR", str(cfg_dir))
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "o"
    assert (
        main(["config", "--config", "assembly.yaml", "--out", str(out)]) == 0
    )


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["sweep"])  # missing required --what
    assert err.value.code == 2


def test_config_print_normalized(tmp_path, capsys):
    assert main(["config", "--print-normalized", "--out", str(tmp_path / "o")]) == 0
    doc = yaml.safe_load(capsys.readouterr().out)
    assert doc["z0"] == "50.0 ohm"
    assert len(doc["seb_paths"]) == 2


def test_plot_renders_figures(tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--what", "lna", "--plot", "--out", str(out)]) == 0
    assert (out / "sweep_lna.png").stat().st_size > 0
    sched = tmp_path / "sched.yaml"
    sched.write_text(SCHEDULE)
    out2 = tmp_path / "p2"
    assert (
        main(["tdma", str(sched), "--noise", "off", "--plot", "--out", str(out2)])
        == 0
    )
    assert (out2 / "tdma_traces.png").stat().st_size > 0
