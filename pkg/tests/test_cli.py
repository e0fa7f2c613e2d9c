import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qccsim.cli import main
from qccsim.config import load_config
from qccsim.output import CSV_COLUMNS, emit_heatmap, heatmap_colors, ramp_color, sha256
from qccsim.sweep import CellResult, SweepResult

SVG = "{http://www.w3.org/2000/svg}"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_simulate_writes_every_artefact(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["simulate", "--hbar", "1e-3", "--dt", "0.05", "--N", "3", "--t-max", "0.5",
                 "--seed", "9", "--set", "stop_at_threshold=false", "--out", str(out)])
    assert code == 0
    names = {"config.cfg", "trajectories.csv", "classical.csv", "rms.csv",
             "phase_portrait.svg", "result.json", "manifest.json"}
    assert names <= {p.name for p in out.iterdir()}

    traj = read_csv(out / "trajectories.csv")
    assert traj[0] == CSV_COLUMNS["trajectories.csv"]
    assert len(traj) == 1 + 3 * 10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 9
    for name, digest in manifest["files"].items():
        assert sha256(out / name) == digest
    cfg = load_config(out / "config.cfg")
    assert cfg.hbar == 1e-3 and cfg.ensemble_size == 3 and cfg.stop_at_threshold is False

    svg = ET.parse(out / "phase_portrait.svg").getroot()
    ids = {el.get("id") for el in svg.iter(f"{SVG}polyline")}
    assert {"classical", "quantum"} <= ids
    summary = json.loads(capsys.readouterr().out)
    assert summary["mode"] == "ensemble"


def test_simulate_is_reproducible(tmp_path):
    args = ["simulate", "--hbar", "1e-3", "--N", "2", "--t-max", "0.3", "--seed", "1"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("trajectories.csv", "rms.csv", "phase_portrait.svg", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_output_dir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("QCCSIM_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["simulate", "--N", "1", "--t-max", "0.1", "--out", str(tmp_path / "x")]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()
    assert not (tmp_path / "x").exists()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("hbar = 0.01\nensemble_size = 2\nt_max = 0.2\n")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--hbar", "0.002", "--out", str(out)]) == 0
    snap = load_config(out / "config.cfg")
    assert snap.hbar == 0.002 and snap.ensemble_size == 2


def test_sweep_command(tmp_path):
    out = tmp_path / "sw"
    code = main(["sweep", "--hbar-min", "1e-3", "--hbar-max", "1e-1", "--hbar-count", "2",
                 "--dt-min", "0.05", "--dt-max", "0.1", "--dt-count", "2", "--N", "1",
                 "--t-max", "0.3", "--out", str(out)])
    assert code == 0
    rows = read_csv(out / "sweep.csv")
    assert rows[0] == CSV_COLUMNS["sweep.csv"] and len(rows) == 5
    assert json.loads((out / "sweep.json").read_text())["config"]["divergence_mode"] == "per_run"
    svg = ET.parse(out / "heatmap.svg").getroot()
    cells = [el for el in svg.iter(f"{SVG}rect")
             if el.get("data-i") is not None and el.get("class") is None]
    assert len(cells) == 4
    assert len((out / "cells.jsonl").read_text().splitlines()) == 4


def test_regimes_command(capsys):
    assert main(["regimes", "--hbar", "0.1", "--dt", "0.1", "--p", "1"]) == 0
    out = capsys.readouterr().out
    assert "uncertainty_lhs = 5.0" in out
    assert "regime = uncertainty_dominated" in out


def test_regimes_batch(tmp_path, capsys):
    batch = tmp_path / "pts.csv"
    batch.write_text("hbar,dt\n0.1,0.1\n1e-6,0.1\n")
    assert main(["regimes", "--batch", str(batch), "--potential", "quartic",
                 "--param", "lambda=2", "--x", "0.3"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["regime"] for r in rows] == ["uncertainty_dominated", "semiclassical"]


@pytest.mark.parametrize("argv", [[], ["bogus"], ["simulate", "--hbar", "-1"],
                                  ["simulate", "--set", "nonsense=1"],
                                  ["regimes", "--hbar", "0.1"],
                                  ["regimes", "--hbar", "1", "--dt", "1", "--param", "q=1"]])
def test_usage_and_config_errors_exit_1(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 1


def test_runtime_failure_exits_2(tmp_path):
    code = main(["simulate", "--hbar", "0.05", "--N", "1", "--grid-points", "64",
                 "--set", "points_per_sigma=0", "--set", "momentum_prefactor=1",
                 "--set", "uncertainty_prefactor=1", "--out", str(tmp_path / "f")])
    assert code == 2


def test_ramp_and_heatmap_marks():
    assert ramp_color(0.0) == "#440154" and ramp_color(1.0).startswith("#")
    colors, lo, hi = heatmap_colors(np.full((2, 2), 3.0))
    assert lo == hi == pytest.approx(np.log10(3.0)) and len(set(colors.ravel())) == 1

    cells = {(0, 0): CellResult(0, 0, 1e-3, 0.1, 2.0, 0, "semiclassical"),
             (1, 0): CellResult(1, 0, 1e-2, 0.1, 1.0, 1, "uncertainty_dominated"),
             (0, 1): CellResult(0, 1, 1e-3, 0.2, float("nan"), 0, "semiclassical", "boom"),
             (1, 1): CellResult(1, 1, 1e-2, 0.2, 0.5, 0, "uncertainty_dominated")}
    result = SweepResult(np.array([1e-3, 1e-2]), np.array([0.1, 0.2]), cells, 10.0, 0)
    root = ET.fromstring(emit_heatmap(result))
    assert [el.get("class") for el in root.iter(f"{SVG}rect")].count("censored") == 1
    assert any(el.get("class") == "failed" for el in root.iter())
