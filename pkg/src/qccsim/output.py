"""CSV, JSON and SVG outputs.

Every writer is deterministic (no timestamps, fixed column order, fixed
float formatting), so re-running a manifest's config snapshot reproduces
byte-identical files and checksums.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence
from xml.etree import ElementTree as ET

import numpy as np

from . import __version__
from .config import config_dict, dump_config

CSV_COLUMNS = {
    "trajectories.csv": ["member", "t", "x", "p"],
    "classical.csv": ["t", "x", "p"],
    "rms.csv": ["series", "t", "D"],
    "sweep.csv": ["i", "j", "hbar", "dt", "divergence_time", "censored", "regime",
                  "n_censored", "error"],
    "wavefunction.csv": ["x", "re", "im"],
    "husimi.csv": ["x", "p", "Q"],
}


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_classical_csv(states, path) -> Path:
    return write_csv(path, CSV_COLUMNS["classical.csv"], ((s.t, s.x, s.p) for s in states))


def write_trajectories_csv(runs, path) -> Path:
    rows = ((k, t, q.x, q.p) for k, run in enumerate(runs) for t, q in zip(run.times, run.quantum))
    return write_csv(path, CSV_COLUMNS["trajectories.csv"], rows)


def write_rms_csv(path, pooled=None, runs=()) -> Path:
    rows = []
    if pooled is not None:
        rows += [("pooled", t, d) for t, d in pooled.samples]
    for k, run in enumerate(runs):
        rows += [(f"member{k}", t, d) for t, d in run.rms_series.samples]
    return write_csv(path, CSV_COLUMNS["rms.csv"], rows)


def write_wavefunction_csv(psi, path) -> Path:
    vals = psi.psi
    rows = zip(psi.grid.x.tolist(), vals.real.tolist(), vals.imag.tolist())
    return write_csv(path, CSV_COLUMNS["wavefunction.csv"], rows)


def write_husimi_csv(field, path) -> Path:
    rows = ((float(x), float(p), float(field.values[ix, ip]))
            for ix, x in enumerate(field.x_centers) for ip, p in enumerate(field.p_centers))
    return write_csv(path, CSV_COLUMNS["husimi.csv"], rows)


def write_sweep_csv(result, path) -> Path:
    rows = []
    for (i, j) in sorted(result.cells, key=lambda ij: (ij[1], ij[0])):
        c = result.cells[(i, j)]
        rows.append((i, j, c.hbar, c.dt, c.divergence_time, int(c.censored), c.regime,
                     c.n_censored, c.error or ""))
    return write_csv(path, CSV_COLUMNS["sweep.csv"], rows)


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_config_snapshot(config, path) -> Path:
    path = Path(path)
    path.write_text(dump_config(config))
    return path


def write_manifest(outdir, files: Sequence[Path], config, extra: dict | None = None) -> Path:
    """manifest.json listing every emitted file with its SHA-256."""
    outdir = Path(outdir)
    payload = {
        "tool": "qccsim",
        "version": __version__,
        "config": config_dict(config),
        "seed": config.base_seed,
        "columns": {Path(f).name: CSV_COLUMNS[Path(f).name]
                    for f in files if Path(f).name in CSV_COLUMNS},
        "files": {Path(f).name: sha256(f) for f in files},
    }
    if extra:
        payload.update(extra)
    return write_json(outdir / "manifest.json", payload)


# --- SVG ------------------------------------------------------------------

# viridis anchors: perceptually uniform and monotone in lightness
_RAMP = ["#440154", "#482878", "#3e4989", "#31688e", "#26828e",
         "#1f9e89", "#35b779", "#6ece58", "#b5de2b", "#fde725"]


def _hex(c: str) -> tuple[int, int, int]:
    return int(c[1:3], 16), int(c[3:5], 16), int(c[5:7], 16)


def ramp_color(u: float) -> str:
    """Colour for ``u`` in [0, 1] by linear interpolation along the ramp."""
    u = min(1.0, max(0.0, u))
    pos = u * (len(_RAMP) - 1)
    lo = min(int(pos), len(_RAMP) - 2)
    frac = pos - lo
    a, b = _hex(_RAMP[lo]), _hex(_RAMP[lo + 1])
    r, g, bl = (round(x + (y - x) * frac) for x, y in zip(a, b))
    return f"#{r:02x}{g:02x}{bl:02x}"


def _svg(width, height):
    return ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width),
                      height=str(height), viewBox=f"0 0 {width} {height}")


def _text(parent, x, y, s, anchor="middle", size=12, **kw):
    el = ET.SubElement(parent, "text", x=f"{x:.2f}", y=f"{y:.2f}", attrib={
        "text-anchor": anchor, "font-size": str(size), "font-family": "sans-serif", **kw})
    el.text = s
    return el


def _tostring(root) -> str:
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def _span(values, margin=0.05):
    lo, hi = float(np.min(values)), float(np.max(values))
    width = hi - lo
    if width == 0:
        width = abs(lo) or 1.0
        lo, hi = lo - 0.5 * width, hi + 0.5 * width
    return lo - margin * width, hi + margin * width


def emit_phase_portrait(record, title: str = "", width: int = 640, height: int = 480) -> str:
    """Phase portrait SVG: classical polyline plus sampled quantum points."""
    cl = [(s.x, s.p) for s in record.classical]
    qu = [(q.x, q.p) for q in record.quantum]
    pts = np.array(cl + qu, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        pts = np.zeros((1, 2))
    x_lo, x_hi = _span(pts[:, 0])
    p_lo, p_hi = _span(pts[:, 1])
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(x, p):
        return (left + (x - x_lo) / (x_hi - x_lo) * pw, top + (p_hi - p) / (p_hi - p_lo) * ph)

    root = _svg(width, height)
    ET.SubElement(root, "rect", x=str(left), y=str(top), width=str(pw), height=str(ph),
                  fill="white", stroke="black")
    if cl:
        ET.SubElement(root, "polyline", id="classical", fill="none", stroke="#d62728",
                      attrib={"stroke-width": "1.5",
                              "points": " ".join(f"{a:.2f},{b:.2f}" for a, b in (px(*c) for c in cl))})
    if qu:
        ET.SubElement(root, "polyline", id="quantum", fill="none", stroke="#7b3294",
                      attrib={"stroke-width": "1", "stroke-dasharray": "4 2",
                              "points": " ".join(f"{a:.2f},{b:.2f}" for a, b in (px(*q) for q in qu))})
    _text(root, left + pw / 2, height - 12, "position x")
    _text(root, 18, top + ph / 2, "momentum p", transform=f"rotate(-90 18 {top + ph / 2:.2f})")
    _text(root, left, top + ph + 16, f"{x_lo:.3g}")
    _text(root, left + pw, top + ph + 16, f"{x_hi:.3g}")
    _text(root, left - 6, top + ph, f"{p_lo:.3g}", anchor="end")
    _text(root, left - 6, top + 10, f"{p_hi:.3g}", anchor="end")
    if title:
        _text(root, width / 2, 22, title, size=14)
    _text(root, left + pw - 4, top + 16, "classical", anchor="end", fill="#d62728")
    _text(root, left + pw - 4, top + 32, "quantum (sampled)", anchor="end", fill="#7b3294")
    return _tostring(root)


def heatmap_colors(times: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Map a divergence-time matrix to ramp colours on a log scale.

    Returns the colour matrix and the log10 limits; a constant matrix maps
    to the middle of the ramp.
    """
    logs = np.log10(np.where(np.isfinite(times) & (times > 0), times, np.nan))
    finite = logs[np.isfinite(logs)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 0.0)
    colors = np.empty(times.shape, dtype=object)
    for idx, v in np.ndenumerate(logs):
        if not np.isfinite(v):
            colors[idx] = "#9e9e9e"
        else:
            colors[idx] = ramp_color(0.5 if hi == lo else (v - lo) / (hi - lo))
    return colors, lo, hi


def emit_heatmap(result, width: int = 720, height: int = 560) -> str:
    """Divergence-time heatmap: hbar across, dt up, log colour scale, hatched censoring."""
    times = result.divergence_times
    censored = result.censored
    colors, lo, hi = heatmap_colors(times)
    n_dt, n_h = times.shape
    left, right, top, bottom = 80, 130, 30, 60
    pw, ph = width - left - right, height - top - bottom
    cw, chh = pw / n_h, ph / n_dt

    root = _svg(width, height)
    defs = ET.SubElement(root, "defs")
    pat = ET.SubElement(defs, "pattern", id="hatch", width="6", height="6",
                        patternUnits="userSpaceOnUse", patternTransform="rotate(45)")
    ET.SubElement(pat, "line", x1="0", y1="0", x2="0", y2="6", stroke="white",
                  attrib={"stroke-width": "1.5", "stroke-opacity": "0.8"})

    cells = ET.SubElement(root, "g", id="cells")
    for j in range(n_dt):
        for i in range(n_h):
            x = left + i * cw
            y = top + (n_dt - 1 - j) * chh  # dt grows upward
            attrs = {"x": f"{x:.2f}", "y": f"{y:.2f}", "width": f"{cw:.2f}", "height": f"{chh:.2f}",
                     "fill": colors[j, i], "data-i": str(i), "data-j": str(j),
                     "data-value": repr(float(times[j, i]))}
            ET.SubElement(cells, "rect", attrib=attrs)
            if censored[j, i]:
                ET.SubElement(cells, "rect", attrib={**attrs, "fill": "url(#hatch)", "class": "censored"})
            if not np.isfinite(times[j, i]):
                ET.SubElement(cells, "path", d=f"M{x:.2f},{y:.2f} l{cw:.2f},{chh:.2f} m0,{-chh:.2f} "
                                               f"l{-cw:.2f},{chh:.2f}", stroke="black",
                              attrib={"class": "failed"})

    hb, dtv = result.hbar_values, result.dt_values
    _text(root, left, top + ph + 16, f"{hb[0]:.3g}")
    _text(root, left + pw, top + ph + 16, f"{hb[-1]:.3g}")
    _text(root, left - 6, top + ph, f"{dtv[0]:.3g}", anchor="end")
    _text(root, left - 6, top + 10, f"{dtv[-1]:.3g}", anchor="end")
    _text(root, left + pw / 2, height - 20, "hbar (log scale)")
    _text(root, 20, top + ph / 2, "dt (log scale)", transform=f"rotate(-90 20 {top + ph / 2:.2f})")

    bar = ET.SubElement(root, "g", id="colorbar")
    bx, steps = left + pw + 30, 32
    for s in range(steps):
        u = (s + 0.5) / steps
        ET.SubElement(bar, "rect", x=f"{bx}", y=f"{top + ph * (1 - (s + 1) / steps):.2f}",
                      width="18", height=f"{ph / steps + 0.5:.2f}", fill=ramp_color(u))
    _text(bar, bx + 24, top + ph, f"{10 ** lo:.3g} s", anchor="start")
    _text(bar, bx + 24, top + 10, f"{10 ** hi:.3g} s", anchor="start")
    _text(bar, bx + 24, top + ph / 2, "divergence time", anchor="start", size=10)
    return _tostring(root)
