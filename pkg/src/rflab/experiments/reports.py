"""Report emission: CSV tables, JSON summary, SVG plots and the run manifest.

Numbers are written with 17 significant digits so reruns are byte-identical.
Wall-clock timings go to ``timings.json``, which the manifest names but does
not checksum (it changes on every run).
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import numbers
from pathlib import Path

import numpy as np

from .. import __version__
from .config import ExperimentConfig
from .scenarios import ScenarioResult, Table

TIMINGS_FILE = "timings.json"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return format(float(v), ".17g")
    return str(v)


def table_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def summary_dict(result: ScenarioResult, cfg: ExperimentConfig) -> dict:
    return {
        "scenario": result.scenario,
        "name": cfg.name,
        "config_fingerprint": cfg.fingerprint(),
        "passed": result.passed,
        "n_checks": len(result.checks),
        "n_failed": len(result.failed),
        "checks": [c.to_dict() for c in result.checks],
        "extras": result.extras,
    }


# ---------------------------------------------------------------- svg

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def svg_line_plot(x, series: dict[str, np.ndarray], title: str = "", xlabel: str = "",
                  width: int = 480, height: int = 320) -> str:
    """Minimal standalone SVG line chart."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    pad = 48
    x0, x1 = float(x.min()), float(x.max())
    allv = np.concatenate(list(ys.values())) if ys else np.zeros(1)
    y0, y1 = float(allv.min()), float(allv.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle">{title}</text>',
           f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="4" y="{pad - 6}">{y1:.6g}</text>',
           f'<text x="4" y="{height - pad}">{y0:.6g}</text>',
           f'<text x="{pad}" y="{height - pad + 14}">{x0:.6g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 14}" text-anchor="end">{x1:.6g}</text>']
    for i, (name, y) in enumerate(ys.items()):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{width - pad + 4}" y="{pad + 14 * i}" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plots(result: ScenarioResult) -> dict[str, str]:
    plots = {}
    for t in result.tables:
        if t.name.startswith("riesz_L") and t.rows:
            cols = list(zip(*t.rows))
            plots[f"{t.name}.svg"] = svg_line_plot(cols[0], {"R": cols[2]},
                                                   f"Riesz mean, {t.name[6:]}", "t")
        elif t.name == "semiclassical" and t.rows:
            cols = list(zip(*t.rows))
            plots["semiclassical.svg"] = svg_line_plot(cols[0], {"ratio": cols[3]},
                                                       "disk Cesaro / classical", "k")
    return plots


# ---------------------------------------------------------------- writing

def write_run(result: ScenarioResult, cfg: ExperimentConfig, out_dir: str | Path,
              plots: bool = False) -> dict:
    """Write every artifact and return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    for t in result.tables:
        files[f"{t.name}.csv"] = table_csv(t)
    if result.flow_csv is not None:
        files["flow.csv"] = result.flow_csv
    files["summary.json"] = dumps(summary_dict(result, cfg))
    files["config.json"] = dumps(cfg.to_dict())
    if plots:
        files.update(_plots(result))
    checksums = {}
    for name in sorted(files):
        data = files[name].encode()
        (out / name).write_bytes(data)
        checksums[name] = hashlib.sha256(data).hexdigest()
    manifest = {
        "scenario": result.scenario,
        "config_fingerprint": cfg.fingerprint(),
        "version": __version__,
        "threads": cfg.threads,
        "files": checksums,
        "passed": result.passed,
        "n_checks": len(result.checks),
        "n_failed": len(result.failed),
        "timings_file": TIMINGS_FILE,
    }
    (out / "manifest.json").write_text(dumps(manifest))
    (out / TIMINGS_FILE).write_text(dumps({k: round(v, 6) for k, v in result.timings.items()}))
    return manifest
