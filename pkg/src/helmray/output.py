"""Run artifacts: CSV tables, a metadata echo, and SVG figure plates.

CSV is the authoritative quantitative output (17 significant digits,
bit-reproducible across identical runs); the SVG plate is a dependency
free rendering of the standard three panels: initial/final intensity
profiles (solid/dashed), initial/final coupling-potential profiles, and
the trajectory fan with the analytic waist lines highlighted for
Gaussian-type scenarios.
"""

from __future__ import annotations

import json
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .config import emit_config_text
from .diagnostics import waist_trajectory
from .dynamics import TrajectoryRecord
from .profiles import CenteredGaussianSum

__all__ = ["write_run_outputs", "write_trajectories_csv", "write_profile_csv",
           "write_metadata", "render_svg"]

_FMT = "%.17g"


def _fmt(v) -> str:
    return _FMT % v


def write_trajectories_csv(record: TrajectoryRecord, path: Path) -> None:
    """ray_id, t, x, z, p_x, p_z, amp, G rows, frame-major then ray-major."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("ray_id,t,x,z,p_x,p_z,amp,G\n")
        for i in range(record.n_frames):
            t = _fmt(record.t[i])
            rows = zip(record.x[i], record.z[i], record.p_x[i],
                       record.p_z[i], record.amp[i], record.g[i])
            for j, (x, z, px, pz, amp, g) in enumerate(rows):
                fh.write(f"{j},{t},{_fmt(x)},{_fmt(z)},{_fmt(px)},{_fmt(pz)},"
                         f"{_fmt(amp)},{_fmt(g)}\n")


def write_profile_csv(record: TrajectoryRecord, frame: int, path: Path) -> None:
    """x, R2 (unnormalized intensity), G for one recorded frame."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,R2,G\n")
        for x, amp, g in zip(record.x[frame], record.amp[frame], record.g[frame]):
            fh.write(f"{_fmt(x)},{_fmt(amp * amp)},{_fmt(g)}\n")


def write_metadata(record: TrajectoryRecord, path: Path, extra: dict = None) -> None:
    cfg = record.config
    meta = {
        "config": emit_config_text(cfg),
        "termination": record.termination,
        "error": record.error,
        "steps": record.steps,
        "frames": record.n_frames,
        "record_stride": cfg.record_stride,
        "final_mean_z": float(np.mean(record.z[-1])),
        "final_t": float(record.t[-1]),
        "wall_time_s": record.wall_time,
        "intensity_normalization": "profiles CSV carries raw R^2; plots normalize to unit peak",
        "versions": {
            "helmray": _version,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "platform": platform.platform(),
        },
    }
    if extra:
        meta.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# Minimal SVG plotting
# --------------------------------------------------------------------------

_W, _H = 720, 360
_MARGIN = 54


def _panel(lines, title, xlabel, ylabel, curves):
    """One SVG panel; curves = [(x, y, style_dict), ...]."""
    xs = np.concatenate([c[0] for c in curves])
    ys = np.concatenate([c[1] for c in curves])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0 -= pad
    y1 += pad
    iw = _W - 2 * _MARGIN
    ih = _H - 2 * _MARGIN

    def sx(v):
        return _MARGIN + (v - x0) / (x1 - x0) * iw

    def sy(v):
        return _H - _MARGIN - (v - y0) / (y1 - y0) * ih

    lines.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{iw}" height="{ih}" '
                 f'fill="none" stroke="#888" stroke-width="1"/>')
    lines.append(f'<text x="{_W / 2:.0f}" y="{_MARGIN - 14}" text-anchor="middle" '
                 f'font-size="14">{title}</text>')
    lines.append(f'<text x="{_W / 2:.0f}" y="{_H - 10}" text-anchor="middle" '
                 f'font-size="12">{xlabel}</text>')
    lines.append(f'<text x="16" y="{_H / 2:.0f}" text-anchor="middle" font-size="12" '
                 f'transform="rotate(-90 16 {_H / 2:.0f})">{ylabel}</text>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        lines.append(f'<text x="{sx(xv):.1f}" y="{_H - _MARGIN + 16}" '
                     f'text-anchor="middle" font-size="10">{xv:.4g}</text>')
        lines.append(f'<text x="{_MARGIN - 6}" y="{sy(yv):.1f}" '
                     f'text-anchor="end" font-size="10">{yv:.4g}</text>')
    for x, y, style in curves:
        step = max(1, len(x) // 2000)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[::step], y[::step]))
        dash = ' stroke-dasharray="6,4"' if style.get("dashed") else ""
        width = style.get("width", 1.2)
        color = style.get("color", "#1f6fb2")
        lines.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="{width}"{dash}/>')


def render_svg(record: TrajectoryRecord) -> str:
    """Three stacked panels: intensity profiles, coupling profiles, trajectories."""
    total_h = 3 * _H
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
             f'height="{total_h}" viewBox="0 0 {_W} {total_h}" '
             f'font-family="sans-serif">',
             f'<rect width="{_W}" height="{total_h}" fill="white"/>']

    def shifted(panel_idx, make):
        sub = []
        make(sub)
        lines.append(f'<g transform="translate(0 {panel_idx * _H})">')
        lines.extend(sub)
        lines.append("</g>")

    i0 = record.amp[0] ** 2
    i1 = record.amp[-1] ** 2
    shifted(0, lambda sub: _panel(
        sub, "Transverse intensity: initial (solid), final (dashed)",
        "x", "intensity (unit peak)",
        [(record.x[0], i0 / i0.max(), {}),
         (record.x[-1], i1 / i1.max(), {"dashed": True, "color": "#b23a1f"})]))
    shifted(1, lambda sub: _panel(
        sub, "Coupling potential: initial (solid), final (dashed)",
        "x", "g",
        [(record.x[0], record.g[0], {}),
         (record.x[-1], record.g[-1], {"dashed": True, "color": "#b23a1f"})]))

    def trajectories(sub):
        n = record.x.shape[1]
        stride = max(1, n // 60)
        curves = [(record.z[:, j], record.x[:, j], {"width": 0.7, "color": "#777"})
                  for j in range(0, n, stride)]
        prof = record.config.profile
        if isinstance(prof, CenteredGaussianSum) and prof.b == 0.0:
            zs = np.linspace(0.0, float(record.z[-1].mean()), 400)
            wz = waist_trajectory(record.config.epsilon, zs)
            curves.append((zs, wz, {"width": 2.5, "color": "#111"}))
            curves.append((zs, -wz, {"width": 2.5, "color": "#111"}))
        _panel(sub, "Ray trajectories (heavy: analytic waist rays)", "z", "x", curves)

    shifted(2, trajectories)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_run_outputs(record: TrajectoryRecord, out_dir, svg: bool = True,
                      extra_meta: dict = None) -> dict:
    """Write the full artifact set for one run; returns the path map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "trajectories": out / "trajectories.csv",
        "profile_initial": out / "profile_initial.csv",
        "profile_final": out / "profile_final.csv",
        "metadata": out / "metadata.json",
    }
    write_trajectories_csv(record, paths["trajectories"])
    write_profile_csv(record, 0, paths["profile_initial"])
    write_profile_csv(record, record.n_frames - 1, paths["profile_final"])
    write_metadata(record, paths["metadata"], extra=extra_meta)
    if svg:
        paths["plots"] = out / "plots.svg"
        with open(paths["plots"], "w", encoding="utf-8") as fh:
            fh.write(render_svg(record))
    return paths
