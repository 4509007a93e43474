"""Plain-text outputs: trajectory CSV, shape CSV, SVG plots, JSON reports.

CSV floats are written with 17 significant digits so float64 values
round-trip exactly.  Agent and arc labels in headers are 1-based.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(path, times, positions, headings, controls):
    """Write per-agent poses and controls, one row per recorded time."""
    times = np.asarray(times)
    positions = np.asarray(positions)
    headings = np.asarray(headings)
    controls = np.asarray(controls)
    n = positions.shape[1]
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"r{i}x", f"r{i}y", f"x{i}x", f"x{i}y", f"u{i}"]
    lines = [",".join(cols)]
    for k in range(times.shape[0]):
        row = [_fmt(times[k])]
        for i in range(n):
            row += [
                _fmt(positions[k, i, 0]),
                _fmt(positions[k, i, 1]),
                _fmt(headings[k, i, 0]),
                _fmt(headings[k, i, 1]),
                _fmt(controls[k, i]),
            ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path):
    """Inverse of write_trajectory_csv; returns (times, positions, headings, controls)."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = (raw.shape[1] - 1) // 5
    times = raw[:, 0]
    positions = np.empty((raw.shape[0], n, 2))
    headings = np.empty((raw.shape[0], n, 2))
    controls = np.empty((raw.shape[0], n))
    for i in range(n):
        base = 1 + 5 * i
        positions[:, i, 0] = raw[:, base]
        positions[:, i, 1] = raw[:, base + 1]
        headings[:, i, 0] = raw[:, base + 2]
        headings[:, i, 1] = raw[:, base + 3]
        controls[:, i] = raw[:, base + 4]
    return times, positions, headings, controls


def write_shape_csv(path, times, arcs, kappa, theta, rho, cost):
    """Write per-arc shape variables and the bearing cost of each arc's tail.

    kappa, theta, rho, cost are arrays of shape (len(times), len(arcs));
    arcs are 0-based (i, j) pairs, labeled 1-based in the header.
    """
    times = np.asarray(times)
    cols = ["t"]
    for (i, j) in arcs:
        cols += [
            f"kappa_{i + 1}_{j + 1}",
            f"theta_{j + 1}_{i + 1}",
            f"rho_{i + 1}_{j + 1}",
            f"Lambda_{i + 1}",
        ]
    lines = [",".join(cols)]
    for k in range(times.shape[0]):
        row = [_fmt(times[k])]
        for a in range(len(arcs)):
            row += [_fmt(kappa[k, a]), _fmt(theta[k, a]), _fmt(rho[k, a]), _fmt(cost[k, a])]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv_columns(path):
    """Read any of the package CSVs; returns (column names, data array)."""
    header = Path(path).read_text().splitlines()[0].split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


_PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
]


def write_svg_curves(path, curves, *, labels=None, size=720, margin=48, max_points=1500):
    """Write planar curves as an SVG with start (circle) and end (square) markers.

    curves is a sequence of (k, 2) arrays in a common coordinate frame;
    the y axis points up.  Long curves are decimated to max_points.
    """
    curves = [np.asarray(c, dtype=float).reshape(-1, 2) for c in curves]
    if not curves:
        raise ValueError("need at least one curve")
    allpts = np.vstack(curves)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    scale = (size - 2 * margin) / span
    cx = 0.5 * (lo[0] + hi[0])
    cy = 0.5 * (lo[1] + hi[1])

    def to_px(pts):
        x = (pts[:, 0] - cx) * scale + size / 2
        y = size / 2 - (pts[:, 1] - cy) * scale
        return x, y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for idx, curve in enumerate(curves):
        color = _PALETTE[idx % len(_PALETTE)]
        stride = max(1, math.ceil(curve.shape[0] / max_points))
        pts = curve[::stride]
        if not np.array_equal(pts[-1], curve[-1]):
            pts = np.vstack([pts, curve[-1]])
        x, y = to_px(pts)
        coords = " ".join(f"{xv:.2f},{yv:.2f}" for xv, yv in zip(x, y))
        label = labels[idx] if labels else f"curve {idx + 1}"
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"><title>{label}</title></polyline>'
        )
        parts.append(f'<circle cx="{x[0]:.2f}" cy="{y[0]:.2f}" r="4" fill="{color}"/>')
        parts.append(
            f'<rect x="{x[-1] - 3:.2f}" y="{y[-1] - 3:.2f}" width="6" height="6" '
            f'fill="{color}"/>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def write_json(path, payload):
    Path(path).write_text(json.dumps(_json_safe(payload), indent=2) + "\n")
