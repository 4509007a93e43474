"""Bundled scenarios covering the four collective motions.

fig2a-fig2d use a 3-cycle with one branch agent and differ only in the
bearing angles: rectilinear flocking, circling, shape-preserving
spiraling, and periodic branch motion over a circling cycle.  fig3a and
fig3b are the mutual-pursuit pair plus branch whose branch phase flow is
analyzed in closed form; both produce periodic branch orbits.

Documents are JSON-compatible dicts; angles are radians, targets and arc
keys are 1-based.
"""

from __future__ import annotations

import copy
import math

_FIG2_TARGETS = [2, 3, 1, 1]
_FIG3_TARGETS = [2, 1, 1]

# scattered starting positions used by the flocking/circling/spiral runs
_FIG2_POSITIONS = [[0.0, 0.0], [6.0, 1.0], [3.0, 5.0], [-3.0, 2.0]]


def _fig2c() -> dict:
    # expanding spiral: shape converges only logarithmically in physical
    # time, so start near the spiral equilibrium (branch arc nudged off it)
    alpha = [2 * math.pi / 3, 2 * math.pi / 3, 2 * math.pi / 3, 2 * math.pi / 5]
    tau = math.pi / 3
    scale = 0.05
    theta_b = math.pi - alpha[3] + 2 * tau - 2 * math.pi
    rho_b = math.sin(alpha[3] - tau) / math.sin(alpha[0] - tau)
    theta = {"1,2": math.pi, "2,3": math.pi, "3,1": math.pi, "4,1": theta_b + 5e-4}
    rho = {
        "1,2": scale,
        "2,3": scale,
        "3,1": scale,
        "4,1": (rho_b - 2.5e-4) * scale,
    }
    return {
        "name": "fig2c",
        "description": "shape-preserving spiral",
        "targets": list(_FIG2_TARGETS),
        "alpha": alpha,
        "initial": {"mode": "shape", "theta": theta, "rho": rho},
        "integrator": {"t_final": 60.0, "dt": 1e-3, "record_stride": 20},
    }


def _fig2d() -> dict:
    alpha = [math.pi / 3, 7 * math.pi / 12, math.pi / 12, math.pi / 2]
    s1 = math.sin(alpha[0])
    theta = {
        "1,2": math.pi - alpha[0],
        "2,3": math.pi - alpha[1],
        "3,1": math.pi - alpha[2],
        "4,1": math.pi / 2,
    }
    rho = {
        "1,2": 1.0,
        "2,3": math.sin(alpha[1]) / s1,
        "3,1": math.sin(alpha[2]) / s1,
        "4,1": 0.55,
    }
    return {
        "name": "fig2d",
        "description": "circling cycle with a periodically breathing branch",
        "targets": list(_FIG2_TARGETS),
        "alpha": alpha,
        "initial": {"mode": "shape", "theta": theta, "rho": rho},
        "integrator": {"t_final": 30.0, "dt": 1e-3, "record_stride": 5},
    }


def _fig3(name: str, alpha_1: float, rho_branch: float, t_final: float) -> dict:
    alpha = [alpha_1, math.pi - alpha_1, math.pi / 2]
    theta = {
        "1,2": math.pi - alpha[0],
        "2,1": math.pi - alpha[1],
        "3,1": math.pi / 2,
    }
    rho = {"1,2": 1.0, "2,1": 1.0, "3,1": rho_branch}
    return {
        "name": name,
        "description": "mutual pursuit pair with one branch agent",
        "targets": list(_FIG3_TARGETS),
        "alpha": alpha,
        "initial": {"mode": "shape", "theta": theta, "rho": rho},
        "integrator": {"t_final": t_final, "dt": 1e-3, "record_stride": 5},
    }


PRESETS = {
    "fig2a": {
        "name": "fig2a",
        "description": "rectilinear flocking",
        "targets": list(_FIG2_TARGETS),
        "alpha": [math.pi / 3, 4 * math.pi / 3, math.pi / 3, math.pi / 6],
        "initial": {"mode": "manifold_positions", "positions": copy.deepcopy(_FIG2_POSITIONS)},
        "integrator": {"t_final": 60.0, "dt": 1e-3, "record_stride": 20},
    },
    "fig2b": {
        "name": "fig2b",
        "description": "circling",
        "targets": list(_FIG2_TARGETS),
        "alpha": [math.pi / 3, math.pi / 4, 5 * math.pi / 12, math.pi / 6],
        "initial": {"mode": "manifold_positions", "positions": copy.deepcopy(_FIG2_POSITIONS)},
        "integrator": {"t_final": 60.0, "dt": 1e-3, "record_stride": 20},
    },
    "fig2c": _fig2c(),
    "fig2d": _fig2d(),
    "fig3a": _fig3("fig3a", -math.pi / 3, 1.0, 45.0),
    "fig3b": _fig3("fig3b", math.pi / 3, 0.55, 45.0),
}


def preset_names() -> list:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    if name not in PRESETS:
        known = ", ".join(preset_names())
        raise KeyError(f"unknown preset {name!r}; available: {known}")
    return copy.deepcopy(PRESETS[name])
