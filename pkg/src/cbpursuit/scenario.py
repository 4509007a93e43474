"""Scenario documents: validation and initial-state synthesis.

A scenario document is a JSON object with 1-based agent indices:

    {
      "name": "demo",                      optional
      "description": "...",                optional
      "targets": [2, 3, 1, 1],             who each agent pursues
      "alpha": [0.5, 1.0, -0.3, 0.7],      bearing angles, radians
      "mu": [1.0, 1.0, 1.0, 1.0],          optional gains, default 1
      "initial": {...},                    see modes below
      "integrator": {"t_final": 60.0, "dt": 1e-3, "record_stride": 20}
    }

Initial modes:
  absolute            positions and headings given explicitly
  manifold_positions  positions given; headings synthesized so every
                      bearing error is zero
  shape               per-arc theta/rho given (keys "i,j", 1-based);
                      poses are chained from the anchor and the cycle
                      must close
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CBPursuitError,
    ConfigParseError,
    GraphError,
    InvalidConfigError,
)
from .integrate import IntegratorConfig
from .model import CBParams, PursuitGraph, SystemState, validate_graph
from .shape import headings_on_manifold, state_from_manifold_shape

_TOP_KEYS = {"name", "description", "targets", "alpha", "mu", "initial", "integrator"}
_INTEGRATOR_KEYS = {"t_final", "dt", "record_stride", "rho_floor", "divergence_ceiling"}
_INITIAL_MODES = {"absolute", "manifold_positions", "shape"}


@dataclass(frozen=True)
class Scenario:
    """A fully resolved simulation setup."""

    name: str
    graph: PursuitGraph
    params: CBParams
    initial: SystemState
    config: IntegratorConfig


def _require(doc: dict, key: str):
    if key not in doc:
        raise ConfigParseError(f"missing required field {key!r}")
    return doc[key]


def _float_list(value, name: str, length: int | None = None) -> list:
    if not isinstance(value, (list, tuple)):
        raise ConfigParseError(f"{name} must be a list of numbers")
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"{name} must contain numbers: {exc}") from exc
    if length is not None and len(out) != length:
        raise ConfigParseError(f"{name} must have length {length}, got {len(out)}")
    return out


def _points(value, name: str, n: int) -> np.ndarray:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigParseError(f"{name} must list {n} [x, y] pairs")
    rows = [_float_list(row, f"{name}[{k}]", 2) for k, row in enumerate(value)]
    return np.array(rows)


def _parse_arc_key(key: str, n: int):
    parts = str(key).split(",")
    if len(parts) != 2:
        raise ConfigParseError(f"arc key {key!r} must look like \"i,j\" (1-based)")
    try:
        i, j = (int(p) for p in parts)
    except ValueError as exc:
        raise ConfigParseError(f"arc key {key!r} must hold integers") from exc
    if not (1 <= i <= n and 1 <= j <= n):
        raise ConfigParseError(f"arc key {key!r} is out of range for {n} agents")
    return (i - 1, j - 1)


def _arc_map(value, name: str, graph: PursuitGraph) -> dict:
    if not isinstance(value, dict):
        raise ConfigParseError(f"{name} must map arc keys \"i,j\" to numbers")
    out = {}
    for key, v in value.items():
        arc = _parse_arc_key(key, graph.n)
        try:
            out[arc] = float(v)
        except (TypeError, ValueError) as exc:
            raise ConfigParseError(f"{name}[{key!r}] must be a number") from exc
    missing = [a for a in graph.arcs if a not in out]
    extra = [a for a in out if a not in graph.arcs]
    if missing:
        labels = ", ".join(f"\"{i + 1},{j + 1}\"" for (i, j) in missing)
        raise ConfigParseError(f"{name} is missing arcs {labels}")
    if extra:
        labels = ", ".join(f"\"{i + 1},{j + 1}\"" for (i, j) in extra)
        raise ConfigParseError(f"{name} lists non-arcs {labels}")
    return out


def _resolve_initial(doc, graph: PursuitGraph, params: CBParams) -> SystemState:
    if not isinstance(doc, dict):
        raise ConfigParseError("initial must be an object with a \"mode\" field")
    mode = doc.get("mode")
    if mode not in _INITIAL_MODES:
        raise ConfigParseError(
            f"initial mode must be one of {sorted(_INITIAL_MODES)}, got {mode!r}"
        )
    try:
        if mode == "absolute":
            positions = _points(_require(doc, "positions"), "positions", graph.n)
            headings = _points(_require(doc, "headings"), "headings", graph.n)
            norms = np.hypot(headings[:, 0], headings[:, 1])
            if np.any(norms < 1e-12):
                raise ConfigParseError("headings must be nonzero")
            return SystemState(positions, headings / norms[:, None])
        if mode == "manifold_positions":
            positions = _points(_require(doc, "positions"), "positions", graph.n)
            return SystemState(positions, headings_on_manifold(positions, graph, params))
        theta = _arc_map(_require(doc, "theta"), "theta", graph)
        rho = _arc_map(_require(doc, "rho"), "rho", graph)
        anchor_position = _float_list(
            doc.get("anchor_position", [0.0, 0.0]), "anchor_position", 2
        )
        anchor_heading = _float_list(
            doc.get("anchor_heading", [1.0, 0.0]), "anchor_heading", 2
        )
        return state_from_manifold_shape(
            graph,
            params,
            theta,
            rho,
            anchor_position=anchor_position,
            anchor_heading=anchor_heading,
        )
    except ConfigParseError:
        raise
    except (CBPursuitError, ValueError) as exc:
        raise ConfigParseError(f"invalid initial state: {exc}") from exc


def graph_params_from_config(doc: dict):
    """Validate just the graph and gains; initial state not required.

    Returns (name, graph, params). Used by analysis entry points that do
    not need an initial condition.
    """
    if not isinstance(doc, dict):
        raise ConfigParseError("scenario document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigParseError(f"unknown fields: {sorted(unknown)}")

    raw_targets = _require(doc, "targets")
    if not isinstance(raw_targets, (list, tuple)) or not raw_targets:
        raise ConfigParseError("targets must be a non-empty list of 1-based indices")
    n = len(raw_targets)
    try:
        targets = [int(t) - 1 for t in raw_targets]
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"targets must be integers: {exc}") from exc
    if any(not 0 <= t < n for t in targets):
        raise ConfigParseError(f"targets must lie in 1..{n}")
    try:
        graph = validate_graph(targets)
    except GraphError:
        raise
    except ValueError as exc:
        raise ConfigParseError(str(exc)) from exc

    alpha = _float_list(_require(doc, "alpha"), "alpha", n)
    mu = _float_list(doc["mu"], "mu", n) if "mu" in doc else None
    try:
        params = CBParams(alpha, mu)
    except ValueError as exc:
        raise ConfigParseError(str(exc)) from exc
    return str(doc.get("name", "scenario")), graph, params


def scenario_from_config(doc: dict) -> Scenario:
    """Validate a scenario document and resolve it into simulation objects."""
    name, graph, params = graph_params_from_config(doc)

    integ = doc.get("integrator", {})
    if not isinstance(integ, dict):
        raise ConfigParseError("integrator must be an object")
    unknown = set(integ) - _INTEGRATOR_KEYS
    if unknown:
        raise ConfigParseError(f"unknown integrator fields: {sorted(unknown)}")
    kwargs = {"t_final": 20.0}
    for key in _INTEGRATOR_KEYS:
        if key in integ:
            try:
                kwargs[key] = (
                    int(integ[key]) if key == "record_stride" else float(integ[key])
                )
            except (TypeError, ValueError) as exc:
                raise ConfigParseError(f"integrator.{key} must be a number") from exc
    try:
        config = IntegratorConfig(**kwargs)
    except InvalidConfigError as exc:
        raise ConfigParseError(str(exc)) from exc

    initial = _resolve_initial(_require(doc, "initial"), graph, params)
    return Scenario(name, graph, params, initial, config)


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return scenario_from_config(doc)
