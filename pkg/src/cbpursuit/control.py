"""Constant-bearing control law and the shape dynamics it induces.

Each agent steers so that the bearing of its target, measured from its
own heading, is driven to the prescribed angle alpha.  The control is the
gradient descent of the bearing misalignment cost plus a feedforward term
that cancels the relative-motion coupling, which makes kappa = alpha an
invariant manifold of the closed loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from .errors import CollisionError
from .model import RHO_MIN, CBParams, PursuitGraph, SystemState
from .shape import ShapeState
from .systems import FullStateSystem, ManifoldShapeSystem


def _tail_arcs(shape: ShapeState) -> dict:
    return {arc[0]: arc for arc in shape.arcs}


def cb_cost(shape: ShapeState, params: CBParams) -> np.ndarray:
    """Bearing misalignment cost per agent, -cos(kappa - alpha).

    The cost is -1 exactly on the CB manifold and +1 when the target sits
    dead astern of the commanded bearing.
    """
    by_tail = _tail_arcs(shape)
    cost = np.zeros(params.n)
    for i in range(params.n):
        s = shape.arcs[by_tail[i]]
        cost[i] = -math.cos(s.kappa - float(params.alpha[i]))
    return cost


def cb_control_law(shape: ShapeState, params: CBParams) -> np.ndarray:
    """Scalar CB control per agent.

    u_i = mu_i sin(kappa_i - alpha_i) + (sin kappa_i + sin theta_i) / rho_i
    evaluated on agent i's out-arc.
    """
    by_tail = _tail_arcs(shape)
    u = np.zeros(params.n)
    for i in range(params.n):
        s = shape.arcs[by_tail[i]]
        if s.rho <= RHO_MIN:
            raise CollisionError(f"arc {by_tail[i]} separation {s.rho:.3e} at floor")
        u[i] = float(params.mu[i]) * math.sin(s.kappa - float(params.alpha[i])) + (
            math.sin(s.kappa) + math.sin(s.theta)
        ) / s.rho
    return u


class FullStateDerivative(NamedTuple):
    position_rates: np.ndarray
    heading_rates: np.ndarray
    controls: np.ndarray


def closed_loop_full_derivative(
    state: SystemState, graph: PursuitGraph, params: CBParams
) -> FullStateDerivative:
    """Time derivative of the absolute state under CB control."""
    system = FullStateSystem(graph, params)
    y = system.pack(state)
    if system.min_separation(y) <= RHO_MIN:
        raise CollisionError("some arc separation is at the floor")
    dy = system.derivative(state.time, y)
    n = graph.n
    return FullStateDerivative(
        dy[: 2 * n].reshape(n, 2),
        dy[2 * n :].reshape(n, 2),
        system.controls(y),
    )


@dataclass(frozen=True)
class ManifoldShapeState:
    """Shape restricted to the CB manifold: theta and rho per arc."""

    theta: dict
    rho: dict

    def __post_init__(self):
        theta = {arc: float(v) for arc, v in self.theta.items()}
        rho = {arc: float(v) for arc, v in self.rho.items()}
        if set(theta) != set(rho):
            raise ValueError("theta and rho must cover the same arcs")
        for arc, r in rho.items():
            if not r > 0.0:
                raise ValueError(f"arc {arc} separation must be positive, got {r!r}")
        object.__setattr__(self, "theta", MappingProxyType(theta))
        object.__setattr__(self, "rho", MappingProxyType(rho))

    @classmethod
    def from_shape(cls, shape: ShapeState) -> "ManifoldShapeState":
        return cls(
            {arc: s.theta for arc, s in shape.arcs.items()},
            {arc: s.rho for arc, s in shape.arcs.items()},
        )


def manifold_shape_derivative(
    mstate: ManifoldShapeState, graph: PursuitGraph, params: CBParams
) -> dict:
    """Per-arc (theta_dot, rho_dot) of the manifold shape dynamics.

    Every arc (i, j) is coupled to the arc out of its own target j, which
    covers cycle and branch arcs uniformly.
    """
    system = ManifoldShapeSystem(graph, params)
    y = system.pack(mstate.theta, mstate.rho)
    if system.min_separation(y) <= RHO_MIN:
        raise CollisionError("some arc separation is at the floor")
    dy = system.derivative(0.0, y)
    m = system.n_arcs
    return {
        arc: (float(dy[a]), float(dy[m + a])) for a, arc in enumerate(system.arcs)
    }
