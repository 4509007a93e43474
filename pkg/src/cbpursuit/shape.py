"""Relative shape variables on pursuit arcs and cycle closure checks.

For an arc (i, j) the shape of the pair is (kappa, theta, rho): kappa is
the signed angle from pursuer heading x_i to the line of sight toward j,
theta is the signed angle from target heading x_j to the reversed line of
sight, and rho is the separation.  Angles live in (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import CollisionError, InvalidConfigError
from .model import (
    RHO_MIN,
    CBParams,
    PursuitGraph,
    SystemState,
    rotation,
    wrap_angle,
)


@dataclass(frozen=True)
class ArcShape:
    """Shape of one pursuer/target pair."""

    kappa: float
    theta: float
    rho: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError(f"separation rho must be positive, got {self.rho!r}")
        object.__setattr__(self, "kappa", wrap_angle(self.kappa))
        object.__setattr__(self, "theta", wrap_angle(self.theta))
        object.__setattr__(self, "rho", float(self.rho))


@dataclass(frozen=True)
class ShapeState:
    """Arc shapes keyed by arc (i, j)."""

    arcs: dict

    def __post_init__(self):
        object.__setattr__(self, "arcs", MappingProxyType(dict(self.arcs)))

    def __getitem__(self, arc) -> ArcShape:
        return self.arcs[arc]


def _signed_angle(frm: np.ndarray, to: np.ndarray) -> float:
    """Signed angle that rotates unit vector frm onto unit vector to."""
    return math.atan2(frm[0] * to[1] - frm[1] * to[0], frm[0] * to[0] + frm[1] * to[1])


def shape_from_absolute(state: SystemState, graph: PursuitGraph) -> ShapeState:
    """Extract per-arc shape variables from absolute poses.

    Raises CollisionError if any arc separation is at or below RHO_MIN.
    """
    arcs = {}
    for (i, j) in graph.arcs:
        d = state.positions[j] - state.positions[i]
        rho = float(np.hypot(*d))
        if rho <= RHO_MIN:
            raise CollisionError(f"agents {i} and {j} are separated by {rho:.3e}")
        los = d / rho
        kappa = _signed_angle(state.headings[i], los)
        theta = _signed_angle(state.headings[j], -los)
        arcs[(i, j)] = ArcShape(kappa, theta, rho)
    return ShapeState(arcs)


def shape_series(positions, headings, graph: PursuitGraph):
    """Vectorized shape extraction along a trajectory.

    positions and headings have shape (k, n, 2); returns (kappa, theta,
    rho) arrays of shape (k, n_arcs) in graph.arcs order.
    """
    pos = np.asarray(positions, dtype=float)
    hed = np.asarray(headings, dtype=float)
    tails = np.array([i for (i, _) in graph.arcs])
    heads = np.array([j for (_, j) in graph.arcs])
    d = pos[:, heads] - pos[:, tails]
    rho = np.hypot(d[..., 0], d[..., 1])
    xi = hed[:, tails]
    xj = hed[:, heads]
    kappa = np.arctan2(
        xi[..., 0] * d[..., 1] - xi[..., 1] * d[..., 0],
        xi[..., 0] * d[..., 0] + xi[..., 1] * d[..., 1],
    )
    theta = np.arctan2(
        -(xj[..., 0] * d[..., 1] - xj[..., 1] * d[..., 0]),
        -(xj[..., 0] * d[..., 0] + xj[..., 1] * d[..., 1]),
    )
    return kappa, theta, rho


def shape_derivatives(shape: ShapeState, controls) -> dict:
    """Open-loop shape rates per arc given scalar controls u by agent index.

    Returns {arc: (kappa_dot, theta_dot, rho_dot)}.
    """
    rates = {}
    for (i, j), s in shape.arcs.items():
        if s.rho <= RHO_MIN:
            raise CollisionError(f"arc ({i}, {j}) separation {s.rho:.3e} at floor")
        coupling = (math.sin(s.kappa) + math.sin(s.theta)) / s.rho
        kappa_dot = -controls[i] + coupling
        theta_dot = -controls[j] + coupling
        rho_dot = -math.cos(s.kappa) - math.cos(s.theta)
        rates[(i, j)] = (kappa_dot, theta_dot, rho_dot)
    return rates


def closure_residual(shape: ShapeState, params: CBParams, graph: PursuitGraph):
    """Cycle closure residuals of a shape under the bearing angles.

    On the constant-bearing manifold the cycle headings and separations
    must close up: the composed heading rotation around the cycle is the
    identity and the separation vectors sum to zero.  Returns
    (rotation_residual, translation_residual) as Frobenius norms; both
    vanish for shapes extracted from absolute states with kappa = alpha.
    """
    cycle = graph.cycle_members
    m = len(cycle)
    turns = []
    for k, c in enumerate(cycle):
        arc_in = (cycle[k - 1], c)
        turns.append(math.pi + float(params.alpha[c]) - shape.arcs[arc_in].theta)

    total = rotation(math.fsum(turns))
    rotation_residual = float(np.linalg.norm(total - np.eye(2)))

    displacement = np.zeros((2, 2))
    partial = 0.0
    for k, c in enumerate(cycle):
        arc_out = (c, cycle[(k + 1) % m])
        partial += turns[k]
        displacement += shape.arcs[arc_out].rho * rotation(partial)
    translation_residual = float(np.linalg.norm(displacement))
    return rotation_residual, translation_residual


def headings_on_manifold(positions, graph: PursuitGraph, params: CBParams) -> np.ndarray:
    """Headings that realize kappa_i = alpha_i at the given positions."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    headings = np.zeros_like(positions)
    for i in range(positions.shape[0]):
        j = graph.targets[i]
        d = positions[j] - positions[i]
        rho = float(np.hypot(*d))
        if rho <= RHO_MIN:
            raise CollisionError(f"agents {i} and {j} are separated by {rho:.3e}")
        headings[i] = rotation(-float(params.alpha[i])) @ (d / rho)
    return headings


def state_from_manifold_shape(
    graph: PursuitGraph,
    params: CBParams,
    theta,
    rho,
    *,
    anchor_position=(0.0, 0.0),
    anchor_heading=(1.0, 0.0),
    time: float = 0.0,
    closure_tol: float = 1e-6,
) -> SystemState:
    """Synthesize absolute poses from manifold shape values (kappa = alpha).

    theta and rho map each arc (i, j) to its shape values.  The first
    cycle member is placed at anchor_position with anchor_heading; the
    cycle is chained arc by arc and must close within closure_tol, else
    InvalidConfigError is raised.  Branch agents are placed off their
    targets.
    """
    n = graph.n
    positions = np.zeros((n, 2))
    headings = np.zeros((n, 2))

    anchor = graph.cycle_members[0]
    positions[anchor] = np.asarray(anchor_position, dtype=float)
    h0 = np.asarray(anchor_heading, dtype=float)
    norm = float(np.hypot(*h0))
    if norm <= 0.0:
        raise InvalidConfigError("anchor heading must be nonzero")
    headings[anchor] = h0 / norm

    for (i, j) in graph.cycle_arcs:
        alpha_i = float(params.alpha[i])
        r_ij = float(rho[(i, j)])
        if r_ij <= RHO_MIN:
            raise InvalidConfigError(f"arc ({i}, {j}) separation {r_ij!r} too small")
        step = r_ij * (rotation(alpha_i) @ headings[i])
        next_pos = positions[i] + step
        next_head = rotation(math.pi + alpha_i - float(theta[(i, j)])) @ headings[i]
        if j == anchor:
            gap = float(np.hypot(*(next_pos - positions[anchor])))
            twist = float(np.hypot(*(next_head - headings[anchor])))
            if gap > closure_tol or twist > closure_tol:
                raise InvalidConfigError(
                    f"cycle does not close: position gap {gap:.3e}, heading gap {twist:.3e}"
                )
        else:
            positions[j] = next_pos
            headings[j] = next_head

    for (b, c) in graph.branch_arcs:
        th = float(theta[(b, c)])
        r_bc = float(rho[(b, c)])
        if r_bc <= RHO_MIN:
            raise InvalidConfigError(f"arc ({b}, {c}) separation {r_bc!r} too small")
        positions[b] = positions[c] + r_bc * (rotation(th) @ headings[c])
        headings[b] = -(rotation(th - float(params.alpha[b])) @ headings[c])

    return SystemState(positions, headings, time)
