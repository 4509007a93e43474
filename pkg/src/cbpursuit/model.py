"""Core state, parameter, and pursuit-graph types.

Agents are unit-speed planar particles steered by a scalar curvature
control.  The pursuit topology is a directed graph where every agent has
exactly one target, consisting of a single cycle plus optional branch
agents that target cycle members directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedError, MultiTierBranchError, SelfLoopError

TWO_PI = 2.0 * math.pi

# Separations at or below this are treated as collisions.
RHO_MIN = 1e-6


def wrap_angle(angle):
    """Wrap angle(s) into the half-open interval (-pi, pi].

    Accepts scalars or arrays; -pi maps to +pi.
    """
    a = np.asarray(angle, dtype=float)
    w = np.mod(a + np.pi, TWO_PI) - np.pi
    w = np.where(w == -np.pi, np.pi, w)
    if np.ndim(angle) == 0:
        return float(w)
    return w


def wrap_half_angle(angle):
    """Wrap angle(s) modulo pi into (-pi/2, pi/2]."""
    a = np.asarray(angle, dtype=float)
    half = 0.5 * np.pi
    w = np.mod(a + half, np.pi) - half
    w = np.where(w == -half, half, w)
    if np.ndim(angle) == 0:
        return float(w)
    return w


def rotation(beta: float) -> np.ndarray:
    """Counter-clockwise rotation matrix for angle beta."""
    if not math.isfinite(beta):
        raise ValueError(f"rotation angle must be finite, got {beta!r}")
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, -s], [s, c]])


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate a 2-vector by +pi/2."""
    return np.array([-v[1], v[0]])


def _frozen_array(values, shape=None) -> np.ndarray:
    a = np.array(values, dtype=float)
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("array entries must be finite")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AgentState:
    """Planar pose of one unit-speed agent."""

    position: np.ndarray
    heading: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _frozen_array(self.position, (2,)))
        object.__setattr__(self, "heading", _frozen_array(self.heading, (2,)))
        norm = float(np.hypot(*self.heading))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"heading must be unit length, got norm {norm!r}")

    @property
    def normal(self) -> np.ndarray:
        """Heading rotated by +pi/2."""
        return perp(self.heading)


@dataclass(frozen=True)
class CBParams:
    """Constant-bearing parameters: per-agent bearing angle and gain.

    alpha is wrapped into (-pi, pi].  mu defaults to 1 for every agent
    and must be strictly positive.
    """

    alpha: np.ndarray
    mu: np.ndarray | None = None

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        alpha = _frozen_array(wrap_angle(alpha))
        mu = np.ones(alpha.shape) if self.mu is None else np.atleast_1d(np.asarray(self.mu, dtype=float))
        mu = _frozen_array(mu)
        if mu.shape != alpha.shape:
            raise ValueError("alpha and mu must have the same length")
        if np.any(mu <= 0.0):
            raise ValueError("gains mu must be strictly positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class PursuitGraph:
    """Directed pursuit topology: one cycle plus direct branches.

    targets[i] is the agent pursued by agent i.  cycle_members are listed
    in pursuit order starting from the smallest cycle index; branch
    members are sorted.  Build instances through validate_graph.
    """

    targets: tuple[int, ...]
    cycle_members: tuple[int, ...]
    branch_members: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.targets)

    @property
    def cycle_arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, self.targets[i]) for i in self.cycle_members)

    @property
    def branch_arcs(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, self.targets[i]) for i in self.branch_members)

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        """All arcs, cycle arcs first (in cycle order), then branch arcs."""
        return self.cycle_arcs + self.branch_arcs

    @property
    def reference_arc(self) -> tuple[int, int]:
        """Arc out of the smallest-index cycle member (scale reference)."""
        return self.cycle_arcs[0]

    def arc_out_of(self, i: int) -> tuple[int, int]:
        return (i, self.targets[i])


def _walk_to_cycle(targets, start):
    """Follow targets from start until a node repeats; return that cycle."""
    order = []
    seen = {}
    node = start
    while node not in seen:
        seen[node] = len(order)
        order.append(node)
        node = targets[node]
    return order[seen[node]:]


def validate_graph(targets) -> PursuitGraph:
    """Validate a target map and classify agents into cycle and branches.

    Requirements: every agent has one target, no self loops, exactly one
    cycle, and every branch agent targets a cycle member directly.
    Raises SelfLoopError, DisconnectedError, or MultiTierBranchError.
    """
    targets = [int(t) for t in targets]
    n = len(targets)
    if n == 0:
        raise ValueError("graph must contain at least one agent")
    for i, t in enumerate(targets):
        if not 0 <= t < n:
            raise ValueError(f"target {t} of agent {i} is out of range")
        if t == i:
            raise SelfLoopError(f"agent {i} targets itself")

    cycle = _walk_to_cycle(targets, 0)
    cycle_set = set(cycle)
    branches = sorted(i for i in range(n) if i not in cycle_set)
    for b in branches:
        if targets[b] in cycle_set:
            continue
        reached = set(_walk_to_cycle(targets, b))
        if reached != cycle_set:
            raise DisconnectedError(
                f"agent {b} belongs to a second cycle; exactly one cycle is supported"
            )
        raise MultiTierBranchError(
            f"agent {b} targets branch agent {targets[b]}; branches must target the cycle"
        )

    k = cycle.index(min(cycle))
    cycle = cycle[k:] + cycle[:k]
    return PursuitGraph(tuple(targets), tuple(cycle), tuple(branches))


@dataclass(frozen=True)
class SystemState:
    """Snapshot of every agent's pose at a common time."""

    positions: np.ndarray
    headings: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        headings = np.atleast_2d(np.asarray(self.headings, dtype=float))
        if positions.shape != headings.shape or positions.shape[1] != 2:
            raise ValueError("positions and headings must both have shape (n, 2)")
        norms = np.hypot(headings[:, 0], headings[:, 1])
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("headings must be unit vectors")
        object.__setattr__(self, "positions", _frozen_array(positions))
        object.__setattr__(self, "headings", _frozen_array(headings))
        object.__setattr__(self, "time", float(self.time))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def agents(self) -> tuple[AgentState, ...]:
        return tuple(
            AgentState(self.positions[i], self.headings[i]) for i in range(self.n)
        )

    @classmethod
    def from_agents(cls, agents, time: float = 0.0) -> "SystemState":
        positions = np.array([a.position for a in agents])
        headings = np.array([a.heading for a in agents])
        return cls(positions, headings, time)
