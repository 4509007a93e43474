"""Collective-motion classification from trajectories and from parameters.

classify_behavior inspects a simulated trajectory tail and names the
emergent motion.  predict_behavior ranks the admissible equilibrium
families by the numerically evaluated spectrum of the pure-shape
linearization, which reproduces the observed outcome without simulating.
"""

from __future__ import annotations

import math

import numpy as np

from .equilibria import (
    circling_equilibrium,
    pure_shape_equilibria,
    rectilinear_equilibrium,
)
from .errors import NotPeriodicError
from .model import CBParams, PursuitGraph, wrap_angle
from .pureshape import detect_period, rescaled_time
from .shape import shape_series
from .systems import PureShapeSystem, fd_jacobian

RECTILINEAR_DOT = 0.999
SETTLE_TOL = 1e-3
CENTER_DRIFT_REL = 0.02
RADIUS_REL = 0.01


def _tail(count: int, fraction: float = 0.25) -> int:
    return max(2, int(round(count * fraction)))


def _angle_spread(theta: np.ndarray) -> np.ndarray:
    # ptp of wrapped angles is meaningless at the seam; measure relative
    # to the last sample instead
    return np.ptp(wrap_angle(theta - theta[-1:]), axis=0)


def classify_behavior(times, positions, headings, graph: PursuitGraph, params: CBParams) -> str:
    """Name the emergent motion of a recorded trajectory.

    Returns one of "rectilinear", "circling", "spiral", "periodic",
    "none".  The checks look at the trailing quarter of the samples, so
    the horizon must be long enough for transients to die out.
    """
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    headings = np.asarray(headings, dtype=float)
    k = times.shape[0]
    if k < 8:
        return "none"

    final_heads = headings[-1]
    n = final_heads.shape[0]
    dots = [
        float(final_heads[i] @ final_heads[j])
        for i in range(n)
        for j in range(i + 1, n)
    ]
    if min(dots) > RECTILINEAR_DOT:
        return "rectilinear"

    w = _tail(k)
    _, theta, rho = shape_series(positions[-w:], headings[-w:], graph)
    n_cycle = len(graph.cycle_arcs)
    rho_ref = rho[:, 0]
    rho_tilde = rho / rho_ref[:, None]

    # circling: the osculating circle of the reference agent freezes and
    # every agent sits on it
    ref = graph.reference_arc[0]
    sin_ref = math.sin(float(params.alpha[ref]))
    if abs(sin_ref) > 1e-12:
        radius = rho_ref / (2.0 * sin_ref)
        normal = np.stack(
            [-headings[-w:, ref, 1], headings[-w:, ref, 0]], axis=1
        )
        centers = positions[-w:, ref] + radius[:, None] * normal
        r_fin = abs(float(radius[-1]))
        drift = float(np.max(np.linalg.norm(centers - centers[-1], axis=1)))
        dist = np.linalg.norm(positions[-1] - centers[-1], axis=1)
        on_circle = float(np.max(np.abs(dist - r_fin))) < RADIUS_REL * r_fin
        radius_settled = float(np.max(np.abs(np.abs(radius) - r_fin))) < RADIUS_REL * r_fin
        if drift < CENTER_DRIFT_REL * r_fin and on_circle and radius_settled:
            return "circling"

    theta_settled = float(_angle_spread(theta).max()) < SETTLE_TOL
    ratio_settled = float(np.ptp(rho_tilde, axis=0).max()) < SETTLE_TOL
    log_scale = np.log(rho_ref)
    scale_moves = abs(float(log_scale[-1] - log_scale[0])) > 0.02
    monotone = bool(
        np.all(np.diff(log_scale) > 0.0) or np.all(np.diff(log_scale) < 0.0)
    )
    if theta_settled and ratio_settled and scale_moves and monotone:
        return "spiral"

    # periodic: cycle shape settles, some branch arc keeps oscillating and
    # returns to a section point
    if graph.branch_arcs:
        half = k // 2
        _, theta_h, rho_h = shape_series(positions[half:], headings[half:], graph)
        cycle_settled = (
            float(_angle_spread(theta_h[:, :n_cycle]).max()) < 10 * SETTLE_TOL
            and float(
                np.ptp(rho_h[:, :n_cycle] / rho_h[:, 0][:, None], axis=0).max()
            )
            < 10 * SETTLE_TOL
        )
        if cycle_settled:
            taus = rescaled_time(times[half:], np.log(rho_h[:, 0]))
            for a in range(n_cycle, theta_h.shape[1]):
                branch_ratio = rho_h[:, a] / rho_h[:, 0]
                if (
                    float(_angle_spread(theta_h[:, a]).max()) < 10 * SETTLE_TOL
                    and np.ptp(branch_ratio) < 10 * SETTLE_TOL
                ):
                    continue
                try:
                    estimate = detect_period(
                        taus, theta_h[:, a], branch_ratio, return_tol=1e-3
                    )
                except NotPeriodicError:
                    continue
                if estimate.period > 0.0:
                    return "periodic"
    return "none"


def _closure_map(graph: PursuitGraph, params: CBParams):
    """Smooth cycle-closure function of the packed (theta, rho_tilde) block.

    Chaining poses around the cycle must come back to the start; that is
    one heading-turn sum plus a two-component displacement sum.  All three
    are conserved by the shape flow, so their gradients span directions a
    physical perturbation can never take.
    """
    arcs = graph.arcs
    m = len(graph.cycle_arcs)
    n_arcs = len(arcs)
    alpha_t = params.alpha[[i for (i, _) in arcs[:m]]]

    def fn(block: np.ndarray) -> np.ndarray:
        th = block[:n_arcs]
        rho = block[n_arcs:]
        turns = np.pi + alpha_t - th[:m]
        head = np.concatenate(([0.0], np.cumsum(turns)[:-1]))
        ang = head + alpha_t
        return np.array(
            [
                turns.sum(),
                np.dot(rho[:m], np.cos(ang)),
                np.dot(rho[:m], np.sin(ang)),
            ]
        )

    return fn


def shape_tangent_basis(graph: PursuitGraph, params: CBParams, theta, rho_tilde) -> np.ndarray:
    """Orthonormal basis of physical shape perturbations at an equilibrium.

    Columns span the null space of the closure gradients together with the
    pinned reference-ratio direction.  Shape (2 * n_arcs, d).
    """
    arcs = graph.arcs
    n_arcs = len(arcs)
    block = np.concatenate(
        [[theta[a] for a in arcs], [rho_tilde[a] for a in arcs]]
    )
    fn = _closure_map(graph, params)
    step = 1e-6
    grads = np.empty((3, 2 * n_arcs))
    for col in range(2 * n_arcs):
        hi = block.copy()
        hi[col] += step
        lo = block.copy()
        lo[col] -= step
        grads[:, col] = (fn(hi) - fn(lo)) / (2.0 * step)
    pin = np.zeros((1, 2 * n_arcs))
    pin[0, n_arcs] = 1.0
    rows = np.vstack([grads, pin])
    _, svals, vt = np.linalg.svd(rows)
    rank = int(np.sum(svals > 1e-9 * svals[0]))
    return vt[rank:].T


def shape_equilibrium_modes(
    graph: PursuitGraph, params: CBParams, theta, rho_tilde, *, project: bool = True
) -> np.ndarray:
    """Eigenvalues of the pure-shape linearization at a shape equilibrium.

    With project=True (default) the Jacobian is restricted to the tangent
    space of the closure constraints with the reference ratio pinned; only
    physically reachable modes remain.  The raw spectrum additionally
    carries structural zeros and constraint-transverse artifacts.
    """
    system = PureShapeSystem(graph, params)
    y0 = system.pack(0.0, theta, rho_tilde)
    idx = np.arange(1, system.dim)
    jac = fd_jacobian(lambda y: system.derivative(0.0, y), y0, indices=idx)
    if not project:
        return np.linalg.eigvals(jac)
    basis = shape_tangent_basis(graph, params, theta, rho_tilde)
    if basis.shape[1] == 0:
        return np.empty(0, dtype=complex)
    return np.linalg.eigvals(basis.T @ jac @ basis)


def _mode_verdict(modes: np.ndarray) -> str:
    re = modes.real
    im = modes.imag
    if np.any(re > 1e-5):
        return "unstable"
    if np.any((np.abs(re) <= 1e-5) & (np.abs(im) > 1e-3)):
        return "neutral"
    return "attracting"


def predict_behavior(graph: PursuitGraph, params: CBParams) -> str:
    """Predict the emergent motion from the equilibrium families alone."""
    rect = rectilinear_equilibrium(params, graph)
    if rect.admissible:
        return "rectilinear"

    circ = circling_equilibrium(params, graph)
    candidates = []
    if circ.admissible:
        candidates.append(("circling", circ))
    for rep in pure_shape_equilibria(params, graph):
        if rep.admissible and abs(rep.log_scale_rate) > 1e-9:
            candidates.append(("spiral", rep))

    circling_neutral = False
    for label, rep in candidates:
        verdict = _mode_verdict(shape_equilibrium_modes(graph, params, rep.theta, rep.rho_tilde))
        if verdict == "attracting":
            return label
        if label == "circling" and verdict == "neutral":
            circling_neutral = True
    if circling_neutral:
        return "periodic"
    return "none"
