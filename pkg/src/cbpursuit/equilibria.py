"""Closed-form equilibria of the shape dynamics and their stability.

Three families are covered: rectilinear motion (all agents translate
along a common axis), circling (all agents on one circle), and pure-shape
equilibria of the rescaled dynamics (shape-preserving motions that spiral
when the scale rate is nonzero).  For the three-agent mutual-pursuit
cycle with one branch, the branch equilibria come with an analytic
Jacobian and a sign rule for their stability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import InadmissibleEquilibriumError
from .model import CBParams, PursuitGraph, wrap_angle, wrap_half_angle

ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumReport:
    """One equilibrium family evaluated for a parameter set.

    theta maps each arc to its equilibrium angle.  rho_tilde maps each
    arc to its separation ratio against the reference arc; it is None for
    rectilinear equilibria, whose separations are arbitrary.  Values are
    None when the family is inadmissible.  strict_mod_2pi reports the
    angle condition taken literally modulo 2*pi, relaxed_mod_pi the same
    condition modulo pi; admissibility follows the relaxed check, which
    is the one the simulations realize.
    """

    kind: str
    admissible: bool
    reason: str
    theta: MappingProxyType | None = None
    rho_tilde: MappingProxyType | None = None
    strict_mod_2pi: bool | None = None
    relaxed_mod_pi: bool | None = None
    circling_radius: float | None = None
    tau: float | None = None
    k: int | None = None
    log_scale_rate: float | None = None

    def __post_init__(self):
        if self.theta is not None:
            object.__setattr__(self, "theta", MappingProxyType(dict(self.theta)))
        if self.rho_tilde is not None:
            object.__setattr__(self, "rho_tilde", MappingProxyType(dict(self.rho_tilde)))


@dataclass(frozen=True)
class StabilityVerdict:
    """Linear stability of a 3-agent branch equilibrium."""

    classification: str
    eigenvalues: tuple
    trace_sign_quantity: float
    theta_star: float
    rho_tilde_star: float


def _common_strict_sign(values, tol=ANGLE_TOL) -> int:
    """+1 or -1 when all values share a strict sign, else 0."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(np.abs(v) <= tol):
        return 0
    signs = np.sign(v)
    if np.all(signs == signs[0]):
        return int(signs[0])
    return 0


def rectilinear_equilibrium(params: CBParams, graph: PursuitGraph) -> EquilibriumReport:
    """Rectilinear (common heading) equilibrium of the manifold dynamics.

    Admissible when consecutive cycle bearings are congruent modulo pi
    and both orientation classes (alpha vs alpha + pi) occur, so the
    separation vectors can cancel around the cycle.  Separations are
    arbitrary; theta is pi + alpha of each arc's tail.
    """
    cyc = list(graph.cycle_members)
    alpha = params.alpha

    chain = [
        wrap_angle(alpha[cyc[k]] - alpha[cyc[k - 1]] - math.pi)
        for k in range(len(cyc))
    ]
    strict = bool(all(abs(c) <= ANGLE_TOL for c in chain))

    base = float(alpha[cyc[0]])
    rel = np.array([float(alpha[c]) - base for c in cyc])
    aligned = bool(np.all(np.abs(wrap_half_angle(rel)) <= ANGLE_TOL))
    flips = np.abs(wrap_angle(rel)) > 0.5 * math.pi
    balanced = bool(flips.any() and (~flips).any())
    relaxed = aligned and balanced

    if relaxed:
        reason = "cycle bearings congruent modulo pi with both orientations present"
    elif not aligned:
        reason = "cycle bearings are not congruent modulo pi"
    else:
        reason = "all cycle bearings share one orientation; separations cannot close"

    theta = None
    if relaxed:
        theta = {
            (i, j): wrap_angle(math.pi + float(alpha[i])) for (i, j) in graph.arcs
        }
    return EquilibriumReport(
        kind="rectilinear",
        admissible=relaxed,
        reason=reason,
        theta=theta,
        rho_tilde=None,
        strict_mod_2pi=strict,
        relaxed_mod_pi=relaxed,
    )


def circling_equilibrium(params: CBParams, graph: PursuitGraph) -> EquilibriumReport:
    """Common-circle equilibrium of the manifold dynamics.

    Admissible when all bearings have one strict sine sign and the cycle
    bearings sum to a multiple of pi.  Separation ratios are
    sin(alpha_tail) over sin(alpha_ref); circling_radius is the (signed)
    circle radius per unit reference separation, centered at
    position + radius * normal of the reference agent.
    """
    cyc = list(graph.cycle_members)
    alpha = params.alpha
    ref_tail = graph.reference_arc[0]

    cycle_sign = _common_strict_sign([math.sin(float(alpha[c])) for c in cyc])
    branch_sines = [math.sin(float(alpha[b])) for b in graph.branch_members]
    signs_ok = cycle_sign != 0 and all(
        abs(s) > ANGLE_TOL and math.copysign(1.0, s) == cycle_sign for s in branch_sines
    )

    total = math.fsum(float(alpha[c]) for c in cyc)
    strict = bool(abs(wrap_angle(total)) <= ANGLE_TOL)
    relaxed = bool(abs(wrap_half_angle(total)) <= ANGLE_TOL)

    admissible = signs_ok and relaxed
    if admissible:
        reason = "bearing sines share one sign and cycle bearings sum to a multiple of pi"
    elif not signs_ok:
        reason = "bearing sines do not share one strict sign"
    else:
        reason = "cycle bearings do not sum to a multiple of pi"

    theta = rho_tilde = None
    radius = None
    if admissible:
        theta = {(i, j): wrap_angle(math.pi - float(alpha[i])) for (i, j) in graph.arcs}
        sin_ref = math.sin(float(alpha[ref_tail]))
        rho_tilde = {
            (i, j): math.sin(float(alpha[i])) / sin_ref for (i, j) in graph.arcs
        }
        radius = 1.0 / (2.0 * sin_ref)
    return EquilibriumReport(
        kind="circling",
        admissible=admissible,
        reason=reason,
        theta=theta,
        rho_tilde=rho_tilde,
        strict_mod_2pi=strict,
        relaxed_mod_pi=relaxed,
        circling_radius=radius,
    )


def pure_shape_equilibria(params: CBParams, graph: PursuitGraph) -> list:
    """All pure-shape equilibrium candidates, one per phase index k.

    For a cycle of length m the candidate phases are
    tau_k = (sum of cycle bearings - k pi) / m for k = 0 .. m-1.  A
    candidate is admissible when sin(alpha - tau_k) has one strict sign
    across all agents.  Reports carry the per-arc theta and separation
    ratios plus the log-scale rate (nonzero means spiraling; tau_k = 0
    modulo pi reduces to circling).
    """
    cyc = list(graph.cycle_members)
    m = len(cyc)
    alpha = params.alpha
    ref_tail = graph.reference_arc[0]
    total = math.fsum(float(alpha[c]) for c in cyc)
    tails = [i for (i, _) in graph.arcs]

    reports = []
    for k in range(m):
        tau = (total - k * math.pi) / m
        margins = [math.sin(float(alpha[i]) - tau) for i in cyc]
        margins += [math.sin(float(alpha[b]) - tau) for b in graph.branch_members]
        sign = _common_strict_sign(margins)
        admissible = sign != 0

        theta = rho_tilde = None
        rate = None
        if admissible:
            theta = {
                (i, j): wrap_angle(math.pi - float(alpha[i]) + 2.0 * tau)
                for (i, j) in graph.arcs
            }
            sin_ref = math.sin(float(alpha[ref_tail]) - tau)
            rho_tilde = {
                (i, j): math.sin(float(alpha[i]) - tau) / sin_ref
                for (i, j) in graph.arcs
            }
            rate = 2.0 * math.sin(tau) * sin_ref
            reason = f"sin(alpha - tau) keeps one sign for tau = {tau:.6g}"
        else:
            reason = f"sin(alpha - tau) changes sign or vanishes for tau = {tau:.6g}"
        reports.append(
            EquilibriumReport(
                kind="pure_shape",
                admissible=admissible,
                reason=reason,
                theta=theta,
                rho_tilde=rho_tilde,
                tau=tau,
                k=k,
                log_scale_rate=rate,
            )
        )
    return reports


def branch_jacobian(theta: float, rho_tilde: float, params: CBParams) -> np.ndarray:
    """Jacobian of the 3-agent branch pure-shape flow at (theta, rho_tilde)."""
    if params.n != 3:
        raise ValueError("branch Jacobian is defined for 3 agents")
    if not rho_tilde > 0.0:
        raise ValueError("rho_tilde must be positive")
    a1, a2, a3 = (float(v) for v in params.alpha)
    return np.array(
        [
            [
                math.cos(theta) / rho_tilde,
                -(math.sin(a3) + math.sin(theta)) / rho_tilde ** 2,
            ],
            [math.sin(theta), math.cos(a1) + math.cos(a2)],
        ]
    )


def _classify(max_real: float, tol: float = ANGLE_TOL) -> str:
    if max_real > tol:
        return "unstable"
    if max_real < -tol:
        return "stable"
    return "marginal"


def classify_stability_3agent(params: CBParams, kind: str) -> StabilityVerdict:
    """Linear stability of the branch equilibrium for mutual pursuit plus branch.

    Topology: agents 0 and 1 pursue each other, agent 2 pursues agent 0.
    kind selects the family: "circling" (branch joins the cycle circle)
    or "pure_shape" (shape-preserving branch equilibrium).  Raises
    InadmissibleEquilibriumError when the requested family does not exist
    for these parameters.  The sign of trace_sign_quantity matches the
    sign of the leading eigenvalue real part.
    """
    if params.n != 3:
        raise ValueError("stability classification is defined for 3 agents")
    a1, a2, a3 = (float(v) for v in params.alpha)

    if kind == "circling":
        if _common_strict_sign([math.sin(a1), math.sin(a2), math.sin(a3)]) == 0:
            raise InadmissibleEquilibriumError(
                "bearing sines must share one strict sign for circling"
            )
        if abs(wrap_half_angle(a1 + a2)) > ANGLE_TOL:
            raise InadmissibleEquilibriumError(
                "cycle bearings must sum to a multiple of pi for circling"
            )
        theta_star = wrap_angle(math.pi - a3)
        rho_star = math.sin(a3) / math.sin(a1)
        quantity = -math.cos(a3)
    elif kind == "pure_shape":
        beta = 0.5 * (a1 + a2)
        c1 = math.cos(a1 - beta)
        c3 = math.cos(a3 - beta)
        if abs(c1) <= ANGLE_TOL or abs(c3) <= ANGLE_TOL or c1 * c3 < 0.0:
            raise InadmissibleEquilibriumError(
                "cos(alpha - beta) must keep one strict sign for the pure-shape branch"
            )
        theta_star = wrap_angle(a1 + a2 - a3)
        rho_star = c3 / c1
        quantity = 2.0 * math.cos(a1 + a2 - a3) + math.cos(a3)
    else:
        raise ValueError(f"unknown equilibrium kind {kind!r}")

    jac = branch_jacobian(theta_star, rho_star, params)
    eigs = np.linalg.eigvals(jac)
    return StabilityVerdict(
        classification=_classify(float(eigs.real.max())),
        eigenvalues=tuple(complex(e) for e in eigs),
        trace_sign_quantity=quantity,
        theta_star=theta_star,
        rho_tilde_star=rho_star,
    )
