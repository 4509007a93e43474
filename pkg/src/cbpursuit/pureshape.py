"""Scale-free shape dynamics in rescaled time and section-based periodicity.

The manifold shape dynamics are homogeneous of degree -1 in the
separations, so dividing every rho by the reference-arc separation and
rescaling time by that separation yields an autonomous flow of the pure
shape (theta, rho_tilde).  The log of the reference separation evolves
alongside and never feeds back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from .errors import (
    CollisionError,
    InadmissibleEquilibriumError,
    NonMonotonicTimeError,
    NotPeriodicError,
)
from .model import RHO_MIN, CBParams, PursuitGraph, wrap_angle
from .control import ManifoldShapeState
from .integrate import IntegratorConfig, Trajectory, integrate
from .systems import PureShapeSystem, SpecialCaseSystem


@dataclass(frozen=True)
class PureShapeState:
    """Scale-free shape: log reference separation, theta and rho_tilde per arc."""

    log_scale: float
    theta: dict
    rho_tilde: dict
    tau: float = 0.0

    def __post_init__(self):
        theta = {arc: float(v) for arc, v in self.theta.items()}
        rho_tilde = {arc: float(v) for arc, v in self.rho_tilde.items()}
        if set(theta) != set(rho_tilde):
            raise ValueError("theta and rho_tilde must cover the same arcs")
        for arc, r in rho_tilde.items():
            if not r > 0.0:
                raise ValueError(f"arc {arc} ratio must be positive, got {r!r}")
        object.__setattr__(self, "log_scale", float(self.log_scale))
        object.__setattr__(self, "theta", MappingProxyType(theta))
        object.__setattr__(self, "rho_tilde", MappingProxyType(rho_tilde))
        object.__setattr__(self, "tau", float(self.tau))


def to_pure_shape(mstate: ManifoldShapeState, graph: PursuitGraph) -> PureShapeState:
    """Quotient a manifold shape by the reference-arc separation."""
    ref = graph.reference_arc
    rho_ref = mstate.rho[ref]
    if rho_ref <= RHO_MIN:
        raise CollisionError(f"reference arc separation {rho_ref:.3e} at floor")
    rho_tilde = {arc: r / rho_ref for arc, r in mstate.rho.items()}
    return PureShapeState(math.log(rho_ref), dict(mstate.theta), rho_tilde)


def from_pure_shape(pstate: PureShapeState, graph: PursuitGraph) -> ManifoldShapeState:
    """Restore absolute separations from a pure shape and its log scale."""
    rho_ref = math.exp(pstate.log_scale)
    rho = {arc: r * rho_ref for arc, r in pstate.rho_tilde.items()}
    return ManifoldShapeState(dict(pstate.theta), rho)


class PureShapeRates(NamedTuple):
    log_scale_rate: float
    theta_rates: dict
    rho_tilde_rates: dict


def pure_shape_derivative(
    pstate: PureShapeState, graph: PursuitGraph, params: CBParams
) -> PureShapeRates:
    """Rates of (log_scale, theta, rho_tilde) with respect to rescaled time.

    Independent of log_scale itself; the reference ratio stays exactly 1.
    """
    system = PureShapeSystem(graph, params)
    y = system.pack(pstate.log_scale, pstate.theta, pstate.rho_tilde)
    if system.min_separation(y) <= RHO_MIN:
        raise CollisionError("some arc ratio is at the floor")
    dy = system.derivative(0.0, y)
    m = system.n_arcs
    theta_rates = {arc: float(dy[1 + a]) for a, arc in enumerate(system.arcs)}
    rho_rates = {arc: float(dy[1 + m + a]) for a, arc in enumerate(system.arcs)}
    return PureShapeRates(float(dy[0]), theta_rates, rho_rates)


def rescaled_time(times, log_scales) -> np.ndarray:
    """Map ordinary times to rescaled times, tau = integral of exp(-log_scale).

    Uses trapezoidal quadrature on the sampled log scale; times must be
    strictly increasing.
    """
    t = np.asarray(times, dtype=float)
    lam = np.asarray(log_scales, dtype=float)
    if t.shape != lam.shape or t.ndim != 1:
        raise ValueError("times and log_scales must be matching 1-d arrays")
    if t.size < 1:
        raise ValueError("need at least one sample")
    dt = np.diff(t)
    if np.any(dt <= 0.0):
        raise NonMonotonicTimeError("times must be strictly increasing")
    weight = np.exp(-lam)
    dtau = 0.5 * (weight[1:] + weight[:-1]) * dt
    return np.concatenate([[0.0], np.cumsum(dtau)])


def special_case_derivative(theta: float, rho_tilde: float, alpha_1: float):
    """Branch pure-shape rates when the cycle circles and the branch bearing is pi/2.

    Returns (theta_rate, rho_tilde_rate) in rescaled time.
    """
    if rho_tilde <= RHO_MIN:
        raise CollisionError(f"branch ratio {rho_tilde:.3e} at floor")
    theta_rate = (1.0 + math.sin(theta)) / rho_tilde - 2.0 * math.sin(alpha_1)
    rho_rate = -math.cos(theta)
    return theta_rate, rho_rate


def conserved_quantity(theta, rho_tilde, alpha_1: float):
    """First integral of the special-case branch flow.

    E = rho_tilde (1 + sin theta) - rho_tilde^2 sin alpha_1; constant
    along special-case orbits.  Accepts scalars or arrays.
    """
    th = np.asarray(theta, dtype=float)
    rt = np.asarray(rho_tilde, dtype=float)
    e = rt * (1.0 + np.sin(th)) - rt ** 2 * math.sin(alpha_1)
    if np.ndim(theta) == 0 and np.ndim(rho_tilde) == 0:
        return float(e)
    return e


@dataclass(frozen=True)
class PeriodEstimate:
    """Result of section-based period detection."""

    period: float
    return_distance: float
    crossings: int


class _Crossing(NamedTuple):
    tau: float
    theta: float
    rho_tilde: float
    direction: int


def _section_crossings(taus, thetas, rhos):
    """Linear-interpolated crossings of the section cos(theta) = 0."""
    c = np.cos(thetas)
    out = []
    for k in range(c.size - 1):
        if c[k] == 0.0:
            direction = int(np.sign(thetas[k + 1] - thetas[k])) or 1
            out.append(_Crossing(taus[k], thetas[k], rhos[k], direction))
        elif c[k] * c[k + 1] < 0.0:
            s = c[k] / (c[k] - c[k + 1])
            out.append(
                _Crossing(
                    taus[k] + s * (taus[k + 1] - taus[k]),
                    thetas[k] + s * (thetas[k + 1] - thetas[k]),
                    rhos[k] + s * (rhos[k + 1] - rhos[k]),
                    int(np.sign(thetas[k + 1] - thetas[k])) or 1,
                )
            )
    return out


def detect_period(taus, thetas, rho_tildes, *, return_tol: float = 1e-4) -> PeriodEstimate:
    """Estimate the period of a planar (theta, rho_tilde) trajectory.

    Detects crossings of the section {theta = +-pi/2} and returns the
    rescaled-time gap between the first crossing and the first later
    crossing that matches it in direction and position (within
    return_tol).  A trajectory that never leaves its initial point has
    period 0.  Raises NotPeriodicError when no return is found.
    """
    taus = np.asarray(taus, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    rhos = np.asarray(rho_tildes, dtype=float)
    if not (taus.shape == thetas.shape == rhos.shape) or taus.ndim != 1:
        raise ValueError("taus, thetas, rho_tildes must be matching 1-d arrays")
    if taus.size < 2:
        raise ValueError("need at least two samples")
    if np.any(np.diff(taus) <= 0.0):
        raise NonMonotonicTimeError("taus must be strictly increasing")

    th = np.unwrap(thetas)
    if np.ptp(th) < 1e-9 and np.ptp(rhos) < 1e-9:
        return PeriodEstimate(0.0, 0.0, 0)

    events = _section_crossings(taus, th, rhos)
    if len(events) < 2:
        raise NotPeriodicError(
            f"only {len(events)} section crossing(s) in {taus[-1] - taus[0]:.3g} "
            "rescaled time units"
        )
    anchor = events[0]
    best = math.inf
    for ev in events[1:]:
        if ev.direction != anchor.direction:
            continue
        dist = math.hypot(wrap_angle(ev.theta - anchor.theta), ev.rho_tilde - anchor.rho_tilde)
        best = min(best, dist)
        if dist < return_tol:
            return PeriodEstimate(ev.tau - anchor.tau, dist, len(events))
    raise NotPeriodicError(
        f"no section return within tolerance {return_tol:g}; "
        f"closest approach {best:.3e} over {len(events)} crossings"
    )


def find_periodic_orbit(
    alpha_1: float,
    theta0: float,
    rho_tilde0: float,
    *,
    dt: float = 1e-3,
    return_tol: float = 1e-4,
    horizon: float | None = None,
):
    """Integrate the special-case branch flow and estimate its period.

    The default horizon is 50 / |sqrt(2) sin alpha_1| rescaled time units,
    the linearization timescale at the section center.  Returns
    (PeriodEstimate, Trajectory).
    """
    s1 = math.sin(alpha_1)
    if horizon is None:
        if s1 == 0.0:
            raise InadmissibleEquilibriumError(
                "sin(alpha_1) = 0: the circling cycle precondition fails"
            )
        horizon = 50.0 / abs(math.sqrt(2.0) * s1)
    system = SpecialCaseSystem(alpha_1)
    config = IntegratorConfig(t_final=horizon, dt=dt)
    traj = integrate(
        system.derivative,
        np.array([theta0, rho_tilde0], dtype=float),
        config,
        stepper=system.stepper,
        min_separation=system.min_separation,
    )
    estimate = detect_period(
        traj.times, traj.samples[:, 0], traj.samples[:, 1], return_tol=return_tol
    )
    return estimate, traj
