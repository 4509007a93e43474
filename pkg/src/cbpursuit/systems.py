"""Vectorized right-hand sides for the integrable systems.

Each system binds a pursuit graph and parameter set, packs its state into
a flat float vector, and exposes derivative(t, y) plus the guards used by
the integrator.  All shape-level systems order their per-arc entries by
graph.arcs, so index 0 is always the reference arc.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import CBParams, PursuitGraph, SystemState


def _check_sizes(graph: PursuitGraph, params: CBParams):
    if params.n != graph.n:
        raise ValueError(
            f"parameter count {params.n} does not match agent count {graph.n}"
        )


@njit(cache=True, nogil=True)
def _full_state_step(y, dt, tidx, sin_a, cos_a, mu):
    """One RK4 step of the closed loop plus heading renormalization.

    Mirrors FullStateSystem.derivative and post_step operation for
    operation, so results are bitwise identical to the generic path.
    """
    n = tidx.shape[0]
    out = y.copy()
    k = np.empty((4, 4 * n))
    stage = y
    for s in range(4):
        for i in range(n):
            j = tidx[i]
            dx = stage[2 * j] - stage[2 * i]
            dy = stage[2 * j + 1] - stage[2 * i + 1]
            rho2 = dx * dx + dy * dy
            rho = math.sqrt(rho2)
            xi0 = stage[2 * n + 2 * i]
            xi1 = stage[2 * n + 2 * i + 1]
            xj0 = stage[2 * n + 2 * j]
            xj1 = stage[2 * n + 2 * j + 1]
            cross_i = xi0 * dy - xi1 * dx
            dot_i = xi0 * dx + xi1 * dy
            cross_t = xj0 * dy - xj1 * dx
            u = mu[i] * (cross_i * cos_a[i] - dot_i * sin_a[i]) / rho + (
                cross_i - cross_t
            ) / rho2
            k[s, 2 * i] = xi0
            k[s, 2 * i + 1] = xi1
            k[s, 2 * n + 2 * i] = -(u * xi1)
            k[s, 2 * n + 2 * i + 1] = u * xi0
        if s == 0 or s == 1:
            stage = y + (0.5 * dt) * k[s]
        elif s == 2:
            stage = y + dt * k[s]
    for m in range(4 * n):
        out[m] = y[m] + (dt / 6.0) * (k[0, m] + 2.0 * (k[1, m] + k[2, m]) + k[3, m])
    for i in range(n):
        h0 = out[2 * n + 2 * i]
        h1 = out[2 * n + 2 * i + 1]
        nrm = math.hypot(h0, h1)
        out[2 * n + 2 * i] = h0 / nrm
        out[2 * n + 2 * i + 1] = h1 / nrm
    return out


@njit(cache=True, nogil=True)
def _phase_step(y, dt, drive, damp, sin_b, cos_b):
    """One RK4 step of the planar branch phase flow.

    d(theta)/dtau = (sin_b + sin theta) / rho - drive
    d(rho)/dtau   = rho * damp - (cos_b + cos theta)
    """
    k = np.empty((4, 2))
    th = y[0]
    rho = y[1]
    for s in range(4):
        k[s, 0] = (sin_b + math.sin(th)) / rho - drive
        k[s, 1] = rho * damp - (cos_b + math.cos(th))
        if s == 0 or s == 1:
            th = y[0] + (0.5 * dt) * k[s, 0]
            rho = y[1] + (0.5 * dt) * k[s, 1]
        elif s == 2:
            th = y[0] + dt * k[s, 0]
            rho = y[1] + dt * k[s, 1]
    out = np.empty(2)
    out[0] = y[0] + (dt / 6.0) * (k[0, 0] + 2.0 * (k[1, 0] + k[2, 0]) + k[3, 0])
    out[1] = y[1] + (dt / 6.0) * (k[0, 1] + 2.0 * (k[1, 1] + k[2, 1]) + k[3, 1])
    return out


class FullStateSystem:
    """Closed-loop absolute dynamics of all agents under CB control.

    State vector layout: [positions.ravel(), headings.ravel()].
    """

    def __init__(self, graph: PursuitGraph, params: CBParams):
        _check_sizes(graph, params)
        self.graph = graph
        self.params = params
        self.n = graph.n
        self._tidx = np.array(graph.targets)
        self._sin_a = np.sin(params.alpha)
        self._cos_a = np.cos(params.alpha)
        self._mu = np.array(params.mu)

    @property
    def dim(self) -> int:
        return 4 * self.n

    def pack(self, state: SystemState) -> np.ndarray:
        return np.concatenate([state.positions.ravel(), state.headings.ravel()])

    def unpack(self, y: np.ndarray, time: float = 0.0) -> SystemState:
        n = self.n
        return SystemState(
            y[: 2 * n].reshape(n, 2).copy(),
            y[2 * n :].reshape(n, 2).copy(),
            time,
        )

    def split(self, y: np.ndarray):
        n = self.n
        return y[: 2 * n].reshape(n, 2), y[2 * n :].reshape(n, 2)

    def controls(self, y: np.ndarray) -> np.ndarray:
        """CB control value for every agent at packed state y."""
        r, x = self.split(y)
        d = r[self._tidx] - r
        rho2 = d[:, 0] ** 2 + d[:, 1] ** 2
        rho = np.sqrt(rho2)
        cross_i = x[:, 0] * d[:, 1] - x[:, 1] * d[:, 0]
        dot_i = x[:, 0] * d[:, 0] + x[:, 1] * d[:, 1]
        xt = x[self._tidx]
        cross_t = xt[:, 0] * d[:, 1] - xt[:, 1] * d[:, 0]
        # sin(kappa - alpha) expanded; the coupling term keeps kappa = alpha
        # invariant once reached.
        return (
            self._mu * (cross_i * self._cos_a - dot_i * self._sin_a) / rho
            + (cross_i - cross_t) / rho2
        )

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        n = self.n
        r = y[: 2 * n].reshape(n, 2)
        x = y[2 * n :].reshape(n, 2)
        d = r[self._tidx] - r
        rho2 = d[:, 0] ** 2 + d[:, 1] ** 2
        rho = np.sqrt(rho2)
        cross_i = x[:, 0] * d[:, 1] - x[:, 1] * d[:, 0]
        dot_i = x[:, 0] * d[:, 0] + x[:, 1] * d[:, 1]
        xt = x[self._tidx]
        cross_t = xt[:, 0] * d[:, 1] - xt[:, 1] * d[:, 0]
        u = (
            self._mu * (cross_i * self._cos_a - dot_i * self._sin_a) / rho
            + (cross_i - cross_t) / rho2
        )
        out = np.empty(4 * n)
        out[: 2 * n] = y[2 * n :]
        dx = out[2 * n :].reshape(n, 2)
        np.multiply(u, x[:, 1], out=dx[:, 0])
        np.negative(dx[:, 0], out=dx[:, 0])
        np.multiply(u, x[:, 0], out=dx[:, 1])
        return out

    def post_step(self, y: np.ndarray) -> np.ndarray:
        """Renormalize headings in place after each step."""
        n = self.n
        x = y[2 * n :].reshape(n, 2)
        norms = np.hypot(x[:, 0], x[:, 1])
        x /= norms[:, None]
        return y

    def min_separation(self, y: np.ndarray) -> float:
        r, _ = self.split(y)
        d = r[self._tidx] - r
        return float(np.sqrt((d ** 2).sum(axis=1).min()))

    def stepper(self, t: float, y: np.ndarray, dt: float) -> np.ndarray:
        """Compiled RK4 step with renormalization; bitwise equal to the generic path."""
        return _full_state_step(y, dt, self._tidx, self._sin_a, self._cos_a, self._mu)


class _ArcIndexed:
    """Shared arc bookkeeping for the shape-level systems."""

    def __init__(self, graph: PursuitGraph, params: CBParams):
        _check_sizes(graph, params)
        self.graph = graph
        self.params = params
        self.arcs = graph.arcs
        self.n_arcs = len(self.arcs)
        index = {arc: a for a, arc in enumerate(self.arcs)}
        tails = np.array([i for (i, _) in self.arcs])
        # arc out of each arc's target: couples theta_a to its successor
        self._succ = np.array([index[graph.arc_out_of(j)] for (_, j) in self.arcs])
        self._sin_at = np.sin(params.alpha[tails])
        self._cos_at = np.cos(params.alpha[tails])


class ManifoldShapeSystem(_ArcIndexed):
    """Shape dynamics restricted to the CB manifold (kappa = alpha).

    State vector layout: [theta per arc, rho per arc].
    """

    @property
    def dim(self) -> int:
        return 2 * self.n_arcs

    def pack(self, theta, rho) -> np.ndarray:
        return np.array(
            [float(theta[a]) for a in self.arcs] + [float(rho[a]) for a in self.arcs]
        )

    def unpack(self, y: np.ndarray):
        m = self.n_arcs
        theta = {arc: float(y[a]) for a, arc in enumerate(self.arcs)}
        rho = {arc: float(y[m + a]) for a, arc in enumerate(self.arcs)}
        return theta, rho

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        m = self.n_arcs
        th = y[:m]
        rho = y[m:]
        pull = (self._sin_at + np.sin(th)) / rho
        dth = pull - pull[self._succ]
        drho = -self._cos_at - np.cos(th)
        return np.concatenate([dth, drho])

    def min_separation(self, y: np.ndarray) -> float:
        return float(y[self.n_arcs :].min())


class PureShapeSystem(_ArcIndexed):
    """Scale-free shape dynamics in rescaled time.

    State vector layout: [log_scale, theta per arc, rho_tilde per arc],
    where log_scale tracks the log separation of the reference arc and
    rho_tilde is each separation divided by the reference one.  The
    reference entry rho_tilde[0] stays exactly 1.
    """

    @property
    def dim(self) -> int:
        return 1 + 2 * self.n_arcs

    def pack(self, log_scale, theta, rho_tilde) -> np.ndarray:
        return np.array(
            [float(log_scale)]
            + [float(theta[a]) for a in self.arcs]
            + [float(rho_tilde[a]) for a in self.arcs]
        )

    def unpack(self, y: np.ndarray):
        m = self.n_arcs
        theta = {arc: float(y[1 + a]) for a, arc in enumerate(self.arcs)}
        rho_tilde = {arc: float(y[1 + m + a]) for a, arc in enumerate(self.arcs)}
        return float(y[0]), theta, rho_tilde

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        m = self.n_arcs
        th = y[1 : 1 + m]
        rho = y[1 + m :]
        pull = (self._sin_at + np.sin(th)) / rho
        dth = pull - pull[self._succ]
        ref_rate = self._cos_at[0] + math.cos(th[0])
        drho = rho * ref_rate - (self._cos_at + np.cos(th))
        out = np.empty(1 + 2 * m)
        out[0] = -ref_rate
        out[1 : 1 + m] = dth
        out[1 + m :] = drho
        return out

    def min_separation(self, y: np.ndarray) -> float:
        return float(y[1 + self.n_arcs :].min())


class BranchPhaseSystem:
    """Branch pure-shape flow (theta, rho_tilde) over a pinned 2-cycle.

    The mutual-pursuit cycle sits on its manifold values, so only the
    branch pair evolves.  alpha = (a1, a2, a3) with a3 the branch bearing.
    """

    dim = 2

    def __init__(self, params: CBParams):
        if params.n != 3:
            raise ValueError("branch phase flow is defined for 3 agents")
        a1, a2, a3 = (float(v) for v in params.alpha)
        self._drive = math.sin(a1) + math.sin(a2)
        self._damp = math.cos(a1) + math.cos(a2)
        self._s3 = math.sin(a3)
        self._c3 = math.cos(a3)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        th = y[0]
        rho = y[1]
        return np.array(
            [
                (self._s3 + math.sin(th)) / rho - self._drive,
                rho * self._damp - (self._c3 + math.cos(th)),
            ]
        )

    def min_separation(self, y: np.ndarray) -> float:
        return float(y[1])

    def stepper(self, t: float, y: np.ndarray, dt: float) -> np.ndarray:
        return _phase_step(y, dt, self._drive, self._damp, self._s3, self._c3)


class SpecialCaseSystem:
    """Branch phase flow when the cycle circles and the branch bearing is pi/2."""

    dim = 2

    def __init__(self, alpha_1: float):
        self._s1 = math.sin(float(alpha_1))

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        th = y[0]
        rho = y[1]
        return np.array(
            [(1.0 + math.sin(th)) / rho - 2.0 * self._s1, -math.cos(th)]
        )

    def min_separation(self, y: np.ndarray) -> float:
        return float(y[1])

    def stepper(self, t: float, y: np.ndarray, dt: float) -> np.ndarray:
        return _phase_step(y, dt, 2.0 * self._s1, 0.0, 1.0, 0.0)


def fd_jacobian(func, y0: np.ndarray, indices=None, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of func(y) restricted to indices."""
    y0 = np.asarray(y0, dtype=float)
    if indices is None:
        indices = np.arange(y0.size)
    indices = np.asarray(indices)
    jac = np.zeros((indices.size, indices.size))
    for col, idx in enumerate(indices):
        hi = y0.copy()
        lo = y0.copy()
        hi[idx] += step
        lo[idx] -= step
        jac[:, col] = (func(hi)[indices] - func(lo)[indices]) / (2.0 * step)
    return jac
