"""Fixed-step RK4 integration with collision and divergence guards."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError
from .model import RHO_MIN


class Termination(enum.Enum):
    COMPLETED = "completed"
    COLLISION = "collision"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    record_stride thins the stored samples; the initial and final states
    are always recorded.  rho_floor stops the run as a collision,
    divergence_ceiling stops it when any state entry blows up.
    """

    t_final: float
    dt: float = 1e-3
    record_stride: int = 1
    rho_floor: float = RHO_MIN
    divergence_ceiling: float = 1e6

    def __post_init__(self):
        if not self.dt > 0.0:
            raise InvalidConfigError(f"dt must be positive, got {self.dt!r}")
        if not self.t_final > 0.0:
            raise InvalidConfigError(f"t_final must be positive, got {self.t_final!r}")
        if self.t_final < self.dt:
            raise InvalidConfigError("t_final must be at least one step long")
        if int(self.record_stride) < 1:
            raise InvalidConfigError("record_stride must be a positive integer")
        if not self.rho_floor > 0.0:
            raise InvalidConfigError("rho_floor must be positive")
        if not self.divergence_ceiling > 0.0:
            raise InvalidConfigError("divergence_ceiling must be positive")
        object.__setattr__(self, "t_final", float(self.t_final))
        object.__setattr__(self, "dt", float(self.dt))
        object.__setattr__(self, "record_stride", int(self.record_stride))


@dataclass
class Trajectory:
    """Recorded samples of one integration run."""

    times: np.ndarray
    samples: np.ndarray
    termination: Termination

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]


def rk4_step(derivative, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = derivative(t, y)
    k2 = derivative(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = derivative(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = derivative(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def integrate(
    derivative,
    y0,
    config: IntegratorConfig,
    *,
    post_step=None,
    min_separation=None,
    stepper=None,
) -> Trajectory:
    """Integrate dy/dt = derivative(t, y) with classical RK4.

    post_step(y) may adjust the state after each step (heading
    renormalization).  min_separation(y) is checked against
    config.rho_floor to stop on collisions.  stepper(t, y, dt), when
    given, replaces the rk4_step/post_step pair with a fused step (the
    compiled system steppers); it must produce the same values.  Times
    are multiples of dt, so repeated runs are bitwise reproducible.
    """
    y = np.array(y0, dtype=float)
    if y.ndim != 1:
        raise InvalidConfigError("initial state must be a flat vector")
    n_steps = int(round(config.t_final / config.dt))
    if n_steps < 1:
        raise InvalidConfigError("horizon shorter than one step")

    times = [0.0]
    samples = [y.copy()]
    termination = Termination.COMPLETED
    for k in range(1, n_steps + 1):
        if stepper is not None:
            y = stepper((k - 1) * config.dt, y, config.dt)
        else:
            y = rk4_step(derivative, (k - 1) * config.dt, y, config.dt)
            if post_step is not None:
                y = post_step(y)

        stop = None
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > config.divergence_ceiling:
            stop = Termination.DIVERGED
        elif min_separation is not None and min_separation(y) < config.rho_floor:
            stop = Termination.COLLISION

        if stop is not None or k == n_steps or k % config.record_stride == 0:
            times.append(k * config.dt)
            samples.append(y.copy())
        if stop is not None:
            termination = stop
            break

    return Trajectory(np.array(times), np.array(samples), termination)
