"""Adaptive time integration with dense equispaced output and drift gating.

The production integrator is an embedded Runge-Kutta 5(4) pair with a
PI step-size controller (:func:`simulate`).  The system is oscillatory but
conservative, so the step cap defaults to a twentieth of the fast roll
period 2π √(min(i_x, i_y)/k): the controller can never skip an oscillation.

Every run is measured against energy conservation on its output grid, and
a run whose relative drift exceeds the configured budget is rejected with
:class:`DriftExceeded` rather than returned: all downstream diagnostics
presuppose conservation.

A deliberately naive fixed-step RK4 (:func:`simulate_oracle`) is kept as an
independent cross-check; it shares nothing with the adaptive code path
except the right-hand side evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _stepper
from .model import BodyInertia, State, StiffSystem, energy

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "TrajectoryMeta",
    "IntegrationError",
    "DriftExceeded",
    "StepUnderflow",
    "StepTooLarge",
    "OutOfRange",
    "simulate",
    "simulate_oracle",
    "sample",
    "fast_period",
]


class IntegrationError(RuntimeError):
    """Base class for integration failures."""


class DriftExceeded(IntegrationError):
    """Relative energy drift exceeded the configured budget.

    The run is discarded; tighten rel_tol/abs_tol and retry.
    """


class StepUnderflow(IntegrationError):
    """The adaptive step size collapsed below 1e-14 times the horizon."""


class StepTooLarge(ValueError):
    """Fixed oracle step too coarse to resolve the fast oscillation."""


class OutOfRange(ValueError):
    """Sample time outside the trajectory's time span."""


def fast_period(inertia: BodyInertia, k: float) -> float:
    """Shortest period of the stiff roll oscillation, 2π √(min(i_x, i_y)/k)."""
    return 2.0 * math.pi * math.sqrt(min(inertia.i_x, inertia.i_y) / k)


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and output layout for a single run.

    max_step and dt_out may be left as None, in which case the simulators
    derive them from the system's fast timescale: max_step = fast period/20
    and dt_out = min(1e-2, fast period/4) for the stiff system.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: Optional[float] = None
    dt_out: Optional[float] = None
    max_energy_drift: float = 1e-7

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_energy_drift"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        for name in ("max_step", "dt_out"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive when given, got {v!r}")


@dataclass(frozen=True)
class TrajectoryMeta:
    """Bookkeeping for one run."""

    steps_accepted: int
    steps_rejected: int
    max_rel_energy_drift: float


@dataclass
class Trajectory:
    """Dense equispaced output of one run; immutable after construction.

    states rows are [γ, α, γ̇, α̇] at times[j] = j*dt_out; derivs rows hold
    the right-hand side at the same points (used for Hermite sampling).
    energy[j] is recomputed from states[j] with the model energy function,
    so it matches a fresh evaluation bitwise.  k is None for trajectories
    of the effective system, which carry theta instead.
    """

    times: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    energy: np.ndarray
    k: Optional[float]
    theta: Optional[float]
    inertia: BodyInertia
    dt_out: float
    meta: TrajectoryMeta

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def gamma(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def alpha(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def v_gamma(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def v_alpha(self) -> np.ndarray:
        return self.states[:, 3]

    def state_at(self, j: int) -> State:
        row = self.states[j]
        return State(float(row[0]), float(row[1]), float(row[2]), float(row[3]))


def _resolve_grid(T: float, dt_out: float) -> int:
    n_out = int(math.floor(T / dt_out + 1e-9))
    if n_out < 1:
        raise ValueError(f"dt_out={dt_out!r} exceeds the horizon T={T!r}")
    return n_out


def _state_array(s: State) -> np.ndarray:
    return np.array([s.gamma, s.alpha, s.v_gamma, s.v_alpha], dtype=np.float64)


def _stiff_energies(sys: StiffSystem, states: np.ndarray) -> np.ndarray:
    out = np.empty(states.shape[0])
    for j in range(states.shape[0]):
        out[j] = energy(sys, State(states[j, 0], states[j, 1], states[j, 2], states[j, 3]))
    return out


def _max_drift(energies: np.ndarray) -> float:
    e0 = energies[0]
    return float(np.max(np.abs(energies - e0)) / (1.0 + abs(e0)))


def simulate(
    sys: StiffSystem, s0: State, T: float, cfg: Optional[IntegratorConfig] = None
) -> Trajectory:
    """Integrate the stiff system from s0 over [0, T].

    Output is equispaced with spacing dt_out; the grid ends at
    floor(T/dt_out)*dt_out.  Raises DriftExceeded if the relative energy
    drift on the grid exceeds cfg.max_energy_drift, StepUnderflow if the
    controller collapses the step below 1e-14*T.
    """
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError(f"T must be positive, got {T!r}")
    cfg = cfg if cfg is not None else IntegratorConfig()
    period = fast_period(sys.inertia, sys.k)
    max_step = cfg.max_step if cfg.max_step is not None else period / 20.0
    dt_out = cfg.dt_out if cfg.dt_out is not None else min(1e-2, period / 4.0)
    n_out = _resolve_grid(T, dt_out)

    params = np.array([sys.inertia.i_x, sys.inertia.i_y, sys.inertia.i_z, sys.k])
    states, derivs, n_acc, n_rej, status, j_reached = _stepper.dp54(
        _stepper.MODE_STIFF,
        params,
        _state_array(s0),
        n_out,
        dt_out,
        cfg.rel_tol,
        cfg.abs_tol,
        max_step,
        1e-14 * T,
    )
    if status == _stepper.STATUS_UNDERFLOW:
        raise StepUnderflow(
            f"step size fell below {1e-14 * T:.3e} near t={j_reached * dt_out:.6g}"
        )

    energies = _stiff_energies(sys, states)
    drift = _max_drift(energies)
    meta = TrajectoryMeta(int(n_acc), int(n_rej), drift)
    if drift > cfg.max_energy_drift:
        raise DriftExceeded(
            f"relative energy drift {drift:.3e} exceeds budget "
            f"{cfg.max_energy_drift:.3e}; tighten rel_tol/abs_tol"
        )
    times = np.arange(n_out + 1) * dt_out
    return Trajectory(times, states, derivs, energies, sys.k, None, sys.inertia, dt_out, meta)


def simulate_oracle(
    sys: StiffSystem,
    s0: State,
    T: float,
    dt: float,
    dt_out: Optional[float] = None,
) -> Trajectory:
    """Fixed-step RK4 reference run (cross-validation only).

    Requires dt ≤ (2π/40) √(min(i_x, i_y)/k), i.e. at least 40 steps per
    fast oscillation; raises StepTooLarge otherwise.  The step actually
    taken is dt_out/ceil(dt_out/dt) ≤ dt so that output points are hit
    exactly.  No drift gate is applied: the oracle's quality is set by dt.
    """
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError(f"T must be positive, got {T!r}")
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt!r}")
    period = fast_period(sys.inertia, sys.k)
    dt_cap = period / 40.0
    if dt > dt_cap * (1.0 + 1e-12):
        raise StepTooLarge(
            f"dt={dt:.3e} exceeds {dt_cap:.3e} = (2π/40)·sqrt(min(i_x,i_y)/k)"
        )
    if dt_out is None:
        dt_out = min(1e-2, period / 4.0)
    n_out = _resolve_grid(T, dt_out)
    n_sub = max(1, math.ceil(dt_out / dt - 1e-9))

    params = np.array([sys.inertia.i_x, sys.inertia.i_y, sys.inertia.i_z, sys.k])
    states, derivs = _stepper.rk4_fixed(
        _stepper.MODE_STIFF, params, _state_array(s0), n_out, dt_out, n_sub
    )
    energies = _stiff_energies(sys, states)
    meta = TrajectoryMeta(n_out * n_sub, 0, _max_drift(energies))
    times = np.arange(n_out + 1) * dt_out
    return Trajectory(times, states, derivs, energies, sys.k, None, sys.inertia, dt_out, meta)


def sample(traj: Trajectory, t: float) -> State:
    """State at an arbitrary time 0 ≤ t ≤ traj.t_end.

    Exact at grid points; in between, cubic Hermite interpolation from the
    stored states and derivatives (C¹ output).
    """
    if not (0.0 <= t <= traj.t_end):
        raise OutOfRange(f"t={t!r} outside [0, {traj.t_end}]")
    n_cells = len(traj) - 1
    j = min(int(t / traj.dt_out), n_cells - 1)
    if t == traj.times[j]:
        return traj.state_at(j)
    if t == traj.times[j + 1]:
        return traj.state_at(j + 1)

    h = traj.dt_out
    u = (t - traj.times[j]) / h
    h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u)
    h10 = u * (1.0 - u) * (1.0 - u)
    h01 = u * u * (3.0 - 2.0 * u)
    h11 = u * u * (u - 1.0)
    y = (
        h00 * traj.states[j]
        + h10 * h * traj.derivs[j]
        + h01 * traj.states[j + 1]
        + h11 * h * traj.derivs[j + 1]
    )
    return State(float(y[0]), float(y[1]), float(y[2]), float(y[3]))
