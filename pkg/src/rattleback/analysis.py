"""Trajectory diagnostics: reversal counting, averaged observables, k-ladders.

The stiff runs carry an O(k^{-1/2}) fast oscillation on top of the slow
spin, so every "limit" statement is probed through centered moving
averages of fixed physical window length: spin reversals are sign changes
of the smoothed spin rate with a hysteresis floor, and the averaged-roll
constant and energy equipartition are checked as window averages whose
deviation must shrink along a ladder of increasing k.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .effective import EffectiveSystem, simulate_effective, theta_constant
from .integrate import IntegratorConfig, Trajectory, simulate
from .model import BodyInertia, State, StiffSystem

__all__ = [
    "WindowTooSmall",
    "ReversalReport",
    "ConvergenceReport",
    "transversal_energy",
    "weak_star_observable",
    "windowed_average",
    "detect_reversals",
    "equipartition_gap",
    "convergence_study",
]


class WindowTooSmall(ValueError):
    """Averaging window below its minimum (4 grid spacings / 10 fast periods)."""


@dataclass(frozen=True)
class ReversalReport:
    """Spin reversals of one trajectory.

    A reversal is a sign change of the window-smoothed spin rate that exits
    the hysteresis band [−floor, +floor] on both sides; monotone means the
    smoothed rate never entered the band at all.
    """

    reversal_times: tuple[float, ...]
    count: int
    window: float
    floor: float
    monotone: bool


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-k distances between stiff runs and their common effective limit."""

    k_values: tuple[float, ...]
    sup_alpha_err: np.ndarray
    sup_dalpha_err: np.ndarray
    sup_gamma: np.ndarray
    weak_star_err: np.ndarray
    equipartition_gap: np.ndarray
    theta: float
    window: float
    dt_out: float


def transversal_energy(traj: Trajectory, sys: StiffSystem) -> tuple[np.ndarray, np.ndarray]:
    """Roll energies on the grid: K⊥ = ½ g(α) γ̇² and U⊥ = ½ k γ².

    Together with the spin energy ½ i_z α̇² they recompose the conserved
    total at every grid point.
    """
    ine = sys.inertia
    c = np.cos(traj.alpha)
    s = np.sin(traj.alpha)
    gv = ine.i_x * c * c + ine.i_y * s * s
    k_perp = 0.5 * gv * traj.v_gamma**2
    u_perp = 0.5 * sys.k * traj.gamma**2
    return k_perp, u_perp


def weak_star_observable(traj: Trajectory, inertia: BodyInertia) -> np.ndarray:
    """Pointwise series γ̇² g(α)^{3/2}; its window averages settle to θ."""
    c = np.cos(traj.alpha)
    s = np.sin(traj.alpha)
    gv = inertia.i_x * c * c + inertia.i_y * s * s
    return traj.v_gamma**2 * gv * np.sqrt(gv)


def windowed_average(times: np.ndarray, values: np.ndarray, window: float) -> np.ndarray:
    """Centered moving average over [t − window/2, t + window/2] ∩ span.

    Trapezoid quadrature normalised by the actually covered length, so the
    boundary values are averages over the clipped window.  Requires an
    equispaced grid and window ≥ 4 grid spacings.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 2:
        raise ValueError("times and values must be equal-length 1-d arrays")
    dt = times[1] - times[0]
    if window < 4.0 * dt:
        raise WindowTooSmall(f"window={window!r} below 4*dt={4.0 * dt!r}")
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (values[1:] + values[:-1]) * dt)))
    lo = np.clip(times - 0.5 * window, times[0], times[-1])
    hi = np.clip(times + 0.5 * window, times[0], times[-1])
    return (np.interp(hi, times, cum) - np.interp(lo, times, cum)) / (hi - lo)


def _interior_mask(times: np.ndarray, window: float) -> np.ndarray:
    eps = 1e-9 * window
    return (times >= times[0] + 0.5 * window - eps) & (times <= times[-1] - 0.5 * window + eps)


def _max_interior_deviation(
    times: np.ndarray, values: np.ndarray, window: float, target: float
) -> float:
    avg = windowed_average(times, values, window)
    mask = _interior_mask(times, window)
    if not mask.any():
        raise WindowTooSmall(f"window={window!r} leaves no interior points")
    return float(np.max(np.abs(avg[mask] - target)))


def _slow_fast_period(inertia: BodyInertia, k: float) -> float:
    # conservative (longest) period of the fast roll oscillation
    return 2.0 * math.pi * math.sqrt(max(inertia.i_x, inertia.i_y) / k)


def detect_reversals(
    traj: Union[Trajectory, tuple[np.ndarray, np.ndarray]],
    window: Optional[float] = None,
    floor: Optional[float] = None,
) -> ReversalReport:
    """Count spin reversals of a trajectory (or a bare (times, α̇) pair).

    The spin rate is smoothed by :func:`windowed_average`; a reversal is
    recorded each time the smoothed rate crosses from beyond +floor to
    beyond −floor or vice versa, timed at the interpolated zero crossing.

    Defaults: window = 20 fast roll periods for stiff trajectories
    (explicit windows below 10 fast periods are rejected), 4 grid spacings
    for effective ones; floor = 1e-3 · max |α̇|.
    """
    if isinstance(traj, Trajectory):
        times = traj.times
        v_alpha = traj.v_alpha
        if traj.k is not None:
            fast = _slow_fast_period(traj.inertia, traj.k)
            if window is None:
                window = 20.0 * fast
            elif window < 10.0 * fast:
                raise WindowTooSmall(
                    f"window={window!r} below 10 fast periods = {10.0 * fast!r}"
                )
        elif window is None:
            window = 4.0 * traj.dt_out
    else:
        times, v_alpha = traj
        times = np.asarray(times, dtype=float)
        v_alpha = np.asarray(v_alpha, dtype=float)
        if window is None:
            window = 4.0 * (times[1] - times[0])

    if floor is None:
        floor = 1e-3 * float(np.max(np.abs(v_alpha)))
    elif floor <= 0.0:
        raise ValueError(f"floor must be positive, got {floor!r}")

    sm = windowed_average(times, v_alpha, window)
    monotone = bool(np.all(np.abs(sm) > floor))

    reversal_times: list[float] = []
    state = 0
    prev_idx = -1
    for j in range(sm.size):
        v = sm[j]
        if v > floor:
            sgn = 1
        elif v < -floor:
            sgn = -1
        else:
            continue
        if state != 0 and sgn != state:
            for m in range(prev_idx, j):
                a, b = sm[m], sm[m + 1]
                if (a > 0.0 >= b) if state > 0 else (a < 0.0 <= b):
                    t_cross = times[m] + (times[m + 1] - times[m]) * a / (a - b)
                    reversal_times.append(float(t_cross))
                    break
        state = sgn
        prev_idx = j

    return ReversalReport(
        reversal_times=tuple(reversal_times),
        count=len(reversal_times),
        window=float(window),
        floor=float(floor),
        monotone=monotone,
    )


def equipartition_gap(
    traj: Trajectory, sys: StiffSystem, window: float
) -> tuple[np.ndarray, np.ndarray]:
    """|⟨K⊥⟩ − ⟨U⊥⟩| over sliding windows, on the grid interior.

    The two roll energies equalise on average as k grows; the returned gap
    series (with its interior times) quantifies how far a finite-k run is
    from that equipartition.
    """
    k_perp, u_perp = transversal_energy(traj, sys)
    avg_k = windowed_average(traj.times, k_perp, window)
    avg_u = windowed_average(traj.times, u_perp, window)
    mask = _interior_mask(traj.times, window)
    if not mask.any():
        raise WindowTooSmall(f"window={window!r} leaves no interior points")
    return traj.times[mask], np.abs(avg_k - avg_u)[mask]


def convergence_study(
    inertia: BodyInertia,
    s0: State,
    k_ladder: Sequence[float],
    T: float,
    cfg: Optional[IntegratorConfig] = None,
    window: float = 0.5,
    max_workers: int = 1,
) -> ConvergenceReport:
    """Distances to the effective limit along a ladder of stiffnesses.

    For each k, runs the stiff system and compares it on a shared output
    grid with the single effective run defined by θ from the initial data
    (which requires γ₀ = 0).  Reported per k:

      sup_alpha_err    sup |α_k − α_eff|         (uniform convergence)
      sup_dalpha_err   sup |α̇_k − α̇_eff|, raw    (C¹ convergence)
      sup_gamma        sup |γ_k|                 (roll squeezed like k^{-1/2})
      weak_star_err    max interior window deviation of γ̇² g^{3/2} from θ
      equipartition_gap max interior window gap |⟨K⊥⟩ − ⟨U⊥⟩|

    Ladder entries are independent; max_workers > 1 fans them out across
    threads (the stepping kernels release the GIL).
    """
    k_ladder = [float(k) for k in k_ladder]
    if len(k_ladder) < 3:
        raise ValueError("k_ladder needs at least 3 entries")
    if any(b <= a for a, b in zip(k_ladder, k_ladder[1:])):
        raise ValueError("k_ladder must be strictly increasing")
    if s0.gamma != 0.0:
        raise ValueError("convergence_study requires s0.gamma == 0")
    cfg = cfg if cfg is not None else IntegratorConfig()

    theta = theta_constant(inertia, s0.alpha, s0.v_gamma)
    if cfg.dt_out is not None:
        dt_out = cfg.dt_out
    else:
        fast = 2.0 * math.pi * math.sqrt(min(inertia.i_x, inertia.i_y) / max(k_ladder))
        dt_out = min(1e-2, fast / 4.0)
    shared = replace(cfg, dt_out=dt_out, max_step=cfg.max_step)

    eff = EffectiveSystem(inertia, theta)
    eff_traj = simulate_effective(eff, s0.alpha, s0.v_alpha, T, shared)

    def one(k: float):
        traj = simulate(StiffSystem(inertia, k), s0, T, shared)
        assert len(traj) == len(eff_traj)
        sup_alpha = float(np.max(np.abs(traj.alpha - eff_traj.alpha)))
        sup_dalpha = float(np.max(np.abs(traj.v_alpha - eff_traj.v_alpha)))
        sup_gamma = float(np.max(np.abs(traj.gamma)))
        obs = weak_star_observable(traj, inertia)
        weak_err = _max_interior_deviation(traj.times, obs, window, theta)
        _, gap = equipartition_gap(traj, StiffSystem(inertia, k), window)
        return sup_alpha, sup_dalpha, sup_gamma, weak_err, float(np.max(gap))

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(one, k_ladder))
    else:
        rows = [one(k) for k in k_ladder]

    cols = np.array(rows, dtype=float)
    return ConvergenceReport(
        k_values=tuple(k_ladder),
        sup_alpha_err=cols[:, 0],
        sup_dalpha_err=cols[:, 1],
        sup_gamma=cols[:, 2],
        weak_star_err=cols[:, 3],
        equipartition_gap=cols[:, 4],
        theta=theta,
        window=window,
        dt_out=dt_out,
    )
