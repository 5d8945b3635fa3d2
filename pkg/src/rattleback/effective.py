"""Effective spin dynamics in the stiff-spring limit.

As k → ∞ the roll angle γ is squeezed to zero but its fast oscillation
leaves a footprint: the observable γ̇² g(α)^{3/2} averages to a constant

    θ = ½ γ̇₀² g(α₀)^{3/2}

and the spin angle α converges to the solution of the one-degree-of-freedom
system with Lagrangian

    L_eff = ½ i_z α̇² − V_eff(α),        V_eff(α) = θ g(α)^{−1/2}

i.e.  i_z α̈ = −V_eff′(α) = ½ θ g′(α) g(α)^{−3/2}.

For an asymmetric body with i_y < i_x the potential V_eff has wells at the
multiples of π (where g is largest) and barriers at the odd multiples of
π/2.  Starting at α = 0, the spin is trapped and keeps reversing direction
exactly when its kinetic energy cannot clear the barrier:

    ½ i_z α̇₀² + V_eff(0) < V_eff(π/2)
        ⇔  α̇₀² / γ̇₀² < (i_x/i_z) (√(i_x/i_y) − 1)

which is the critical velocity ratio computed by :func:`critical_ratio`.

Above the threshold (or for i_y ≥ i_x, where the start sits at a potential
maximum or the potential is flat) the spin is monotone and unbounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.integrate import quad

from . import _stepper
from .integrate import (
    DriftExceeded,
    IntegratorConfig,
    Trajectory,
    TrajectoryMeta,
    StepUnderflow,
    _max_drift,
    _resolve_grid,
)
from .model import BodyInertia, g, g_prime

__all__ = [
    "EffectiveSystem",
    "Regime",
    "ZeroVelocity",
    "InvalidRegime",
    "theta_constant",
    "effective_potential",
    "effective_vector_field",
    "effective_energy",
    "critical_ratio",
    "classify",
    "turning_points",
    "oscillation_period",
    "simulate_effective",
]


class ZeroVelocity(ValueError):
    """The regime classifier needs both initial angular velocities nonzero."""


class InvalidRegime(ValueError):
    """Requested a trapped-motion quantity outside the trapped regime."""


@dataclass(frozen=True)
class EffectiveSystem:
    """Body inertia plus the averaged-roll constant θ ≥ 0 of the limit dynamics."""

    inertia: BodyInertia
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta >= 0.0):
            raise ValueError(f"theta must be nonnegative, got {self.theta!r}")


class Regime(Enum):
    """Qualitative behaviour of the limit spin for null initial angles."""

    SUBCRITICAL = "Subcritical"          # trapped, spin keeps reversing
    SUPERCRITICAL = "Supercritical"      # unbounded strictly monotone spin
    CRITICAL = "Critical"                # on the separatrix; no claim made
    SYMMETRIC_DECOUPLED = "SymmetricDecoupled"  # i_x = i_y, flat potential


def theta_constant(inertia: BodyInertia, alpha0: float, v_gamma0: float) -> float:
    """Averaged-roll constant θ = ½ γ̇₀² g(α₀)^{3/2} for γ₀ = 0 initial data."""
    gv = g(inertia, alpha0)
    return 0.5 * v_gamma0 * v_gamma0 * gv * math.sqrt(gv)


def effective_potential(eff: EffectiveSystem, alpha: float) -> float:
    """V_eff(α) = θ g(α)^{−1/2}."""
    return eff.theta / math.sqrt(g(eff.inertia, alpha))


def effective_vector_field(
    eff: EffectiveSystem, alpha: float, v_alpha: float
) -> tuple[float, float]:
    """(α̇, α̈) with α̈ = ½ θ g′(α) g(α)^{−3/2} / i_z = −V_eff′(α)/i_z."""
    gv = g(eff.inertia, alpha)
    a = 0.5 * eff.theta * g_prime(eff.inertia, alpha) / (gv * math.sqrt(gv)) / eff.inertia.i_z
    return v_alpha, a


def effective_energy(eff: EffectiveSystem, alpha: float, v_alpha: float) -> float:
    """½ i_z α̇² + V_eff(α); conserved along the effective flow."""
    return 0.5 * eff.inertia.i_z * v_alpha * v_alpha + effective_potential(eff, alpha)


def critical_ratio(inertia: BodyInertia) -> float:
    """Trapping threshold for α̇₀²/γ̇₀²: (i_x/i_z)(√(i_x/i_y) − 1).

    Zero when i_y ≥ i_x: such bodies cannot trap the spin at all.
    """
    if inertia.i_y >= inertia.i_x:
        return 0.0
    return (inertia.i_x / inertia.i_z) * (math.sqrt(inertia.i_x / inertia.i_y) - 1.0)


def classify(inertia: BodyInertia, v_gamma0: float, v_alpha0: float) -> Regime:
    """Regime of the motion started at null angles with the given velocities.

    Both velocities must be nonzero.  Equality with the critical ratio is
    detected within a relative 1e-12 band and reported as CRITICAL; the
    toolkit asserts no theorem-level behaviour there.
    """
    if v_gamma0 == 0.0 or v_alpha0 == 0.0:
        raise ZeroVelocity("classify requires nonzero v_gamma0 and v_alpha0")
    if inertia.i_x == inertia.i_y:
        return Regime.SYMMETRIC_DECOUPLED
    if inertia.i_y > inertia.i_x:
        return Regime.SUPERCRITICAL
    ratio = (v_alpha0 * v_alpha0) / (v_gamma0 * v_gamma0)
    crit = critical_ratio(inertia)
    if math.isclose(ratio, crit, rel_tol=1e-12):
        return Regime.CRITICAL
    return Regime.SUBCRITICAL if ratio < crit else Regime.SUPERCRITICAL


def turning_points(eff: EffectiveSystem, E: float) -> Optional[float]:
    """Amplitude α* of the trapped spin at energy E, if any.

    The trapped interval is [−α*, α*], with g(α*) = (θ/E)², i.e.

        α* = arcsin √( (i_x − (θ/E)²) / (i_x − i_y) ).

    Returns 0.0 for E ≤ V_eff(0) (rest at the well bottom) and None for
    E ≥ V_eff(π/2) (over the barrier, not trapped).  Only meaningful for
    an asymmetric body with θ > 0; raises InvalidRegime otherwise.
    """
    ine = eff.inertia
    if ine.i_y >= ine.i_x or eff.theta == 0.0:
        raise InvalidRegime("turning points need i_y < i_x and theta > 0")
    if E <= effective_potential(eff, 0.0):
        return 0.0
    if E >= effective_potential(eff, 0.5 * math.pi):
        return None
    G = (eff.theta / E) ** 2
    s2 = (ine.i_x - G) / (ine.i_x - ine.i_y)
    return math.asin(math.sqrt(s2))


def oscillation_period(eff: EffectiveSystem, E: float) -> float:
    """Period of the trapped spin oscillation at energy E.

    Quadrature of 4 ∫₀^{α*} dα / √((2/i_z)(E − V_eff(α))) after the
    substitution α = α* sin φ, which removes the inverse-square-root
    endpoint singularity.  The integrand is assembled in factored form so
    that E − V_eff stays positive under rounding all the way to the
    turning point.  Relative accuracy ~1e-10, well inside the 1e-8 target.
    """
    astar = turning_points(eff, E)
    if astar is None or astar == 0.0 or astar >= 0.5 * math.pi:
        raise InvalidRegime(f"no trapped oscillation at E={E!r}")
    ine = eff.inertia
    theta = eff.theta
    G = (theta / E) ** 2          # = g(α*) by construction
    sqrt_G = math.sqrt(G)
    s_star = math.sin(astar)
    dixy = ine.i_x - ine.i_y

    def integrand(phi: float) -> float:
        a = astar * math.sin(phi)
        sa = math.sin(a)
        # s_star − sa without cancellation
        diff = 2.0 * math.cos(0.5 * (astar + a)) * math.sin(0.5 * (astar - a))
        ga = ine.i_x - dixy * sa * sa
        sqrt_ga = math.sqrt(ga)
        # E − V_eff(a) = θ (√g − √G) / (√G √g), with √g − √G factored
        d = theta * dixy * diff * (s_star + sa) / (sqrt_G * sqrt_ga * (sqrt_ga + sqrt_G))
        return astar * math.cos(phi) / math.sqrt(2.0 / ine.i_z * d)

    val, abserr = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=1e-11, limit=200)
    return 4.0 * val


def _effective_energies(eff: EffectiveSystem, states: np.ndarray) -> np.ndarray:
    out = np.empty(states.shape[0])
    for j in range(states.shape[0]):
        out[j] = effective_energy(eff, states[j, 1], states[j, 3])
    return out


def simulate_effective(
    eff: EffectiveSystem,
    alpha0: float,
    v_alpha0: float,
    T: float,
    cfg: Optional[IntegratorConfig] = None,
) -> Trajectory:
    """Integrate the effective spin ODE from (α₀, α̇₀) over [0, T].

    Returns a Trajectory whose γ rows are identically zero and whose
    energy column is the effective energy; drift gating as in
    :func:`rattleback.integrate.simulate`.
    """
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError(f"T must be positive, got {T!r}")
    cfg = cfg if cfg is not None else IntegratorConfig()
    ine = eff.inertia

    if cfg.max_step is not None:
        max_step = cfg.max_step
    else:
        # Resolve both the well oscillation and the fastest traversal speed.
        omega0_sq = (
            eff.theta * abs(ine.i_x - ine.i_y) / (ine.i_z * min(ine.i_x, ine.i_y) ** 1.5)
        )
        e0 = effective_energy(eff, alpha0, v_alpha0)
        speed = math.sqrt(2.0 * e0 / ine.i_z)
        scale = max(math.sqrt(omega0_sq), speed)
        max_step = min(0.1, (2.0 * math.pi / 20.0) / scale) if scale > 0.0 else 0.1
    dt_out = cfg.dt_out if cfg.dt_out is not None else 1e-2
    n_out = _resolve_grid(T, dt_out)

    params = np.array([ine.i_x, ine.i_y, ine.i_z, eff.theta])
    y0 = np.array([0.0, alpha0, 0.0, v_alpha0])
    states, derivs, n_acc, n_rej, status, j_reached = _stepper.dp54(
        _stepper.MODE_EFFECTIVE,
        params,
        y0,
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

    energies = _effective_energies(eff, states)
    drift = _max_drift(energies)
    meta = TrajectoryMeta(int(n_acc), int(n_rej), drift)
    if drift > cfg.max_energy_drift:
        raise DriftExceeded(
            f"relative effective-energy drift {drift:.3e} exceeds budget "
            f"{cfg.max_energy_drift:.3e}; tighten rel_tol/abs_tol"
        )
    times = np.arange(n_out + 1) * dt_out
    return Trajectory(times, states, derivs, energies, None, eff.theta, ine, dt_out, meta)
