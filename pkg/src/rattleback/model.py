"""Rigid body with two rotation angles, one of them held by a stiff spring.

Physical setup
--------------
A rigid body with principal moments of inertia (i_x, i_y, i_z) rotates about
a fixed center of mass.  Its attitude is restricted to rotations of the form

    R(γ, α) = X(γ) Z(α)

i.e. a roll by γ about the body x-axis composed with a spin by α about the
z-axis (the middle Euler angle is frozen at zero).  The roll angle γ is tied
to its rest position by a torsional spring of stiffness k, with potential
U(γ) = ½ k γ².

In these coordinates the body angular velocity is

    ω = (cos α · γ̇,  −sin α · γ̇,  α̇)

so the roll axis sees the α-dependent effective inertia

    g(α) = i_x cos²α + i_y sin²α,        g′(α) = (i_y − i_x) sin 2α

and the Lagrangian reads

    L = ½ g(α) γ̇² + ½ i_z α̇² − ½ k γ².

Equations of motion (both second-order, coupled through g):

    γ̈ = −( g′(α) α̇ γ̇ + k γ ) / g(α)
    α̈ = g′(α) γ̇² / (2 i_z)

The energy E = ½ g γ̇² + ½ i_z α̇² + ½ k γ² is conserved and every term is
nonnegative, which bounds the motion a priori: |γ̇|, |α̇| ≤ √(2E/i) with
i = min(i_x, i_y, i_z), and |γ| ≤ √(2E/k).  In particular solutions exist
for all time, and the roll amplitude shrinks like k^(−1/2) as the spring
stiffens.

Everything here is a closed-form, side-effect-free function of its
arguments; the time integration lives in :mod:`rattleback.integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "BodyInertia",
    "State",
    "StiffSystem",
    "StateDerivative",
    "g",
    "g_prime",
    "lagrangian",
    "energy",
    "vector_field",
    "tapping_acceleration",
    "angular_velocity",
    "a_priori_bounds",
]


@dataclass(frozen=True)
class BodyInertia:
    """Principal moments of inertia about the body x, y and z axes.

    All three must be positive.  No ordering is imposed: whether the body
    is asymmetric (i_y < i_x) is a property queried later, not an invariant.
    """

    i_x: float
    i_y: float
    i_z: float

    def __post_init__(self):
        for name in ("i_x", "i_y", "i_z"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def i_min(self) -> float:
        return min(self.i_x, self.i_y, self.i_z)


@dataclass(frozen=True)
class State:
    """Point in the reduced phase space: (γ, α, γ̇, α̇).

    Angles are not wrapped: α accumulates, so net rotations can be counted.
    """

    gamma: float
    alpha: float
    v_gamma: float
    v_alpha: float

    def __post_init__(self):
        for name in ("gamma", "alpha", "v_gamma", "v_alpha"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class StiffSystem:
    """Body inertia plus the spring stiffness k > 0 confining the roll angle."""

    inertia: BodyInertia
    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise ValueError(f"Hooke constant k must be positive, got {self.k!r}")


class StateDerivative(NamedTuple):
    """Time derivative of a State: (γ̇, α̇, γ̈, α̈)."""

    v_gamma: float
    v_alpha: float
    a_gamma: float
    a_alpha: float


def g(inertia: BodyInertia, alpha: float) -> float:
    """Effective roll inertia i_x cos²α + i_y sin²α.

    π-periodic and even in α, pinched between min(i_x, i_y) and
    max(i_x, i_y), hence bounded away from zero.
    """
    c = math.cos(alpha)
    s = math.sin(alpha)
    return inertia.i_x * c * c + inertia.i_y * s * s


def g_prime(inertia: BodyInertia, alpha: float) -> float:
    """Derivative of :func:`g`: (i_y − i_x) sin 2α."""
    return (inertia.i_y - inertia.i_x) * math.sin(2.0 * alpha)


def lagrangian(sys: StiffSystem, s: State) -> float:
    """½ g(α) γ̇² + ½ i_z α̇² − ½ k γ²."""
    return (
        0.5 * g(sys.inertia, s.alpha) * s.v_gamma * s.v_gamma
        + 0.5 * sys.inertia.i_z * s.v_alpha * s.v_alpha
        - 0.5 * sys.k * s.gamma * s.gamma
    )


def energy(sys: StiffSystem, s: State) -> float:
    """Conserved energy ½ g(α) γ̇² + ½ i_z α̇² + ½ k γ².  Every term ≥ 0."""
    return (
        0.5 * g(sys.inertia, s.alpha) * s.v_gamma * s.v_gamma
        + 0.5 * sys.inertia.i_z * s.v_alpha * s.v_alpha
        + 0.5 * sys.k * s.gamma * s.gamma
    )


def vector_field(sys: StiffSystem, s: State) -> StateDerivative:
    """Right-hand side of the equations of motion at state ``s``.

    Returns (γ̇, α̇, γ̈, α̈) with

        γ̈ = −( g′ α̇ γ̇ + k γ ) / g,      α̈ = g′ γ̇² / (2 i_z)

    g and g′ evaluated at s.alpha.  g ≥ min(i_x, i_y) > 0, so the division
    is always safe.
    """
    gv = g(sys.inertia, s.alpha)
    gp = g_prime(sys.inertia, s.alpha)
    a_gamma = -(gp * s.v_alpha * s.v_gamma + sys.k * s.gamma) / gv
    a_alpha = 0.5 * gp * s.v_gamma * s.v_gamma / sys.inertia.i_z
    return StateDerivative(s.v_gamma, s.v_alpha, a_gamma, a_alpha)


def tapping_acceleration(inertia: BodyInertia, alpha0: float, v_gamma0: float) -> float:
    """Initial spin acceleration α̈(0) induced by a pure roll rate.

    Starting from rest in α at (γ, α, γ̇, α̇) = (0, α₀, γ̇₀, 0):

        α̈(0) = (i_y − i_x) cos α₀ sin α₀ γ̇₀² / i_z

    Nonzero whenever the body is asymmetric (i_x ≠ i_y), α₀ is not a
    multiple of π/2 and γ̇₀ ≠ 0: rolling the body kicks it into a spin.
    """
    return (
        (inertia.i_y - inertia.i_x)
        * math.cos(alpha0)
        * math.sin(alpha0)
        * v_gamma0
        * v_gamma0
        / inertia.i_z
    )


def angular_velocity(s: State) -> tuple[float, float, float]:
    """Body angular velocity (ω_x, ω_y, ω_z) = (cos α · γ̇, −sin α · γ̇, α̇)."""
    return (
        math.cos(s.alpha) * s.v_gamma,
        -math.sin(s.alpha) * s.v_gamma,
        s.v_alpha,
    )


def a_priori_bounds(E0: float, inertia: BodyInertia, k: float) -> tuple[float, float]:
    """Energy bounds (v_bound, gamma_bound) valid for all time.

    |γ̇|, |α̇| ≤ √(2 E₀ / i) with i = min(i_x, i_y, i_z), and
    |γ| ≤ √(2 E₀ / k).
    """
    if E0 < 0.0:
        raise ValueError(f"E0 must be nonnegative, got {E0!r}")
    if k <= 0.0:
        raise ValueError(f"k must be positive, got {k!r}")
    return math.sqrt(2.0 * E0 / inertia.i_min), math.sqrt(2.0 * E0 / k)
