"""Property checks shared between the module tests and the acceptance suite.

Each function draws its own seeded samples, asserts internally and returns
nothing; they are cheap enough to run twice.
"""

import math

import numpy as np

from rattleback import (
    BodyInertia,
    EffectiveSystem,
    IntegratorConfig,
    State,
    StiffSystem,
    angular_velocity,
    critical_ratio,
    effective_potential,
    energy,
    g,
    g_prime,
    lagrangian,
    simulate,
    simulate_effective,
    tapping_acceleration,
    theta_constant,
    transversal_energy,
    vector_field,
)

SEED = 20260810


def _random_inertia(rng) -> BodyInertia:
    i = rng.uniform(0.5, 3.0, 3)
    return BodyInertia(float(i[0]), float(i[1]), float(i[2]))


def _random_state(rng) -> State:
    v = rng.uniform(-2.0, 2.0, 4)
    return State(float(v[0]), float(v[1]), float(v[2]), float(v[3]))


def check_g_prime_finite_difference(n: int = 1000) -> None:
    """g′ agrees with a centered difference of g to O(h²), h = 1e-6."""
    rng = np.random.default_rng(SEED)
    h = 1e-6
    for _ in range(n):
        ine = _random_inertia(rng)
        alpha = float(rng.uniform(-2.0 * math.pi, 2.0 * math.pi))
        fd = (g(ine, alpha + h) - g(ine, alpha - h)) / (2.0 * h)
        assert abs(g_prime(ine, alpha) - fd) < 1e-8 * max(ine.i_x, ine.i_y)


def check_g_bounds(n: int = 1000) -> None:
    rng = np.random.default_rng(SEED + 1)
    for _ in range(n):
        ine = _random_inertia(rng)
        alpha = float(rng.uniform(-10.0, 10.0))
        gv = g(ine, alpha)
        assert min(ine.i_x, ine.i_y) - 1e-15 <= gv <= max(ine.i_x, ine.i_y) + 1e-15


def check_energy_gradient_identity(n: int = 1000) -> None:
    """⟨∇E, f(s)⟩ cancels to rounding along the vector field (conservation)."""
    rng = np.random.default_rng(SEED + 2)
    for _ in range(n):
        ine = _random_inertia(rng)
        sys_ = StiffSystem(ine, float(rng.uniform(0.5, 100.0)))
        s = _random_state(rng)
        gv = g(ine, s.alpha)
        gp = g_prime(ine, s.alpha)
        _, _, a_gamma, a_alpha = vector_field(sys_, s)
        # ∇E = (kγ, ½g′γ̇², gγ̇, i_zα̇) dotted with (γ̇, α̇, γ̈, α̈)
        dot = (
            sys_.k * s.gamma * s.v_gamma
            + 0.5 * gp * s.v_gamma * s.v_gamma * s.v_alpha
            + gv * s.v_gamma * a_gamma
            + ine.i_z * s.v_alpha * a_alpha
        )
        assert abs(dot) < 1e-12 * (1.0 + abs(energy(sys_, s)))


def check_kinetic_consistency(n: int = 1000) -> None:
    """Kinetic part of the Lagrangian equals ½⟨I ω, ω⟩ with ω from the angles."""
    rng = np.random.default_rng(SEED + 3)
    for _ in range(n):
        ine = _random_inertia(rng)
        sys_ = StiffSystem(ine, float(rng.uniform(0.5, 100.0)))
        s = _random_state(rng)
        kinetic = lagrangian(sys_, s) + 0.5 * sys_.k * s.gamma * s.gamma
        wx, wy, wz = angular_velocity(s)
        quad = 0.5 * (ine.i_x * wx * wx + ine.i_y * wy * wy + ine.i_z * wz * wz)
        assert abs(kinetic - quad) <= 1e-12 * (1.0 + abs(quad))


def check_tapping_matches_vector_field(n: int = 500) -> None:
    """α̈ of the vector field at (0, α₀, γ̇₀, 0) is the tapping closed form."""
    rng = np.random.default_rng(SEED + 4)
    for _ in range(n):
        ine = _random_inertia(rng)
        sys_ = StiffSystem(ine, float(rng.uniform(0.5, 100.0)))
        alpha0 = float(rng.uniform(-math.pi, math.pi))
        v_gamma0 = float(rng.uniform(-2.0, 2.0))
        d = vector_field(sys_, State(0.0, alpha0, v_gamma0, 0.0))
        tap = tapping_acceleration(ine, alpha0, v_gamma0)
        assert d.a_gamma == 0.0
        assert abs(d.a_alpha - tap) <= 1e-14 * max(abs(tap), 1e-300)


def check_threshold_predicates(n: int = 1000) -> None:
    """Barrier inequality of the effective energy ⇔ velocity-ratio inequality."""
    rng = np.random.default_rng(SEED + 5)
    checked = 0
    for _ in range(n):
        ine = _random_inertia(rng)
        v_gamma0 = float(rng.uniform(0.1, 2.0))
        v_alpha0 = float(rng.uniform(0.1, 2.0))
        ratio = (v_alpha0 / v_gamma0) ** 2
        crit = critical_ratio(ine)
        if abs(ratio - crit) < 1e-9 * max(ratio, crit):
            continue  # exclude the razor edge where rounding decides
        theta = theta_constant(ine, 0.0, v_gamma0)
        eff = EffectiveSystem(ine, theta)
        barrier = (
            0.5 * ine.i_z * v_alpha0 * v_alpha0 + effective_potential(eff, 0.0)
            < effective_potential(eff, 0.5 * math.pi)
        )
        assert barrier == (ratio < crit)
        checked += 1
    assert checked > 0.9 * n


def check_reflection_symmetry(body: BodyInertia) -> None:
    """α ↦ −α maps effective solutions to solutions."""
    theta = theta_constant(body, 0.0, 1.0)
    eff = EffectiveSystem(body, theta)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    fwd = simulate_effective(eff, 0.3, 0.2, 20.0, cfg)
    mir = simulate_effective(eff, -0.3, -0.2, 20.0, cfg)
    assert np.max(np.abs(fwd.alpha + mir.alpha)) < 1e-9
    assert np.max(np.abs(fwd.v_alpha + mir.v_alpha)) < 1e-9


def check_time_reversal(body: BodyInertia) -> None:
    """Integrate out, flip velocities, integrate back: returns to the start."""
    sys_ = StiffSystem(body, 1e3)
    s0 = State(0.0, 0.0, 1.0, 0.5)
    out = simulate(sys_, s0, 5.0)
    end = out.state_at(len(out) - 1)
    back = simulate(sys_, State(end.gamma, end.alpha, -end.v_gamma, -end.v_alpha), 5.0)
    fin = back.state_at(len(back) - 1)
    assert abs(fin.gamma - s0.gamma) < 1e-5
    assert abs(fin.alpha - s0.alpha) < 1e-5
    assert abs(fin.v_gamma + s0.v_gamma) < 1e-5
    assert abs(fin.v_alpha + s0.v_alpha) < 1e-5


def check_decomposition_identity(body: BodyInertia) -> None:
    """K⊥ + U⊥ + spin energy re-totals the stored energy at every grid point."""
    sys_ = StiffSystem(body, 1e4)
    traj = simulate(sys_, State(0.0, 0.0, 1.0, 0.5), 5.0)
    k_perp, u_perp = transversal_energy(traj, sys_)
    total = k_perp + u_perp + 0.5 * body.i_z * traj.v_alpha**2
    assert np.max(np.abs(total - traj.energy) / (1.0 + np.abs(traj.energy))) < 1e-12
