"""Spontaneous spin reversal of the stiff body, next to its effective limit.

Benchmark body (i_x, i_y, i_z) = (2, 1, 1), initial velocities γ̇₀ = 1 and
α̇₀ = 0.5: the squared ratio 0.25 sits below the critical value
(i_x/i_z)(√(i_x/i_y) − 1) ≈ 0.8284, so the spin is trapped in the wells of
the effective potential V_eff(α) = θ g(α)^{−1/2} and keeps reversing.

The stiff trajectory at k = 1e5 hugs the effective one; detected reversal
times land on odd multiples of the quarter period of the effective
oscillation, and the roll angle γ stays inside its shrinking energy bound.

Run:  python3 demos/02_spin_reversal.py        (writes spin_reversal.png)
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from rattleback import (
    BodyInertia,
    EffectiveSystem,
    IntegratorConfig,
    State,
    StiffSystem,
    detect_reversals,
    effective_energy,
    oscillation_period,
    simulate,
    simulate_effective,
    theta_constant,
    turning_points,
)

BODY = BodyInertia(2.0, 1.0, 1.0)
K = 1e5
S0 = State(0.0, 0.0, 1.0, 0.5)


def main() -> None:
    theta = theta_constant(BODY, S0.alpha, S0.v_gamma)
    eff = EffectiveSystem(BODY, theta)
    energy = effective_energy(eff, S0.alpha, S0.v_alpha)
    alpha_star = turning_points(eff, energy)
    period = oscillation_period(eff, energy)
    print(f"θ = {theta:.6f}, turning point α* = {alpha_star:.6f} rad, period = {period:.4f}")

    T = 2.5 * period
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    stiff = simulate(StiffSystem(BODY, K), S0, T, cfg)
    limit = simulate_effective(eff, S0.alpha, S0.v_alpha, T, cfg)
    report = detect_reversals(stiff)
    print(f"reversals at k = {K:g}: {[f'{t:.3f}' for t in report.reversal_times]}")
    print(f"energy drift: {stiff.meta.max_rel_energy_drift:.2e}")

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
    ax1.plot(stiff.times, stiff.alpha, label=r"stiff, $k = 10^5$")
    ax1.plot(limit.times, limit.alpha, "--", label="effective limit")
    for n, t_rev in enumerate(report.reversal_times):
        ax1.axvline(t_rev, color="gray", lw=0.8, ls=":",
                    label="detected reversals" if n == 0 else None)
    ax1.axhline(alpha_star, color="k", lw=0.6)
    ax1.axhline(-alpha_star, color="k", lw=0.6)
    ax1.set_ylabel(r"spin angle $\alpha$")
    ax1.legend(loc="upper right")

    ax2.plot(stiff.times, stiff.gamma, lw=0.4)
    bound = math.sqrt(2.0 * float(stiff.energy[0]) / K)
    ax2.axhline(bound, color="k", lw=0.6)
    ax2.axhline(-bound, color="k", lw=0.6)
    ax2.set_xlabel("t")
    ax2.set_ylabel(r"roll angle $\gamma$")
    ax2.set_title(r"fast roll stays inside $\pm\sqrt{2E_0/k}$")

    fig.tight_layout()
    fig.savefig("spin_reversal.png", dpi=130)
    print("wrote spin_reversal.png")


if __name__ == "__main__":
    main()
