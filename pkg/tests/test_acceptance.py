"""Acceptance suite: one test per release criterion.

Each test prints a single line (visible with ``pytest -v -s`` or in the
captured output) naming the criterion, the measured quantity, its budget
and the wall time.  Heavy fixtures are shared where criteria reuse runs.
"""

import json
import math
import time

import numpy as np
import pytest

from rattleback import (
    BodyInertia,
    EffectiveSystem,
    IntegratorConfig,
    State,
    StiffSystem,
    convergence_study,
    detect_reversals,
    effective_energy,
    oscillation_period,
    simulate,
    simulate_oracle,
    tapping_acceleration,
    theta_constant,
    weak_star_observable,
)
from rattleback.cli import main

import helpers

BODY = BodyInertia(2.0, 1.0, 1.0)
SUBCRITICAL_S0 = State(0.0, 0.0, 1.0, 0.5)
THETA = math.sqrt(2.0)
CRITICAL_RATIO = 0.8284271247461903
# criterion runs need drift < 1e-7 at k = 1e5; rel_tol 1e-11 delivers ~4e-8
RUN_CFG = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)

LADDER = [1e2, 1e3, 1e4, 1e5]


def _report(num: int, name: str, detail: str, t0: float) -> None:
    print(f"[acceptance] criterion {num:2d} PASS — {name}: {detail} [{time.perf_counter() - t0:.2f}s]")


@pytest.fixture(scope="module")
def ladder_report():
    return convergence_study(BODY, SUBCRITICAL_S0, LADDER, 10.0, RUN_CFG, max_workers=4)


def test_c01_tapping_effect():
    t0 = time.perf_counter()
    closed = tapping_acceleration(BODY, math.pi / 4, 1.0)
    assert closed == pytest.approx(-0.5, rel=1e-12)
    h = 1e-4
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, dt_out=h)
    traj = simulate(StiffSystem(BODY, 1e3), State(0.0, math.pi / 4, 1.0, 0.0), h, cfg)
    fd = float(traj.v_alpha[-1] - traj.v_alpha[0]) / h
    err = abs(fd - closed)
    assert err < 1e-3
    _report(1, "tapping effect", f"|fd − closed| = {err:.2e} < 1e-3", t0)


def test_c02_symmetric_body_decouples():
    t0 = time.perf_counter()
    traj = simulate(StiffSystem(BodyInertia(1, 1, 1), 4.0), State(0, 0, 1, 1), 2 * math.pi)
    err_alpha = float(np.max(np.abs(traj.alpha - traj.times)))
    err_gamma = float(np.max(np.abs(traj.gamma - 0.5 * np.sin(2.0 * traj.times))))
    assert err_alpha < 1e-6
    assert err_gamma < 1e-6
    _report(2, "symmetric decoupling", f"sup errors {err_alpha:.1e}, {err_gamma:.1e} < 1e-6", t0)


def test_c03_energy_conservation_and_bounds():
    t0 = time.perf_counter()
    traj = simulate(StiffSystem(BODY, 1e5), SUBCRITICAL_S0, 50.0, RUN_CFG)
    e0 = float(traj.energy[0])
    drift_spec = float(np.max(np.abs(traj.energy - e0))) / (1.0 + abs(e0))
    drift_plain = float(np.max(np.abs(traj.energy - e0))) / abs(e0)
    assert drift_spec < 1e-7
    assert drift_plain < 1e-7
    gamma_bound = math.sqrt(2.0 * 1.125 / 1e5) * (1.0 + 1e-6)
    max_gamma = float(np.max(np.abs(traj.gamma)))
    assert max_gamma <= gamma_bound
    _report(
        3,
        "energy conservation + roll bound",
        f"drift {drift_plain:.1e} < 1e-7, max|γ| {max_gamma:.4e} ≤ {gamma_bound:.4e}",
        t0,
    )


def test_c04_spin_reversals_subcritical():
    t0 = time.perf_counter()
    eff = EffectiveSystem(BODY, THETA)
    period = oscillation_period(eff, effective_energy(eff, 0.0, 0.5))
    T = 2.0 * period
    traj = simulate(StiffSystem(BODY, 1e5), SUBCRITICAL_S0, T, RUN_CFG)
    report = detect_reversals(traj)
    assert report.count >= 4
    worst = 0.0
    for m, t_rev in enumerate(report.reversal_times):
        predicted = (2 * m + 1) / 4.0 * period
        rel = abs(t_rev - predicted) / predicted
        worst = max(worst, rel)
        assert rel < 0.05
    _report(
        4,
        "subcritical spin reversals",
        f"count {report.count} ≥ 4, times within {worst:.2%} of quarter periods",
        t0,
    )


def test_c05_monotone_spin_supercritical():
    t0 = time.perf_counter()
    traj = simulate(StiffSystem(BODY, 1e5), State(0, 0, 1.0, 1.2), 50.0, RUN_CFG)
    report = detect_reversals(traj)
    assert report.monotone
    assert float(traj.alpha[-1]) > 2.0 * math.pi
    _report(
        5,
        "supercritical monotone spin",
        f"monotone, α(T) = {float(traj.alpha[-1]):.1f} > 2π",
        t0,
    )


def test_c06_effective_convergence(ladder_report):
    t0 = time.perf_counter()
    sup_a = ladder_report.sup_alpha_err
    sup_da = ladder_report.sup_dalpha_err
    assert sup_a[-1] < sup_a[0]
    assert sup_da[-1] < sup_da[0]
    factor = sup_a[0] / sup_a[-1]
    assert factor >= 3.0
    _report(
        6,
        "uniform + C¹ convergence",
        f"sup_alpha_err {sup_a[0]:.1e}→{sup_a[-1]:.1e} (×{factor:.0f} ≥ 3), "
        f"sup_dalpha_err {sup_da[0]:.1e}→{sup_da[-1]:.1e}",
        t0,
    )


def test_c07_averaged_roll_constant(ladder_report):
    t0 = time.perf_counter()
    wse = ladder_report.weak_star_err
    assert wse[-1] < wse[0]
    traj = simulate(StiffSystem(BODY, 1e5), SUBCRITICAL_S0, 1.0, RUN_CFG)
    obs0 = float(weak_star_observable(traj, BODY)[0])
    assert abs(obs0 - 2.0 * THETA) < 1e-9
    _report(
        7,
        "averaged roll constant",
        f"window dev {wse[0]:.2e}→{wse[-1]:.2e}, obs(0) − 2θ = {obs0 - 2 * THETA:.1e}",
        t0,
    )


def test_c08_equipartition(ladder_report):
    t0 = time.perf_counter()
    gap = ladder_report.equipartition_gap
    assert gap[-1] < gap[0]
    _report(8, "energy equipartition", f"window gap {gap[0]:.2e}→{gap[-1]:.2e}", t0)


def test_c09_phase_boundary_scan(tmp_path):
    t0 = time.perf_counter()
    config = {
        "body": {"i_x": 2.0, "i_y": 1.0, "i_z": 1.0},
        "k": 1e5,
        "T": 50.0,
        "initial": {"v_gamma": 1.0},
        "integrator": {"rel_tol": 1e-11, "abs_tol": 1e-13},
        "analysis": {
            "ratio_squared_grid": [0.50, 0.60, 0.70, 0.75, 0.80, 0.86, 0.90, 1.00, 1.20]
        },
    }
    path = tmp_path / "scan.json"
    path.write_text(json.dumps(config))
    assert main(["scan", "--config", str(path), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    transition = summary["empirical_transition_ratio_squared"]
    assert transition is not None
    rel = abs(transition - CRITICAL_RATIO) / CRITICAL_RATIO
    assert rel < 0.05
    _report(
        9,
        "phase-boundary scan",
        f"empirical transition {transition:.4f} vs {CRITICAL_RATIO:.8f} ({rel:.2%} < 5%)",
        t0,
    )


def test_c10_oracle_equivalence():
    t0 = time.perf_counter()
    sys_ = StiffSystem(BODY, 1e4)
    adaptive = simulate(sys_, SUBCRITICAL_S0, 5.0)
    oracle = simulate_oracle(sys_, SUBCRITICAL_S0, 5.0, 1e-5)
    sup = float(np.max(np.abs(adaptive.alpha - oracle.alpha)))
    assert sup < 1e-6
    _report(10, "adaptive vs fixed-step oracle", f"sup|Δα| = {sup:.2e} < 1e-6", t0)


def test_c11_property_suites(benchmark_body):
    t0 = time.perf_counter()
    helpers.check_g_prime_finite_difference()
    helpers.check_g_bounds()
    helpers.check_energy_gradient_identity()
    helpers.check_kinetic_consistency()
    helpers.check_tapping_matches_vector_field()
    helpers.check_threshold_predicates()
    helpers.check_reflection_symmetry(benchmark_body)
    helpers.check_time_reversal(benchmark_body)
    helpers.check_decomposition_identity(benchmark_body)
    _report(11, "property suites", "gradients, symmetries, identities, 1000-sample predicates", t0)
