"""Spin-reversal dynamics of a spring-constrained rigid body.

A rigid body spinning about its z-axis while a stiff torsional spring
confines its roll angle reverses its spin spontaneously when the body is
asymmetric and the spin is slow enough.  This package integrates the stiff
two-angle system, integrates its effective one-angle limit, classifies the
trapped/untrapped regimes, and measures how finite-stiffness runs approach
the limit.

Modules: :mod:`~rattleback.model` (closed-form mechanics),
:mod:`~rattleback.integrate` (adaptive RK 5(4) + fixed-step oracle),
:mod:`~rattleback.effective` (limit dynamics and regime classification),
:mod:`~rattleback.analysis` (reversal detection, averaged observables,
stiffness ladders), :mod:`~rattleback.cli` (JSON-configured command line).
"""

from .model import (
    BodyInertia,
    State,
    StiffSystem,
    StateDerivative,
    g,
    g_prime,
    lagrangian,
    energy,
    vector_field,
    tapping_acceleration,
    angular_velocity,
    a_priori_bounds,
)
from .integrate import (
    IntegratorConfig,
    Trajectory,
    TrajectoryMeta,
    IntegrationError,
    DriftExceeded,
    StepUnderflow,
    StepTooLarge,
    OutOfRange,
    simulate,
    simulate_oracle,
    sample,
    fast_period,
)
from .effective import (
    EffectiveSystem,
    Regime,
    ZeroVelocity,
    InvalidRegime,
    theta_constant,
    effective_potential,
    effective_vector_field,
    effective_energy,
    critical_ratio,
    classify,
    turning_points,
    oscillation_period,
    simulate_effective,
)
from .analysis import (
    WindowTooSmall,
    ReversalReport,
    ConvergenceReport,
    transversal_energy,
    weak_star_observable,
    windowed_average,
    detect_reversals,
    equipartition_gap,
    convergence_study,
)

__version__ = "0.1.0"

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
    "WindowTooSmall",
    "ReversalReport",
    "ConvergenceReport",
    "transversal_energy",
    "weak_star_observable",
    "windowed_average",
    "detect_reversals",
    "equipartition_gap",
    "convergence_study",
    "__version__",
]
