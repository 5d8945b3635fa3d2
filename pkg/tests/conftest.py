import pytest

from rattleback import BodyInertia, IntegratorConfig, State


@pytest.fixture(scope="session")
def benchmark_body() -> BodyInertia:
    """The asymmetric reference body used throughout: (i_x, i_y, i_z) = (2, 1, 1)."""
    return BodyInertia(2.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def benchmark_s0() -> State:
    """Subcritical initial data: null angles, γ̇₀ = 1, α̇₀ = 0.5 (ratio² = 0.25)."""
    return State(0.0, 0.0, 1.0, 0.5)


@pytest.fixture(scope="session")
def tight_cfg() -> IntegratorConfig:
    return IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
