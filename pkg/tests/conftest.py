"""Test fixtures for jlbialg."""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from config import reset_settings

hypothesis_settings.register_profile(
    "ci", derandomize=True, max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.load_profile("ci")


@pytest.fixture(autouse=True)
def fresh_state():
    """Reset the settings singleton and every repository cache around each test."""
    from repositories.base import clear_cache
    reset_settings()
    clear_cache()
    yield
    reset_settings()
    clear_cache()


@pytest.fixture
def instance_of():
    """Instantiate a catalog row by label at a binding of plain numbers."""
    from repositories.bialgebra_repo import get_entry
    from services.bialgebra_service import instantiate

    def _build(label, **binding):
        return instantiate(get_entry(label), {k: Fraction(v) for k, v in binding.items()})
    return _build


@pytest.fixture
def algebra_of():
    """Instantiate a named algebra from the shipped catalog."""
    from repositories.algebra_repo import get_algebra
    from services.bialgebra_service import instantiate_algebra

    def _build(name, **binding):
        return instantiate_algebra(get_algebra(name), {k: Fraction(v) for k, v in binding.items()})
    return _build


@pytest.fixture
def quick_sampling():
    """Fewer points per numeric check."""
    from config import override_settings
    return override_settings(samples=20, param_samples=2)


@pytest.fixture
def sampled_algebra():
    """A named algebra at one deterministic admissible binding of its parameters."""
    from repositories.algebra_repo import get_algebra
    from services.bialgebra_service import instantiate_algebra, sample_values

    def _build(name, seed=11):
        algebra = get_algebra(name)
        binding = {}
        if algebra.params:
            binding = sample_values(algebra.params, 1, seed, algebra.constraints, label=name)[0]
        return instantiate_algebra(algebra, binding)
    return _build
