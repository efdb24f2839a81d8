import pytest

from nncc import SystemParams, validate


@pytest.fixture(scope="session")
def params():
    """Default radio constants (short-range exchange figure regime)."""
    return validate(SystemParams())


@pytest.fixture(scope="session")
def dense_params():
    """High-rate regime used for the distribution-over-placements checks."""
    return validate(SystemParams(rate=1e7, rho=1e-4))
