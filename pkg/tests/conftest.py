import pytest

from cryomux.config import default_config


@pytest.fixture(scope="session")
def cfg():
    """Shipped two-sensor assembly scenario (synthesis already resolved)."""
    return default_config()
