import pytest
from hypothesis import HealthCheck, settings

from expbrush.brush import SubBrush

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURE_ADDRESSES = ["0", "0,0,1", "0,0,-1", "0,0,2", "0,0,0,-3", "0,0,1,1", "-1,2", "0,0|1,-1"]


@pytest.fixture(scope="session")
def fixture_brush():
    return SubBrush.build(FIXTURE_ADDRESSES, depth=64)
