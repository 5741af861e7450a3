import pytest

from incidence_hasse.geometry import standard_config


@pytest.fixture(scope="session")
def configs():
    return {m: standard_config(m) for m in range(1, 7)}
