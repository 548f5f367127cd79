"""Shared fixtures for the test suite."""

import pytest

from models.params import FkppParams, KsParams
from services.fkpp_service import fkpp_wave


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow contour tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def fkpp_c3() -> FkppParams:
    return FkppParams(delta=1.0, c=3.0)


@pytest.fixture(scope="session")
def fkpp_c24() -> FkppParams:
    return FkppParams(delta=1.0, c=2.4)


@pytest.fixture(scope="session")
def ks_params() -> KsParams:
    return KsParams(alpha=1.0, beta=2.0, c=2.0, delta=1.0)


@pytest.fixture(scope="session")
def wave_c3(fkpp_c3):
    return fkpp_wave(fkpp_c3)


@pytest.fixture(scope="session")
def wave_c24(fkpp_c24):
    return fkpp_wave(fkpp_c24)
