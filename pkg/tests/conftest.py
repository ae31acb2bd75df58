"""Shared fixtures and the opt-in switch for full-scale simulations."""

from pathlib import Path

import pandas as pd
import pytest

from tcct.models.outcomes import Sample

FIXTURES = Path(__file__).with_name("fixtures")


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="run the long Monte Carlo reproductions of the published tables",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo reproduction (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def logistic_sample() -> Sample:
    """Binary covariate split 10/10; 3 of 10 and 7 of 10 responses are 1."""
    frame = pd.read_csv(FIXTURES / "logistic_n20.csv")
    return Sample.of(frame["y"], frame["x"])


@pytest.fixture
def zero_inflated_sample() -> Sample:
    frame = pd.read_csv(FIXTURES / "zero_inflated.csv")
    return Sample.of(frame["y"], frame["x"])
