from pathlib import Path

import pytest

from rfidsense import experiments
from rfidsense.gen2sim import Scenario

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = Path(__file__).parent.parent / "configs"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture(scope="session")
def default_range_rows():
    """Full 60 s range sweep over the default grid.

    This is the slowest computation in the suite, and two acceptance
    checks plus the simulator tests all look at it, so it runs once.
    """
    return experiments.range_rows(Scenario())
