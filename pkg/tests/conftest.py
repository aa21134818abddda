import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from blowuplab import (
    Problem,
    find_compact_subsolution_profile,
    unit_stationary_profile,
)


@pytest.fixture(scope="session")
def prob_2151():
    return Problem(m=2.0, p=1.5, sigma=1.0, dim=1)


@pytest.fixture(scope="session")
def prob_3223():
    return Problem(m=3.0, p=2.0, sigma=2.0, dim=3)


@pytest.fixture(scope="session")
def prob_2121():
    return Problem(m=2.0, p=1.0, sigma=2.0, dim=1)


@pytest.fixture(scope="session")
def compact_2151(prob_2151):
    return find_compact_subsolution_profile(prob_2151)


@pytest.fixture(scope="session")
def compact_2121(prob_2121):
    return find_compact_subsolution_profile(prob_2121)


@pytest.fixture(scope="session")
def unit_3223(prob_3223):
    return unit_stationary_profile(prob_3223)


@pytest.fixture(scope="session")
def unit_2151(prob_2151):
    return unit_stationary_profile(prob_2151)
