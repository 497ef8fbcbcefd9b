import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from asymdot.schrodinger import DotGeometry, build_potential, solve  # noqa: E402


@pytest.fixture(scope="session")
def flat_well():
    geometry = DotGeometry(0.0, 20.0, 0.0)
    return geometry, solve(build_potential(geometry), n_states=3)


@pytest.fixture(scope="session")
def fig1_dot():
    geometry = DotGeometry(15.0, 20.0, 0.3)
    return geometry, solve(build_potential(geometry))
