import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import beliefgames as bg


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def big_match_spec():
    return bg.big_match()


@pytest.fixture
def fixtures_dir():
    return Path(__file__).parent / "fixtures"
