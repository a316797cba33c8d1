import numpy as np
import pytest

from macrobell import PairSource, calibrate_source


@pytest.fixture
def rng():
    return np.random.default_rng(20120904)


@pytest.fixture(scope="session")
def calibrated_source() -> PairSource:
    return calibrate_source(0.536, 0.602)


@pytest.fixture(scope="session")
def ideal_source() -> PairSource:
    return PairSource.ideal()
