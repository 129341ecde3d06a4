import pytest

from clifford import build_clifford
from grid import GridSpec
from operators import CutoffFunction


@pytest.fixture(scope="session")
def rep2():
    return build_clifford(2)


@pytest.fixture(scope="session")
def rep3():
    return build_clifford(3)


@pytest.fixture(scope="session")
def cutoff():
    return CutoffFunction()


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(n=2, M=16, L=8.0)


@pytest.fixture(scope="session")
def packet_grid():
    return GridSpec(n=2, M=64, L=32.0)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRAC_LAP_OUTPUT_DIR", str(tmp_path))
    return tmp_path
