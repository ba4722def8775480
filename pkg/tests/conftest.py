import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import kernels  # noqa: E402


@pytest.fixture
def fig1():
    return kernels.make(kernels.fig1_doc())


@pytest.fixture
def chain():
    return kernels.make(kernels.chain_doc())


@pytest.fixture
def jacobi():
    return kernels.make(kernels.jacobi1d_doc())


@pytest.fixture
def square():
    return kernels.make(kernels.square_doc())
