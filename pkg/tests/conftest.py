import numpy as np
import pytest

from latticeflow import height
from latticeflow import homspace


@pytest.fixture
def rng():
  return np.random.default_rng(0)


@pytest.fixture
def flow():
  return homspace.make_flow([1.0], [1.0])


@pytest.fixture
def flow3():
  return homspace.make_flow([1.0, 1.0], [2.0])


@pytest.fixture
def lattice():
  return homspace.LatticePoint.identity(2)


@pytest.fixture
def params(flow):
  return height.make_height_params(flow, 0.1)
