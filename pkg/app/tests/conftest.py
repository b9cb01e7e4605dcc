"""Shared seeded fixtures"""
from typing import List

import numpy as np
import pytest

from app.services.algebra import AlgebraElement


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def rngs() -> List[np.random.Generator]:
    """Independent generators for seeded property loops"""
    return [np.random.default_rng([11, i]) for i in range(5)]


@pytest.fixture
def nilpotent_pair():
    """E_12 and E_21: their products differ in order"""
    return AlgebraElement([[0, 1], [0, 0]]), AlgebraElement([[0, 0], [1, 0]])
