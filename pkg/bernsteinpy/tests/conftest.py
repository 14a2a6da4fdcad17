# -*- coding: utf-8 -*-
import numpy as np
import pytest

from bernsteinpy.data.data_readiness import load_params
from bernsteinpy.model.measures import ModelParams


@pytest.fixture
def neutral() -> ModelParams:
    return load_params("neutral")


@pytest.fixture
def genic() -> ModelParams:
    return load_params("genic")


@pytest.fixture
def theta_only() -> ModelParams:
    return load_params("theta_only")


@pytest.fixture
def full() -> ModelParams:
    return load_params("full")


@pytest.fixture
def finite_c() -> ModelParams:
    return load_params("finite_c")


@pytest.fixture
def violating() -> ModelParams:
    return load_params("violating")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
