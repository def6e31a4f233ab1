#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
    Shared fixtures for the ultranorm tests.
"""
import numpy as np
import pytest

from ultranorm.config import ExperimentConfig
from ultranorm.functions import HermiteGaussianFunction
from ultranorm.sequences import gevrey
from ultranorm.stft import PhaseSpaceGrid
from ultranorm.utilities import SpatialGrid


@pytest.fixture
def factorial():
    return gevrey(1)


@pytest.fixture
def gaussian():
    return HermiteGaussianFunction.gaussian()


@pytest.fixture
def spatial():
    return SpatialGrid(20.0, 2001)


@pytest.fixture
def phase():
    return PhaseSpaceGrid(8.0, 6.0, 192, 192)


@pytest.fixture
def small_config():
    """A configuration that runs every suite in seconds: three test
    functions, one r-sequence and coarse grids."""
    pi = float(np.pi)
    return ExperimentConfig.from_dict({
        "functions": [[{"width": pi}],
                      [{"width": pi, "center": 1.0, "modulation": 1.0}],
                      [{"width": pi / 2, "amplitude": [0.0, 1.0]}]],
        "r_sequences": [{"linear": {"a": 1.0, "b": 1.0}}],
        "grids": {"spatial": {"extent": 10.0, "points": 801},
                  "product": {"extent": 10.0, "points": 101},
                  "reconstruction": {"extent": 4.0, "points": 41}},
    })
