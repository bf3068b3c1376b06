"""
Shared fixtures: rig, label sets, grids
"""

import numpy as np
import pytest

from stairkit.core.grid_model import labels_to_grid
from stairkit.models.geometry import CameraRig
from stairkit.models.grid import StairClass, StairLineLabel


@pytest.fixture
def rig() -> CameraRig:
    return CameraRig(fx=460.0, fy=460.0, cx=256.0, cy=256.0)


@pytest.fixture
def two_lines():
    return [
        StairLineLabel(cls=StairClass.CONVEX, x1=0.0, y1=100.0, x2=512.0, y2=100.0),
        StairLineLabel(cls=StairClass.CONCAVE, x1=0.0, y1=200.0, x2=512.0, y2=200.0),
    ]


@pytest.fixture
def two_line_grid(two_lines):
    return labels_to_grid(two_lines)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
