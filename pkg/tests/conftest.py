import math
import sys

import numpy as np
import pytest
from loguru import logger

from app.geometry import Chart, Diamond, SpacetimePoint
from app.smearing import TestFunction2D

PERIOD = 2 * math.pi


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    monkeypatch.setenv('COVER_KMS_CONFIG_DIR', str(tmp_path / 'config'))
    monkeypatch.setenv('COVER_KMS_OUTPUT_DIR', str(tmp_path / 'output'))
    monkeypatch.setattr(sys, 'excepthook', sys.excepthook)

    yield tmp_path

    # Sinks added by a run may point at a captured stream.
    logger.remove()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cylinder():
    return Chart.cylinder(PERIOD)


@pytest.fixture
def plane_region():
    return Diamond(SpacetimePoint(0.0, 0.0), 0.5, 0.5)


@pytest.fixture
def cylinder_region(cylinder):
    return Diamond(SpacetimePoint(0.0, 1.0, cylinder), 0.5, 0.5)


@pytest.fixture
def plane_pair(plane_region):
    f = TestFunction2D.in_region(plane_region, 0.05, -0.08, fill=0.45)
    g = TestFunction2D.in_region(plane_region, -0.1, 0.04, fill=0.4, amplitude=1.5)

    return f, g


@pytest.fixture
def cylinder_pair(cylinder_region):
    f = TestFunction2D.in_region(cylinder_region, 0.05, -0.08, fill=0.45)
    g = TestFunction2D.in_region(cylinder_region, -0.1, 0.04, fill=0.4, amplitude=1.5)

    return f, g
