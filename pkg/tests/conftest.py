import math

import numpy as np
import pytest

from constructions.builders import build
from constructions.models import ExampleSpec
from manifold.models import ChartAtlas, Parametrization


@pytest.fixture
def circle() -> Parametrization:
    """Radius-1/4 circle in the (x, y)-plane of R^3."""
    return Parametrization.from_text(
        ["cos(x1)/4", "sin(x1)/4", "0"], [(0.0, 2 * math.pi)], label="circle"
    )


@pytest.fixture
def sphere_r4() -> ChartAtlas:
    """Round S^2 of radius 1/4 centred at the origin of R^4 (cube-face charts)."""
    return build(ExampleSpec(kind="single-sphere"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def reports_dir(tmp_path, monkeypatch):
    import reports.store

    monkeypatch.setattr(reports.store, "REPORTS_DIR", tmp_path / "reports")
    return tmp_path / "reports"
