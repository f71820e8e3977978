# measure/models.py
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class MeasureEstimate:
    value: float              # H^d measure of the non-transverse set (estimate)
    total: float              # H^d measure of the whole chart / atlas
    fraction: float           # value / total
    nodes_hit: int
    nodes_total: int
    tolerance_used: float
    nodes_skipped: int = 0    # evaluation failures
    nodes_degenerate: int = 0 # nodes within machine-floor of the center

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ChartSample:
    """Center-independent data of one chart on its midpoint grid (valid nodes only)."""
    points: np.ndarray        # m x n
    jacobians: np.ndarray     # m x n x d
    weights: np.ndarray       # m, volume element * cell volume
    nodes_total: int
    nodes_skipped: int
    label: str = ""

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class MeasureParams:
    nodes_per_axis: int = 256
    tau: float = 1e-7
    delta: float = 0.01

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
