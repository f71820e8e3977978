# scan/models.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from measure.models import MeasureEstimate, MeasureParams


class DegenerateClusterError(ValueError):
    def __init__(self, message: str, achieved_rank: int):
        super().__init__(f"{message} (achieved rank {achieved_rank})")
        self.achieved_rank = achieved_rank


@dataclass(frozen=True, eq=False)
class AffinePlane:
    base: np.ndarray          # n-vector
    basis: np.ndarray         # n x k, orthonormal columns

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        basis = np.asarray(self.basis, dtype=float).reshape(base.shape[0], -1)
        gram = basis.T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), rtol=0.0, atol=1e-10):
            raise ValueError("affine plane basis must have orthonormal columns")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def distance(self, q) -> float:
        v = np.asarray(q, dtype=float) - self.base
        return float(np.linalg.norm(v - self.basis @ (self.basis.T @ v)))

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "base": self.base.tolist(), "basis": self.basis.T.tolist()}


@dataclass(frozen=True)
class PlaneFit:
    plane: AffinePlane
    residual: float                # max point-to-plane distance
    singular_values: List[float]   # spectrum of the centered cluster (gap diagnostic)


@dataclass
class ContainmentReport:
    tol: float
    distances: List[float]
    outliers: List[int]

    @property
    def passed(self) -> bool:
        return not self.outliers

    def to_dict(self) -> Dict[str, Any]:
        return {"tol": self.tol, "passed": self.passed, "outliers": self.outliers,
                "max_distance": max(self.distances) if self.distances else 0.0}


@dataclass
class PlaneMatchReport:
    matched: List[Dict[str, Any]]
    unmatched_fitted: List[int]
    unmatched_predicted: List[int]
    base_tol: float
    angle_tol_deg: float

    @property
    def passed(self) -> bool:
        return (
            not self.unmatched_fitted
            and not self.unmatched_predicted
            and all(m["base_distance"] <= self.base_tol and m["max_angle_deg"] <= self.angle_tol_deg
                    for m in self.matched)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "matched": self.matched,
            "unmatched_fitted": self.unmatched_fitted,
            "unmatched_predicted": self.unmatched_predicted,
            "base_tol": self.base_tol,
            "angle_tol_deg": self.angle_tol_deg,
        }


@dataclass
class ScanReport:
    box: List[List[float]]
    nodes_per_axis: List[int]
    spacing: List[float]
    params: MeasureParams
    centers: np.ndarray                       # m x n, lexicographic grid order
    measures: List[MeasureEstimate]
    exceptional: List[int]                    # indices into centers
    degenerate_centers: List[int] = field(default_factory=list)
    failed_centers: List[int] = field(default_factory=list)
    clusters: List[List[int]] = field(default_factory=list)   # partition of `exceptional` (center indices)
    planes: List[AffinePlane] = field(default_factory=list)
    fit_residuals: List[float] = field(default_factory=list)
    spectra: List[List[float]] = field(default_factory=list)
    linking_radius: Optional[float] = None

    @property
    def exceptional_points(self) -> np.ndarray:
        return self.centers[self.exceptional] if self.exceptional else np.empty((0, self.centers.shape[1]))

    def to_payload(self) -> Dict[str, Any]:
        return {
            "box": self.box,
            "nodes_per_axis": self.nodes_per_axis,
            "spacing": self.spacing,
            "measure_params": self.params.to_dict(),
            "center_count": int(self.centers.shape[0]),
            "exceptional": [self.centers[i].tolist() for i in self.exceptional],
            "degenerate_centers": [self.centers[i].tolist() for i in self.degenerate_centers],
            "failed_centers": [self.centers[i].tolist() for i in self.failed_centers],
            "linking_radius": self.linking_radius,
            "clusters": [[self.centers[i].tolist() for i in c] for c in self.clusters],
            "planes": [p.to_dict() for p in self.planes],
            "fit_residuals": self.fit_residuals,
            "spectra": self.spectra,
        }
