# scan/fitting.py
from __future__ import annotations

from typing import List, Sequence

import numpy as np
from scipy.linalg import subspace_angles

from scan.models import (
    AffinePlane,
    ContainmentReport,
    DegenerateClusterError,
    PlaneFit,
    PlaneMatchReport,
)

RANK_TOL = 1e-12


def fit_affine_plane(points, k: int) -> PlaneFit:
    """
    Least-squares k-dimensional affine plane: centroid plus the top-k right
    singular directions of the centered point matrix.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    if k < 0 or k > n:
        raise ValueError(f"plane dimension must be in [0, {n}], got {k}")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.count_nonzero(sv > RANK_TOL * max(1.0, float(np.abs(pts).max()))))
    if m < k + 1 or rank < k:
        raise DegenerateClusterError(f"cannot fit a {k}-plane to {m} points", rank)

    plane = AffinePlane(base=centroid, basis=vt[:k].T if k else np.zeros((n, 0)))
    residual = max(plane.distance(p) for p in pts)
    return PlaneFit(plane=plane, residual=residual, singular_values=sv.tolist())


def verify_containment(planes: Sequence[AffinePlane], candidates, tol: float) -> ContainmentReport:
    """Distance from every candidate to its nearest plane; passes iff all are <= tol."""
    pts = np.atleast_2d(np.asarray(candidates, dtype=float)) if len(candidates) else np.empty((0, 0))
    distances: List[float] = []
    outliers: List[int] = []
    for idx, q in enumerate(pts):
        dist = min((p.distance(q) for p in planes), default=float("inf"))
        distances.append(dist)
        if dist > tol:
            outliers.append(idx)
    return ContainmentReport(tol=tol, distances=distances, outliers=outliers)


def max_principal_angle_deg(a: AffinePlane, b: AffinePlane) -> float:
    if a.k == 0 or b.k == 0:
        return 0.0
    return float(np.degrees(np.max(subspace_angles(a.basis, b.basis))))


def compare_planes(
    fitted: Sequence[AffinePlane],
    predicted: Sequence[AffinePlane],
    base_tol: float,
    angle_tol_deg: float = 2.0,
) -> PlaneMatchReport:
    """Greedy one-to-one matching of fitted planes to predicted ones by base distance."""
    free = list(range(len(predicted)))
    matched = []
    unmatched_fitted = []
    for fi, fp in enumerate(fitted):
        if not free:
            unmatched_fitted.append(fi)
            continue
        best = min(free, key=lambda pi: predicted[pi].distance(fp.base))
        free.remove(best)
        matched.append({
            "fitted": fi,
            "predicted": best,
            "base_distance": predicted[best].distance(fp.base),
            "max_angle_deg": max_principal_angle_deg(fp, predicted[best]),
        })
    return PlaneMatchReport(
        matched=matched,
        unmatched_fitted=unmatched_fitted,
        unmatched_predicted=free,
        base_tol=base_tol,
        angle_tol_deg=angle_tol_deg,
    )
