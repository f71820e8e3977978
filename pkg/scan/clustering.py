# scan/clustering.py
from __future__ import annotations

from typing import List

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage


def cluster_candidates(points, linking_radius: float) -> List[List[int]]:
    """
    Single-linkage components: two points share a cluster iff a chain of
    hops of length <= linking_radius joins them. Clusters are returned as
    sorted index lists, ordered by their first member.
    """
    if linking_radius <= 0:
        raise ValueError("linking_radius must be positive")
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        return []
    if pts.shape[0] == 1:
        return [[0]]

    Z = linkage(pts, method="single")
    labels = fcluster(Z, t=linking_radius, criterion="distance")

    clusters: dict = {}
    for idx, lab in enumerate(labels):
        clusters.setdefault(lab, []).append(idx)
    return sorted(clusters.values(), key=lambda c: c[0])
