# scan/scanner.py
from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from manifold.models import Box, ChartAtlas, Parametrization
from measure.models import MeasureParams, NumericalFailure
from measure.quadrature import measure_from_samples, sample_surface
from scan.clustering import cluster_candidates
from scan.fitting import fit_affine_plane
from scan.models import ScanReport

logger = logging.getLogger(__name__)

MIN_CENTERS_PER_AXIS = 4
MAX_FAILED_FRACTION = 0.01
LINKING_FACTOR = 1.5


def center_grid(box: Box, nodes_per_axis: Union[int, Sequence[int]]):
    """Regular grid including the box corners, lexicographic (ij) order."""
    box = [(float(lo), float(hi)) for lo, hi in box]
    counts = [int(nodes_per_axis)] * len(box) if np.isscalar(nodes_per_axis) else [int(c) for c in nodes_per_axis]
    if len(counts) != len(box):
        raise ValueError(f"expected {len(box)} per-axis center counts, got {len(counts)}")
    for (lo, hi), c in zip(box, counts):
        if not hi > lo:
            raise ValueError(f"scan box is degenerate on an axis: [{lo}, {hi}]")
        if c < MIN_CENTERS_PER_AXIS:
            raise ValueError(f"centers per axis must be >= {MIN_CENTERS_PER_AXIS}, got {c}")
    axes = [np.linspace(lo, hi, c) for (lo, hi), c in zip(box, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    spacing = [(hi - lo) / (c - 1) for (lo, hi), c in zip(box, counts)]
    return centers, counts, spacing


def scan_centers(
    atlas: Union[Parametrization, ChartAtlas],
    box: Box,
    nodes_per_axis_a: Union[int, Sequence[int]],
    measure_params: Optional[MeasureParams] = None,
) -> ScanReport:
    """
    Evaluate the exceptional-center test on every node of the center grid.
    Chart samples are computed once and shared by all centers.
    """
    params = measure_params or MeasureParams()
    centers, counts, spacing = center_grid(box, nodes_per_axis_a)
    samples = sample_surface(atlas, params.nodes_per_axis)
    n = samples[0].points.shape[1] if samples and samples[0].points.size else len(box)
    if centers.shape[1] != n:
        raise ValueError(f"scan box has {centers.shape[1]} axes but the manifold lives in R^{n}")

    logger.info("scanning %d centers (%s per axis), %d quadrature nodes per chart axis",
                len(centers), "x".join(map(str, counts)), params.nodes_per_axis)

    measures = []
    exceptional: List[int] = []
    degenerate: List[int] = []
    failed: List[int] = []
    for idx, a in enumerate(centers):
        try:
            est = measure_from_samples(samples, a, params.tau)
        except (ArithmeticError, FloatingPointError) as exc:
            logger.warning("center %s failed: %s", a.tolist(), exc)
            failed.append(idx)
            measures.append(None)
            continue
        measures.append(est)
        if est.nodes_degenerate:
            degenerate.append(idx)
        if est.fraction > params.delta:
            exceptional.append(idx)

    if len(failed) > MAX_FAILED_FRACTION * len(centers):
        raise NumericalFailure(f"{len(failed)} of {len(centers)} centers failed (limit 1%)")
    if degenerate:
        logger.warning("%d centers coincide with sampled points of the manifold", len(degenerate))
    logger.info("scan finished: %d exceptional centers", len(exceptional))

    return ScanReport(
        box=[[float(lo), float(hi)] for lo, hi in box],
        nodes_per_axis=counts,
        spacing=spacing,
        params=params,
        centers=centers,
        measures=measures,
        exceptional=exceptional,
        degenerate_centers=degenerate,
        failed_centers=failed,
    )


def fit_exceptional_planes(report: ScanReport, d: int, linking_radius: Optional[float] = None) -> ScanReport:
    """Cluster the exceptional centers and fit one (n-d-1)-plane per cluster."""
    n = report.centers.shape[1]
    k = n - d - 1
    if k < 0:
        raise ValueError(f"no exceptional planes exist for d={d} in R^{n}")
    radius = linking_radius if linking_radius is not None else LINKING_FACTOR * max(report.spacing)

    points = report.exceptional_points
    local = cluster_candidates(points, radius)
    report.linking_radius = radius
    report.clusters = [[report.exceptional[i] for i in c] for c in local]
    report.planes, report.fit_residuals, report.spectra = [], [], []
    for members in local:
        fit = fit_affine_plane(points[members], k)
        report.planes.append(fit.plane)
        report.fit_residuals.append(fit.residual)
        report.spectra.append(fit.singular_values)
        logger.info("cluster of %d centers -> %d-plane through %s (residual %.3g)",
                    len(members), k, np.round(fit.plane.base, 6).tolist(), fit.residual)
    return report


def measure_table(report: ScanReport) -> pd.DataFrame:
    """One row per center: coordinates, measure, fraction and the exceptional flag."""
    n = report.centers.shape[1]
    flagged = set(report.exceptional)
    frame = pd.DataFrame(report.centers, columns=[f"a{j + 1}" for j in range(n)])
    frame["measure"] = [m.value if m is not None else np.nan for m in report.measures]
    frame["fraction"] = [m.fraction if m is not None else np.nan for m in report.measures]
    frame["exceptional"] = [i in flagged for i in range(len(report.centers))]
    return frame
