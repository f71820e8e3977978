# constructions/checks.py
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from constructions.builders import build
from constructions.models import SINGLE_COMPONENT, ExampleKind, ExampleSpec
from manifold.charts import evaluate, evaluate_batch, jacobian, midpoint_grid
from manifold.models import Box, ChartAtlas
from scan.models import AffinePlane
from tangency.residual import MACHINE_FLOOR

logger = logging.getLogger(__name__)

MERIDIAN_RTOL = 1e-9


def predicted_planes(spec: ExampleSpec, window: Box) -> List[AffinePlane]:
    """
    Exceptional planes of the construction meeting the window: through the
    component centers, spanned by the last n-d-1 coordinate directions.
    """
    if spec.kind is ExampleKind.RANK_DEFICIENT:
        return []
    n, k = spec.n, spec.plane_dimension
    basis = np.eye(n)[:, n - k:] if k else np.zeros((n, 0))
    planes = []
    for i in range(spec.count):
        base = np.zeros(n)
        base[0] = i * spec.spacing
        fixed = range(n - k)
        if all(window[j][0] <= base[j] <= window[j][1] for j in fixed):
            planes.append(AffinePlane(base=base, basis=basis))
    return planes


def _sample_atlas(atlas: ChartAtlas, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    per_chart = max(1, samples // len(atlas))
    clouds = []
    for chart in atlas:
        lo = np.array([b[0] for b in chart.domain])
        hi = np.array([b[1] for b in chart.domain])
        X = lo + (hi - lo) * rng.random((per_chart, chart.d))
        points, _, bad = evaluate_batch(chart, X)
        clouds.append(points[~bad])
    return np.vstack(clouds)


def meridian_check(spec: ExampleSpec, a, samples: int = 1000, seed: int = 0) -> bool:
    """True iff the whole component lies on the sphere about a through its first sample."""
    if spec.kind not in SINGLE_COMPONENT or spec.kind is ExampleKind.RANK_DEFICIENT:
        raise ValueError(f"meridian_check takes a single circle or sphere, got {spec.kind.value}")
    a = np.asarray(a, dtype=float)
    pts = _sample_atlas(build(spec), samples, seed)
    dist = np.linalg.norm(pts - a, axis=1)
    if dist[0] <= MACHINE_FLOOR:
        raise ValueError("center lies on the component")
    return bool(np.all(np.abs(dist - dist[0]) <= MERIDIAN_RTOL * dist[0]))


@dataclass(frozen=True)
class JunctionMismatch:
    chart: int
    end: str            # "lo" or "hi"
    partner: int
    partner_end: str
    position: float
    tangent: float      # unit tangents compared up to orientation


def _endpoints(atlas: ChartAtlas):
    ends = []
    for idx, chart in enumerate(atlas):
        lo, hi = chart.domain[0]
        for name, t in (("lo", lo), ("hi", hi)):
            J = jacobian(chart, [t])[:, 0]
            ends.append((idx, name, evaluate(chart, [t]), J / np.linalg.norm(J)))
    return ends


def junction_mismatches(atlas: ChartAtlas) -> List[JunctionMismatch]:
    """Pairs every curve-chart endpoint with the nearest other endpoint in the atlas."""
    if atlas.d != 1:
        raise ValueError("junction checks apply to curve atlases (d = 1)")
    ends = _endpoints(atlas)
    out = []
    for k, (idx, name, p, t) in enumerate(ends):
        others = [e for j, e in enumerate(ends) if j != k]
        pidx, pname, q, s = min(others, key=lambda e: float(np.linalg.norm(e[2] - p)))
        out.append(JunctionMismatch(
            chart=idx, end=name, partner=pidx, partner_end=pname,
            position=float(np.linalg.norm(q - p)),
            tangent=float(min(np.linalg.norm(t - s), np.linalg.norm(t + s))),
        ))
    return out


def scan_window(spec: ExampleSpec) -> Tuple[Box, List[int]]:
    """
    Center-scan box holding every component, with a node count per axis whose
    grid contains the lattice points of the predicted planes.
    """
    step = 0.1 if spec.n <= 3 else 0.25
    half = spec.spacing / 2
    box = [(-half, (spec.count - 1) * spec.spacing + half)] + [(-half, half)] * (spec.n - 1)
    counts = [int(round((hi - lo) / step)) + 1 for lo, hi in box]
    return tuple(box), counts


def sample_point_cloud(atlas: ChartAtlas, per_chart: int = 256) -> np.ndarray:
    """Points on a regular midpoint grid of every chart, for external plotting."""
    per_axis = max(1, int(math.ceil(per_chart ** (1.0 / atlas.d))))
    clouds = []
    for chart in atlas:
        X, _ = midpoint_grid(chart.domain, per_axis)
        points, _, bad = evaluate_batch(chart, X)
        clouds.append(points[~bad])
    return np.vstack(clouds)
