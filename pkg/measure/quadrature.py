# measure/quadrature.py
# Indicator quadrature of the non-transverse set: composite midpoint rule over
# the chart box, weighting each node by the induced volume element.
from __future__ import annotations

import logging
from typing import Iterable, List, Sequence, Union

import numpy as np

from manifold.charts import as_atlas, evaluate_batch, gram_volume, midpoint_grid
from manifold.models import ChartAtlas, Parametrization
from measure.models import ChartSample, MeasureEstimate, NumericalFailure
from tangency.residual import MACHINE_FLOOR, residual_batch

logger = logging.getLogger(__name__)

MIN_NODES_PER_AXIS = 4
MAX_SKIPPED_FRACTION = 0.01

Surface = Union[Parametrization, ChartAtlas]


def sample_chart(phi: Parametrization, nodes_per_axis: int) -> ChartSample:
    if nodes_per_axis < MIN_NODES_PER_AXIS:
        raise ValueError(f"nodes_per_axis must be >= {MIN_NODES_PER_AXIS}, got {nodes_per_axis}")
    X, cell = midpoint_grid(phi.domain, nodes_per_axis)
    points, jacobians, bad = evaluate_batch(phi, X)
    skipped = int(np.count_nonzero(bad))
    if skipped > MAX_SKIPPED_FRACTION * len(X):
        raise NumericalFailure(
            f"chart {phi.label!r}: {skipped} of {len(X)} nodes failed to evaluate (limit 1%)"
        )
    if skipped:
        logger.warning("chart %r: skipping %d of %d nodes that failed to evaluate", phi.label, skipped, len(X))
    ok = ~bad
    return ChartSample(
        points=points[ok],
        jacobians=jacobians[ok],
        weights=gram_volume(jacobians[ok]) * cell,
        nodes_total=len(X),
        nodes_skipped=skipped,
        label=phi.label,
    )


def sample_surface(surface: Surface, nodes_per_axis: int) -> List[ChartSample]:
    return [sample_chart(chart, nodes_per_axis) for chart in as_atlas(surface)]


def nontransverse_mask(sample: ChartSample, a, tau: float) -> np.ndarray:
    """Nodes where |g| <= tau * scale; degenerate nodes (Phi(x) == a) are excluded."""
    g, scale, dist = residual_batch(sample.points, sample.jacobians, a)
    return (np.linalg.norm(g, axis=1) <= tau * scale) & (dist > MACHINE_FLOOR)


def degenerate_count(sample: ChartSample, a) -> int:
    dist = np.linalg.norm(sample.points - np.asarray(a, dtype=float), axis=1)
    return int(np.count_nonzero(dist <= MACHINE_FLOOR))


def estimate_from_masks(
    samples: Sequence[ChartSample],
    masks: Iterable[np.ndarray],
    tau: float,
    degenerate: int = 0,
) -> MeasureEstimate:
    """Sum the weights of the selected nodes, chart by chart in a fixed order."""
    value = 0.0
    total = 0.0
    hit = 0
    for sample, mask in zip(samples, masks):
        value += float(np.sum(sample.weights[mask]))
        total += sample.total
        hit += int(np.count_nonzero(mask))
    return MeasureEstimate(
        value=value,
        total=total,
        fraction=value / total if total > 0 else 0.0,
        nodes_hit=hit,
        nodes_total=sum(s.nodes_total for s in samples),
        tolerance_used=tau,
        nodes_skipped=sum(s.nodes_skipped for s in samples),
        nodes_degenerate=degenerate,
    )


def measure_from_samples(samples: Sequence[ChartSample], a, tau: float = 1e-7) -> MeasureEstimate:
    a = np.asarray(a, dtype=float)
    masks = [nontransverse_mask(s, a, tau) for s in samples]
    degenerate = sum(degenerate_count(s, a) for s in samples)
    return estimate_from_masks(samples, masks, tau, degenerate)


def nontransverse_measure(surface: Surface, a, nodes_per_axis: int = 256, tau: float = 1e-7) -> MeasureEstimate:
    """Induced volume of {x : the sphere about a is not transverse to Sigma at Phi(x)}."""
    return measure_from_samples(sample_surface(surface, nodes_per_axis), a, tau)


def is_exceptional(
    surface: Surface,
    a,
    delta: float = 0.01,
    nodes_per_axis: int = 256,
    tau: float = 1e-7,
) -> bool:
    """a belongs to the exceptional set when the non-transverse fraction exceeds delta."""
    return nontransverse_measure(surface, a, nodes_per_axis, tau).fraction > delta
