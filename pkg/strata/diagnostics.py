# strata/diagnostics.py
# Finite-instance views of the stratification: the parameter sets E(a, P),
# the empty-low-strata check, overlaps between strata samples, and a
# tangent-span witness for exceptional centers.
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from manifold.models import Box
from measure.models import ChartSample, MeasureEstimate
from measure.quadrature import (
    Surface,
    degenerate_count,
    estimate_from_masks,
    nontransverse_mask,
    sample_surface,
)
from strata.grassmann import GrassmannPlane, Seed, _rng, random_grassmann

logger = logging.getLogger(__name__)

SPAN_RANK_THRESHOLD = 1e-8


@dataclass(frozen=True)
class StratumSample:
    a: np.ndarray
    plane: GrassmannPlane
    E_measure: MeasureEstimate

    @property
    def i(self) -> int:
        return self.plane.i

    def to_dict(self) -> Dict[str, Any]:
        return {"a": np.asarray(self.a).tolist(), "plane": self.plane.to_dict(), "E_measure": self.E_measure.to_dict()}


def span_mask(sample: ChartSample, P: GrassmannPlane, tau: float) -> np.ndarray:
    """Nodes whose tangent columns lie in P: |(I - F F^T) J|_F <= tau |J|_F."""
    F = P.frame
    J = sample.jacobians
    defect = J - np.einsum("ni,mid->mnd", F, np.einsum("ni,mnd->mid", F, J))
    return np.linalg.norm(defect, axis=(1, 2)) <= tau * np.linalg.norm(J, axis=(1, 2))


def E_masks(samples: Sequence[ChartSample], a, P: GrassmannPlane, tau: float) -> List[np.ndarray]:
    masks = []
    for s in samples:
        mask = nontransverse_mask(s, a, tau)
        if P.i < P.n:
            mask &= span_mask(s, P, tau)
        masks.append(mask)
    return masks


def E_from_samples(samples: Sequence[ChartSample], a, P: GrassmannPlane, tau: float = 1e-7) -> MeasureEstimate:
    a = np.asarray(a, dtype=float)
    degenerate = sum(degenerate_count(s, a) for s in samples)
    return estimate_from_masks(samples, E_masks(samples, a, P, tau), tau, degenerate)


def exceptional_param_set(
    phi: Surface,
    a,
    P: GrassmannPlane,
    nodes_per_axis: int = 256,
    tau: float = 1e-7,
) -> MeasureEstimate:
    """
    Indicator-quadrature measure of E(a, P): nodes where the tangent space lies
    in P and the sphere about a is tangent. With i = n the span test is vacuous
    and the result is the plain non-transverse measure.
    """
    return E_from_samples(sample_surface(phi, nodes_per_axis), a, P, tau)


@dataclass
class Claim1Report:
    d: int
    n: int
    trials: int
    box: List[List[float]]
    checked: Dict[int, int] = field(default_factory=dict)
    violations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "n": self.n,
            "trials": self.trials,
            "box": self.box,
            "checked": {str(k): v for k, v in self.checked.items()},
            "violations": self.violations,
            "passed": self.passed,
        }


def _padded_bounding_box(samples: Sequence[ChartSample], pad: float = 1.0) -> List[List[float]]:
    pts = np.vstack([s.points for s in samples])
    return [[float(lo - pad), float(hi + pad)] for lo, hi in zip(pts.min(axis=0), pts.max(axis=0))]


def claim1_diagnostic(
    phi: Surface,
    trials: int = 100,
    seed: Seed = 0,
    nodes_per_axis: int = 64,
    tau: float = 1e-7,
    box: Optional[Box] = None,
) -> Claim1Report:
    """
    For every plane dimension i <= d, random (a, P) pairs must give an E(a, P)
    with no hit nodes. Violations are recorded, never raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    samples = sample_surface(phi, nodes_per_axis)
    d = samples[0].jacobians.shape[2]
    n = samples[0].points.shape[1]
    window = [[float(lo), float(hi)] for lo, hi in box] if box is not None else _padded_bounding_box(samples)
    lo = np.array([b[0] for b in window])
    hi = np.array([b[1] for b in window])
    rng = _rng(seed)

    report = Claim1Report(d=d, n=n, trials=trials, box=window)
    for i in range(1, d + 1):
        for t in range(trials):
            a = lo + (hi - lo) * rng.random(n)
            P = random_grassmann(n, i, rng)
            est = E_from_samples(samples, a, P, tau)
            if est.nodes_hit:
                report.violations.append({
                    "i": i, "trial": t, "a": a.tolist(), "frame": P.frame.T.tolist(),
                    "nodes_hit": est.nodes_hit, "value": est.value,
                })
        report.checked[i] = trials
        logger.info("claim-1 check i=%d: %d trials", i, trials)

    if report.violations:
        logger.warning("claim-1 check found %d violating (a, P) pairs", len(report.violations))
    return report


def pairwise_E_overlap(
    phi: Surface,
    first: StratumSample,
    second: StratumSample,
    nodes_per_axis: int = 256,
    tau: float = 1e-7,
) -> MeasureEstimate:
    samples = sample_surface(phi, nodes_per_axis)
    masks_1 = E_masks(samples, first.a, first.plane, tau)
    masks_2 = E_masks(samples, second.a, second.plane, tau)
    return estimate_from_masks(samples, [m1 & m2 for m1, m2 in zip(masks_1, masks_2)], tau)


def tangent_witness(
    phi: Surface,
    a,
    nodes_per_axis: int = 256,
    tau: float = 1e-7,
) -> Optional[StratumSample]:
    """
    P = span of the tangent vectors at the non-transverse nodes. E(a, P) is then
    the whole non-transverse set; i = dim P bounds the stratum index of a.
    Returns None when no node is non-transverse.
    """
    a = np.asarray(a, dtype=float)
    samples = sample_surface(phi, nodes_per_axis)
    columns = []
    for s in samples:
        mask = nontransverse_mask(s, a, tau)
        if np.any(mask):
            J = s.jacobians[mask]                               # m x n x d
            columns.append(np.swapaxes(J, 1, 2).reshape(-1, J.shape[1]))
    if not columns:
        return None
    T = np.vstack(columns).T                                    # n x (m d)
    U, sv, _ = np.linalg.svd(T, full_matrices=False)
    if sv[0] == 0.0:
        return None
    rank = int(np.count_nonzero(sv > SPAN_RANK_THRESHOLD * sv[0]))
    P = GrassmannPlane(frame=U[:, :rank])
    return StratumSample(a=a, plane=P, E_measure=E_from_samples(samples, a, P, tau))
