# strata/normal_planes.py
# N(a, P): the affine (n - i)-plane through a orthogonal to the i-plane P.
# Two such planes for the same P either coincide (a - a_hat is perpendicular
# to P) or are disjoint parallel translates.
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List

import numpy as np
from scipy.linalg import null_space

from scan.models import AffinePlane
from strata.grassmann import GrassmannPlane, Seed, _rng, random_grassmann

logger = logging.getLogger(__name__)

PERPENDICULAR_TOL = 1e-10


class NormalPlaneIntersection(str, Enum):
    EQUAL = "equal"
    EMPTY = "empty"


def normal_affine_plane(a, P: GrassmannPlane) -> AffinePlane:
    a = np.asarray(a, dtype=float)
    if a.shape != (P.n,):
        raise ValueError(f"center must be a {P.n}-vector, got shape {a.shape}")
    basis = null_space(P.frame.T) if P.i < P.n else np.zeros((P.n, 0))
    return AffinePlane(base=a, basis=basis)


def intersect_normal_planes(a, a_hat, P: GrassmannPlane) -> NormalPlaneIntersection:
    a = np.asarray(a, dtype=float)
    a_hat = np.asarray(a_hat, dtype=float)
    diff = a - a_hat
    gap = float(np.linalg.norm(diff))
    if gap == 0.0:
        raise ValueError("intersect_normal_planes needs two distinct centers")
    if np.linalg.norm(P.frame.T @ diff) <= PERPENDICULAR_TOL * gap:
        return NormalPlaneIntersection.EQUAL
    return NormalPlaneIntersection.EMPTY


@dataclass
class DichotomyReport:
    n: int
    instances: int
    reframed: int
    misclassified: List[Dict[str, Any]] = field(default_factory=list)
    asymmetric: int = 0
    frame_dependent: int = 0

    @property
    def accuracy(self) -> float:
        return 1.0 - len(self.misclassified) / self.instances if self.instances else 1.0

    @property
    def passed(self) -> bool:
        return not self.misclassified and not self.asymmetric and not self.frame_dependent

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "instances": self.instances,
            "reframed": self.reframed,
            "accuracy": self.accuracy,
            "misclassified": self.misclassified[:10],
            "asymmetric": self.asymmetric,
            "frame_dependent": self.frame_dependent,
            "passed": self.passed,
        }


def _random_rotation(i: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((i, i)))
    return q * np.sign(np.diag(r))


def dichotomy_battery(n: int, instances: int = 10_000, seed: Seed = 0, reframe: int = 1000) -> DichotomyReport:
    """
    Randomised check of the coincide-or-disjoint rule.
    Even instances move a_hat off a perpendicular to P (expect EQUAL), odd ones
    add a component inside P (expect EMPTY). The first `reframe` instances are
    re-decided with a rotated frame of the same subspace and with a, a_hat swapped.
    """
    if n < 2:
        raise ValueError("the dichotomy needs n >= 2 (a proper plane P and a nonzero complement)")
    rng = _rng(seed)
    report = DichotomyReport(n=n, instances=instances, reframed=min(reframe, instances))

    for k in range(instances):
        i = int(rng.integers(1, n))          # 1 <= i <= n - 1
        P = random_grassmann(n, i, rng)
        F = P.frame
        a = rng.uniform(-1.0, 1.0, size=n)
        w = rng.standard_normal(n)
        perp = w - F @ (F.T @ w)
        perpendicular = k % 2 == 0
        if perpendicular:
            a_hat = a + perp
            expected = NormalPlaneIntersection.EQUAL
        else:
            a_hat = a + F @ rng.standard_normal(i) + 0.5 * perp
            expected = NormalPlaneIntersection.EMPTY

        got = intersect_normal_planes(a, a_hat, P)
        if got is not expected:
            report.misclassified.append({"index": k, "i": i, "expected": expected.value, "got": got.value})

        if k < report.reframed:
            if intersect_normal_planes(a_hat, a, P) is not got:
                report.asymmetric += 1
            other = GrassmannPlane(frame=F @ _random_rotation(i, rng))
            if intersect_normal_planes(a, a_hat, other) is not got:
                report.frame_dependent += 1

    logger.info("dichotomy battery n=%d: %d instances, accuracy %.4f", n, instances, report.accuracy)
    return report
