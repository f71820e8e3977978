# manifold/charts.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from expr.dual import eval_dual, eval_dual_batch
from expr.models import BinOp, Expression, Neg, Num
from manifold.models import Box, ChartAtlas, OutOfDomainError, Parametrization

logger = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-8


def as_atlas(surface: Union[Parametrization, ChartAtlas]) -> ChartAtlas:
    if isinstance(surface, ChartAtlas):
        return surface
    return ChartAtlas((surface,))


def _in_box(box: Box, x: np.ndarray) -> bool:
    for (lo, hi), xi in zip(box, x):
        slack = 1e-12 * (hi - lo)
        if not (lo - slack <= xi <= hi + slack):
            return False
    return True


def in_domain(phi: Parametrization, x) -> bool:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return x.shape == (phi.d,) and _in_box(phi.domain, x)


def evaluate(phi: Parametrization, x) -> np.ndarray:
    """p = Phi(x) for a point x of the (closed) domain box."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not in_domain(phi, x):
        raise OutOfDomainError(f"point {x.tolist()} is outside the chart domain {list(phi.domain)}")
    return np.array([float(eval_dual(c, x).value) for c in phi.components])


def _values_and_jacobian(phi: Parametrization, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # no domain check: Newton's finite differences probe just past the box
    duals = [eval_dual(c, x) for c in phi.components]
    p = np.array([float(dv.value) for dv in duals])
    J = np.vstack([dv.partials for dv in duals])
    return p, J


def jacobian(phi: Parametrization, x) -> np.ndarray:
    """n x d matrix whose column j is dPhi/dx_j at x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not in_domain(phi, x):
        raise OutOfDomainError(f"point {x.tolist()} is outside the chart domain {list(phi.domain)}")
    return _values_and_jacobian(phi, x)[1]


def gram_volume(J: np.ndarray) -> np.ndarray:
    """sqrt(det(J^T J)) for a single n x d matrix or a stack of them."""
    JtJ = np.swapaxes(J, -1, -2) @ J
    return np.sqrt(np.clip(np.linalg.det(JtJ), 0.0, None))


def volume_element(phi: Parametrization, x) -> float:
    return float(gram_volume(jacobian(phi, x)))


def evaluate_batch(phi: Parametrization, X) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Phi and its Jacobian at every row of X (m x d).
    Returns points (m x n), jacobians (m x n x d) and the mask of failed rows.
    """
    X = np.asarray(X, dtype=float)
    m = X.shape[0]
    points = np.empty((m, phi.n))
    jacobians = np.empty((m, phi.n, phi.d))
    invalid = np.zeros(m, dtype=bool)
    for k, comp in enumerate(phi.components):
        dv, bad = eval_dual_batch(comp, X)
        points[:, k] = dv.value
        jacobians[:, k, :] = dv.partials
        invalid |= bad
    return points, jacobians, invalid


def midpoint_grid(domain: Box, nodes_per_axis: int) -> Tuple[np.ndarray, float]:
    """Cell midpoints of a regular grid over the box, in lexicographic order."""
    axes = []
    cell = 1.0
    for lo, hi in domain:
        h = (hi - lo) / nodes_per_axis
        axes.append(lo + h * (np.arange(nodes_per_axis) + 0.5))
        cell *= h
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=-1)
    return X, cell


def atlas_volume(atlas: ChartAtlas, nodes_per_axis: int) -> float:
    """Induced H^d measure of the atlas by the composite midpoint rule."""
    total = 0.0
    for chart in atlas:
        X, cell = midpoint_grid(chart.domain, nodes_per_axis)
        _, J, bad = evaluate_batch(chart, X)
        total += float(np.sum(gram_volume(J[~bad]))) * cell
    return total


@dataclass
class ImmersionReport:
    samples: int
    min_ratio: float                       # min over samples of sigma_min / sigma_max
    deficient_points: List[List[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.deficient_points


def check_immersion(phi: Parametrization, samples: int = 1000, seed: int = 0) -> ImmersionReport:
    """Rank check of the Jacobian at random interior points (threshold 1e-8 * sigma_max)."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in phi.domain])
    hi = np.array([b[1] for b in phi.domain])
    X = lo + (hi - lo) * rng.uniform(0.02, 0.98, size=(samples, phi.d))
    _, J, bad = evaluate_batch(phi, X)
    sv = np.linalg.svd(J[~bad], compute_uv=False)
    smax = sv[:, 0]
    ratio = np.where(smax > 0, sv[:, -1] / np.where(smax > 0, smax, 1.0), 0.0)
    deficient = X[~bad][ratio < RANK_THRESHOLD]
    report = ImmersionReport(
        samples=int(np.count_nonzero(~bad)),
        min_ratio=float(ratio.min()) if ratio.size else 0.0,
        deficient_points=deficient.tolist(),
    )
    if not report.passed:
        logger.warning(
            "chart %r is not an immersion at %d of %d sampled points",
            phi.label, len(report.deficient_points), report.samples,
        )
    return report


# ---------- Charts under ambient affine maps ----------

def literal(v: float) -> Expression:
    """Literal node that prints and re-parses to an equal tree (negatives become Neg)."""
    v = float(v)
    return Neg(Num(-v)) if v < 0 else Num(v)


def _scaled_term(coef: float, e: Expression) -> Expression:
    if coef == 1.0:
        return e
    if coef == -1.0:
        return Neg(e)
    return BinOp("*", literal(coef), e)


def affine_image(
    phi: Parametrization,
    matrix,
    offset=None,
    label: str = "",
) -> Parametrization:
    """The chart x -> matrix @ Phi(x) + offset, built as expression trees."""
    M = np.atleast_2d(np.asarray(matrix, dtype=float))
    if M.shape[1] != phi.n:
        raise ValueError(f"matrix has {M.shape[1]} columns; the chart has n={phi.n}")
    b = np.zeros(M.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    comps: List[Expression] = []
    for row, shift in zip(M, b):
        acc: Expression = None
        for coef, comp in zip(row, phi.components):
            if coef == 0.0:
                continue
            term = _scaled_term(float(coef), comp)
            acc = term if acc is None else BinOp("+", acc, term)
        if acc is None:
            acc = literal(shift)
        elif shift != 0.0:
            acc = BinOp("+", acc, literal(shift))
        comps.append(acc)
    return Parametrization(
        d=phi.d, n=M.shape[0], components=tuple(comps), domain=phi.domain,
        label=label or phi.label,
    )


def translate(phi: Parametrization, v: Sequence[float], label: str = "") -> Parametrization:
    return affine_image(phi, np.eye(phi.n), v, label=label)
