# tangency/newton.py
from __future__ import annotations

import logging
from dataclasses import replace
from typing import List, Union

import numpy as np

from manifold.charts import as_atlas, in_domain, midpoint_grid
from manifold.models import ChartAtlas, Parametrization
from tangency.residual import CriticalPoint, _point_residual

logger = logging.getLogger(__name__)

DEDUP_RADIUS = 1e-6
MAX_HALVINGS = 30


def _fd_jacobian(phi: Parametrization, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """d x d central-difference Jacobian of the residual g at x."""
    h = 1e-6 * (1.0 + np.linalg.norm(x))
    cols = []
    for j in range(phi.d):
        e = np.zeros(phi.d)
        e[j] = h
        g_plus = _point_residual(phi, a, x + e)[2].g
        g_minus = _point_residual(phi, a, x - e)[2].g
        cols.append((g_plus - g_minus) / (2 * h))
    return np.column_stack(cols)


def newton_refine(
    phi: Parametrization,
    a,
    x0,
    max_iter: int = 50,
    tau_newton: float = 1e-10,
) -> CriticalPoint:
    """
    Damped Newton on g(x) = J(x)^T (Phi(x) - a) from the seed x0.
    Steps are clipped to the domain box and halved until |g| decreases.
    A step that would leave the domain from its boundary, a singular system
    or running out of iterations ends the solve unconverged.
    """
    a = np.asarray(a, dtype=float)
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if not in_domain(phi, x):
        raise ValueError(f"seed {x.tolist()} is outside the chart domain")
    lo = np.array([b[0] for b in phi.domain])
    hi = np.array([b[1] for b in phi.domain])
    p, _, res = _point_residual(phi, a, x)

    def _done(converged: bool) -> CriticalPoint:
        return CriticalPoint(x=x, p=p, residual_norm=res.norm, converged=converged, scale=res.scale)

    for _ in range(max_iter):
        if res.norm <= tau_newton * res.scale:
            return _done(True)
        try:
            step = np.linalg.solve(_fd_jacobian(phi, a, x), -res.g)
        except np.linalg.LinAlgError:
            return _done(False)
        if not np.all(np.isfinite(step)):
            return _done(False)

        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = np.clip(x + t * step, lo, hi)
            if np.array_equal(trial, x):
                # pinned to the boundary: the root lies outside the domain
                return _done(False)
            p_new, _, res_new = _point_residual(phi, a, trial)
            if res_new.norm < res.norm:
                x, p, res = trial, p_new, res_new
                break
            t *= 0.5
        else:
            return _done(False)

    return _done(res.norm <= tau_newton * res.scale)


def _dedup(points: List[CriticalPoint]) -> List[CriticalPoint]:
    # best residual first so ties keep the more accurate point
    ordered = sorted(points, key=lambda c: (c.residual_norm, tuple(c.x)))
    kept: List[CriticalPoint] = []
    for cp in ordered:
        duplicate = any(
            np.linalg.norm(cp.x - k.x) <= DEDUP_RADIUS or np.linalg.norm(cp.p - k.p) <= DEDUP_RADIUS
            for k in kept
        )
        if not duplicate:
            kept.append(cp)
    return sorted(kept, key=lambda c: tuple(c.x))


def find_critical_points(
    phi: Parametrization,
    a,
    grid_per_axis: int = 16,
    tau_newton: float = 1e-10,
    max_iter: int = 50,
) -> List[CriticalPoint]:
    """Converged critical points of |Phi(x) - a| seeded from the cell midpoints of the domain."""
    if grid_per_axis < 2:
        raise ValueError("grid_per_axis must be >= 2")
    seeds, _ = midpoint_grid(phi.domain, grid_per_axis)
    found = []
    for seed in seeds:
        try:
            cp = newton_refine(phi, a, seed, max_iter=max_iter, tau_newton=tau_newton)
        except ArithmeticError as exc:
            logger.debug("seed %s abandoned: %s", seed, exc)
            continue
        logger.debug("seed %s -> x=%s converged=%s |g|=%.3e", seed, cp.x, cp.converged, cp.residual_norm)
        if cp.converged:
            found.append(cp)
    return _dedup(found)


def find_critical_points_atlas(
    surface: Union[Parametrization, ChartAtlas],
    a,
    grid_per_axis: int = 16,
    tau_newton: float = 1e-10,
) -> List[CriticalPoint]:
    """Critical points over every chart, merged where charts share image points."""
    found: List[CriticalPoint] = []
    for idx, chart in enumerate(as_atlas(surface)):
        found.extend(replace(cp, chart=idx) for cp in find_critical_points(chart, a, grid_per_axis, tau_newton))
    ordered = sorted(found, key=lambda c: (c.residual_norm, tuple(c.p)))
    kept: List[CriticalPoint] = []
    for cp in ordered:
        if all(np.linalg.norm(cp.p - k.p) > DEDUP_RADIUS for k in kept):
            kept.append(cp)
    return sorted(kept, key=lambda c: tuple(c.p))


def looks_like_continuum(points: List[CriticalPoint], seed_count: int) -> bool:
    """Nearly every seed converged to its own point: the critical set is not isolated."""
    return seed_count > 0 and len(points) >= 0.9 * seed_count
