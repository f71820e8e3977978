# tangency/residual.py
# The sphere dB(a, |a - p|) fails to be transverse to Sigma at p = Phi(x)
# exactly when p - a is normal to T_p Sigma, i.e. when
#     g(a, x) = J(x)^T (Phi(x) - a) = 0,
# the gradient of x -> |Phi(x) - a|^2 / 2.
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import null_space

from manifold.charts import _values_and_jacobian, in_domain
from manifold.models import OutOfDomainError, Parametrization

MACHINE_FLOOR = 1e-14
RANK_THRESHOLD = 1e-8


class DegenerateSphereError(ValueError):
    pass


@dataclass(frozen=True)
class TangencyResidual:
    g: np.ndarray       # d-vector, g_j = <Phi(x) - a, dPhi/dx_j>
    scale: float        # |Phi(x) - a| * max_j |dPhi/dx_j| + floor

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.g))


@dataclass(frozen=True)
class CriticalPoint:
    x: np.ndarray
    p: np.ndarray
    residual_norm: float
    converged: bool
    scale: float = 1.0
    chart: int = 0           # index within the atlas


def residual_from(p: np.ndarray, J: np.ndarray, a: np.ndarray) -> TangencyResidual:
    diff = p - a
    g = J.T @ diff
    col = np.linalg.norm(J, axis=0)
    scale = float(np.linalg.norm(diff) * (col.max() if col.size else 0.0) + MACHINE_FLOOR)
    return TangencyResidual(g=g, scale=scale)


def residual_batch(points: np.ndarray, jacobians: np.ndarray, a) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised residual over m nodes.
    Returns g (m x d), scale (m,) and |Phi(x) - a| (m,).
    """
    diff = points - np.asarray(a, dtype=float)
    g = np.einsum("mnd,mn->md", jacobians, diff)
    dist = np.linalg.norm(diff, axis=1)
    colmax = np.linalg.norm(jacobians, axis=1).max(axis=1)
    return g, dist * colmax + MACHINE_FLOOR, dist


def _point_residual(phi: Parametrization, a: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, TangencyResidual]:
    p, J = _values_and_jacobian(phi, x)
    return p, J, residual_from(p, J, a)


def residual(phi: Parametrization, a, x) -> TangencyResidual:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not in_domain(phi, x):
        raise OutOfDomainError(f"point {x.tolist()} is outside the chart domain")
    return _point_residual(phi, np.asarray(a, dtype=float), x)[2]


def _nondegenerate(p: np.ndarray, a: np.ndarray) -> np.ndarray:
    diff = p - a
    if np.linalg.norm(diff) <= MACHINE_FLOOR:
        raise DegenerateSphereError(f"center {a.tolist()} coincides with Phi(x) = {p.tolist()}")
    return diff


def is_sphere_transverse(phi: Parametrization, a, x, tau: float = 1e-7) -> bool:
    a = np.asarray(a, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not in_domain(phi, x):
        raise OutOfDomainError(f"point {x.tolist()} is outside the chart domain")
    p, _, res = _point_residual(phi, a, x)
    _nondegenerate(p, a)
    return res.norm > tau * res.scale


def rank_oracle(phi: Parametrization, a, x, threshold: float = RANK_THRESHOLD) -> bool:
    """
    Transversality from the definition: T_p Sigma + T_p(sphere) = R^n.
    The sphere's tangent space is (p - a)^perp; transverse iff [J | B] has rank n.
    Tangent columns are normalised so the threshold does not depend on the chart speed.
    """
    a = np.asarray(a, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p, J = _values_and_jacobian(phi, x)
    diff = _nondegenerate(p, a)
    B = null_space(diff[None, :])          # n x (n-1), orthonormal
    col = np.linalg.norm(J, axis=0)
    T = J / np.where(col > 0, col, 1.0)
    sv = np.linalg.svd(np.hstack([T, B]), compute_uv=False)
    rank = int(np.count_nonzero(sv > threshold * sv[0]))
    return rank == phi.n
