# strata/grassmann.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from utils.retry import with_retry

ORTHONORMAL_TOL = 1e-10
MAX_DRAWS = 10

Seed = Union[int, np.random.Generator]


class RankDeficientDraw(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class GrassmannPlane:
    """An i-dimensional linear subspace P of R^n, held as an orthonormal frame."""
    frame: np.ndarray   # n x i

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=float)
        if frame.ndim != 2 or not 1 <= frame.shape[1] <= frame.shape[0]:
            raise ValueError(f"frame must be n x i with 1 <= i <= n, got shape {frame.shape}")
        if not np.allclose(frame.T @ frame, np.eye(frame.shape[1]), rtol=0.0, atol=ORTHONORMAL_TOL):
            raise ValueError("frame columns are not orthonormal")
        object.__setattr__(self, "frame", frame)

    @property
    def i(self) -> int:
        return self.frame.shape[1]

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.T

    @classmethod
    def span(cls, vectors) -> "GrassmannPlane":
        """Orthonormal frame of the column span of `vectors` (n x k, full column rank)."""
        A = np.atleast_2d(np.asarray(vectors, dtype=float))
        q, r = np.linalg.qr(A)
        if np.min(np.abs(np.diag(r))) <= 1e-12 * max(1.0, np.abs(r).max()):
            raise RankDeficientDraw("spanning vectors are linearly dependent")
        return cls(frame=q)

    def to_dict(self):
        return {"i": self.i, "frame": self.frame.T.tolist()}


def _rng(seed: Seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_grassmann(n: int, i: int, seed: Seed = 0) -> GrassmannPlane:
    """
    Rotation-invariant random i-plane: QR of an n x i standard normal matrix,
    signs fixed so that R has a positive diagonal.
    """
    if not 1 <= i <= n:
        raise ValueError(f"plane dimension must satisfy 1 <= i <= n, got i={i}, n={n}")
    rng = _rng(seed)

    @with_retry(max_retries=MAX_DRAWS, retry_on=(RankDeficientDraw,))
    def draw() -> GrassmannPlane:
        A = rng.standard_normal((n, i))
        q, r = np.linalg.qr(A)
        diag = np.diag(r)
        if np.min(np.abs(diag)) <= 1e-12 * np.abs(r).max():
            raise RankDeficientDraw(f"Gaussian {n}x{i} draw is rank deficient")
        return GrassmannPlane(frame=q * np.sign(diag))

    return draw()
