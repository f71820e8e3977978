# constructions/models.py
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional

MAX_NECK_EPS = 0.01
CIRCLE_RADIUS = 0.25


class InvalidExampleSpec(ValueError):
    pass


class ExampleKind(str, Enum):
    SIGMA0 = "sigma0"                  # disjoint circles along the first axis
    SIGMA1 = "sigma1"                  # sigma0 with both circles cut open near theta = 0 and pi
    SIGMA2 = "sigma2"                  # circles joined by straight necks, corners blended
    SPHERE_CHAIN = "sphere-chain"      # disjoint round d-spheres along the first axis
    SINGLE_CIRCLE = "single-circle"
    SINGLE_SPHERE = "single-sphere"
    RANK_DEFICIENT = "rank-deficient"  # constant chart, fails the immersion hypothesis

    @property
    def is_curve(self) -> bool:
        return self in (ExampleKind.SIGMA0, ExampleKind.SIGMA1, ExampleKind.SIGMA2, ExampleKind.SINGLE_CIRCLE)


SINGLE_COMPONENT = (ExampleKind.SINGLE_CIRCLE, ExampleKind.SINGLE_SPHERE, ExampleKind.RANK_DEFICIENT)


@dataclass(frozen=True)
class ExampleSpec:
    """
    Parameters of a shipped construction. Unset fields take the kind's defaults:
    curves live in R^3 with radius 1/4, spheres default to S^2 in R^4, and the
    sphere chain uses radius 4^-n. Chains default to two components placed at
    (i * spacing, 0, ..., 0).
    """
    kind: ExampleKind
    n: Optional[int] = None
    d: Optional[int] = None
    count: Optional[int] = None
    eps: float = MAX_NECK_EPS
    scale: Optional[float] = None
    spacing: float = 1.0

    def __post_init__(self):
        try:
            kind = ExampleKind(self.kind)
        except ValueError:
            raise InvalidExampleSpec(f"unknown example kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)

        if self.d is None:
            object.__setattr__(self, "d", 1 if kind.is_curve or kind is ExampleKind.RANK_DEFICIENT else 2)
        if self.n is None:
            object.__setattr__(self, "n", 3 if kind.is_curve or kind is ExampleKind.RANK_DEFICIENT else self.d + 2)
        if self.count is None:
            object.__setattr__(self, "count", 1 if kind in SINGLE_COMPONENT else 2)
        if self.scale is None:
            default = 4.0 ** -self.n if kind is ExampleKind.SPHERE_CHAIN else CIRCLE_RADIUS
            object.__setattr__(self, "scale", default)
        self._validate()

    def _validate(self) -> None:
        kind = self.kind
        if self.count < 1:
            raise InvalidExampleSpec(f"count must be >= 1, got {self.count}")
        if self.d < 1:
            raise InvalidExampleSpec(f"d must be >= 1, got {self.d}")
        if self.n < self.d + 1:
            raise InvalidExampleSpec(f"n={self.n} must be at least d+1={self.d + 1}")
        if kind.is_curve and self.d != 1:
            raise InvalidExampleSpec(f"{kind.value} is a curve: d must be 1, got {self.d}")
        if kind in SINGLE_COMPONENT and self.count != 1:
            raise InvalidExampleSpec(f"{kind.value} has exactly one component, got count={self.count}")
        if not self.scale > 0:
            raise InvalidExampleSpec(f"scale must be positive, got {self.scale}")
        if not self.spacing > 0:
            raise InvalidExampleSpec(f"spacing must be positive, got {self.spacing}")
        if self.count > 1 and not self.scale < self.spacing / 2:
            raise InvalidExampleSpec(
                f"components of radius {self.scale} overlap at spacing {self.spacing}"
            )
        if kind in (ExampleKind.SIGMA1, ExampleKind.SIGMA2) and not 0 < self.eps <= MAX_NECK_EPS:
            raise InvalidExampleSpec(f"{kind.value} needs 0 < eps <= {MAX_NECK_EPS}, got {self.eps}")

    @property
    def plane_dimension(self) -> int:
        return self.n - self.d - 1

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data
