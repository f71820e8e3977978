# manifold/models.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

from expr.models import Expression, max_variable_index
from expr.parser import parse, print_expression


class ManifoldError(ValueError):
    pass


class OutOfDomainError(ManifoldError):
    pass


Box = Tuple[Tuple[float, float], ...]


def _check_box(box: Box, what: str) -> None:
    for k, (lo, hi) in enumerate(box):
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise ManifoldError(f"{what} axis {k + 1} must satisfy finite lo < hi, got [{lo}, {hi}]")


# A chart x -> Phi(x) over an axis-aligned box in R^d
@dataclass(frozen=True)
class Parametrization:
    d: int
    n: int
    components: Tuple[Expression, ...]   # n expressions in x1..xd
    domain: Box                          # d (lo, hi) pairs
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ManifoldError(
                "intrinsic dimension must be >= 1; a 0-dimensional set is non-transverse "
                "to every sphere, so its exceptional set is all of R^n"
            )
        if self.n < self.d + 1:
            raise ManifoldError(f"ambient dimension n={self.n} must be at least d+1={self.d + 1}")
        if len(self.components) != self.n:
            raise ManifoldError(f"expected {self.n} component expressions, got {len(self.components)}")
        if len(self.domain) != self.d:
            raise ManifoldError(f"expected a {self.d}-dimensional domain box, got {len(self.domain)} axes")
        _check_box(self.domain, "domain")
        for j, comp in enumerate(self.components):
            used = max_variable_index(comp)
            if used > self.d:
                raise ManifoldError(f"component {j + 1} references x{used} but d={self.d}")

    @classmethod
    def from_text(
        cls,
        components: Sequence[str],
        domain: Sequence[Tuple[float, float]],
        label: str = "",
    ) -> "Parametrization":
        d = len(domain)
        exprs = tuple(parse(text, d) for text in components)
        box = tuple((float(lo), float(hi)) for lo, hi in domain)
        return cls(d=d, n=len(exprs), components=exprs, domain=box, label=label)

    def component_texts(self) -> Tuple[str, ...]:
        return tuple(print_expression(c) for c in self.components)


@dataclass(frozen=True)
class ChartAtlas:
    charts: Tuple[Parametrization, ...]

    def __post_init__(self):
        if not self.charts:
            raise ManifoldError("an atlas needs at least one chart")
        d, n = self.charts[0].d, self.charts[0].n
        for k, chart in enumerate(self.charts):
            if (chart.d, chart.n) != (d, n):
                raise ManifoldError(
                    f"chart {k + 1} has (d, n)=({chart.d}, {chart.n}); the atlas uses ({d}, {n})"
                )

    @property
    def d(self) -> int:
        return self.charts[0].d

    @property
    def n(self) -> int:
        return self.charts[0].n

    def __len__(self) -> int:
        return len(self.charts)

    def __iter__(self):
        return iter(self.charts)
