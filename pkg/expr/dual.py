# expr/dual.py
# Forward-mode differentiation with dual numbers. A DualValue carries a value
# and its gradient with respect to x1..xd; both may be batched over points.
from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

from expr.models import (
    CONSTANTS,
    BinOp,
    Call,
    Const,
    Expression,
    ExpressionDomainError,
    ExpressionError,
    Neg,
    Num,
    Pow,
    Var,
)
from expr.parser import print_expression


class DualValue:
    """
    value:    array of shape batch (a 0-d array for a single point)
    partials: array of shape batch + (d,)
    """

    __slots__ = ("value", "partials")

    def __init__(self, value, partials):
        self.value = np.asarray(value, dtype=float)
        self.partials = np.asarray(partials, dtype=float)

    @classmethod
    def constant(cls, c: float, batch: Tuple[int, ...], d: int) -> "DualValue":
        return cls(np.full(batch, c), np.zeros(batch + (d,)))

    @classmethod
    def variable(cls, x: np.ndarray, index: int) -> "DualValue":
        # x has shape batch + (d,); index is 0-based
        partials = np.zeros(x.shape)
        partials[..., index] = 1.0
        return cls(x[..., index], partials)

    def __repr__(self) -> str:
        return f"DualValue(value={self.value}, partials={self.partials})"

    def _scaled(self, factor) -> np.ndarray:
        return np.asarray(factor)[..., None] * self.partials

    def __add__(self, other: "DualValue") -> "DualValue":
        return DualValue(self.value + other.value, self.partials + other.partials)

    def __sub__(self, other: "DualValue") -> "DualValue":
        return DualValue(self.value - other.value, self.partials - other.partials)

    def __neg__(self) -> "DualValue":
        return DualValue(-self.value, -self.partials)

    def __mul__(self, other: "DualValue") -> "DualValue":
        return DualValue(
            self.value * other.value,
            self._scaled(other.value) + other._scaled(self.value),
        )

    def __truediv__(self, other: "DualValue") -> "DualValue":
        q = self.value / other.value
        return DualValue(q, (self.partials - other._scaled(q)) / np.asarray(other.value)[..., None])

    def __pow__(self, k: int) -> "DualValue":
        if k == 0:
            return DualValue(np.ones_like(self.value), np.zeros_like(self.partials))
        return DualValue(self.value ** k, self._scaled(k * self.value ** (k - 1)))

    def apply(self, f: Callable, df: Callable) -> "DualValue":
        """Chain rule for a scalar function f with derivative df."""
        return DualValue(f(self.value), self._scaled(df(self.value)))


_FUNCS = {
    "sin": (np.sin, np.cos),
    "cos": (np.cos, lambda v: -np.sin(v)),
    "exp": (np.exp, np.exp),
    "sqrt": (np.sqrt, lambda v: 0.5 / np.sqrt(v)),
}


class _Evaluator:
    """
    Walks the tree once. In strict mode the first domain violation raises;
    otherwise offending points are collected in `invalid` and the arithmetic
    continues with numpy's IEEE semantics.
    """

    def __init__(self, x: np.ndarray, strict: bool):
        self.x = x
        self.batch = x.shape[:-1]
        self.d = x.shape[-1]
        self.strict = strict
        self.invalid = np.zeros(self.batch, dtype=bool)

    def _flag(self, bad: np.ndarray, message: str, node: Expression) -> None:
        if not np.any(bad):
            return
        if self.strict:
            raise ExpressionDomainError(message, print_expression(node), node.pos)
        self.invalid |= bad

    def visit(self, e: Expression) -> DualValue:
        if isinstance(e, Num):
            return DualValue.constant(e.value, self.batch, self.d)
        if isinstance(e, Const):
            return DualValue.constant(CONSTANTS[e.name], self.batch, self.d)
        if isinstance(e, Var):
            if e.index > self.d:
                raise ExpressionError(f"variable x{e.index} used with a {self.d}-dimensional point")
            return DualValue.variable(self.x, e.index - 1)
        if isinstance(e, Neg):
            return -self.visit(e.operand)
        if isinstance(e, Pow):
            base = self.visit(e.base)
            if e.exponent < 0:
                self._flag(base.value == 0, "division by zero", e)
            return base ** e.exponent
        if isinstance(e, Call):
            arg = self.visit(e.arg)
            if e.func == "sqrt":
                self._flag(arg.value < 0, "sqrt of negative", e)
                self._flag(arg.value == 0, "sqrt is not differentiable at zero", e)
            f, df = _FUNCS[e.func]
            out = arg.apply(f, df)
            self._flag(~np.isfinite(out.value), "non-finite value", e)
            return out
        left = self.visit(e.left)
        right = self.visit(e.right)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        self._flag(right.value == 0, "division by zero", e)
        return left / right


def eval_dual(e: Expression, x) -> DualValue:
    """Value and exact gradient of `e` at a single point x (length-d vector)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    with np.errstate(all="ignore"):
        return _Evaluator(x, strict=True).visit(e)


def eval_dual_batch(e: Expression, X) -> Tuple[DualValue, np.ndarray]:
    """
    Vectorised evaluation over the rows of X (shape m x d).
    Returns the dual value and a boolean mask of rows that hit a domain error.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected an m x d array of points, got shape {X.shape}")
    with np.errstate(all="ignore"):
        ev = _Evaluator(X, strict=False)
        out = ev.visit(e)
    bad = ev.invalid | ~np.isfinite(out.value) | ~np.all(np.isfinite(out.partials), axis=-1)
    return out, bad
