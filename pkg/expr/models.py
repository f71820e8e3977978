# expr/models.py
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

FUNCTIONS = ("sin", "cos", "exp", "sqrt")
CONSTANTS = {"pi": math.pi}


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, position: int, kind: str = "identifier"):
        super().__init__(f"unknown {kind} '{name}' at position {position}")
        self.name = name
        self.position = position


class ArityError(ExpressionError):
    def __init__(self, func: str, got: int, position: int):
        super().__init__(f"{func}() takes exactly 1 argument, got {got} (position {position})")
        self.func = func
        self.position = position


class ExpressionDomainError(ArithmeticError):
    """Raised when an expression is evaluated outside its domain of differentiability."""

    def __init__(self, message: str, subexpression: str, position: int):
        super().__init__(f"{message} in '{subexpression}' (position {position})")
        self.subexpression = subexpression
        self.position = position


# AST nodes. `pos` is the character offset in the source text; it is ignored
# by equality so that structurally equal trees compare equal.

@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    index: int            # 1-based: x1 .. xd
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str             # "pi"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str               # "+" | "-" | "*" | "/"
    left: "Expression"
    right: "Expression"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str             # one of FUNCTIONS
    arg: "Expression"
    pos: int = field(default=0, compare=False)


Expression = Union[Num, Var, Const, Neg, BinOp, Pow, Call]


def max_variable_index(e: Expression) -> int:
    """Largest variable index referenced by `e` (0 for constant expressions)."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, (Num, Const)):
        return 0
    if isinstance(e, (Neg,)):
        return max_variable_index(e.operand)
    if isinstance(e, Pow):
        return max_variable_index(e.base)
    if isinstance(e, Call):
        return max_variable_index(e.arg)
    return max(max_variable_index(e.left), max_variable_index(e.right))
