# expr/parser.py
# Recursive-descent parser for chart component expressions.
#
#   expr     := term (('+' | '-') term)*
#   term     := unary (('*' | '/') unary)*
#   unary    := '-' unary | power
#   power    := atom ('^' ['-'] INTEGER)*
#   atom     := NUMBER | 'pi' | 'x'INDEX | FUNC '(' expr ')' | '(' expr ')'
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from expr.models import (
    CONSTANTS,
    FUNCTIONS,
    ArityError,
    BinOp,
    Call,
    Const,
    Expression,
    ExpressionSyntaxError,
    Neg,
    Num,
    Pow,
    UnknownIdentifierError,
    Var,
)

_TOKEN_RE = re.compile(
    r"(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)
_VAR_RE = re.compile(r"x([1-9]\d*)$")


@dataclass(frozen=True)
class Token:
    kind: str     # "number" | "ident" | "op" | "end"
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, d: Optional[int]):
        self.tokens = tokenize(text)
        self.i = 0
        self.d = d

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def _expect(self, text: str) -> Token:
        if self.tok.kind != "op" or self.tok.text != text:
            found = self.tok.text or "end of input"
            raise ExpressionSyntaxError(f"expected '{text}', found '{found}'", self.tok.pos)
        return self._advance()

    def _at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> Expression:
        e = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected '{self.tok.text}'", self.tok.pos)
        return e

    def expr(self) -> Expression:
        left = self.term()
        while self._at_op("+", "-"):
            op = self._advance()
            right = self.term()
            left = BinOp(op.text, left, right, pos=op.pos)
        return left

    def term(self) -> Expression:
        left = self.unary()
        while self._at_op("*", "/"):
            op = self._advance()
            right = self.unary()
            left = BinOp(op.text, left, right, pos=op.pos)
        return left

    def unary(self) -> Expression:
        if self._at_op("-"):
            op = self._advance()
            return Neg(self.unary(), pos=op.pos)
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        while self._at_op("^"):
            op = self._advance()
            sign = 1
            if self._at_op("-"):
                self._advance()
                sign = -1
            t = self.tok
            if t.kind != "number" or not t.text.isdigit():
                raise ExpressionSyntaxError("exponent must be an integer literal", t.pos)
            self._advance()
            base = Pow(base, sign * int(t.text), pos=op.pos)
        return base

    def atom(self) -> Expression:
        t = self.tok
        if t.kind == "number":
            self._advance()
            return Num(float(t.text), pos=t.pos)
        if t.kind == "ident":
            self._advance()
            return self._identifier(t)
        if self._at_op("("):
            self._advance()
            inner = self.expr()
            self._expect(")")
            return inner
        found = t.text or "end of input"
        raise ExpressionSyntaxError(f"unexpected '{found}'", t.pos)

    def _identifier(self, t: Token) -> Expression:
        name = t.text
        if name in FUNCTIONS:
            if not self._at_op("("):
                raise ExpressionSyntaxError(f"expected '(' after {name}", self.tok.pos)
            self._advance()
            if self._at_op(")"):
                raise ArityError(name, 0, t.pos)
            args = [self.expr()]
            while self._at_op(","):
                self._advance()
                args.append(self.expr())
            self._expect(")")
            if len(args) != 1:
                raise ArityError(name, len(args), t.pos)
            return Call(name, args[0], pos=t.pos)
        if name in CONSTANTS:
            return Const(name, pos=t.pos)
        m = _VAR_RE.match(name)
        if m:
            index = int(m.group(1))
            if self.d is not None and index > self.d:
                raise UnknownIdentifierError(name, t.pos, kind="variable")
            return Var(index, pos=t.pos)
        raise UnknownIdentifierError(name, t.pos)


def parse(text: str, d: Optional[int] = None) -> Expression:
    """
    Parse `text` into an expression tree.

    `d` is the intrinsic dimension of the owning parametrization; variables
    x1..xd are in scope. With d=None any xN is accepted.
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    return _Parser(text, d).parse()


# ---------- Canonical printer ----------

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _precedence(e: Expression) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_UNARY
    if isinstance(e, Num) and e.value < 0:
        return _PREC_UNARY
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expression, min_prec: int) -> str:
    s = print_expression(e)
    return s if _precedence(e) >= min_prec else f"({s})"


def print_expression(e: Expression) -> str:
    """Canonical text with the minimum parentheses needed to re-parse to the same tree."""
    if isinstance(e, Num):
        if e.value != e.value or e.value in (float("inf"), float("-inf")):
            raise ValueError(f"cannot print non-finite literal {e.value}")
        if e.value < 0:
            return f"-{float(-e.value)!r}"
        return repr(float(e.value))
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _PREC_UNARY)
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_POW)}^{e.exponent}"
    if isinstance(e, Call):
        return f"{e.func}({print_expression(e.arg)})"
    prec = _precedence(e)
    # left-associative: the right operand must bind strictly tighter
    return f"{_wrap(e.left, prec)} {e.op} {_wrap(e.right, prec + 1)}"
