"""Minimal exact arithmetic expressions over named parameters.

Expressions are parsed with :mod:`ast` and restricted to numbers, names,
``+ - * /``, unary minus and integer powers.  Evaluation is exact.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Mapping

from .algebra import Rational, to_rational


class ExpressionError(ValueError):
    pass


_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _check(node: ast.AST, text: str) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, text)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _BINOPS):
            raise ExpressionError(f"operator {type(node.op).__name__} not allowed in {text!r}")
        if isinstance(node.op, ast.Pow):
            exp = node.right
            neg = False
            if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                exp, neg = exp.operand, True
            if not (isinstance(exp, ast.Constant) and type(exp.value) is int):
                raise ExpressionError(f"only integer powers are allowed in {text!r}")
        _check(node.left, text)
        _check(node.right, text)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError(f"unary operator not allowed in {text!r}")
        _check(node.operand, text)
    elif isinstance(node, ast.Constant):
        if type(node.value) is not int:
            raise ExpressionError(f"only integer literals are allowed (write p/q), got {node.value!r} in {text!r}")
    elif isinstance(node, ast.Name):
        pass
    else:
        raise ExpressionError(f"unsupported syntax {type(node).__name__} in {text!r}")


def _names(node: ast.AST) -> set[str]:
    return {n.id for n in ast.walk(node) if isinstance(n, ast.Name)}


@dataclass(frozen=True)
class Expr:
    text: str
    _tree: ast.Expression = field(repr=False, compare=False, hash=False)

    @property
    def names(self) -> frozenset[str]:
        return frozenset(_names(self._tree))

    def evaluate(self, env: Mapping[str, Rational]) -> Rational:
        return to_rational(self._eval(self._tree.body, env))

    def _eval(self, node, env):
        if isinstance(node, ast.Constant):
            return to_rational(node.value)
        if isinstance(node, ast.Name):
            try:
                return to_rational(env[node.id])
            except KeyError:
                raise ExpressionError(f"unknown parameter {node.id!r} in {self.text!r}") from None
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        left = self._eval(node.left, env)
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if isinstance(exp, ast.UnaryOp):
                power = -exp.operand.value
            else:
                power = exp.value
            if power < 0 and not left:
                raise ExpressionError(f"division by zero in {self.text!r}")
            return left**power
        right = self._eval(node.right, env)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if not right:
            raise ExpressionError(f"division by zero in {self.text!r} (denominator {ast.unparse(node.right)!r} vanishes)")
        return left / right

    def __str__(self) -> str:
        return self.text


def parse_expr(text) -> Expr:
    """Parse ``text`` (a string, int or rational) into an :class:`Expr`."""
    if not isinstance(text, str):
        r = to_rational(text)
        text = str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
    src = text.strip()
    if not src:
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {text!r}: {exc.msg}") from None
    _check(tree, src)
    return Expr(src, tree)


def evaluate(text, env: Mapping[str, Rational]) -> Rational:
    return parse_expr(text).evaluate(env)
