"""Parse small arithmetic expressions into ScalarFields with exact derivatives.

Grammar: numbers, the variables ``x1 .. xn`` (``x, y, z`` are accepted as
aliases when n <= 3), the constants ``pi`` and ``e``, the shorthand ``r2``
for |x|^2, binary ``+ - * /``, powers (``^`` or ``**``), unary minus, and the
functions ``sin cos exp sqrt``. Parsing goes through :mod:`ast` with a node
whitelist, so arbitrary Python is never evaluated. Derivatives are taken
symbolically on the resulting tree.
"""

from __future__ import annotations

import ast

import numpy as np
import sympy as sp

from .errors import EvaluationError, ExpressionError
from .fields import ScalarField

FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "sqrt": sp.sqrt}
BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def _symbols(n: int) -> dict:
    xs = sp.symbols(f"x1:{n + 1}", real=True)
    names = {f"x{i + 1}": s for i, s in enumerate(xs)}
    if n <= 3:
        names.update(dict(zip("xyz", xs)))
    names["r2"] = sum(s**2 for s in xs)
    names["pi"] = sp.pi
    names["e"] = sp.E
    return names


def parse(text: str, n: int) -> sp.Expr:
    """Convert ``text`` into a sympy expression in the symbols x1..xn."""
    names = _symbols(n)
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ExpressionError(f"unknown name {node.id!r}")
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in BINOPS:
            return BINOPS[type(node.op)](build(node.left), build(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return -inner if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in FUNCTIONS:
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError(f"{node.func.id} takes exactly one argument")
            return FUNCTIONS[node.func.id](build(node.args[0]))
        raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")

    return build(tree)


def field_from_expr(text: str, n: int, name: str = "") -> ScalarField:
    """Build an analytic ScalarField from an expression string."""
    expr = parse(text, n)
    xs = sp.symbols(f"x1:{n + 1}", real=True)
    grad = [sp.diff(expr, v) for v in xs]
    hess = [[sp.diff(g, v) for v in xs] for g in grad]
    f_val = sp.lambdify(xs, expr, modules="math")
    f_grad = sp.lambdify(xs, grad, modules="math")
    f_hess = sp.lambdify(xs, hess, modules="math")
    return ScalarField(
        n,
        _guard(lambda x: f_val(*x)),
        _guard(lambda x: np.array(f_grad(*x), dtype=float)),
        _guard(lambda x: np.array(f_hess(*x), dtype=float)),
        name=name or text,
    )


def _guard(fn):
    def wrapped(x):
        try:
            return fn(x)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(f"cannot evaluate at {np.asarray(x).tolist()}: {exc}") from None

    return wrapped
