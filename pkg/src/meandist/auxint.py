"""Auxiliary integrals over the fundamental triangle.

The fundamental triangle D(q, gamma) has vertices (0, 0), (q, 0) and
(q, q tan gamma).  The basic moments are

    I_ij^(p)(q, gamma) = int_D x^i y^j (1 + x^2 + y^2)^(p/2) dx dy

and the scaled variant replaces the 1 by h^2.  For integer p the values are
obtained in closed form from three one-dimensional families K, J and M, each
evaluated by an upward recurrence in steps of two starting from its parity
boundary (p = -3 for odd orders, p = -2 for even orders).

Internally every routine works with t = tan(gamma) so that steep sides never
pass through a tan(atan(.)) round trip.  The closed forms are odd in t for
I00, I10 and I20 and even for I01 and I11, so negative angles describe the
mirrored (negatively oriented) triangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import fail
from .results import CLOSED_FORM, QUADRATURE

_SUPPORTED = {(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)}


@dataclass(frozen=True)
class AuxValue:
    value: float
    method: str
    error: float = 0.0

    def __float__(self) -> float:
        return self.value


def _is_int(p) -> bool:
    return float(p) == int(p)


# --- one-dimensional families ----------------------------------------------


def _K(p: int, r: float) -> float:
    if p % 2:
        k = math.asinh(r)
        start = -3
    else:
        k = r
        start = -2
    s = 1.0 + r * r
    for m in range(start + 2, p + 1, 2):
        k = ((2 + m) * k + r * s ** (1 + m / 2)) / (3 + m)
    return k


def _J(p: int, q: float, t: float) -> float:
    """J^(p)(q, atan t) for integer p >= -3."""
    if p % 2 == 0:
        j = 0.0
        start = -2
    else:
        sec = math.hypot(1.0, t)
        g = math.atan(t)
        j = -g + math.asin(t / (sec * math.sqrt(1.0 + q * q)))
        start = -3
    qq = 1.0 + q * q
    r = q * t / math.sqrt(qq)
    for m in range(start + 2, p + 1, 2):
        j += q * qq ** ((1 + m) / 2) * _K(m - 2, r)
    return j


def _M(p: int, q: float, t: float) -> float:
    """M^(p)(q, atan t) for integer p >= -3."""
    g = math.atan(t)
    if p % 2 == 0:
        m_val = 0.0
        start = -2
    else:
        sec = math.hypot(1.0, t)
        s = t / sec
        c = 1.0 / sec
        qq = 1.0 + q * q
        m_val = (
            (1.0 - q * q) / 2.0 * math.asin(s / math.sqrt(qq))
            - g / 2.0
            + s / 2.0 * (math.sqrt(c * c + q * q) - c)
        )
        start = -3
    for m in range(start + 2, p + 1, 2):
        m_val += q * q * (g + _J(m - 2, q, t))
    return m_val


def _check_family_order(p, lowest: int) -> int:
    if not _is_int(p):
        raise fail("P_OUT_OF_RANGE", f"order must be an integer, got {p}")
    p = int(p)
    if p < lowest:
        raise fail("P_OUT_OF_RANGE", f"order {p} below {lowest}")
    return p


def K(p: int, r: float) -> AuxValue:
    """K^(p)(r) = int_0^r (1 + u^2)^((p + 2)/2) du for integer p >= -3."""
    p = _check_family_order(p, -3)
    return AuxValue(_K(p, float(r)), CLOSED_FORM)


def J(p: int, q: float, gamma: float) -> AuxValue:
    p = _check_family_order(p, -3)
    return AuxValue(_J(p, float(q), math.tan(gamma)), CLOSED_FORM)


def M(p: int, q: float, gamma: float) -> AuxValue:
    p = _check_family_order(p, -3)
    return AuxValue(_M(p, float(q), math.tan(gamma)), CLOSED_FORM)


# --- the six moments --------------------------------------------------------


def _closed(p: int, i: int, j: int, q: float, t: float) -> float:
    if q == 0.0 or t == 0.0:
        return 0.0
    sec = math.hypot(1.0, t)
    qq = 1.0 + q * q
    if (i, j) == (0, 0):
        return _J(p, q, t) / (2 + p)
    if (i, j) == (1, 0):
        s = t / sec
        return (
            qq ** ((3 + p) / 2) * _K(p, q * t / math.sqrt(qq)) - s * _K(p, q * sec)
        ) / (2 + p)
    if (i, j) == (0, 1):
        return (_K(p, q * sec) / sec - _K(p, q)) / (2 + p)
    if (i, j) == (1, 1):
        s2 = t * t / (sec * sec)
        c2 = 1.0 / (sec * sec)
        e = 2 + p / 2
        return (s2 + c2 * (1.0 + q * q * sec * sec) ** e - qq ** e) / (
            (2 + p) * (4 + p)
        )
    if (i, j) == (2, 0):
        return _M(p + 2, q, t) / (4 + p) - _M(p, q, t) / (2 + p)
    # (0, 2): x^2 + y^2 = (1 + x^2 + y^2) - 1 closes the set
    return (
        _closed(p + 2, 0, 0, q, t) - _closed(p, 0, 0, q, t) - _closed(p, 2, 0, q, t)
    )


def _tri_quad(p: float, i: int, j: int, q: float, t: float, h: float = 1.0) -> tuple[float, float]:
    from .oracle import quad2d

    tri = np.array([[0.0, 0.0], [q, 0.0], [q, q * t]])
    hh = h * h

    def f(x, y):
        return x**i * y**j * (hh + x * x + y * y) ** (p / 2)

    scale = max(abs(q) ** (2 + i + j) * abs(t), 1e-300)
    res = quad2d(f, tri, abs_tol=1e-13 * scale)
    return res.value, res.error


def I(p, i: int, j: int, q: float, gamma: float) -> AuxValue:
    """I_ij^(p)(q, gamma) over the fundamental triangle.

    Integer p >= -1 uses the closed form; other real p > -2 fall back to
    adaptive quadrature and are labelled as such.
    """
    if (i, j) not in _SUPPORTED:
        raise fail("UNSUPPORTED_MOMENT", f"I_{i}{j} is not provided")
    q = float(q)
    gamma = float(gamma)
    if not (abs(gamma) < math.pi / 2):
        raise fail("P_OUT_OF_RANGE", f"gamma={gamma} outside (-pi/2, pi/2)")
    if q < 0:
        raise fail("P_OUT_OF_RANGE", f"q={q} must be non-negative")
    t = math.tan(gamma)
    if q == 0.0 or gamma == 0.0:
        return AuxValue(0.0, CLOSED_FORM)
    if _is_int(p):
        p = int(p)
        if p < -1:
            raise fail("P_OUT_OF_RANGE", f"p={p} below -1")
        return AuxValue(_closed(p, i, j, q, t), CLOSED_FORM)
    if p <= -2:
        raise fail("P_OUT_OF_RANGE", f"p={p} not integrable")
    value, err = _tri_quad(float(p), i, j, q, t)
    return AuxValue(value, QUADRATURE, err)


def I_scaled(p, i: int, j: int, h: float, zeta: float, gamma: float) -> AuxValue:
    """Moment with (h^2 + x^2 + y^2)^(p/2) over D(zeta, gamma)."""
    if h == 0:
        raise fail("H_ZERO", "separation h must be non-zero")
    h = abs(float(h))
    base = I(p, i, j, zeta / h, gamma)
    return AuxValue(h ** (2 + p + i + j) * base.value, base.method, h ** (2 + p + i + j) * base.error)


def i00_signed(p: int, q: float, t: float) -> float:
    """I00^(p) for the triangle with far vertex (q, q t); t may be negative."""
    if q == 0.0 or t == 0.0:
        return 0.0
    return _J(p, q, t) / (2 + p)


def i_closed_t(p: int, i: int, j: int, q: float, t: float) -> float:
    """Closed-form I_ij with the angle given by its tangent (integer p >= -1)."""
    return _closed(p, i, j, q, t)


# --- angle expressions ------------------------------------------------------

_PHI = (1 + math.sqrt(5)) / 2


def parse_expr(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``2pi/5`` or ``atan(sqrt(2))``."""
    import ast
    import re

    src = re.sub(r"(\d)\s*(pi|phi|sqrt|atan|asin|acos|\()", r"\1*\2", text.strip())
    names = {"pi": math.pi, "phi": _PHI, "e": math.e}
    funcs = {
        "sqrt": math.sqrt,
        "atan": math.atan,
        "asin": math.asin,
        "acos": math.acos,
        "tan": math.tan,
        "sin": math.sin,
        "cos": math.cos,
        "atanh": math.atanh,
        "asinh": math.asinh,
        "log": math.log,
    }
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise fail("BAD_EXPRESSION", text) from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            ops = {
                ast.Add: lambda: a + b,
                ast.Sub: lambda: a - b,
                ast.Mult: lambda: a * b,
                ast.Div: lambda: a / b,
                ast.Pow: lambda: a**b,
            }
            for kind, op in ops.items():
                if isinstance(node.op, kind):
                    return op()
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in funcs
            and len(node.args) == 1
        ):
            return funcs[node.func.id](ev(node.args[0]))
        raise fail("BAD_EXPRESSION", text)

    try:
        return float(ev(tree))
    except (ValueError, ZeroDivisionError) as exc:
        raise fail("BAD_EXPRESSION", text) from exc
