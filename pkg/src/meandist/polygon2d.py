"""Distance moments in regular n-gons of circumradius one.

Vertices are V_i = (cos 2 pi i/n, sin 2 pi i/n) and E_i joins V_i to V_{i+1}.
Everything is built from the edge/vertex term

    Q(x) = P_{E_x V_0} = 2^p s(x)^(1+p) s(x+1)^(1+p) csc(pi/n) int_{pi x/n}^{pi (x+1)/n} csc^(2+p)

with s(x) = sin(pi x / n), extended to real x so the even-n parallel term can
be reached as a limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .errors import fail

__all__ = [
    "LIMIT_P_MINUS2",
    "csc_power_integral",
    "edge_vertex_moment",
    "parallel_edge_moment",
    "boundary_term",
    "polygon_moment",
    "polygon_moment_limit_path",
    "even_moment_closed",
    "disk_moment",
    "LimitReport",
    "polygon_limit_checks",
]

LIMIT_P_MINUS2 = "limit-p-minus-2"


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 3:
        raise fail("INVALID_N", f"n must be an integer >= 3, got {n!r}")
    return int(n)


def _check_p(p, allow_real: bool = False) -> float:
    if allow_real:
        if not p > -2:
            raise fail("P_OUT_OF_RANGE", f"p must exceed -2, got {p!r}")
        return float(p)
    if isinstance(p, bool) or int(p) != p or p < -1:
        raise fail("P_OUT_OF_RANGE", f"p must be an integer >= -1, got {p!r}")
    return int(p)


# --- the csc integral ----------------------------------------------------------


def _csc_antiderivative(m: int, z: float) -> float:
    """An antiderivative of csc^m on (0, pi), m >= 1, by the downward reduction."""
    s, c = math.sin(z), math.cos(z)
    # int csc^m = -csc^(m-2) cot / (m-1) + (m-2)/(m-1) int csc^(m-2)
    acc = 0.0
    mult = 1.0
    k = m
    while k > 2:
        acc += mult * (-(1.0 / s) ** (k - 2) * (c / s) / (k - 1))
        mult *= (k - 2) / (k - 1)
        k -= 2
    if k == 2:
        base = -c / s
    else:
        base = math.log(math.tan(0.5 * z))
    return acc + mult * base


def csc_power_integral(m, a: float, b: float) -> float:
    """int_a^b csc^m(z) dz for 0 < a <= b < pi.

    Integer m >= 1 uses closed antiderivatives; other real m fall back to
    adaptive quadrature.
    """
    if not (0 < a <= b < math.pi):
        raise fail("DOMAIN", "integration limits must lie inside (0, pi)")
    if float(m).is_integer() and m >= 1:
        m = int(m)
        if m == 1:
            return math.log(math.tan(0.5 * b) / math.tan(0.5 * a))
        return _csc_antiderivative(m, b) - _csc_antiderivative(m, a)
    val, _ = quad(lambda z: math.sin(z) ** (-m), a, b, epsabs=0, epsrel=1e-13, limit=200)
    return val


# --- edge/vertex terms ---------------------------------------------------------


def _q(n: int, x: float, p: float, integral=csc_power_integral) -> float:
    if x <= 0 or x >= n - 1:
        return 0.0  # edges through V_0 carry zero weight
    t = math.pi / n
    s0, s1 = math.sin(t * x), math.sin(t * (x + 1))
    return 2.0**p * (s0 * s1) ** (1 + p) / math.sin(t) * integral(2 + p, t * x, t * (x + 1))


def _dq(n: int, x: float, p: float) -> float:
    """d/dx Q(x), analytic."""
    t = math.pi / n
    a, b = t * x, t * (x + 1)
    s0, s1 = math.sin(a), math.sin(b)
    pref = 2.0**p * (s0 * s1) ** (1 + p) / math.sin(t)
    integral = csc_power_integral(2 + p, a, b)
    d_pref = pref * (1 + p) * t * (math.cos(a) / s0 + math.cos(b) / s1)
    d_int = t * (s1 ** (-(2 + p)) - s0 ** (-(2 + p)))
    return d_pref * integral + pref * d_int


def edge_vertex_moment(n, i, p) -> float:
    """P_{E_i V_0}: mean of |X - V_0|^p for X uniform on edge E_i.

    E_0 and E_{n-1} touch V_0 and carry zero weight; they return 0.
    """
    n = _check_n(n)
    p = _check_p(p)
    if isinstance(i, bool) or int(i) != i or not 0 <= i <= n - 1:
        raise fail("INDEX_RANGE", f"edge index must be in 0..{n - 1}, got {i!r}")
    i = int(i)
    if i == 0 or i == n - 1:
        return 0.0
    return _q(n, i, p)


def parallel_edge_moment(n, p) -> float:
    """P_{E_{n/2} E_0} for even n: the two parallel edges."""
    n = _check_n(n)
    if n % 2:
        raise fail("INVALID_N", "parallel edges exist only for even n")
    p = _check_p(p, allow_real=True)
    t = math.pi / n
    return 2 * _q(n, n // 2, p) - 2.0 ** (p + 1) / math.sin(t) ** 2 / (2 + p) * (1 - math.cos(t) ** (2 + p))


def boundary_term(n, x, p) -> float:
    """P_{E_x dE_0}, with the removable singularity at x = n/2 filled in."""
    n = _check_n(n)
    p = _check_p(p, allow_real=True)
    t = math.pi / n
    x = float(x)
    if abs(math.cos(t * x)) < 1e-9:
        # l'Hopital on g(x) / cos(pi x / n)
        g_prime = t * math.cos(t * (x + 1)) * _q(n, x, p) + math.sin(t * (x + 1)) * _dq(n, x, p)
        g_prime -= t * math.cos(t * (x - 1)) * _q(n, x - 1, p) + math.sin(t * (x - 1)) * _dq(n, x - 1, p)
        return 0.5 / math.sin(t) * g_prime / (-t * math.sin(t * x))
    g = math.sin(t * (x + 1)) * _q(n, x, p) - math.sin(t * (x - 1)) * _q(n, x - 1, p)
    return 0.5 / math.sin(t) / math.cos(t * x) * g


# --- whole polygon ---------------------------------------------------------------


def _odd(n: int, p: float, integral) -> float:
    t = math.pi / n
    acc = 0.0
    for i in range(1, n - 1):
        si, sj = math.sin(t * i), math.sin(t * (i + 1))
        ci, cj = math.cos(t * i), math.cos(t * (i + 1))
        acc += (si * sj) ** (3 + p) / (ci * cj) * integral(2 + p, t * i, t * (i + 1))
    return -(2.0 ** (4 + p)) / (math.cos(t) * math.sin(t)) / (n * (4 + p) * (3 + p) * (2 + p)) * acc


def _even(n: int, p: float, integral) -> float:
    t = math.pi / n
    c, s = math.cos(t), math.sin(t)
    acc = c * (3 + p + (c / s) ** 2) * _q(n, n // 2, p, integral)
    acc -= 2.0**p * c / s**2 * (1 - c ** (2 + p))
    for i in range(1, n // 2 - 1):
        si, sj = math.sin(t * i), math.sin(t * (i + 1))
        ci, cj = math.cos(t * i), math.cos(t * (i + 1))
        acc -= (si * sj) ** 2 / (ci * cj) * _q(n, i, p, integral)
    return 32 / c / (n * (4 + p) * (3 + p) * (2 + p)) * acc


def polygon_moment(n, p, scale: float = 1.0, integral=csc_power_integral) -> float:
    """L^(p)_22: p-th distance moment in the regular n-gon of circumradius ``scale``."""
    n = _check_n(n)
    if p == LIMIT_P_MINUS2:
        return limit_p_minus2(n) / scale**2
    p = _check_p(p)
    if p == 0:
        return 1.0
    val = _odd(n, p, integral) if n % 2 else _even(n, p, integral)
    return val * scale**p


def polygon_moment_real(n, p: float) -> float:
    """The same moment for real p > -2 (quadrature for the csc integrals)."""
    n = _check_n(n)
    p = _check_p(p, allow_real=True)
    return _odd(n, p, csc_power_integral) if n % 2 else _even(n, p, csc_power_integral)


def polygon_moment_limit_path(n, p) -> float:
    """The same moment from the parity-free sum over P_{E_i dE_0} and P_{E_i V_0}."""
    n = _check_n(n)
    p = _check_p(p, allow_real=True)
    t = math.pi / n
    acc = 0.0
    for i in range(1, n - 1):
        w = math.sin(t * i) * math.sin(t * (i + 1))
        acc += w * (2 * boundary_term(n, i, p) + _q(n, i, p))
    return 16 / math.cos(t) / (n * (4 + p) * (3 + p) * (2 + p)) * acc


def limit_p_minus2(n) -> float:
    """lim_{p -> -2+} (2 + p) L^(p)_22."""
    n = _check_n(n)
    return 4 * math.pi / (n * math.sin(2 * math.pi / n))


# --- even moments as cosine polynomials ------------------------------------------

S5 = math.sqrt(5)

# p: (denominator, [a_0, a_1, ...], {n: delta correction})
_EVEN = {
    2: (3, [2, 1], {}),
    4: (90, [77, 64, 9], {}),
    6: (420, [628, 661, 164, 17], {3: -1 / 50}),
    8: (1575, [4921, 5936, 1974, 368, 31], {3: -16 / 175, 4: 2 / 225}),
    10: (4158, [30476, 40162, 16072, 4093, 628, 45], {3: -15 / 49, 4: 4 / 63, 5: -2 / 441}),
    12: (
        840840,
        [15673314, 21975552, 10006023, 3122432, 661402, 87296, 5461],
        {3: -2847 / 3080, 4: 668 / 2205, 5: -(17 + S5) / 441, 6: 1 / 392},
    ),
    14: (
        308880,
        [15540360, 22811745, 11429660, 4126221, 1081192, 198713, 23124, 1285],
        {3: -384 / 143, 4: 1816 / 1485, 5: -(3057 + 331 * S5) / 14256, 6: 11 / 360, 7: -1 / 648},
    ),
}


def even_moment_closed(n, p) -> float:
    """Closed cosine polynomial for even p in 2..14, including the small-n corrections."""
    n = _check_n(n)
    if p not in _EVEN:
        raise fail("P_OUT_OF_RANGE", "closed even moments exist for p in {2, 4, ..., 14}")
    den, coeffs, delta = _EVEN[p]
    val = sum(a * math.cos(2 * math.pi * j / n) for j, a in enumerate(coeffs)) / den
    return val + delta.get(n, 0.0)


# --- disk limit --------------------------------------------------------------------


def disk_moment(p) -> float:
    """P_22d: p-th distance moment in the unit disk, p > -2."""
    p = float(p)
    if not p > -2:
        raise fail("P_OUT_OF_RANGE", "the disk moment needs p > -2")
    return 2 ** (4 + p) * math.gamma((3 + p) / 2) / ((2 + p) * (4 + p) * math.sqrt(math.pi) * math.gamma(2 + p / 2))


def asymptotic_factor(n, p, order: int = 2) -> float:
    """Large-n correction factor L^(p)_22 / P_22d through 1/n^order (order 2 or 4)."""
    p = float(p)
    f = 1 - p * math.pi**2 / (3 * n**2)
    if order >= 4:
        f += p**2 * (8 + 11 * p) * math.pi**4 / (180 * (1 + p) * n**4)
    return f


@dataclass(frozen=True)
class LimitReport:
    n: int
    limit_p_minus2: float
    limit_numeric: float
    disk_p1: float
    disk_p2: float
    moment_p1: float
    asymptotic_p1: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def polygon_limit_checks(n) -> LimitReport:
    """Limit value at p -> -2, disk moments and the large-n prediction for L^(1)."""
    n = _check_n(n)
    # (2 + p) L^(p) is analytic near p = -2; Richardson on eps and eps/2
    e = 1e-3
    a = e * polygon_moment_real(n, -2 + e)
    b = 0.5 * e * polygon_moment_real(n, -2 + 0.5 * e)
    numeric = 2 * b - a
    return LimitReport(
        n=n,
        limit_p_minus2=limit_p_minus2(n),
        limit_numeric=numeric,
        disk_p1=disk_moment(1),
        disk_p2=disk_moment(2),
        moment_p1=polygon_moment(n, 1),
        asymptotic_p1=asymptotic_factor(n, 1) * disk_moment(1),
    )
