import math

import numpy as np
import pytest
from scipy import integrate

from meandist import MeanDistError
from meandist import polygon2d as pg
from meandist.geom import Polytope
from meandist.oracle import estimate_moment

PI = math.pi
SQUARE_MEAN = 0.521405433164720678331
DISK_P1 = 0.905414787367226799041


def _ngon(n):
    t = 2 * PI * np.arange(n) / n
    return Polytope.polygon(np.c_[np.cos(t), np.sin(t)])


def _edge_vertex_quad(n, i, p):
    """Mean of |X - V_0|^p along edge i, straight from the segment integral."""
    V = lambda k: np.array([math.cos(2 * PI * k / n), math.sin(2 * PI * k / n)])  # noqa: E731
    a, b, o = V(i), V(i + 1), V(0)
    val, _ = integrate.quad(
        lambda s: float(np.linalg.norm(a + s * (b - a) - o)) ** p, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13
    )
    return val


def test_csc_integral_against_quadrature():
    for m in range(1, 9):
        a, b = 0.3, 2.1
        val, _ = integrate.quad(lambda z: math.sin(z) ** -m, a, b, epsabs=1e-14, epsrel=1e-13)
        assert pg.csc_power_integral(m, a, b) == pytest.approx(val, rel=1e-13)


@pytest.mark.parametrize("n", [4, 5, 7, 10])
def test_edge_vertex_p_minus1(n):
    for i in range(1, n - 1):
        half = 0.5 / math.sin(PI / n) * math.log(math.tan(PI * (i + 1) / (2 * n)) / math.tan(PI * i / (2 * n)))
        assert pg.edge_vertex_moment(n, i, -1) == pytest.approx(half, rel=1e-13)
        assert pg.edge_vertex_moment(n, i, -1) == pytest.approx(_edge_vertex_quad(n, i, -1), rel=1e-12)


@pytest.mark.parametrize("n", [3, 5, 6, 8, 11])
def test_edge_vertex_p2(n):
    for i in range(1, n - 1):
        expected = (
            5 / 3 + math.cos(2 * PI / n) / 3 - math.cos(2 * PI * i / n) - math.cos(2 * PI * (i + 1) / n)
        )
        assert pg.edge_vertex_moment(n, i, 2) == pytest.approx(expected, abs=1e-13)


def test_edge_vertex_quadrature_value():
    assert pg.edge_vertex_moment(6, 2, 1) == pytest.approx(1.8239592165010827, rel=1e-14)
    for n, i, p in ((5, 2, 3), (9, 4, 1), (12, 1, 5), (7, 3, -1)):
        assert pg.edge_vertex_moment(n, i, p) == pytest.approx(_edge_vertex_quad(n, i, p), rel=1e-12)


def test_edge_vertex_ends_and_range():
    assert pg.edge_vertex_moment(6, 0, 1) == 0.0
    assert pg.edge_vertex_moment(6, 5, 1) == 0.0
    with pytest.raises(MeanDistError) as exc:
        pg.edge_vertex_moment(6, 6, 1)
    assert exc.value.code == "INDEX_RANGE"
    with pytest.raises(MeanDistError) as exc:
        pg.edge_vertex_moment(6, -1, 1)
    assert exc.value.code == "INDEX_RANGE"


@pytest.mark.parametrize("n", range(3, 13))
def test_second_moment_both_paths(n):
    target = (2 + math.cos(2 * PI / n)) / 3
    assert pg.polygon_moment(n, 2) == pytest.approx(target, abs=1e-12)
    assert pg.polygon_moment_limit_path(n, 2) == pytest.approx(target, abs=1e-12)


def test_polygon_examples():
    assert pg.polygon_moment(3, 2) == pytest.approx(0.5, abs=1e-14)
    assert pg.polygon_moment(4, 2) == pytest.approx(2 / 3, abs=1e-14)
    # side sqrt(2) -> unit side
    assert pg.polygon_moment(4, 2) / 2 == pytest.approx(1 / 3, abs=1e-14)
    assert pg.polygon_moment(4, 1) == pytest.approx(math.sqrt(2) * SQUARE_MEAN, abs=1e-14)
    assert SQUARE_MEAN == pytest.approx((math.sqrt(2) + 2 + 5 * math.asinh(1)) / 15, abs=1e-15)
    assert pg.polygon_moment(6, 1, scale=2.0) == pytest.approx(2 * pg.polygon_moment(6, 1), rel=1e-15)


@pytest.mark.parametrize("n", range(3, 13))
def test_p_zero(n):
    assert pg.polygon_moment(n, 0) == 1.0
    assert pg.polygon_moment_limit_path(n, 0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_parity_paths_agree(n):
    for p in (-1, 1, 2, 3):
        assert pg.polygon_moment_limit_path(n, p) == pytest.approx(pg.polygon_moment(n, p), abs=1e-11)


def test_even_closed_examples():
    c = lambda k: math.cos(2 * PI * k / 3)  # noqa: E731
    assert pg.even_moment_closed(3, 6) == pytest.approx(
        (628 + 661 * c(1) + 164 * c(2) + 17 * c(3)) / 420 - 1 / 50, abs=1e-15
    )
    c = lambda k: math.cos(2 * PI * k / 100)  # noqa: E731
    assert pg.even_moment_closed(100, 4) == pytest.approx((77 + 64 * c(1) + 9 * c(2)) / 90, abs=1e-15)
    with_corr = pg.even_moment_closed(5, 12)
    assert with_corr == pytest.approx(pg.polygon_moment(5, 12), abs=1e-10)


@pytest.mark.parametrize("p", [2, 4, 6, 8, 10, 12, 14])
def test_even_closed_forms_match(p):
    for n in range(3, 13):
        assert pg.even_moment_closed(n, p) == pytest.approx(pg.polygon_moment(n, p), abs=1e-9)


def test_even_closed_range():
    with pytest.raises(MeanDistError):
        pg.even_moment_closed(5, 16)
    with pytest.raises(MeanDistError):
        pg.even_moment_closed(5, 3)


def test_invalid_inputs():
    with pytest.raises(MeanDistError) as exc:
        pg.polygon_moment(2, 1)
    assert exc.value.code == "INVALID_N"
    with pytest.raises(MeanDistError) as exc:
        pg.polygon_moment(5, -2)
    assert exc.value.code == "P_OUT_OF_RANGE"


def test_real_p_is_smooth():
    for n in (5, 8):
        assert pg.polygon_moment_real(n, 1.0) == pytest.approx(pg.polygon_moment(n, 1), rel=1e-10)
        lo, mid, hi = (pg.polygon_moment_real(n, p) for p in (0.9, 1.0, 1.1))
        # moments are log-convex in p
        assert mid * mid <= lo * hi


@pytest.mark.parametrize("n, p", [(5, 1), (7, -1), (9, 3)])
def test_monte_carlo(n, p):
    P = _ngon(n)
    est = estimate_moment(P, P, p, 1_000_000, seed=51)
    assert est.agrees(pg.polygon_moment(n, p))


def test_unit_square_monte_carlo():
    sq = Polytope.polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    est = estimate_moment(sq, sq, 1, 1_000_000, seed=52)
    assert est.agrees(pg.polygon_moment(4, 1) / math.sqrt(2))


def test_limit_values():
    assert pg.limit_p_minus2(4) == pytest.approx(PI, abs=1e-15)
    assert pg.polygon_moment(6, pg.LIMIT_P_MINUS2) == pg.limit_p_minus2(6)
    for n in range(3, 13):
        rep = pg.polygon_limit_checks(n)
        assert rep.limit_numeric == pytest.approx(rep.limit_p_minus2, rel=1e-5)
        assert rep.limit_p_minus2 == pytest.approx(4 * PI / (n * math.sin(2 * PI / n)), rel=1e-15)
        assert set(rep.to_dict()) >= {"limit_p_minus2", "disk_p1", "asymptotic_p1"}


def test_disk_moment():
    assert pg.disk_moment(1) == pytest.approx(128 / (45 * PI), rel=1e-15)
    assert pg.disk_moment(1) == pytest.approx(DISK_P1, rel=1e-15)
    assert pg.disk_moment(2) == pytest.approx(1.0, abs=1e-15)
    assert pg.disk_moment(0) == pytest.approx(1.0, abs=1e-15)
    assert abs(pg.polygon_moment(2048, 1) - DISK_P1) < 1e-5
    with pytest.raises(MeanDistError):
        pg.disk_moment(-2)


def test_asymptotic_order():
    ns = np.array([32, 64, 128, 256])
    resid = [abs(pg.polygon_moment(n, 1) / DISK_P1 - (1 - PI**2 / (3 * n * n))) for n in ns]
    slope = -np.polyfit(np.log(ns), np.log(resid), 1)[0]
    assert slope >= 3.7


def test_asymptotic_fourth_order_term():
    for n in (64, 128):
        pred = pg.asymptotic_factor(n, 1, order=4) * DISK_P1
        assert abs(pg.polygon_moment(n, 1) - pred) < 5 / n**6 * 1e3
