"""Acceptance suite: eleven end-to-end criteria, one PASS/FAIL line each.

Run under pytest (the lines are printed in the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import math
import time

import numpy as np
import pytest
from scipy import integrate

from meandist import auxint, cli, irreducible as irr, polygon2d as pg
from meandist.catalog import REFERENCE, ball_moment, get_recipe, gamma_ratio, platonic_moment
from meandist.geom import Polytope
from meandist.oracle import estimate_moment
from meandist.reduction import general_moment, tetrahedron_moment
from meandist.results import Normalize

SOLIDS = ["tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron"]
PI = math.pi
S2, S3, S5 = math.sqrt(2), math.sqrt(3), math.sqrt(5)

RESULTS: dict[int, tuple[bool, str]] = {}


def _acoth(x):
    return 0.5 * math.log((x + 1) / (x - 1))


def _acot(x):
    return math.atan(1 / x)


# (i, j, q, gamma, printed closed form) at p = 1
TABLE9 = [
    (0, 0, 1.0, PI / 4, 1 / (2 * S3) - PI / 36 + 2 / 3 * _acoth(S3)),
    (0, 0, S2 / 2, PI / 3, 1 / 4 - PI / 36 + 7 * _acoth(S2) / (12 * S2)),
    (0, 0, S2 / 4, PI / 3, 1 / (16 * S2) + PI / 18 + 25 * math.log(3) / (192 * S2) - _acot(S2) / 3),
    (0, 0, S2 / 2, PI / 4, 1 / (6 * S2) - PI / 12 + 7 * math.log(3) / (24 * S2) + _acot(S2) / 3),
    (
        0, 0, 0.5, PI / 5,
        S5 / 16 - 5 / 48 + PI / 60 - 13 * math.log(5) / 192 - _acot(2) / 6 + 13 / 96 * math.asinh(2),
    ),
    # the tabulated form for this row evaluates to 0.2019...; quadrature and the
    # dodecahedron decimals both need the value below, so the corrected form is used
    (
        0, 0, 0.5, 2 * PI / 5,
        (
            25 + 15 * S5 - 32 * PI
            + 80 * math.asin(2 * math.sin(2 * PI / 5) / S5)
            + 65 * math.asinh(math.tan(2 * PI / 5) / S5)
        ) / 240,
    ),
    (1, 0, 1.0, PI / 4, S3 / 8 - math.asinh(S2) / (8 * S2) + _acoth(S3) / 2),
    (1, 0, S2 / 2, PI / 3, 3 / (16 * S2) - S3 / 16 * math.asinh(S2) + 9 / 32 * _acoth(S2)),
    (1, 0, S2 / 4, PI / 3, 3 / 256 + 81 * math.log(3) / 1024 - S3 / 16 * _acoth(S3)),
    (0, 1, 1.0, PI / 4, -7 / (12 * S2) + 3 * S3 / 8 + math.asinh(S2) / (8 * S2) - _acoth(S2) / 8),
    (0, 1, S2 / 2, PI / 3, 3 / 8 * math.sqrt(1.5) - S3 / 8 - _acoth(S3) / 8 + math.asinh(S2) / 16),
    (1, 1, 1.0, PI / 4, 1 / 30 - 4 * S2 / 15 + 3 * S3 / 10),
    (1, 1, S2 / 2, PI / 3, 1 / 20 - 3 / 20 * math.sqrt(1.5) + 3 * S3 / 20),
    (2, 0, S2 / 2, PI / 3, 1 / 40 + 1 / (20 * S3) + PI / 180 + 13 * _acoth(S2) / (120 * S2)),
    (
        2, 0, S2 / 4, PI / 3,
        1 / (20 * S3) - 29 / (640 * S2) - PI / 90 + 43 * math.log(3) / (7680 * S2) + _acot(S2) / 15,
    ),
]
TABLE9_PRINTED_2PI5 = (
    S5 / 16 - 5 / 48 + PI / 20 - 13 * math.log(5) / 192 - _acot(2) / 6 + 13 / 96 * math.asinh(2)
)


def _record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = (ok, detail)


def _dblquad_I(p, i, j, q, gamma):
    t = math.tan(gamma)
    val, _ = integrate.dblquad(
        lambda y, x: x**i * y**j * (1 + x * x + y * y) ** (p / 2),
        0.0, q, 0.0, lambda x: x * t,
        epsabs=1e-14, epsrel=1e-13,
    )
    return val


# --- criteria -------------------------------------------------------------------


def criterion_1():
    out, err = io.StringIO(), io.StringIO()
    t0 = time.perf_counter()
    code = cli.run(["moments", "--solid", "cube", "--p", "1", "--format", "json"], out, err)
    elapsed = time.perf_counter() - t0
    import json

    value = json.loads(out.getvalue())["value"]
    ok = code == 0 and abs(value - 0.66170718) < 1e-8 and elapsed < 0.1
    return ok, f"cube p=1 -> {value:.10f} in {elapsed * 1e3:.1f} ms"


def criterion_2():
    t0 = time.perf_counter()
    worst = 0.0
    for name in SOLIDS:
        v = platonic_moment(name, 1, Normalize.UNIT_VOLUME).value
        worst = max(worst, abs(v - REFERENCE.unit_volume_mean[name]))
    worst = max(worst, abs(ball_moment(1, Normalize.UNIT_VOLUME) - REFERENCE.unit_volume_mean["ball"]))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed < 1.0
    return ok, f"max deviation {worst:.1e}, {elapsed:.3f} s"


def criterion_3():
    lo, hi = REFERENCE.gamma_bounds
    worst, inside = 0.0, True
    for name in SOLIDS + ["ball"]:
        g = gamma_ratio(name)
        worst = max(worst, abs(g - REFERENCE.gamma[name]))
        inside = inside and lo < g < hi
    cube_v1 = get_recipe("cube").v1
    ok = worst < 1e-8 and inside and cube_v1 == 3.0
    return ok, f"max deviation {worst:.1e}, all inside (5/28, 1/3): {inside}"


def criterion_4():
    tetra = platonic_moment("tetrahedron", 2, Normalize.UNIT_VOLUME).value
    cube = platonic_moment("cube", 2, Normalize.UNIT_VOLUME).value
    e1 = abs(tetra - 9 / (10 * 3 ** (1 / 3)))
    e2 = abs(cube - 0.5)
    return max(e1, e2) < 1e-12, f"tetra err {e1:.1e}, cube err {e2:.1e}"


def criterion_5():
    worst, count = 0.0, 0
    for name in ("icosahedron", "dodecahedron"):
        r = get_recipe(name)
        for tag, printed in r.printed.items():
            if tag == "P33":
                v = platonic_moment(name, 1).value
            else:
                v = irr.overlap_moment_exact(r.recipes[tag], 1)
            worst = max(worst, abs(v - printed))
            count += 1
    return count == 20 and worst < 1e-9, f"{count} decimals, max deviation {worst:.1e}"


def criterion_6():
    worst_rec, worst_quad = 0.0, 0.0
    for i, j, q, g, printed in TABLE9:
        rec = auxint.I(1, i, j, q, g).value
        quad = _dblquad_I(1, i, j, q, g)
        worst_rec = max(worst_rec, abs(rec - printed))
        worst_quad = max(worst_quad, abs(quad - printed))
    rng = np.random.default_rng(20240611)
    worst_pyth = 0.0
    for _ in range(200):
        p = int(rng.choice([-1, 1, 3]))
        q = rng.uniform(0.1, 5.0)
        g = rng.uniform(0.05, 1.5)
        lhs = sum(auxint.I(p, i, j, q, g).value for i, j in ((0, 0), (2, 0), (0, 2)))
        rhs = auxint.I(p + 2, 0, 0, q, g).value
        worst_pyth = max(worst_pyth, abs(lhs - rhs) / abs(rhs))
    typo_gap = abs(TABLE9_PRINTED_2PI5 - TABLE9[5][4])
    ok = worst_rec < 1e-10 and worst_quad < 1e-10 and worst_pyth < 1e-11
    return ok, (
        f"{len(TABLE9)} rows: recurrence {worst_rec:.1e}, quadrature {worst_quad:.1e}; "
        f"closure {worst_pyth:.1e} rel; tabulated I00(1/2,2pi/5) form off by {typo_gap:.3f} (corrected form used)"
    )


def criterion_7():
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for name in ("cube", "octahedron", "icosahedron", "dodecahedron"):
        r = get_recipe(name)
        for tag in ("P21r", "P22r"):
            cfg = r.configurations[tag]
            for p in (-1, 1, 2, 3):
                a = irr.overlap_moment_exact(r.recipes[tag], p)
                b = irr.overlap_moment_numeric(cfg.A, cfg.B, p)
                worst = max(worst, abs(a - b))
            count += 1
    elapsed = time.perf_counter() - t0
    ok = count == 8 and worst < 1e-6 and elapsed < 30
    return ok, f"{count} diagrams x p in (-1,1,2,3): max deviation {worst:.1e}, {elapsed:.2f} s"


def criterion_8():
    t0 = time.perf_counter()
    worst, ok = 0.0, True
    for k, name in enumerate(SOLIDS):
        K = get_recipe(name).polytope()
        for m, p in enumerate((-1, 1, 3)):
            exact = platonic_moment(name, p).value
            est = estimate_moment(K, K, p, 10_000_000, seed=8, stream=3 * k + m)
            z = abs(est.mean - exact) / est.stderr
            worst = max(worst, z)
            ok = ok and z < 4
    elapsed = time.perf_counter() - t0
    return ok and elapsed < 60, f"15 cases at 1e7 samples: max |z| {worst:.2f}, {elapsed:.1f} s"


def _random_tetra(rng):
    while True:
        V = rng.normal(size=(4, 3)) * rng.uniform(0.5, 3.0) + rng.normal(size=3)
        if abs(np.linalg.det(V[1:] - V[0])) / 6 > 0.05:
            return V


def criterion_9():
    rng = np.random.default_rng(99)
    worst, ok, worst_scale = 0.0, True, 0.0
    for k in range(25):
        V = _random_tetra(rng)
        p = (1, -1, 3)[k % 3]
        exact = tetrahedron_moment(V, p)
        T = Polytope.convex_hull(V)
        est = estimate_moment(T, T, p, 1_000_000, seed=9, stream=k)
        z = abs(est.mean - exact) / est.stderr
        worst = max(worst, z)
        ok = ok and z < 4
        if p == 1:
            worst_scale = max(worst_scale, abs(tetrahedron_moment(2 * V, 1) - 2 * exact) / exact)
    ok = ok and worst_scale < 1e-10
    return ok, f"25 tetrahedra at 1e6 samples: max |z| {worst:.2f}; scaling rel err {worst_scale:.1e}"


def criterion_10():
    worst_l2 = 0.0
    for n in range(3, 13):
        target = (2 + math.cos(2 * PI / n)) / 3
        worst_l2 = max(
            worst_l2,
            abs(pg.polygon_moment(n, 2) - target),
            abs(pg.polygon_moment_limit_path(n, 2) - target),
        )
    worst_even = 0.0
    for n in range(3, 13):
        for p in range(4, 15, 2):
            worst_even = max(worst_even, abs(pg.even_moment_closed(n, p) - pg.polygon_moment(n, p)))
    # circumradius-1 square has side sqrt(2)
    square = pg.polygon_moment(4, 1) / S2
    unit_square = Polytope.polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    est = estimate_moment(unit_square, unit_square, 1, 10_000_000, seed=10)
    z = abs(est.mean - square) / est.stderr
    worst_limit = 0.0
    for n in range(3, 13):
        rep = pg.polygon_limit_checks(n)
        worst_limit = max(worst_limit, abs(rep.limit_numeric - rep.limit_p_minus2) / rep.limit_p_minus2)
    square_limit = abs(pg.limit_p_minus2(4) - PI)
    disk = abs(pg.disk_moment(1) - 128 / (45 * PI))
    disk2 = abs(pg.disk_moment(2) - 1)
    big = abs(pg.polygon_moment(2048, 1) - 128 / (45 * PI))
    ns = [32, 64, 128, 256]
    resid = [abs(pg.polygon_moment(n, 1) / pg.disk_moment(1) - (1 - PI**2 / (3 * n * n))) for n in ns]
    slope = -np.polyfit(np.log(ns), np.log(resid), 1)[0]
    ok = (
        worst_l2 < 1e-12
        and worst_even < 1e-9
        and z < 4
        and worst_limit < 1e-5
        and square_limit < 1e-14
        and disk < 1e-15
        and disk2 < 1e-15
        and big < 1e-5
        and slope >= 3.7
    )
    return ok, (
        f"L2 {worst_l2:.1e}, even forms {worst_even:.1e}, square MC |z| {z:.2f}, "
        f"p->-2 limit {worst_limit:.1e} rel, disk n=2048 {big:.1e}, asymptotic slope {slope:.2f}"
    )


def _p0_cases():
    cases = []
    for name in SOLIDS:
        for mode in Normalize:
            cases.append((f"platonic {name} {mode.value}", lambda n=name, m=mode: platonic_moment(n, 0, m).value))
        r = get_recipe(name)
        for tag, cfg in r.configurations.items():
            cases.append((f"{name} {tag} exact", lambda d=r.recipes[tag]: irr.overlap_moment_exact(d, 0)))
            if cfg.kind == "point_polygon":
                fn = irr.point_polygon_moment
            elif cfg.kind == "skew":
                fn = irr.skew_segments_moment
            else:
                fn = irr.overlap_moment_numeric
            cases.append((f"{name} {tag} {cfg.kind}", lambda f=fn, c=cfg: f(c.A, c.B, 0)))
        K = r.polytope()
        cases.append((f"{name} general", lambda K=K: general_moment(K, 0).value))
        cases.append((f"{name} mc", lambda K=K: estimate_moment(K, K, 0, 1000).mean))
    for mode in Normalize:
        cases.append((f"ball {mode.value}", lambda m=mode: ball_moment(0, m)))
    rng = np.random.default_rng(11)
    for k in range(5):
        V = _random_tetra(rng)
        cases.append((f"tetra {k}", lambda V=V: tetrahedron_moment(V, 0)))
    for n in range(3, 13):
        cases.append((f"polygon {n}", lambda n=n: pg.polygon_moment(n, 0)))
        cases.append((f"polygon {n} limit path", lambda n=n: pg.polygon_moment_limit_path(n, 0)))
    return cases


def criterion_11():
    cases = _p0_cases()
    bad = []
    for label, fn in cases:
        if abs(fn() - 1.0) > 1e-12:
            bad.append(label)
    ok = len(cases) >= 50 and not bad
    detail = f"{len(cases)} cases"
    if bad:
        detail += f", failing: {', '.join(bad[:5])}"
    return ok, detail


CRITERIA = {
    1: ("Robbins constant", criterion_1),
    2: ("unit-volume sweep", criterion_2),
    3: ("normalised distances", criterion_3),
    4: ("second moments", criterion_4),
    5: ("intermediate constants", criterion_5),
    6: ("auxiliary integrals", criterion_6),
    7: ("overlap certification", criterion_7),
    8: ("Monte Carlo sweep", criterion_8),
    9: ("irregular tetrahedra", criterion_9),
    10: ("polygons", criterion_10),
    11: ("p=0 normalization", criterion_11),
}


def _line(number: int) -> str:
    title = CRITERIA[number][0]
    if number not in RESULTS:
        return f"criterion {number:2d} ({title}): NOT RUN"
    ok, detail = RESULTS[number]
    return f"criterion {number:2d} ({title}): {'PASS' if ok else 'FAIL'}  {detail}"


def _run(number: int) -> bool:
    try:
        ok, detail = CRITERIA[number][1]()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"error: {exc!r}"
    _record(number, ok, detail)
    return ok


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok = _run(number)
    print(_line(number))
    assert ok, _line(number)


def main() -> int:
    failed = 0
    for number in sorted(CRITERIA):
        failed += not _run(number)
        print(_line(number), flush=True)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
