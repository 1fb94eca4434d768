import math

import numpy as np
import pytest

from meandist import MeanDistError
from meandist.catalog import get_recipe, platonic_moment
from meandist.geom import Polytope, measure
from meandist.oracle import estimate_moment
from meandist.reduction import (
    SYSTEMS,
    general_moment,
    second_moment_pair,
    solve_solid_system,
    tetrahedron_moment,
    theorem_basic_weights,
)

SOLIDS = ["tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron"]
TETRA = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)
TETRA_L20 = 1.22365592432929105225
TETRA_L11 = 1.15115548023572581950
ROBBINS = 0.66170718226717623515


def _l_prism():
    base = [[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]]
    V = [[x, y, 0] for x, y in base] + [[x, y, 1] for x, y in base]
    n = len(base)
    faces = [tuple(range(n))[::-1], tuple(range(n, 2 * n))]
    faces += [(i, (i + 1) % n, n + (i + 1) % n, n + i) for i in range(n)]
    return Polytope.solid(V, faces)


def _random_hexahedron(rng):
    # perturbed cube: eight points in general position, hull has triangle faces
    V = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
    return Polytope.convex_hull(V + rng.uniform(-0.15, 0.15, size=V.shape))


def test_tetra_solved_form():
    value = solve_solid_system("tetrahedron", 1, {"P11": TETRA_L11, "P20": TETRA_L20})
    assert value == pytest.approx(3 / 35 * (3 * TETRA_L11 + 2 * TETRA_L20), rel=1e-15)
    # printed unit-volume mean 0.72946242 divided by vol^(1/3) = 3^(-1/3)
    assert value == pytest.approx(0.72946242 / 3 ** (1 / 3), abs=1e-8)


@pytest.mark.parametrize("name", SOLIDS)
def test_p_zero_with_unit_irreducibles(name):
    ones = {t: 1.0 for t in SYSTEMS[name].irreducible_set}
    assert solve_solid_system(name, 0, ones) == pytest.approx(1.0, abs=1e-12)


def test_cube_gives_robbins():
    irr = get_recipe("cube").irreducibles(1)
    assert solve_solid_system("cube", 1, irr) == pytest.approx(ROBBINS, abs=1e-14)


def test_missing_irreducible():
    with pytest.raises(MeanDistError) as exc:
        solve_solid_system("cube", 1, {"P11": 1.0})
    assert exc.value.code == "MISSING_IRREDUCIBLE"


def test_p_out_of_range():
    with pytest.raises(MeanDistError) as exc:
        solve_solid_system("tetrahedron", -2, {"P11": 1.0, "P20": 1.0})
    assert exc.value.code == "P_OUT_OF_RANGE"


@pytest.mark.parametrize("name", SOLIDS)
def test_raw_system_resolves_to_solved_form(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    system = SYSTEMS[name]
    for p in rng.choice(np.arange(-1, 12), size=5, replace=False):
        # the identity is linear, so arbitrary irreducible values must work too
        values = {t: float(rng.uniform(0.5, 5.0)) for t in system.irreducible_set}
        raw = system.solve(int(p), values)["P33"]
        assert raw == pytest.approx(solve_solid_system(name, int(p), values), rel=1e-11)


def _scaled(obj, s):
    if isinstance(obj, Polytope):
        return Polytope(obj.dim_ambient, obj.dim_intrinsic, s * obj.vertices, obj.faces)
    if isinstance(obj, list):
        return [_scaled(o, s) for o in obj]
    return s * np.asarray(obj, dtype=float)


@pytest.mark.parametrize("name", SOLIDS)
def test_rescaled_geometry_gives_scaled_moment(name):
    from meandist.catalog import Configuration, evaluate_configuration

    r = get_recipe(name)
    for p in (0, 1, 2):
        base = solve_solid_system(name, p, {t: evaluate_configuration(c, p) for t, c in r.configurations.items()})
        for s in (0.5, 3.0):
            irr = {
                t: evaluate_configuration(Configuration(c.kind, _scaled(c.A, s), _scaled(c.B, s)), p)
                for t, c in r.configurations.items()
            }
            assert solve_solid_system(name, p, irr) == pytest.approx(s**p * base, rel=1e-11)


def test_cube_even_moments():
    assert platonic_moment("cube", 2).value == pytest.approx(0.5, abs=1e-14)
    # E(sum D_i^2)^2 with D = U - U': 3 E D^4 + 6 (E D^2)^2 = 3/15 + 6/36
    assert platonic_moment("cube", 4).value == pytest.approx(11 / 30, abs=1e-14)


def test_regular_tetra_moments():
    assert tetrahedron_moment(TETRA, 1) == pytest.approx(3 / 35 * (3 * TETRA_L11 + 2 * TETRA_L20), rel=1e-13)
    vol = 1 / 3
    assert tetrahedron_moment(TETRA, 1) / vol ** (1 / 3) == pytest.approx(0.72946242, abs=1e-8)
    assert tetrahedron_moment(TETRA, 2) / vol ** (2 / 3) == pytest.approx(9 / (10 * 3 ** (1 / 3)), abs=1e-12)
    assert tetrahedron_moment(TETRA, 0) == 1.0


def test_tetra_general_formula_matches_catalog():
    for p in (-1, 1, 2, 3, 5):
        assert tetrahedron_moment(TETRA, p) == pytest.approx(platonic_moment("tetrahedron", p).value, rel=1e-12)


def test_tetra_second_moment_random():
    rng = np.random.default_rng(31)
    for _ in range(10):
        V = rng.normal(size=(4, 3))
        T = Polytope.convex_hull(V)
        assert tetrahedron_moment(V, 2) == pytest.approx(second_moment_pair(T, T), rel=1e-11)


def test_tetra_scaling_and_motion():
    rng = np.random.default_rng(32)
    V = rng.normal(size=(4, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    for p in (-1, 1, 3):
        base = tetrahedron_moment(V, p)
        assert tetrahedron_moment(2 * V, p) == pytest.approx(2**p * base, rel=1e-12)
        assert tetrahedron_moment(V @ Q.T + 4.0, p) == pytest.approx(base, rel=1e-12)


def test_tetra_against_monte_carlo():
    rng = np.random.default_rng(33)
    for k in range(5):
        V = rng.normal(size=(4, 3))
        T = Polytope.convex_hull(V)
        est = estimate_moment(T, T, 1, 400_000, seed=33, stream=k)
        assert est.agrees(tetrahedron_moment(V, 1))


def test_degenerate_tetra():
    with pytest.raises(MeanDistError) as exc:
        tetrahedron_moment([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], 1)
    assert exc.value.code == "DEGENERATE_TETRAHEDRON"


@pytest.mark.parametrize("name", SOLIDS)
def test_weights_sum_to_fifteen(name):
    assert theorem_basic_weights(get_recipe(name).polytope()).total() == pytest.approx(15.0, rel=1e-12)


def test_weights_sum_nonconvex():
    assert theorem_basic_weights(_l_prism()).total() == pytest.approx(15.0, rel=1e-12)


def _random_scaling_points(K, rng):
    V = K.vertices
    C = V.mean(axis=0) + rng.normal(size=3)
    C_k = []
    for f in K.faces:
        w = rng.uniform(-0.5, 1.5, size=len(f))
        C_k.append((w / w.sum()) @ V[list(f)])
    W0 = theorem_basic_weights(K)
    D_j = []
    for a, b in sorted(W0.body_edge_weights):
        t = rng.uniform(-1.0, 2.0)
        D_j.append(V[a] + t * (V[b] - V[a]))
    return C, np.array(C_k), np.array(D_j)


def _p2_combination(K, W):
    faces = [K.face_polytope(k) for k in range(len(K.faces))]
    total = sum(w * second_moment_pair(faces[k], faces[kk]) for (k, kk), w in W.face_pair_weights.items())
    total += sum(w * second_moment_pair(K, K.edge_polytope(e)) for e, w in W.body_edge_weights.items())
    return 2 * total / (8 * 7)


@pytest.mark.parametrize("which", ["cube", "octahedron", "dodecahedron", "hexahedron", "l-prism"])
def test_weights_effect_independent_of_scaling_points(which):
    rng = np.random.default_rng(34)
    if which == "hexahedron":
        K = _random_hexahedron(rng)
    elif which == "l-prism":
        K = _l_prism()
    else:
        K = get_recipe(which).polytope()
    exact = second_moment_pair(K, K)
    assert _p2_combination(K, theorem_basic_weights(K)) == pytest.approx(exact, rel=1e-12)
    for _ in range(3):
        C, C_k, D_j = _random_scaling_points(K, rng)
        W = theorem_basic_weights(K, C, C_k, D_j)
        assert W.total() == pytest.approx(15.0, rel=1e-10)
        assert abs(_p2_combination(K, W) - exact) < 1e-10


def test_scaling_point_off_hull():
    K = get_recipe("cube").polytope()
    W = theorem_basic_weights(K)
    C_k = W.C_k.copy()
    C_k[0] = C_k[0] + W.C_k[0] - W.C + 0.3
    with pytest.raises(MeanDistError) as exc:
        theorem_basic_weights(K, C_k=C_k)
    assert exc.value.code == "SCALING_POINT_OFF_HULL"


def test_general_moment_cube():
    K = get_recipe("cube").polytope()
    res = general_moment(K, 1, budget=2_000_000, seed=1)
    assert "monte-carlo" in res.provenance
    assert abs(res.value - ROBBINS) < 4 * res.error
    two = general_moment(K, 2)
    assert two.provenance == "closed-form"
    assert two.value == pytest.approx(0.5, abs=1e-13)
    four = general_moment(K, 4, budget=1_000_000, seed=2)
    assert abs(four.value - 11 / 30) < 4 * four.error


def test_general_moment_octahedron():
    K = get_recipe("octahedron").polytope()
    res = general_moment(K, 1, budget=2_000_000, seed=3)
    assert abs(res.value - 0.7248071) < 4 * res.error + 1e-7
    assert res.value / measure(K) ** (1 / 3) == pytest.approx(0.65853073, abs=4 * res.error)


def test_general_moment_random_hexahedron():
    K = _random_hexahedron(np.random.default_rng(35))
    res = general_moment(K, 1, budget=2_000_000, seed=4)
    direct = estimate_moment(K, K, 1, 2_000_000, seed=5)
    assert abs(res.value - direct.mean) < 4 * math.hypot(res.error, direct.stderr)


def test_general_moment_nonconvex_second_moment():
    K = _l_prism()
    assert general_moment(K, 2).value == pytest.approx(second_moment_pair(K, K), rel=1e-12)


def test_general_moment_budget():
    K = get_recipe("cube").polytope()
    with pytest.raises(MeanDistError) as exc:
        general_moment(K, 1, budget=1000)
    assert exc.value.code == "BUDGET_EXCEEDED"
    assert general_moment(K, 0).value == 1.0
