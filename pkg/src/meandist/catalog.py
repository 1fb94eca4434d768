"""Platonic solids: coordinates, irreducible-term recipes and reference constants.

Every irreducible term is stored as an expansion into fundamental-triangle
integrals (an ``OverlapDiagram``; point/polygon terms are diagrams whose
pieces carry only the constant coefficient).  The expansions are valid for
any integer p >= -1 because only the kernel exponent changes.  Each recipe
also records the pair of polytopes it describes so it can be checked
against the geometric evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import fail
from .geom import Polytope, first_intrinsic_volume, measure
from .irreducible import FundamentalPiece, OverlapDiagram, overlap_moment_exact
from .reduction import PHI, SQ5, SYSTEMS, canonical_solid, solve_solid_system
from .results import CLOSED_FORM, MomentResult, Normalize

PI = math.pi
S2 = math.sqrt(2)
S3 = math.sqrt(3)


def _piece(q, gamma, h, a00=0.0, a10=0.0, a01=0.0, a11=0.0, a20=0.0, a02=0.0) -> FundamentalPiece:
    return FundamentalPiece(1, float(q), float(gamma), (a00, a10, a01, a11, a20, a02), float(h))


def _pp(fold, area, h, terms) -> OverlapDiagram:
    """Point/polygon expansion: fold * h^(2+p) / area * sum c I00(q, gamma)."""
    return OverlapDiagram(fold, [_piece(q, g, h, a00=c) for c, q, g in terms], area, 1.0)


# --- configurations ----------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Geometric meaning of an irreducible tag: which evaluator, on what."""

    kind: str  # "point_polygon" | "skew" | "overlap"
    A: object
    B: object


def _seg(a, b) -> Polytope:
    return Polytope.segment(np.array(a, dtype=float), np.array(b, dtype=float))


def _poly(vs) -> Polytope:
    return Polytope.polygon(np.array(vs, dtype=float))


def _boundary(face: Polytope) -> list:
    v = face.vertices
    return [Polytope.segment(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


# --- recipes -----------------------------------------------------------------


@dataclass(frozen=True)
class SolidRecipe:
    name: str
    vertices: np.ndarray
    edge_length: float
    face_area: float
    volume: float
    v1: float
    system: str
    recipes: dict = field(default_factory=dict)
    configurations: dict = field(default_factory=dict)
    printed: dict = field(default_factory=dict)

    def polytope(self) -> Polytope:
        return Polytope.convex_hull(self.vertices)

    def irreducibles(self, p) -> dict:
        return {tag: overlap_moment_exact(d, p) for tag, d in self.recipes.items()}


def _octa_family(h, q_big, q_small, scale):
    """The shared 21r / 22r diagrams of the octahedron (and a scaled icosahedron)."""
    area, perim = S3 / 2, 3 * S2
    d21 = OverlapDiagram(
        6,
        [
            _piece(q_big, PI / 3, h, a00=4 * S2 / 3, a10=-1 / S3, a01=-1.0),
            _piece(q_small, PI / 3, h, a00=-S2 / 3, a10=2 / S3),
        ],
        area,
        perim,
        scale,
    )
    d22 = OverlapDiagram(
        6,
        [
            _piece(q_big, PI / 3, h, a00=4 / (3 * S3), a10=-S2 / 3, a01=-math.sqrt(2 / 3), a20=-1 / S3, a11=1.0),
            _piece(q_small, PI / 3, h, a00=-1 / (3 * S3), a10=2 * S2 / 3, a20=-2 / S3),
        ],
        area,
        area,
        scale,
    )
    return d21, d22


def _cyc(v):
    return [v, [v[2], v[0], v[1]], [v[1], v[2], v[0]]]


def _tetrahedron() -> SolidRecipe:
    V = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)
    h20 = 2 / S3
    recipes = {
        "P20": _pp(6, S3 / 2, h20, [(1.0, S2 / 4, PI / 3)]),
        "P11": _pp(8, 2.0, 1.0, [(1.0, S2 / 2, PI / 4)]),
    }
    configs = {
        "P20": Configuration("point_polygon", _poly(V[:3]), V[3]),
        "P11": Configuration("skew", _seg(V[0], V[1]), _seg(V[2], V[3])),
    }
    l = S2
    return SolidRecipe(
        "tetrahedron", V, l, S3 / 2, 1 / 3, 3 * l * math.acos(-1 / 3) / PI, "tetrahedron", recipes, configs, {}
    )


def _cube() -> SolidRecipe:
    V = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
    top = _poly([[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]])
    bottom = _poly([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])
    q, g = 1.0, PI / 4
    recipes = {
        "P20": _pp(2, 1.0, 1.0, [(1.0, q, g)]),
        "P11": _pp(2, 1.0, 1.0, [(1.0, q, g)]),
        "P21r": OverlapDiagram(8, [_piece(q, g, 1.0, a00=2.0, a10=-1.0, a01=-1.0)], 1.0, 4.0),
        "P22r": OverlapDiagram(8, [_piece(q, g, 1.0, a00=1.0, a10=-1.0, a01=-1.0, a11=1.0)], 1.0, 1.0),
    }
    configs = {
        "P20": Configuration("point_polygon", top, np.zeros(3)),
        "P11": Configuration("skew", _seg([0, 0, 0], [0, 1, 0]), _seg([0, 1, 1], [1, 1, 1])),
        "P21r": Configuration("overlap", top, _boundary(bottom)),
        "P22r": Configuration("overlap", top, bottom),
    }
    return SolidRecipe("cube", V, 1.0, 1.0, 1.0, 3.0, "cube", recipes, configs, {})


def _octahedron() -> SolidRecipe:
    V = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    h = 2 / S3
    nu = S3 / 2
    d21, d22 = _octa_family(h, S2 / 2, S2 / 4, 1.0)
    recipes = {
        "P20": _pp(2, nu, h, [(1.0, S2 / 2, PI / 3), (-1.0, S2 / 4, PI / 3)]),
        "P11": _pp(1, S3, h, [(4.0, S2 / 4, PI / 3), (2.0, S2 / 2, PI / 3)]),
        "P21r": d21,
        "P22r": d22,
    }
    low = _poly([[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    high = _poly([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    configs = {
        "P20": Configuration("point_polygon", low, np.array([0.0, 0.0, 1.0])),
        "P11": Configuration("skew", _seg([1, 0, 0], [0, 1, 0]), _seg([0, 0, -1], [-1, 0, 0])),
        "P21r": Configuration("overlap", low, _boundary(high)),
        "P22r": Configuration("overlap", low, high),
    }
    l = S2
    return SolidRecipe(
        "octahedron", V, l, nu, 4 / 3, 6 * l * math.acos(1 / 3) / PI, "octahedron", recipes, configs, {}
    )


def _icosahedron() -> SolidRecipe:
    f = PHI
    V = []
    for a in (1, -1):
        for b in (1, -1):
            V += _cyc([a * f, b * 1.0, 0.0])
    V = np.array(V, dtype=float)
    t25, t5, t3 = 2 * PI / 5, PI / 5, PI / 3
    h_d = math.sqrt(2 + 2 / SQ5)
    h_g = math.sqrt(14 / 3 + 2 * SQ5)
    recipes = {
        "P11d": _pp(
            2,
            math.sqrt(10 - 2 * SQ5),
            h_d,
            [(2.0, 1 / (2 * f**2), t25), (-1.0, 0.5, t5), (1.0, 0.5, t25)],
        ),
        "P11g": _pp(2, 2 * S3, h_g, [(2.0, 1 / (2 * f**2), t3), (1.0, 1 / f**2, t3)]),
        "P11f": _pp(
            2,
            4.0,
            f,
            [
                (1.0, 1 / f, math.atan(f**2)),
                (1.0, f, math.atan(1 / f**2)),
                (-1.0, 1 / f**2, math.atan(f)),
                (-1.0, 1 / f, math.atan(1 / f)),
            ],
        ),
        "P11t": _pp(
            2,
            math.sqrt(2 * (5 + SQ5)),
            h_d,
            [(1.0, 0.5, t5), (-1.0, 0.5, t25), (1.0, f, t5)],
        ),
        "P20e": _pp(
            2,
            S3,
            2 * f / S3,
            [
                (1.0, 1 / (2 * f**2), t3),
                (-1.0, 1 / (2 * f**2), math.atan(math.sqrt(15) + 2 * S3)),
                (1.0, f**2 / 2, math.atan(math.sqrt(15) - 2 * S3)),
            ],
        ),
        "P20r": _pp(2, S3, 2 * f**2 / S3, [(1.0, 1 / f**2, t3), (-1.0, 1 / (2 * f**2), t3)]),
        "P20f": _pp(
            2,
            S3,
            2 / S3,
            [
                (1.0, f**2 / 2, t3),
                (-1.0, SQ5 / 2, math.atan(math.sqrt(3 / 5))),
                (-1.0, f**2 / 2, math.atan(math.sqrt(15) - 2 * S3)),
            ],
        ),
    }
    d21, d22 = _octa_family(S2 * f**2 / S3, 1 / f**2, 1 / (2 * f**2), S2)
    recipes["P21r"] = d21
    recipes["P22r"] = d22
    A = _seg([1, 0, f], [-1, 0, f])
    face = _poly([[1, 0, f], [-1, 0, f], [0, f, 1]])
    # the face opposite to it is its point reflection
    opposite = _poly([[-1, 0, -f], [1, 0, -f], [0, -f, -1]])
    configs = {
        "P11d": Configuration("skew", A, _seg([0, f, 1], [f, 1, 0])),
        "P11f": Configuration("skew", A, _seg([f, 1, 0], [f, -1, 0])),
        "P11t": Configuration("skew", A, _seg([1, 0, -f], [f, 1, 0])),
        "P11g": Configuration("skew", A, _seg([1, 0, -f], [0, f, -1])),
        "P20e": Configuration("point_polygon", face, np.array([f, -1, 0])),
        "P20r": Configuration("point_polygon", face, np.array([1, 0, -f])),
        "P20f": Configuration("point_polygon", face, np.array([f, 1, 0])),
        "P21r": Configuration("overlap", face, _boundary(opposite)),
        "P22r": Configuration("overlap", face, opposite),
    }
    printed = {
        "P11d": 2.0431430525135,
        "P11g": 3.1806727116118,
        "P11f": 2.3977565034445,
        "P11t": 2.8940519649490,
        "P20e": 2.688729552544,
        "P20r": 3.28394367574,
        "P20f": 2.2472771159735,
        "P21r": 3.1819213671057,
        "P22r": 3.12998447304770,
        "P33": 1.66353152568500,
    }
    l = 2.0
    return SolidRecipe(
        "icosahedron",
        V,
        l,
        S3,
        10 * (3 + SQ5) / 3,
        15 * l * math.asin(2 / 3) / PI,
        "icosahedron",
        recipes,
        configs,
        printed,
    )


def _dodecahedron() -> SolidRecipe:
    f = PHI
    V = [[a, b, c] for a in (f, -f) for b in (f, -f) for c in (f, -f)]
    for a in (1, -1):
        for b in (1, -1):
            V += _cyc([0.0, a * 1.0, b * f**2])
    V = np.array(V, dtype=float)
    t25, t5, t3 = 2 * PI / 5, PI / 5, PI / 3
    nu = math.sqrt(25 + 10 * SQ5)
    h_big = math.sqrt(10 + 22 / SQ5)
    h_e = math.sqrt(2 + 2 / SQ5)
    a4, a2, a1 = 1 / (2 * f**4), 1 / (2 * f**2), 1 / f
    recipes = {
        "P11d": _pp(
            2,
            2 * S3,
            (1 + SQ5) / S3,
            [
                (1.0, a2, t3),
                (1.0, SQ5 / 2, t3),
                (-1.0, a2, math.atan(S3 * (2 + SQ5))),
                (-1.0, SQ5 / 2, math.atan(math.sqrt(3 / 5))),
            ],
        ),
        "P11g": _pp(2, math.sqrt(10 - 2 * SQ5), h_big, [(2.0, a4, t25), (-1.0, a2, t5), (1.0, a2, t25)]),
        "P11f": _pp(
            2,
            4.0,
            f**2,
            [
                (1.0, 1 / f**2, math.atan(SQ5 * f)),
                (1.0, SQ5 / f, math.atan(1 / (SQ5 * f))),
                (-1.0, 1 / f**2, math.atan(f)),
                (-1.0, 1 / f, math.atan(1 / f)),
            ],
        ),
        "P11t": _pp(2, math.sqrt(2 * (5 + SQ5)), h_big, [(1.0, a1, t5), (1.0, a2, t5), (-1.0, a2, t25)]),
        "P20e": _pp(
            2,
            nu,
            h_e,
            [
                (1.0, 0.5, t5),
                (-1.0, 0.5, t25),
                (-1.0, f**2 / 2, t5),
                (1.0, 3 * f / 2, math.atan(math.sqrt(5 - 2 * SQ5) / 3)),
                (1.0, f**2 / 2, math.atan(math.sqrt(5 * (5 - 2 * SQ5)))),
            ],
        ),
        "P20r": _pp(2, nu, h_big, [(1.0, a1, t5), (1.0, a2, t25), (-1.0, a2, t5), (-1.0, a4, t25)]),
        "P20f": _pp(
            2,
            nu,
            2 * math.sqrt(1 + 2 / SQ5),
            [
                (1.0, f**2 / 2, t5),
                (-1.0, a2, t25),
                (1.0, a2, math.atan(math.sqrt(5 * (5 + 2 * SQ5)))),
                (-1.0, 0.5, t5),
                (-1.0, f**2 / 2, math.atan(math.sqrt(85 - 38 * SQ5))),
            ],
        ),
        "P21r": OverlapDiagram(
            10,
            [
                _piece(a4, t25, h_big, a00=4 / SQ5 - 2, a10=2 * math.sqrt(1 - 2 / SQ5)),
                _piece(a2, t5, h_big, a00=2 / SQ5, a10=-math.sqrt(2 - 2 / SQ5)),
                _piece(a2, t25, h_big, a00=-2 / SQ5, a10=math.sqrt(2 - 2 / SQ5)),
                _piece(a1, t5, h_big, a00=4 / 5 * (5 + SQ5), a01=-1.0, a10=-math.sqrt(1 + 2 / SQ5)),
            ],
            nu,
            10.0,
        ),
        "P22r": OverlapDiagram(
            10,
            [
                _piece(
                    a2,
                    t5,
                    h_big,
                    a00=2 / 5 * math.sqrt(5 + 2 * SQ5),
                    a10=-2 / SQ5 - 2,
                    a20=math.sqrt(2 + 2 / SQ5),
                ),
                _piece(
                    a2,
                    t25,
                    h_big,
                    a00=-2 / 5 * math.sqrt(5 + 2 * SQ5),
                    a10=2 / SQ5 + 2,
                    a20=-math.sqrt(2 + 2 / SQ5),
                ),
                _piece(
                    a4,
                    t25,
                    h_big,
                    a00=-2 / 5 * math.sqrt(5 - 2 * SQ5),
                    a10=4 / SQ5,
                    a20=-2 * math.sqrt(1 + 2 / SQ5),
                ),
                _piece(
                    a1,
                    t5,
                    h_big,
                    a00=4 / 5 * math.sqrt(50 + 22 * SQ5),
                    a01=-2 * math.sqrt((5 + 2 * SQ5) / 5),
                    a10=-4 / SQ5 - 2,
                    a11=1.0,
                    a20=math.sqrt(1 - 2 / SQ5),
                ),
            ],
            nu,
            nu,
        ),
    }
    A = _seg([0, f**2, 1], [0, f**2, -1])
    face = _poly([[1, 0, -(f**2)], [f, f, -f], [0, f**2, -1], [-f, f, -f], [-1, 0, -(f**2)]])
    opposite = _poly([[-1, 0, f**2], [-f, -f, f], [0, -(f**2), 1], [f, -f, f], [1, 0, f**2]])
    configs = {
        "P11d": Configuration("skew", A, _seg([f, f, -f], [1, 0, -(f**2)])),
        "P11g": Configuration("skew", A, _seg([f, -f, f], [f**2, -1, 0])),
        "P11f": Configuration("skew", A, _seg([1, 0, -(f**2)], [-1, 0, -(f**2)])),
        "P11t": Configuration("skew", A, _seg([f, -f, -f], [0, -(f**2), -1])),
        "P20e": Configuration("point_polygon", face, np.array([0, f**2, 1])),
        "P20r": Configuration("point_polygon", face, np.array([0, -(f**2), 1])),
        "P20f": Configuration("point_polygon", face, np.array([0, -(f**2), -1])),
        "P21r": Configuration("overlap", face, _boundary(opposite)),
        "P22r": Configuration("overlap", face, opposite),
    }
    printed = {
        "P11d": 3.1367199950978,
        "P11g": 4.60478605392525,
        "P11f": 3.770095521642,
        "P11t": 5.04162416571318,
        "P20e": 3.346942678627,
        "P20r": 4.87605984948,
        "P20f": 4.000363965317,
        "P22r": 4.69357209587,
        "P21r": 4.808558828667,
        "P33": 2.533488631644,
    }
    l = 2.0
    return SolidRecipe(
        "dodecahedron",
        V,
        l,
        nu,
        30 + 14 * SQ5,
        15 * l * math.atan(2) / PI,
        "dodecahedron",
        recipes,
        configs,
        printed,
    )


_BUILDERS = {
    "tetrahedron": _tetrahedron,
    "cube": _cube,
    "octahedron": _octahedron,
    "icosahedron": _icosahedron,
    "dodecahedron": _dodecahedron,
}


@lru_cache(maxsize=None)
def _recipe(name: str) -> SolidRecipe:
    return _BUILDERS[name]()


def get_recipe(name: str) -> SolidRecipe:
    try:
        key = canonical_solid(name)
    except Exception:
        raise fail("UNKNOWN_SOLID", f"unknown solid {name!r}") from None
    return _recipe(key)


def evaluate_configuration(cfg: Configuration, p) -> float:
    """Evaluate a recipe's configuration with the geometric evaluators."""
    from . import irreducible as irr

    if cfg.kind == "point_polygon":
        return irr.point_polygon_moment(cfg.A, cfg.B, p)
    if cfg.kind == "skew":
        return irr.skew_segments_moment(cfg.A, cfg.B, p)
    return irr.overlap_moment_numeric(cfg.A, cfg.B, p)


# --- moments -------------------------------------------------------------------


def _normalizer(recipe: SolidRecipe, p, mode: Normalize) -> float:
    if mode is Normalize.UNIT_VOLUME:
        return recipe.volume ** (p / 3)
    if mode is Normalize.UNIT_V1:
        return recipe.v1**p
    return 1.0


def platonic_moment(name: str, p, normalize=Normalize.NONE) -> MomentResult:
    """E|X - Y|^p for two uniform points in a Platonic solid, closed form."""
    recipe = get_recipe(name)
    mode = Normalize.parse(normalize)
    if float(p) != int(p) or int(p) < -1:
        raise fail("P_OUT_OF_RANGE", f"p must be an integer >= -1, got {p}")
    p = int(p)
    if p == 0:
        return MomentResult(1.0, CLOSED_FORM, 0.0, {"solid": recipe.name, "normalize": mode.value})
    irreducibles = recipe.irreducibles(p)
    raw = solve_solid_system(recipe.system, p, irreducibles)
    value = raw / _normalizer(recipe, p, mode)
    # recurrences stay well inside double precision; 1e-13 relative is a safe bound
    return MomentResult(
        value,
        CLOSED_FORM,
        abs(value) * 1e-13,
        {"solid": recipe.name, "normalize": mode.value, "irreducibles": irreducibles},
    )


def ball_moment(p, normalize=Normalize.NONE, radius: float = 1.0) -> float:
    """E|X - Y|^p in a ball: 72 (2r)^p / ((p+3)(p+4)(p+6))."""
    mode = Normalize.parse(normalize)
    if float(p) != int(p) or int(p) < -1:
        raise fail("P_OUT_OF_RANGE", f"p must be an integer >= -1, got {p}")
    if p == 0:
        return 1.0
    r = radius
    if mode is Normalize.UNIT_VOLUME:
        r = (3 / (4 * PI)) ** (1 / 3)
    elif mode is Normalize.UNIT_V1:
        # V1 of a ball is twice its mean width, 4r
        r = 0.25
    return 72 * (2 * r) ** p / ((p + 3) * (p + 4) * (p + 6))


# --- reference constants ----------------------------------------------------------


@dataclass(frozen=True)
class ReferenceConstants:
    """Printed reference values (unit-volume means, V1 per edge, Gamma)."""

    unit_volume_mean: dict
    v1_per_edge: dict
    volume_per_edge_cubed: dict
    gamma: dict
    gamma_bounds: tuple


REFERENCE = ReferenceConstants(
    unit_volume_mean={
        "tetrahedron": 0.72946242,
        "cube": 0.66170718,
        "octahedron": 0.65853073,
        "icosahedron": 0.64131249,
        "dodecahedron": 0.64252068,
        "ball": 0.63807479,
    },
    # cube: 12 right-angle edges give 3, not the tabulated 6
    v1_per_edge={
        "tetrahedron": 3 * math.acos(-1 / 3) / PI,
        "cube": 3.0,
        "octahedron": 6 * math.acos(1 / 3) / PI,
        "dodecahedron": 15 * math.atan(2) / PI,
        "icosahedron": 15 * math.asin(2 / 3) / PI,
    },
    volume_per_edge_cubed={
        "tetrahedron": S2 / 12,
        "cube": 1.0,
        "octahedron": S2 / 3,
        "dodecahedron": (15 + 7 * SQ5) / 4,
        "icosahedron": 5 * (3 + SQ5) / 12,
    },
    gamma={
        "tetrahedron": 0.19601928,
        "octahedron": 0.21800285,
        "cube": 0.22056906,
        "icosahedron": 0.23872552,
        "dodecahedron": 0.23963024,
        "ball": 0.25714286,
    },
    gamma_bounds=(5 / 28, 1 / 3),
)


def gamma_ratio(name: str) -> float:
    """Normalised mean distance L / V1 (scale free)."""
    if str(name).lower() == "ball":
        return ball_moment(1, Normalize.UNIT_V1)
    return platonic_moment(name, 1, Normalize.UNIT_V1).value


def check_geometry(name: str) -> dict:
    """Volume and V1 of the recipe solid recomputed from its vertices."""
    recipe = get_recipe(name)
    K = recipe.polytope()
    return {
        "volume": measure(K),
        "v1": first_intrinsic_volume(K),
        "stored_volume": recipe.volume,
        "stored_v1": recipe.v1,
    }


def table_rows(which: str) -> list:
    """Rows (name, value) of the unit-volume, normalised or intrinsic-volume tables."""
    order = ["tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron"]
    if which == "unit-volume":
        rows = [(n, platonic_moment(n, 1, Normalize.UNIT_VOLUME).value) for n in order]
        rows.append(("ball", ball_moment(1, Normalize.UNIT_VOLUME)))
        return sorted(rows, key=lambda r: r[1])
    if which == "normalised":
        rows = [("lower bound", REFERENCE.gamma_bounds[0])]
        rows += sorted(((n, gamma_ratio(n)) for n in order + ["ball"]), key=lambda r: r[1])
        rows.append(("upper bound", REFERENCE.gamma_bounds[1]))
        return rows
    if which == "intrinsic":
        return [(n, REFERENCE.v1_per_edge[n]) for n in order]
    raise fail("UNKNOWN_TABLE", f"unknown table {which!r}")
