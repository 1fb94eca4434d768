"""Crofton reduction layer.

Per-solid reduction systems (raw equations plus their solved forms), the
unit-weight vertex/face and edge/edge formula for arbitrary tetrahedra, and
the face-pair / body-edge weights that reduce any closed polyhedron to
pairs of its faces and edges.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import irreducible as irr
from .errors import fail
from .geom import Polytope, Relation, affine_relation, measure, project_point
from .results import CLOSED_FORM, MONTE_CARLO, QUADRATURE, MomentResult

PHI = (1 + math.sqrt(5)) / 2
SQ5 = math.sqrt(5)

SOLIDS = ("tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron")
_ALIASES = {"tetra": "tetrahedron", "octa": "octahedron", "icosa": "icosahedron", "dodeca": "dodecahedron"}


def canonical_solid(tag: str) -> str:
    name = _ALIASES.get(str(tag).lower(), str(tag).lower())
    if name not in SOLIDS:
        raise fail("UNKNOWN_SOLID", f"no reduction system for {tag!r}")
    return name


# --- raw systems ---------------------------------------------------------------
#
# An equation (X, ((c, Y), ...)) stands for  p P_X = sum c (P_Y - P_X).
# Mixtures are fixed linear combinations; everything else is irreducible.

_F = Fraction


@dataclass(frozen=True)
class ReductionSystem:
    tag: str
    equations: tuple
    mixtures: dict
    irreducible_set: tuple

    @property
    def unknowns(self) -> tuple:
        return tuple(lhs for lhs, _ in self.equations)

    def _expand(self, name: str) -> dict:
        """Linear form of ``name`` over unknowns and irreducibles."""
        if name in self.mixtures:
            out: dict = {}
            for c, sub in self.mixtures[name]:
                for k, v in self._expand(sub).items():
                    out[k] = out.get(k, 0.0) + float(c) * v
            return out
        return {name: 1.0}

    def solve(self, p, irreducibles: dict) -> dict:
        """Numeric solve of the raw system; returns every unknown."""
        unknowns = self.unknowns
        index = {u: i for i, u in enumerate(unknowns)}
        n = len(unknowns)
        A = np.zeros((n, n))
        b = np.zeros(n)
        for row, (lhs, terms) in enumerate(self.equations):
            A[row, index[lhs]] += float(p) + sum(float(c) for c, _ in terms)
            for c, target in terms:
                for name, w in self._expand(target).items():
                    if name in index:
                        A[row, index[name]] -= float(c) * w
                    else:
                        if name not in irreducibles:
                            raise fail("MISSING_IRREDUCIBLE", f"value for {name} not supplied")
                        b[row] += float(c) * w * irreducibles[name]
        x = np.linalg.solve(A, b)
        return {u: float(x[i]) for u, i in index.items()}


def _eqs(*rows):
    return tuple((lhs, tuple(terms)) for lhs, terms in rows)


_COMMON_TOP = (
    ("P33", [(6, "P32")]),
    ("P32", [(3, "P22"), (2, "P31")]),
    ("P31", [(3, "P21"), (1, "P30")]),
    ("P30", [(3, "P20")]),
)

SYSTEMS = {
    "tetrahedron": ReductionSystem(
        "tetrahedron",
        _eqs(*_COMMON_TOP, ("P22", [(4, "P21")]), ("P21", [(2, "P11"), (1, "P20")])),
        {},
        ("P11", "P20"),
    ),
    "cube": ReductionSystem(
        "cube",
        _eqs(*_COMMON_TOP, ("P22e", [(4, "P21'")]), ("P21v", [(2, "P11"), (1, "P20")])),
        {
            "P22": ((_F(2, 3), "P22e"), (_F(1, 3), "P22r")),
            "P21": ((_F(1, 3), "P21v"), (_F(2, 3), "P21r")),
            "P21'": ((_F(1, 2), "P21v"), (_F(1, 2), "P21r")),
        },
        ("P11", "P20", "P21r", "P22r"),
    ),
    "octahedron": ReductionSystem(
        "octahedron",
        _eqs(
            *_COMMON_TOP,
            ("P22e", [(4, "P21v")]),
            ("P22v", [(4, "P21r")]),
            ("P21v", [(2, "P11"), (1, "P20")]),
        ),
        {
            "P22": ((_F(1, 4), "P22e"), (_F(1, 4), "P22r"), (_F(1, 2), "P22v")),
            "P21": ((_F(1, 2), "P21v"), (_F(1, 2), "P21r")),
        },
        ("P11", "P20", "P21r", "P22r"),
    ),
    "icosahedron": ReductionSystem(
        "icosahedron",
        _eqs(
            *_COMMON_TOP,
            ("P22e", [(4, "P21v")]),
            ("P22v", [(4, "P21d")]),
            ("P22d", [(4, "P21'")]),
            ("P22i", [(4, "P21''")]),
            ("P21v", [(2, "P11d"), (1, "P20u")]),
            ("P21w", [(2, "P11f"), (1, "P20l")]),
            ("P21f", [(2, "P11"), (1, "P20'")]),
            ("P21d", [(2, "P11'"), (1, "P20''")]),
            ("P21e", [(2, "P11''"), (1, "P20'''")]),
        ),
        {
            "P22": (
                (2 / 5, "P22d"),
                (1 / 10, "P22r"),
                (1 / 5, "P22v"),
                (1 / (10 * PHI**2), "P22e"),
                (PHI**2 / 10, "P22i"),
            ),
            "P21": (
                (PHI / 5, "P21e"),
                (1 / (2 * PHI * SQ5), "P21f"),
                (1 / 5, "P21r"),
                (1 / 5, "P21d"),
                (1 / (5 * PHI**2), "P21v"),
                (1 / (10 * PHI), "P21w"),
            ),
            "P21'": ((1 / 2, "P21f"), (-PHI / 2, "P21d"), (PHI**2 / 2, "P21e")),
            "P21''": ((PHI**2, "P21r"), (-PHI, "P21e")),
            "P20": ((1 / (2 * PHI**2), "P20f"), (1 / (2 * PHI), "P20e"), (1 / 2, "P20r")),
            "P20'": ((PHI, "P20r"), (-1 / PHI, "P20f")),
            "P20''": ((PHI**2, "P20e"), (-PHI, "P20f")),
            "P20'''": ((PHI**2, "P20r"), (-PHI, "P20e")),
            "P11": ((2, "P11t"), (-1, "P11f")),
            "P11'": ((PHI**2, "P11f"), (-PHI, "P11d")),
            "P11''": ((PHI**2, "P11g"), (-PHI, "P11t")),
            # P20u and P20l are not defined alongside the other mixtures.  They
            # enter only through one combination; reading them as the pure
            # configurations below reproduces the solved form for every p.
            "P20u": ((1, "P20f"),),
            "P20l": ((1, "P20e"),),
        },
        ("P11d", "P11f", "P11g", "P11t", "P20e", "P20f", "P20r", "P21r", "P22r"),
    ),
    "dodecahedron": ReductionSystem(
        "dodecahedron",
        _eqs(
            *_COMMON_TOP,
            ("P22e", [(4, "P21'")]),
            ("P22i", [(4, "P21''")]),
            ("P21v", [(1, "P20e"), (2, "P11")]),
            ("P21f", [(2, "P11'"), (1, "P20'")]),
            ("P21d", [(2, "P11''"), (1, "P20''")]),
        ),
        {
            "P22": ((SQ5 / (6 * PHI), "P22e"), (1 / 6, "P22r"), (PHI * SQ5 / 6, "P22i")),
            "P21": ((1 / 3, "P21r"), (1 / 3, "P21d"), (PHI / 6, "P21f"), (1 / (6 * PHI**2), "P21v")),
            "P21'": ((1 / (PHI * SQ5), "P21v"), (PHI / SQ5, "P21d")),
            "P21''": ((PHI / SQ5, "P21f"), (PHI / SQ5, "P21r"), (-1 / SQ5, "P21d")),
            "P20": ((1 / (2 * PHI**2), "P20e"), (1 / (2 * PHI), "P20f"), (1 / 2, "P20r")),
            "P20'": ((PHI**2, "P20r"), (-PHI, "P20f")),
            "P20''": ((PHI**2, "P20f"), (-PHI, "P20e")),
            "P11": ((2 / (PHI * SQ5), "P11d"), (1 / SQ5, "P11f")),
            "P11'": ((2 * PHI / SQ5, "P11t"), (-1 / SQ5, "P11f")),
            "P11''": ((PHI / SQ5, "P11g"), (PHI / SQ5, "P11f"), (-1 / SQ5, "P11d")),
        },
        ("P11d", "P11f", "P11g", "P11t", "P20e", "P20f", "P20r", "P21r", "P22r"),
    ),
}


# --- solved forms ------------------------------------------------------------


def _solved_tetrahedron(p, P):
    return 72 * (3 * P["P11"] + 2 * P["P20"]) / ((6 + p) * (5 + p) * (4 + p) * (3 + p))


def _solved_cube(p, P):
    return (
        72 * (P["P11"] + P["P20"]) / ((3 + p) * (4 + p) * (5 + p) * (6 + p))
        + 48 * P["P21r"] / ((4 + p) * (5 + p) * (6 + p))
        + 6 * P["P22r"] / ((5 + p) * (6 + p))
    )


def _solved_octahedron(p, P):
    return (
        72 * (P["P20"] + P["P11"]) / ((3 + p) * (4 + p) * (5 + p) * (6 + p))
        + 54 * P["P21r"] / ((4 + p) * (5 + p) * (6 + p))
        + 9 * P["P22r"] / (2 * (5 + p) * (6 + p))
    )


def _solved_icosahedron(p, P):
    f = PHI
    num = (
        12 * f**2 * P["P11d"]
        - 12 * f**4 * P["P11f"]
        + 4 * f**8 * P["P11g"]
        + 12 * f**2 * P["P11t"]
        - 6 * f**4 * P["P20e"]
        + 4 * f**8 * P["P20r"]
        + 6 * P["P20f"]
    )
    return (
        18 * num / (5 * f**4 * (3 + p) * (4 + p) * (5 + p) * (6 + p))
        + 108 * f**2 * P["P21r"] / (5 * (4 + p) * (5 + p) * (6 + p))
        + 9 * P["P22r"] / (5 * (5 + p) * (6 + p))
    )


def _solved_dodecahedron(p, P):
    f = PHI
    num = (
        2 * SQ5 * P["P11d"]
        + 5 * f * P["P20e"]
        + 2 * f**3 * P["P11g"]
        - 2 * f**4 * SQ5 * P["P11f"]
        - 5 * f**5 * P["P20f"]
        + 4 * SQ5 * f**6 * P["P20r"]
        + 2 * f**9 * P["P11t"]
    )
    return (
        12 * num / (f**4 * SQ5 * (3 + p) * (4 + p) * (5 + p) * (6 + p))
        + 60 * f * P["P21r"] / (SQ5 * (4 + p) * (5 + p) * (6 + p))
        + 3 * P["P22r"] / ((5 + p) * (6 + p))
    )


_SOLVED = {
    "tetrahedron": _solved_tetrahedron,
    "cube": _solved_cube,
    "octahedron": _solved_octahedron,
    "icosahedron": _solved_icosahedron,
    "dodecahedron": _solved_dodecahedron,
}


def _check_p(p) -> None:
    if float(p) != int(p) or int(p) < -1:
        raise fail("P_OUT_OF_RANGE", f"p must be an integer >= -1, got {p}")
    # (3+p)...(6+p) cannot vanish on the supported range
    assert all(k + int(p) != 0 for k in (3, 4, 5, 6)), "P_POLE"


def solve_solid_system(solid_tag: str, p, irreducibles: dict) -> float:
    """P33 of a Platonic solid from its irreducible terms (solved form)."""
    name = canonical_solid(solid_tag)
    _check_p(p)
    needed = SYSTEMS[name].irreducible_set
    missing = [t for t in needed if t not in irreducibles]
    if missing:
        raise fail("MISSING_IRREDUCIBLE", f"missing {', '.join(missing)}", missing=missing)
    return float(_SOLVED[name](p, irreducibles))


# --- tetrahedra --------------------------------------------------------------

_TETRA_FACES = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))
_TETRA_SKEW = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def tetrahedron_moment(vertices, p) -> float:
    """p-th distance moment of a uniform tetrahedron.

    Unit weights apply to every tetrahedron: each almost-sure projection
    shows exactly one vertex over a face or one edge crossing another.
    """
    V = np.asarray(vertices, dtype=float)
    if V.shape != (4, 3) or not np.all(np.isfinite(V)):
        raise fail("DEGENERATE_TETRAHEDRON", "need four points in space")
    vol = abs(np.linalg.det(V[1:] - V[0])) / 6
    scale = max(float(np.ptp(V, axis=0).max()), 1e-300)
    if vol <= 1e-12 * scale**3:
        raise fail("DEGENERATE_TETRAHEDRON", "vertices are coplanar")
    _check_p(p)
    if p == 0:
        return 1.0
    total = 0.0
    for i, face in enumerate(_TETRA_FACES):
        F = Polytope.polygon(V[list(face)])
        _, h = project_point(V[i], F)
        total += irr.point_polygon_moment(F, V[i], p) * measure(F) * h
    for (a, b), (c, d) in _TETRA_SKEW:
        e1 = V[b] - V[a]
        e2 = V[d] - V[c]
        # |E1| |E2| h sin(theta) is the volume of the parallelepiped they span
        w = abs(np.dot(np.cross(e1, e2), V[c] - V[a]))
        total += irr.skew_segments_moment(Polytope.segment(V[a], V[b]), Polytope.segment(V[c], V[d]), p) * w
    return 12 * total / (vol * (6 + p) * (5 + p) * (4 + p) * (3 + p))


# --- general polyhedra ---------------------------------------------------------


@dataclass(frozen=True)
class BasicWeights:
    face_pair_weights: dict
    body_edge_weights: dict
    C: np.ndarray
    C_k: np.ndarray
    D_j: np.ndarray

    def total(self) -> float:
        return sum(self.face_pair_weights.values()) + sum(self.body_edge_weights.values())


def _face_planes(K: Polytope):
    normals = K.side_normals()
    points = K.side_points()
    return normals, points


def _edge_faces(K: Polytope) -> dict:
    """Map each undirected edge to its two faces and in-face outward normals."""
    out: dict = {}
    normals = K.side_normals()
    for k, face in enumerate(K.faces):
        m = len(face)
        for s in range(m):
            a, b = face[s], face[(s + 1) % m]
            key = (min(a, b), max(a, b))
            d = K.vertices[b] - K.vertices[a]
            # faces wind counterclockwise seen from outside, so d x n points out of the face
            nrm = np.cross(d, normals[k])
            nrm /= np.linalg.norm(nrm)
            out.setdefault(key, []).append((k, nrm))
    return out


def theorem_basic_weights(K: Polytope, C=None, C_k=None, D_j=None) -> BasicWeights:
    """Face-pair and body-edge weights of the two-step reduction.

    Defaults: C the vertex centroid, C_k the face vertex centroids and D_j
    the edge midpoints.  At p = 0 all weights sum to (6)(5)/2 = 15.
    """
    if K.dim_ambient != 3 or K.dim_intrinsic != 3:
        raise fail("DEGENERATE", "need a closed polyhedron")
    V = K.vertices
    nf = len(K.faces)
    normals, fpoints = _face_planes(K)
    edges = _edge_faces(K)
    edge_keys = sorted(edges)
    C = V.mean(axis=0) if C is None else np.asarray(C, dtype=float)
    if C_k is None:
        C_k = np.array([V[list(f)].mean(axis=0) for f in K.faces])
    C_k = np.asarray(C_k, dtype=float)
    if D_j is None:
        D_j = np.array([(V[a] + V[b]) / 2 for a, b in edge_keys])
    D_j = np.asarray(D_j, dtype=float)
    diam = K.diameter()
    for k in range(nf):
        if abs(np.dot(C_k[k] - fpoints[k], normals[k])) > 1e-9 * diam:
            raise fail("SCALING_POINT_OFF_HULL", f"C_{k} is not on the plane of face {k}")
    for j, (a, b) in enumerate(edge_keys):
        d = V[b] - V[a]
        off = D_j[j] - V[a]
        if np.linalg.norm(off - d * np.dot(off, d) / np.dot(d, d)) > 1e-9 * diam:
            raise fail("SCALING_POINT_OFF_HULL", f"D_{j} is not on the line of edge {j}")
    volK = measure(K)
    areas = K.side_measures()
    hC = np.array([np.dot(fpoints[k] - C, normals[k]) for k in range(nf)])
    face_w = {}
    for k, kk in combinations(range(nf), 2):
        h_k_kk = np.dot(fpoints[kk] - C_k[k], normals[kk])
        h_kk_k = np.dot(fpoints[k] - C_k[kk], normals[k])
        face_w[(k, kk)] = areas[k] * areas[kk] / volK**2 * (hC[k] * h_k_kk + hC[kk] * h_kk_k)
    edge_w = {}
    for j, key in enumerate(edge_keys):
        a, b = key
        length = float(np.linalg.norm(V[b] - V[a]))
        acc = 0.0
        for k, nrm in edges[key]:
            acc += hC[k] * float(np.dot(D_j[j] - C_k[k], nrm))
        edge_w[key] = volK * length / volK**2 * acc
    return BasicWeights(face_w, edge_w, C, C_k, D_j)


def _second_moment_data(P: Polytope):
    """Mean and E[x x^T] of the uniform distribution on P."""
    from .oracle import simplex_decomposition

    simp, weights = simplex_decomposition(P)
    k = simp.shape[1] - 1
    w = weights / weights.sum()
    s = simp.sum(axis=1)
    mean = (w[:, None] * s).sum(axis=0) / (k + 1)
    outer = np.einsum("nki,nkj->nij", simp, simp) + np.einsum("ni,nj->nij", s, s)
    second = (w[:, None, None] * outer).sum(axis=0) / ((k + 1) * (k + 2))
    return mean, second


def second_moment_pair(A: Polytope, B: Polytope) -> float:
    """E|X - Y|^2 for independent uniform X in A and Y in B (exact)."""
    ma, sa = _second_moment_data(A)
    mb, sb = _second_moment_data(B)
    return float(np.trace(sa) + np.trace(sb) - 2 * ma @ mb)


def _is_parallel_pair(A: Polytope, B: Polytope) -> bool:
    return affine_relation(A, B).kind is Relation.PARALLEL_SEPARATED


def general_moment(
    K: Polytope,
    p,
    budget: int = 4_000_000,
    seed: int = 0,
    min_samples: int = 10_000,
    max_seconds: float | None = None,
) -> MomentResult:
    """p-th moment of an arbitrary closed polyhedron via face-pair/body-edge terms.

    Parallel separated convex face pairs go through the overlap cubature,
    p = 2 is exact for every term, and the rest are Monte Carlo estimates
    sharing ``budget`` samples.  Raises BUDGET_EXCEEDED when the budget
    cannot give every sampled term ``min_samples`` draws, or when the run
    exceeds ``max_seconds``.
    """
    from .geom import is_convex
    from .oracle import estimate_moment

    _check_p(p)
    p = int(p)
    if p == 0:
        return MomentResult(1.0, CLOSED_FORM, 0.0, {"terms": 0})
    start = time.perf_counter()
    W = theorem_basic_weights(K)
    faces = [K.face_polytope(k) for k in range(len(K.faces))]
    convex_faces = [is_convex(F) for F in faces]

    terms = []  # (label, weight, A, B, method)
    for (k, kk), w in W.face_pair_weights.items():
        if w == 0.0:
            continue
        A, B = faces[k], faces[kk]
        if p == 2:
            method = CLOSED_FORM
        elif convex_faces[k] and convex_faces[kk] and _is_parallel_pair(A, B):
            method = QUADRATURE
        else:
            method = MONTE_CARLO
        terms.append((f"F{k}F{kk}", w, A, B, method))
    for key, w in W.body_edge_weights.items():
        if w == 0.0:
            continue
        terms.append((f"KE{key[0]}_{key[1]}", w, K, K.edge_polytope(key), CLOSED_FORM if p == 2 else MONTE_CARLO))

    n_mc = sum(1 for t in terms if t[4] == MONTE_CARLO)
    per_term = budget // n_mc if n_mc else 0
    if n_mc and per_term < min_samples:
        raise fail(
            "BUDGET_EXCEEDED",
            f"{n_mc} sampled terms need {n_mc * min_samples} samples, budget is {budget}",
            sampled_terms=n_mc,
            budget=budget,
        )
    total = 0.0
    var = 0.0
    quad_err = 0.0
    used = set()
    diagnostics = []
    for idx, (label, w, A, B, method) in enumerate(terms):
        if max_seconds is not None and time.perf_counter() - start > max_seconds:
            raise fail(
                "BUDGET_EXCEEDED",
                f"time limit hit after {idx} of {len(terms)} terms",
                partial=diagnostics,
            )
        if method == CLOSED_FORM:
            val, err = second_moment_pair(A, B), 0.0
        elif method == QUADRATURE:
            val = irr.overlap_moment_numeric(A, B, p)
            err = 1e-8
        else:
            est = estimate_moment(A, B, p, per_term, seed=seed, stream=idx)
            val, err = est.mean, est.stderr
        used.add(method)
        total += w * val
        if method == MONTE_CARLO:
            var += (w * err) ** 2
        else:
            quad_err += abs(w) * err
        diagnostics.append({"term": label, "weight": w, "value": val, "error": err, "method": method})
    factor = 2.0 / ((6 + p) * (5 + p))
    order = [CLOSED_FORM, QUADRATURE, MONTE_CARLO]
    provenance = "+".join(m for m in order if m in used) or CLOSED_FORM
    error = factor * (math.sqrt(var) + quad_err)
    return MomentResult(factor * total, provenance, error, {"terms": diagnostics, "samples_per_term": per_term})
