"""Irreducible distance moments.

Three configurations need no further reduction:

* a point against a polygon whose plane misses the point,
* two skew segments,
* two parallel, separated polytopes (faces, or a face against a set of
  edges), handled through the overlap function of their projections.

The first two are sums of signed fundamental-triangle integrals.  The third
is evaluated either exactly from a precomputed overlap diagram or by
adaptive cubature of the overlap measure over the translation support.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import auxint
from ._backend import overlap_values
from .errors import fail
from .geom import (
    Polytope,
    Relation,
    _tol,
    affine_relation,
    measure,
    plane_frame,
    project_point,
    to_plane,
)

_COEFF_KEYS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2))


def _is_int(p) -> bool:
    return float(p) == int(p)


# --- point against polygon --------------------------------------------------


def polygon_potential(poly2d: np.ndarray, h: float, p) -> float:
    """int over a planar polygon of (h^2 + |k|^2)^(p/2) dk, origin at the foot point.

    The polygon is split into signed triangles spanned by the origin and each
    side; every triangle is a difference of two fundamental triangles whose
    common leg is the perpendicular from the origin to the side's line.
    """
    v = np.asarray(poly2d, dtype=float)
    if not _is_int(p):
        return _polygon_potential_quad(v, h, float(p))
    p = int(p)
    total = 0.0
    n = len(v)
    scale = max(float(np.abs(v).max()), h, 1e-300)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        d = b - a
        length = math.hypot(d[0], d[1])
        if length <= 1e-15 * scale:
            continue
        t = d / length
        nrm = np.array([t[1], -t[0]])
        s = float(a @ nrm)
        if abs(s) <= 1e-14 * scale:
            continue
        ya = float(a @ t)
        yb = float(b @ t)
        sa = abs(s)
        q = sa / h
        contrib = auxint.i00_signed(p, q, yb / sa) - auxint.i00_signed(p, q, ya / sa)
        total += math.copysign(contrib, s)
    return h ** (2 + p) * total


def _polygon_potential_quad(v: np.ndarray, h: float, p: float) -> float:
    from .quadrature import quad2d

    area = abs(_area2d(v))
    res = quad2d(lambda x, y: (h * h + x * x + y * y) ** (p / 2), v, abs_tol=1e-12 * area)
    return math.copysign(res.value, _area2d(v))


def _area2d(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def point_polygon_moment(A: Polytope, B, p) -> float:
    """Mean of |X - Y|^p with X uniform on polygon A and Y = B a fixed point."""
    if A.dim_intrinsic != 2:
        raise fail("DEGENERATE_POLYGON", "first argument must be a polygon")
    if isinstance(B, Polytope):
        if B.dim_intrinsic != 0:
            raise fail("DEGENERATE_POLYGON", "second argument must be a point")
        B = B.vertices[0]
    B = np.asarray(B, dtype=float)
    if p == 0:
        return 1.0
    if A.dim_ambient == 2:
        raise fail("COPLANAR_POINT", "point lies in the polygon's plane")
    try:
        frame = plane_frame(A)
        area = measure(A)
    except Exception as exc:
        raise fail("DEGENERATE_POLYGON", str(exc)) from exc
    foot, h = project_point(B, A)
    if h <= _tol(A.vertices, B):
        raise fail("COPLANAR_POINT", "point lies in the polygon's plane")
    o, axes, _ = frame
    poly = (A.vertices - foot) @ axes.T
    return polygon_potential(poly, h, p) / area


def skew_segments_moment(E1: Polytope, E2: Polytope, p) -> float:
    """Mean of |X - Y|^p for X, Y uniform on two skew segments.

    X - Y is uniform on the parallelogram E1 - E2, so this is a point
    (the origin) against that parallelogram.
    """
    if E1.dim_intrinsic != 1 or E2.dim_intrinsic != 1 or E1.dim_ambient != 3:
        raise fail("NOT_SKEW", "both arguments must be segments in space")
    rel = affine_relation(E1, E2)
    if rel.kind is not Relation.SKEW:
        raise fail("NOT_SKEW", f"segments are {rel.kind.value}")
    if p == 0:
        return 1.0
    a0, a1 = E1.vertices
    b0, b1 = E2.vertices
    para = Polytope.polygon(np.array([a0 - b0, a1 - b0, a1 - b1, a0 - b1]))
    return point_polygon_moment(para, np.zeros(3), p)


# --- overlap of parallel polytopes -------------------------------------------


def clip_convex_polygons(P, Q) -> np.ndarray:
    """Intersection of two convex planar polygons (counterclockwise vertex arrays)."""
    out = [np.asarray(v, dtype=float) for v in np.asarray(P, dtype=float)]
    Q = np.asarray(Q, dtype=float)
    if _area2d(Q) < 0:
        Q = Q[::-1]
    n = len(Q)
    for i in range(n):
        a, b = Q[i], Q[(i + 1) % n]
        ex, ey = b - a
        if not out:
            break
        inp = out
        out = []

        def side(pt):
            return ex * (pt[1] - a[1]) - ey * (pt[0] - a[0])

        for j in range(len(inp)):
            cur, nxt = inp[j], inp[(j + 1) % len(inp)]
            sc, sn = side(cur), side(nxt)
            if sc >= 0:
                out.append(cur)
            if (sc >= 0) != (sn >= 0):
                t = sc / (sc - sn)
                out.append(cur + t * (nxt - cur))
    return np.array(out) if out else np.zeros((0, 2))


@dataclass
class _OverlapSetup:
    A2: np.ndarray
    B2: np.ndarray
    kind: str
    h: float
    vol_a: float
    vol_b: float
    support: np.ndarray


def _overlap_setup(A: Polytope, B) -> _OverlapSetup:
    if A.dim_intrinsic != 2:
        raise fail("NO_OVERLAP_SUPPORT", "first argument must be a polygon")
    segs = None
    if isinstance(B, Polytope):
        if B.dim_intrinsic == 2:
            other = B
        elif B.dim_intrinsic == 1:
            segs = [B]
            other = B
        else:
            raise fail("NO_OVERLAP_SUPPORT", "second argument must be a polygon or edges")
    else:
        segs = list(B)
        if not segs or any(s.dim_intrinsic != 1 for s in segs):
            raise fail("NO_OVERLAP_SUPPORT", "edge set must contain segments")
        other = Polytope(A.dim_ambient, 2, np.vstack([s.vertices for s in segs]))
    if A.dim_ambient == 3:
        frame = plane_frame(A)
        N = frame[2]
        pts = other.vertices if segs is None else np.vstack([s.vertices for s in segs])
        heights = (pts - frame[0]) @ N
        if np.ptp(heights) > _tol(A.vertices, pts):
            raise fail("NO_OVERLAP_SUPPORT", "second set is not parallel to the polygon")
        h = float(abs(heights.mean()))
        if h <= _tol(A.vertices, pts):
            raise fail("NO_OVERLAP_SUPPORT", "sets share a plane")
        A2 = to_plane(A, A.vertices, frame)
        conv = lambda X: to_plane(A, X, frame)  # noqa: E731
    else:
        raise fail("NO_OVERLAP_SUPPORT", "overlap needs parallel sets in space")
    if segs is None:
        B2 = conv(other.vertices)
        if _area2d(B2) < 0:
            B2 = B2[::-1].copy()
        kind = "area"
        vol_b = measure(other)
        cand = (B2[:, None, :] - A2[None, :, :]).reshape(-1, 2)
    else:
        B2 = np.stack([conv(s.vertices) for s in segs])
        kind = "length"
        vol_b = float(sum(measure(s) for s in segs))
        cand = (B2.reshape(-1, 2)[:, None, :] - A2[None, :, :]).reshape(-1, 2)
    from scipy.spatial import ConvexHull

    hull = ConvexHull(cand)
    support = cand[hull.vertices]
    return _OverlapSetup(A2, B2, kind, h, measure(A), vol_b, support)


def _breakpoint_lines(st: _OverlapSetup) -> list[tuple[np.ndarray, float]]:
    """Lines in translation space where the overlap measure changes formula.

    A vertex of one set crossing an edge line of the other starts a new
    polynomial piece; for parallel edges in the chord-length case the measure
    even jumps there.  Each line is returned as (unit normal, offset).
    """
    A = st.A2
    a_edges = [(A[i], A[(i + 1) % len(A)]) for i in range(len(A))]
    if st.kind == "area":
        B = st.B2
        b_edges = [(B[i], B[(i + 1) % len(B)]) for i in range(len(B))]
        b_pts = B
    else:
        b_edges = [(s[0], s[1]) for s in st.B2]
        b_pts = st.B2.reshape(-1, 2)
    lines = []
    # translation k moves B to B - k: vertex b - k on the line through edge a
    for a0, a1 in a_edges:
        d = a1 - a0
        n = np.array([d[1], -d[0]]) / np.hypot(d[0], d[1])
        for b in b_pts:
            lines.append((n, float((b - a0) @ n)))
    for b0, b1 in b_edges:
        d = b1 - b0
        n = np.array([d[1], -d[0]]) / np.hypot(d[0], d[1])
        for a in A:
            lines.append((n, float((b0 - a) @ n)))
    # canonical orientation, then drop duplicates
    out = []
    scale = float(np.abs(st.support).max())
    for n, c in lines:
        if n[0] < 0 or (n[0] == 0 and n[1] < 0):
            n, c = -n, -c
        if not any(np.allclose(n, m, atol=1e-12) and abs(c - e) <= 1e-12 * scale for m, e in out):
            out.append((n, c))
    return out


def _split_cells(poly: np.ndarray, lines, scale: float) -> list[np.ndarray]:
    cells = [poly]
    eps = 1e-12 * scale
    for n, c in lines:
        nxt = []
        for cell in cells:
            s = cell @ n - c
            if s.max() <= eps or s.min() >= -eps:
                nxt.append(cell)
                continue
            lo, hi = [], []
            m = len(cell)
            for i in range(m):
                p0, p1 = cell[i], cell[(i + 1) % m]
                s0, s1 = s[i], s[(i + 1) % m]
                if s0 <= eps:
                    lo.append(p0)
                if s0 >= -eps:
                    hi.append(p0)
                if (s0 < -eps and s1 > eps) or (s0 > eps and s1 < -eps):
                    x = p0 + (s0 / (s0 - s1)) * (p1 - p0)
                    lo.append(x)
                    hi.append(x)
            for part in (lo, hi):
                if len(part) >= 3 and abs(_area2d(np.array(part))) > eps * scale:
                    nxt.append(np.array(part))
        cells = nxt
    return cells


def _support_triangles(st: _OverlapSetup) -> np.ndarray:
    scale = float(np.abs(st.support).max())
    cells = _split_cells(st.support, _breakpoint_lines(st), scale)
    tris = []
    for cell in cells:
        for i in range(1, len(cell) - 1):
            tris.append([cell[0], cell[i], cell[i + 1]])
    return np.array(tris)


def overlap_integral(A: Polytope, B, p, abs_tol: float = 1e-8) -> tuple[float, float, _OverlapSetup]:
    """int (h^2 + |k|^2)^(p/2) vol(A cap (proj B - k)) dk and its error estimate.

    The translation support is first cut along the breakpoint lines so the
    overlap measure is a polynomial on every cell; adaptive cubature then
    only has to resolve the smooth distance weight.  No normalisation and no
    p = 0 shortcut, so the mass can be checked.
    """
    from .quadrature import quad2d

    st = _overlap_setup(A, B)
    hh = st.h * st.h

    def f(x, y):
        k = np.stack([x, y], axis=1)
        ov = overlap_values(st.A2, st.B2, st.kind, k)
        return (hh + x * x + y * y) ** (p / 2) * ov

    res = quad2d(f, _support_triangles(st), abs_tol=abs_tol, max_leaves=2_000_000)
    return res.value, res.error, st


def overlap_moment_numeric(A: Polytope, B, p, abs_tol: float = 1e-8) -> float:
    """Moment of two parallel sets by cubature of the overlap measure.

    ``B`` is a polygon, a single segment, or a list of segments (its total
    chord length inside the shifted polygon is the overlap measure).
    """
    if p == 0:
        _overlap_setup(A, B)
        return 1.0
    st = _overlap_setup(A, B)
    norm = st.vol_a * st.vol_b
    # tolerance in units of a typical distance^p keeps refinement scale free
    L = math.hypot(st.h, float(np.max(np.linalg.norm(st.support, axis=1))))
    value, _, _ = overlap_integral(A, B, p, abs_tol=abs_tol * norm * L**p)
    return value / norm


@dataclass(frozen=True)
class FundamentalPiece:
    sign: int
    q: float
    gamma: float
    coeffs: tuple
    h: float

    def value(self, p) -> float:
        total = 0.0
        h = self.h
        for (i, j), a in zip(_COEFF_KEYS, self.coeffs):
            if a == 0:
                continue
            if _is_int(p) and int(p) >= -1:
                base = auxint.i_closed_t(int(p), i, j, self.q, math.tan(self.gamma))
            else:
                base = auxint.I(p, i, j, self.q, self.gamma).value
            total += a * h ** (i + j) * base
        return self.sign * h ** (2 + p) * total


@dataclass
class OverlapDiagram:
    """Signed fundamental-triangle pieces of one overlap integral.

    The moment is ``scale**p * fold / (area_a * measure_b) * sum(pieces)``;
    ``scale`` undoes a similarity used to reuse another solid's diagram.
    """

    fold: int
    pieces: list = field(default_factory=list)
    area_a: float = 1.0
    measure_b: float = 1.0
    scale: float = 1.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "fold": self.fold,
                "area_a": self.area_a,
                "measure_b": self.measure_b,
                "scale": self.scale,
                "pieces": [
                    {
                        "sign": pc.sign,
                        "q": pc.q,
                        "gamma": pc.gamma,
                        "coeffs": list(pc.coeffs),
                        "h": pc.h,
                    }
                    for pc in self.pieces
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "OverlapDiagram":
        d = json.loads(text)
        pieces = []
        for pc in d["pieces"]:
            coeffs = tuple(float(c) for c in pc["coeffs"])
            if len(coeffs) != 6:
                raise fail("DEGENERATE", "each piece needs six coefficients")
            pieces.append(
                FundamentalPiece(int(pc["sign"]), float(pc["q"]), float(pc["gamma"]), coeffs, float(pc["h"]))
            )
        return cls(
            int(d["fold"]),
            pieces,
            float(d.get("area_a", 1.0)),
            float(d.get("measure_b", 1.0)),
            float(d.get("scale", 1.0)),
        )


def overlap_moment_exact(diagram: OverlapDiagram, p) -> float:
    if p == 0:
        return 1.0
    total = sum(pc.value(p) for pc in diagram.pieces)
    return diagram.scale**p * diagram.fold * total / (diagram.area_a * diagram.measure_b)


def overlap_mass_exact(diagram: OverlapDiagram) -> float:
    """The p = 0 value computed from the pieces (should be 1)."""
    total = sum(pc.value(0) for pc in diagram.pieces)
    return diagram.fold * total / (diagram.area_a * diagram.measure_b)
