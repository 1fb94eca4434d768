"""Convex polytopes and the elementary measurements used by the reductions.

A ``Polytope`` is a point, a segment, a convex polygon or a polyhedron
embedded in two or three dimensions.  Solid faces are vertex index lists
ordered counterclockwise when viewed from outside; polygons list their
vertices counterclockwise about their own normal.  All geometric predicates
use a tolerance relative to the diameter of the configuration.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import fail

REL_TOL = 1e-9


def _tol(*arrays) -> float:
    pts = np.vstack([np.atleast_2d(a) for a in arrays])
    diam = float(np.ptp(pts, axis=0).max()) if len(pts) > 1 else 0.0
    return REL_TOL * max(diam, float(np.abs(pts).max(initial=0.0)), 1.0)


def _newell(poly: np.ndarray) -> np.ndarray:
    nxt = np.roll(poly, -1, axis=0)
    return 0.5 * np.cross(poly, nxt).sum(axis=0)


@dataclass
class Polytope:
    dim_ambient: int
    dim_intrinsic: int
    vertices: np.ndarray
    faces: list = field(default_factory=list)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v[None, :]
        if not np.all(np.isfinite(v)):
            raise fail("DEGENERATE", "vertex coordinates must be finite")
        if v.shape[1] != self.dim_ambient:
            raise fail("DEGENERATE", "vertex dimension does not match ambient dimension")
        self.vertices = v
        self.faces = [tuple(int(i) for i in f) for f in self.faces]
        if self.dim_intrinsic == 3:
            self._orient_faces()

    # --- constructors -----------------------------------------------------

    @classmethod
    def point(cls, x) -> "Polytope":
        x = np.asarray(x, dtype=float).ravel()
        return cls(len(x), 0, x[None, :])

    @classmethod
    def segment(cls, a, b) -> "Polytope":
        v = np.array([a, b], dtype=float)
        if np.linalg.norm(v[1] - v[0]) <= _tol(v):
            raise fail("DEGENERATE", "segment endpoints coincide")
        return cls(v.shape[1], 1, v)

    @classmethod
    def polygon(cls, vertices) -> "Polytope":
        v = np.asarray(vertices, dtype=float)
        if len(v) < 3:
            raise fail("DEGENERATE", "a polygon needs at least three vertices")
        if v.shape[1] == 2 and _newell(np.c_[v, np.zeros(len(v))])[2] < 0:
            v = v[::-1].copy()
        return cls(v.shape[1], 2, v)

    @classmethod
    def solid(cls, vertices, faces) -> "Polytope":
        return cls(3, 3, np.asarray(vertices, dtype=float), list(faces))

    @classmethod
    def convex_hull(cls, points) -> "Polytope":
        """Solid hull of a 3D point set with coplanar facets merged."""
        from scipy.spatial import ConvexHull

        pts = np.asarray(points, dtype=float)
        hull = ConvexHull(pts)
        tol = _tol(pts)
        verts = pts[np.unique(hull.simplices)]
        faces = []
        seen = []
        for eq in hull.equations:
            n, d = eq[:3], eq[3]
            if any(np.allclose(n, m, atol=1e-9) and abs(d - e) <= tol for m, e in seen):
                continue
            seen.append((n, d))
            on = [i for i in range(len(verts)) if abs(verts[i] @ n + d) <= tol]
            c = verts[on].mean(axis=0)
            u = verts[on[0]] - c
            u /= np.linalg.norm(u)
            w = np.cross(n, u)
            ang = [math.atan2((verts[i] - c) @ w, (verts[i] - c) @ u) for i in on]
            faces.append(tuple(on[k] for k in np.argsort(ang)))
        return cls(3, 3, verts, faces)

    # --- orientation ------------------------------------------------------

    def _orient_faces(self) -> None:
        faces = [list(f) for f in self.faces]
        if not faces:
            raise fail("DEGENERATE", "a solid needs faces")
        edge_faces: dict = {}
        for k, f in enumerate(faces):
            if len(set(f)) < 3:
                raise fail("DEGENERATE", f"face {k} has fewer than three distinct vertices")
            for a, b in zip(f, f[1:] + f[:1]):
                edge_faces.setdefault(frozenset((a, b)), []).append(k)
        for e, fs in edge_faces.items():
            if len(fs) != 2:
                raise fail("OPEN_SURFACE", f"edge {sorted(e)} is used by {len(fs)} faces")
        # propagate a consistent winding across shared edges
        flipped = False
        done = {0}
        stack = [0]
        while stack:
            k = stack.pop()
            f = faces[k]
            for a, b in zip(f, f[1:] + f[:1]):
                for m in edge_faces[frozenset((a, b))]:
                    if m in done:
                        continue
                    g = faces[m]
                    directed = list(zip(g, g[1:] + g[:1]))
                    if (a, b) in directed:
                        faces[m] = g[::-1]
                        flipped = True
                    done.add(m)
                    stack.append(m)
        if len(done) != len(faces):
            raise fail("OPEN_SURFACE", "faces do not form a connected surface")
        vol = sum(_newell(self.vertices[f]) @ self.vertices[f[0]] for f in faces) / 3.0
        if abs(vol) <= _tol(self.vertices) ** 3:
            raise fail("DEGENERATE", "solid has zero volume")
        if vol < 0:
            faces = [f[::-1] for f in faces]
            flipped = True
        if flipped:
            warnings.warn("face winding corrected to counterclockwise-from-outside", stacklevel=3)
        self.faces = [tuple(f) for f in faces]

    # --- derived data -----------------------------------------------------

    @property
    def edges(self) -> list[tuple[int, int]]:
        if self.dim_intrinsic == 3:
            out = []
            seen = set()
            for f in self.faces:
                for a, b in zip(f, f[1:] + f[:1]):
                    key = frozenset((a, b))
                    if key not in seen:
                        seen.add(key)
                        out.append((a, b))
            return out
        if self.dim_intrinsic == 2:
            n = len(self.vertices)
            return [(i, (i + 1) % n) for i in range(n)]
        if self.dim_intrinsic == 1:
            return [(0, 1)]
        return []

    @property
    def centroid_vertices(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def face_polytope(self, k: int) -> "Polytope":
        return Polytope.polygon(self.vertices[list(self.faces[k])])

    def edge_polytope(self, e: tuple[int, int]) -> "Polytope":
        return Polytope.segment(self.vertices[e[0]], self.vertices[e[1]])

    def plane_normal(self) -> np.ndarray:
        """Unit normal of a polygon embedded in 3D (counterclockwise side)."""
        if self.dim_intrinsic != 2:
            raise fail("DEGENERATE", "plane normal only defined for polygons")
        v = self.vertices
        if self.dim_ambient == 2:
            return np.array([0.0, 0.0, 1.0])
        n = _newell(v)
        norm = np.linalg.norm(n)
        if norm <= _tol(v) ** 2:
            raise fail("DEGENERATE", "polygon has zero area")
        return n / norm

    def sides(self) -> list["Polytope"]:
        """Boundary pieces: faces of a solid, edges of a polygon, endpoints of a segment."""
        if self.dim_intrinsic == 3:
            return [self.face_polytope(k) for k in range(len(self.faces))]
        if self.dim_intrinsic == 2:
            return [self.edge_polytope(e) for e in self.edges]
        if self.dim_intrinsic == 1:
            return [Polytope.point(self.vertices[0]), Polytope.point(self.vertices[1])]
        return []

    def side_normals(self) -> np.ndarray:
        """Outward unit normals of the sides, lying in the affine hull."""
        v = self.vertices
        if self.dim_intrinsic == 3:
            out = []
            for f in self.faces:
                n = _newell(v[list(f)])
                out.append(n / np.linalg.norm(n))
            return np.array(out)
        if self.dim_intrinsic == 2:
            if self.dim_ambient == 2:
                d = np.roll(v, -1, axis=0) - v
                n = np.stack([d[:, 1], -d[:, 0]], axis=1)
            else:
                N = self.plane_normal()
                d = np.roll(v, -1, axis=0) - v
                n = np.cross(d, N)
            return n / np.linalg.norm(n, axis=1)[:, None]
        if self.dim_intrinsic == 1:
            d = v[1] - v[0]
            d = d / np.linalg.norm(d)
            return np.array([-d, d])
        return np.zeros((0, self.dim_ambient))

    def side_points(self) -> np.ndarray:
        v = self.vertices
        if self.dim_intrinsic == 3:
            return np.array([v[f[0]] for f in self.faces])
        if self.dim_intrinsic == 2:
            return v.copy()
        if self.dim_intrinsic == 1:
            return v.copy()
        return np.zeros((0, self.dim_ambient))

    def side_measures(self) -> np.ndarray:
        return np.array([measure(s) for s in self.sides()])

    def diameter(self) -> float:
        v = self.vertices
        if len(v) < 2:
            return 0.0
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    # --- serialisation ----------------------------------------------------

    def to_json(self) -> str:
        out = {"dim": self.dim_ambient, "vertices": self.vertices.tolist()}
        if self.dim_intrinsic == 3:
            out["faces"] = [list(f) for f in self.faces]
        elif self.dim_intrinsic != 2:
            out["kind"] = {0: "point", 1: "segment"}[self.dim_intrinsic]
        return json.dumps(out)

    @classmethod
    def from_json(cls, text: str) -> "Polytope":
        def reject(token):
            raise fail("DEGENERATE", f"non-finite number {token} in input")

        data = json.loads(text, parse_constant=reject)
        dim = int(data.get("dim", 3))
        verts = np.asarray(data["vertices"], dtype=float)
        if verts.ndim != 2 or verts.shape[1] != dim:
            raise fail("DEGENERATE", "vertex rows must match dim")
        kind = data.get("kind")
        if kind == "point":
            return cls.point(verts[0])
        if kind == "segment":
            return cls.segment(verts[0], verts[1])
        if "faces" in data:
            if dim != 3:
                raise fail("DEGENERATE", "faces are only valid with dim 3")
            return cls.solid(verts, data["faces"])
        return cls.polygon(verts)


# --- measurements -----------------------------------------------------------


def measure(P: Polytope) -> float:
    """Intrinsic volume of top degree: volume, area, length or 1 for a point."""
    v = P.vertices
    if P.dim_intrinsic == 0:
        return 1.0
    if P.dim_intrinsic == 1:
        return float(np.linalg.norm(v[1] - v[0]))
    if P.dim_intrinsic == 2:
        vv = np.c_[v, np.zeros(len(v))] if P.dim_ambient == 2 else v
        n = _newell(vv)
        a = float(np.linalg.norm(n))
        if a <= _tol(v) ** 2:
            raise fail("DEGENERATE", "polygon has zero area")
        return a
    vol = sum(_newell(v[list(f)]) @ v[f[0]] for f in P.faces) / 3.0
    return float(vol)


def signed_distance(P: Polytope, side: int, C) -> float:
    """h_C of side ``side``: <x_side - C, outward normal>, C in the affine hull of P."""
    C = np.asarray(C, dtype=float)
    _require_in_hull(P, C)
    n = P.side_normals()[side]
    x = P.side_points()[side]
    return float((x - C) @ n)


def _require_in_hull(P: Polytope, C: np.ndarray) -> None:
    foot, h = project_point(C, P)
    if h > _tol(P.vertices, C):
        raise fail("C_OFF_HULL", f"point lies {h:.3e} away from the affine hull")


def affine_basis(P: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Origin and orthonormal direction rows spanning the affine hull."""
    v = P.vertices
    o = v[0]
    if len(v) == 1:
        return o, np.zeros((0, P.dim_ambient))
    d = v[1:] - o
    u, s, vt = np.linalg.svd(d, full_matrices=False)
    rank = int(np.sum(s > _tol(v) * max(1.0, s.max()) * 1e-3))
    rank = min(rank, P.dim_intrinsic) if P.dim_intrinsic > 0 else 0
    return o, vt[:rank]


def project_point(X, P: Polytope) -> tuple[np.ndarray, float]:
    """Orthogonal projection of X onto the affine hull of P and the distance to it."""
    X = np.asarray(X, dtype=float)
    o, basis = affine_basis(P)
    r = X - o
    foot = o + basis.T @ (basis @ r)
    return foot, float(np.linalg.norm(X - foot))


class Relation(Enum):
    INTERSECTING = "INTERSECTING"
    PARALLEL_SEPARATED = "PARALLEL_SEPARATED"
    SKEW = "SKEW"
    IDENTICAL_HULL = "IDENTICAL_HULL"


@dataclass(frozen=True)
class AffineRelation:
    kind: Relation
    h: float = 0.0


def affine_relation(A: Polytope, B: Polytope) -> AffineRelation:
    oa, ua = affine_basis(A)
    ob, ub = affine_basis(B)
    tol = _tol(A.vertices, B.vertices)
    both = np.vstack([ua, ub]) if len(ua) + len(ub) else np.zeros((0, A.dim_ambient))
    if len(both):
        _, s, vt = np.linalg.svd(both, full_matrices=False)
        span = vt[s > 1e-9]
    else:
        span = both
    d = ob - oa
    resid = d - span.T @ (span @ d) if len(span) else d
    gap = float(np.linalg.norm(resid))
    nested = len(span) == max(len(ua), len(ub))
    if gap <= tol:
        if nested and len(ua) == len(ub):
            return AffineRelation(Relation.IDENTICAL_HULL, 0.0)
        return AffineRelation(Relation.INTERSECTING, 0.0)
    if nested:
        return AffineRelation(Relation.PARALLEL_SEPARATED, gap)
    return AffineRelation(Relation.SKEW, gap)


def dihedral_exterior_angles(P: Polytope) -> list[tuple[tuple[int, int], float, float]]:
    """(edge, length, pi - interior dihedral angle) for each edge of a solid."""
    normals = P.side_normals()
    owner: dict = {}
    for k, f in enumerate(P.faces):
        for a, b in zip(f, f[1:] + f[:1]):
            owner[(a, b)] = k
    out = []
    for a, b in P.edges:
        k1 = owner[(a, b)]
        k2 = owner[(b, a)]
        e = P.vertices[b] - P.vertices[a]
        length = float(np.linalg.norm(e))
        n1, n2 = normals[k1], normals[k2]
        theta = math.atan2(float(np.cross(n1, n2) @ e) / length, float(n1 @ n2))
        out.append(((a, b), length, theta))
    return out


def is_convex(P: Polytope) -> bool:
    if P.dim_intrinsic < 2:
        return True
    v = P.vertices
    tol = _tol(v)
    if P.dim_intrinsic == 2:
        vv = np.c_[v, np.zeros(len(v))] if P.dim_ambient == 2 else v
        N = _newell(vv)
        d = np.roll(vv, -1, axis=0) - vv
        turns = np.cross(d, np.roll(d, -1, axis=0)) @ N
        return bool(np.all(turns >= -tol * np.linalg.norm(N)))
    normals = P.side_normals()
    pts = P.side_points()
    heights = normals @ v.T - np.einsum("kd,kd->k", normals, pts)[:, None]
    return bool(np.all(heights <= tol))


def first_intrinsic_volume(P: Polytope) -> float:
    """V1: sum of edge length times exterior angle over 2 pi for a solid."""
    if P.dim_intrinsic == 3:
        total = 0.0
        for _, length, theta in dihedral_exterior_angles(P):
            if theta < -1e-12:
                raise fail("NONCONVEX", "reflex edge found")
            total += length * theta
        return total / (2 * math.pi)
    if P.dim_intrinsic == 2:
        return float(sum(measure(s) for s in P.sides())) / 2.0
    if P.dim_intrinsic == 1:
        return measure(P)
    return 0.0


def plane_frame(P: Polytope) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Origin, in-plane orthonormal axes (2, 3) and unit normal of a 3D polygon."""
    N = P.plane_normal()
    o = P.vertices[0]
    u = P.vertices[1] - o
    u = u / np.linalg.norm(u)
    w = np.cross(N, u)
    return o, np.stack([u, w]), N


def to_plane(P: Polytope, points, frame=None) -> np.ndarray:
    o, axes, _ = frame if frame is not None else plane_frame(P)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return (pts - o) @ axes.T
