"""Brute-force ground truth: uniform sampling, Monte Carlo moments, quadrature.

Random numbers come from numpy's counter-based Philox generator keyed by
``(seed, stream)``.  Samples are drawn in fixed-size blocks; block ``b`` uses
the key's generator jumped ``b`` times, so every block is reproducible on its
own and partial sums can be computed on any number of threads and combined
in block order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import fail
from .geom import Polytope, _newell, _tol, is_convex, measure, plane_frame, to_plane
from .quadrature import QuadResult, quad2d

__all__ = [
    "McEstimate",
    "QuadResult",
    "quad2d",
    "simplex_decomposition",
    "sample_uniform",
    "estimate_moment",
    "chi_square_uniformity",
    "max_threads",
]

BLOCK = 1 << 16
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def agrees(self, value: float, sigmas: float = 4.0) -> bool:
        return abs(value - self.mean) <= sigmas * self.stderr


def max_threads() -> int:
    env = os.environ.get("MEANDIST_MAX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise fail("BAD_ENV", f"MEANDIST_MAX_THREADS={env!r} is not an integer") from None
    return max(1, min(8, os.cpu_count() or 1))


def _generator(seed: int, stream: int, block: int) -> np.random.Generator:
    if seed < 0 or seed > _MASK64:
        raise fail("BAD_SEED", "seed must be a 64-bit unsigned integer")
    bitgen = np.random.Philox(key=(int(stream) & _MASK64) << 64 | int(seed))
    if block:
        bitgen = bitgen.jumped(block)
    return np.random.Generator(bitgen)


# --- decomposition ----------------------------------------------------------


def simplex_decomposition(P: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Simplices (N, k+1, d) and signed measures (N,) summing to measure(P).

    Polygons are fanned from their vertex centroid and solids from the vertex
    centroid over per-face fans.  Signs are negative only where the fan is
    not star-shaped, which happens for some nonconvex inputs.
    """
    v = P.vertices
    k = P.dim_intrinsic
    if k == 0:
        return v[None, :1, :].copy(), np.ones(1)
    if k == 1:
        return v[None, :2, :].copy(), np.array([measure(P)])
    if k == 2:
        c = v.mean(axis=0)
        nxt = np.roll(v, -1, axis=0)
        simp = np.stack([np.broadcast_to(c, v.shape), v, nxt], axis=1)
        if P.dim_ambient == 2:
            e1, e2 = v - c, nxt - c
            w = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        else:
            N = _newell(v)
            N = N / np.linalg.norm(N)
            w = 0.5 * np.cross(v - c, nxt - c) @ N
        keep = np.abs(w) > _tol(v) ** 2 * 1e-6
        return simp[keep], w[keep]
    C = v.mean(axis=0)
    simps, ws = [], []
    for f in P.faces:
        fv = v[list(f)]
        fc = fv.mean(axis=0)
        nxt = np.roll(fv, -1, axis=0)
        for a, b in zip(fv, nxt):
            w = float(np.dot(fc - C, np.cross(a - fc, b - fc))) / 6.0
            if abs(w) > _tol(v) ** 3 * 1e-6:
                simps.append([C, fc, a, b])
                ws.append(w)
    return np.array(simps), np.array(ws)


# --- containment tests -----------------------------------------------------


def _inside_polygon2d(poly: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Crossing-number test for a simple polygon."""
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    a = poly[None, :, :]
    b = np.roll(poly, -1, axis=0)[None, :, :]
    ay, by = a[..., 1], b[..., 1]
    straddle = (ay > y) != (by > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = a[..., 0] + (y - ay) * (b[..., 0] - a[..., 0]) / (by - ay)
    hits = straddle & (x < xcross)
    return (hits.sum(axis=1) % 2) == 1


def _inside_solid(P: Polytope, pts: np.ndarray) -> np.ndarray:
    """Winding number of the boundary around each point (ray parity generalised).

    Faces are fanned into oriented triangles and the solid angles summed with
    the Van Oosterom-Strackee formula; the total is 4 pi inside, 0 outside.
    """
    v = P.vertices
    tris = []
    for f in P.faces:
        fv = v[list(f)]
        for i in range(1, len(fv) - 1):
            tris.append((fv[0], fv[i], fv[i + 1]))
    T = np.array(tris)
    omega = np.zeros(len(pts))
    for start in range(0, len(pts), 8192):
        chunk = pts[start : start + 8192]
        R = T[None, :, :, :] - chunk[:, None, None, :]
        a, b, c = R[:, :, 0], R[:, :, 1], R[:, :, 2]
        la, lb, lc = (np.linalg.norm(x, axis=-1) for x in (a, b, c))
        num = np.einsum("ntd,ntd->nt", a, np.cross(b, c))
        den = (
            la * lb * lc
            + np.einsum("ntd,ntd->nt", a, b) * lc
            + np.einsum("ntd,ntd->nt", a, c) * lb
            + np.einsum("ntd,ntd->nt", b, c) * la
        )
        omega[start : start + 8192] = 2 * np.arctan2(num, den).sum(axis=1)
    return omega > 2 * math.pi


# --- samplers ----------------------------------------------------------------


class _Sampler:
    """Turns uniforms into points of P, by simplex map or by rejection."""

    def __init__(self, P: Polytope):
        if P.dim_intrinsic > 0:
            try:
                m = measure(P)
            except Exception as exc:
                raise fail("ZERO_MEASURE", "cannot sample a degenerate polytope") from exc
            if not m > 0:
                raise fail("ZERO_MEASURE", "cannot sample a polytope of zero measure")
        self.P = P
        self.k = P.dim_intrinsic
        simp, w = simplex_decomposition(P)
        self.simplices = np.ascontiguousarray(simp)
        # solids: fan only for convex input; anything else goes through rejection
        self.direct = bool(np.all(w > 0)) and (self.k < 3 or is_convex(P))
        self.cdf = np.cumsum(np.where(w > 0, w, 0.0)) if self.direct else None
        if not self.direct:
            self._setup_rejection()

    def _setup_rejection(self) -> None:
        P = self.P
        if self.k == 3:
            self.lo = P.vertices.min(axis=0)
            self.hi = P.vertices.max(axis=0)
            self.accept_ratio = measure(P) / float(np.prod(self.hi - self.lo))
        else:
            self.frame = plane_frame(P) if P.dim_ambient == 3 else None
            poly = to_plane(P, P.vertices, self.frame) if self.frame else P.vertices
            self.poly2d = poly
            self.lo = poly.min(axis=0)
            self.hi = poly.max(axis=0)
            self.accept_ratio = measure(P) / float(np.prod(self.hi - self.lo))

    @property
    def width(self) -> int:
        return self.k + 1

    def _lift(self, pts2d: np.ndarray) -> np.ndarray:
        if self.frame is None:
            return pts2d
        o, axes, _ = self.frame
        return o + pts2d @ axes

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.direct:
            return _backend_points(self.simplices, self.cdf, rng.random((n, self.width)))
        out = []
        have = 0
        while have < n:
            m = int((n - have) / max(self.accept_ratio, 1e-3) * 1.1) + 16
            box = self.lo + rng.random((m, len(self.lo))) * (self.hi - self.lo)
            if self.k == 3:
                good = box[_inside_solid(self.P, box)]
            else:
                good = self._lift(box[_inside_polygon2d(self.poly2d, box)])
            out.append(good)
            have += len(good)
        return np.concatenate(out)[:n]


def _backend_points(simplices, cdf, U):
    from ._kernels_py import simplex_points

    return simplex_points(simplices, cdf, U)


def sample_uniform(P: Polytope, seed: int, count: int, stream: int = 0) -> np.ndarray:
    """``count`` independent uniform points of P as a (count, d) array."""
    sampler = _Sampler(P)
    parts = []
    for b in range(0, max(1, -(-int(count) // BLOCK))):
        n = min(BLOCK, int(count) - b * BLOCK)
        if n <= 0:
            break
        parts.append(sampler.draw(_generator(seed, stream, b), n))
    if not parts:
        return np.zeros((0, P.dim_ambient))
    return np.concatenate(parts)


# --- moments -------------------------------------------------------------------


def _same_region(A: Polytope, B: Polytope) -> bool:
    if A is B:
        return True
    return (
        A.dim_intrinsic == B.dim_intrinsic
        and A.vertices.shape == B.vertices.shape
        and bool(np.allclose(A.vertices, B.vertices, rtol=0, atol=0))
    )


def _block_sums_direct(sa: _Sampler, sb: _Sampler, p: float, rng, n: int) -> tuple[float, float]:
    UA = rng.random((n, sa.width))
    UB = rng.random((n, sb.width))
    return _backend.mc_accumulate(sa.simplices, sa.cdf, sb.simplices, sb.cdf, p, UA, UB)


def _block_sums_points(sa: _Sampler, sb: _Sampler, p: float, rng, n: int) -> tuple[float, float]:
    X = sa.draw(rng, n)
    Y = sb.draw(rng, n)
    r2 = ((X - Y) ** 2).sum(axis=1)
    v = r2 ** (0.5 * p)
    return math.fsum(v), math.fsum(v * v)


def _block_sums_polar(sa: _Sampler, p: float, rng, n: int) -> tuple[float, float]:
    """Same-polygon estimator with the singularity absorbed by polar sampling.

    X is uniform, Y = X + r(cos t, sin t) with r uniform on [0, R]; the weight
    2 pi R r^(1+p) / area is bounded for p >= -1.
    """
    P = sa.P
    frame = plane_frame(P) if P.dim_ambient == 3 else None
    poly = to_plane(P, P.vertices, frame) if frame else P.vertices
    R = P.diameter()
    area = measure(P)
    X = sa.draw(rng, n)
    X2 = to_plane(P, X, frame) if frame else X
    t = rng.random(n) * 2 * math.pi
    r = rng.random(n) * R
    Y2 = X2 + r[:, None] * np.c_[np.cos(t), np.sin(t)]
    inside = _inside_polygon2d(poly, Y2)
    v = np.where(inside, 2 * math.pi * R * r ** (1 + p) / area, 0.0)
    return math.fsum(v), math.fsum(v * v)


def estimate_moment(
    A: Polytope,
    B: Polytope,
    p,
    n_samples: int,
    seed: int = 0,
    stream: int = 0,
    threads: int | None = None,
) -> McEstimate:
    """Monte Carlo estimate of E|X - Y|^p with X uniform on A and Y on B.

    When A and B are the same polygon and p <= -1 the plain estimator has
    infinite variance, so the polar estimator is used instead.
    """
    n_samples = int(n_samples)
    if n_samples < 2:
        raise fail("TOO_FEW_SAMPLES", "need at least two samples")
    p = float(p)
    sa = _Sampler(A)
    sb = sa if _same_region(A, B) else _Sampler(B)
    if p == 0.0:
        return McEstimate(1.0, 0.0, n_samples, int(seed))
    same = sb is sa
    if same and sa.k == 1 and p <= -1:
        raise fail("DIVERGENT", "E|X-Y|^p diverges on a segment for p <= -1")
    if same and sa.k == 2 and p <= -1:
        work = lambda rng, n: _block_sums_polar(sa, p, rng, n)  # noqa: E731
    elif sa.direct and sb.direct:
        work = lambda rng, n: _block_sums_direct(sa, sb, p, rng, n)  # noqa: E731
    else:
        work = lambda rng, n: _block_sums_points(sa, sb, p, rng, n)  # noqa: E731

    n_blocks = -(-n_samples // BLOCK)

    def run(b: int) -> tuple[float, float]:
        n = min(BLOCK, n_samples - b * BLOCK)
        return work(_generator(int(seed), stream, b), n)

    workers = min(threads or max_threads(), n_blocks)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]
    s1 = math.fsum(x for x, _ in parts)
    s2 = math.fsum(y for _, y in parts)
    mean = s1 / n_samples
    var = max(s2 - n_samples * mean * mean, 0.0) / (n_samples - 1)
    return McEstimate(mean, math.sqrt(var / n_samples), n_samples, int(seed))


def chi_square_uniformity(points: np.ndarray, lo, hi, cells_per_axis: int) -> tuple[float, float]:
    """Chi-square statistic and p-value for equal-probability box cells."""
    from scipy.stats import chi2

    pts = np.asarray(points, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    idx = np.floor((pts - lo) / (hi - lo) * cells_per_axis).astype(int)
    idx = np.clip(idx, 0, cells_per_axis - 1)
    flat = np.ravel_multi_index(idx.T, (cells_per_axis,) * pts.shape[1])
    counts = np.bincount(flat, minlength=cells_per_axis ** pts.shape[1])
    expected = len(pts) / len(counts)
    stat = float(((counts - expected) ** 2).sum() / expected)
    return stat, float(chi2.sf(stat, len(counts) - 1))
