"""Pure numpy versions of the hot kernels.

These mirror the compiled module function for function and are used when it
is unavailable or when MEANDIST_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np


def _clip_params(base, direction, hp_point, hp_edge):
    """Cyrus-Beck parameter interval of base + t*direction, t in [0, 1].

    base, direction: (N, E, 2) or broadcastable; hp_point, hp_edge: (H, 2)
    describing inside-left half-planes.  Returns t0, t1 of shape (N, E).
    """
    # f(t) = cross(e, base - c) + t cross(e, direction) >= 0
    ex = hp_edge[:, 0]
    ey = hp_edge[:, 1]
    rel_x = base[..., 0][..., None] - hp_point[:, 0]
    rel_y = base[..., 1][..., None] - hp_point[:, 1]
    f0 = ex * rel_y - ey * rel_x
    df = ex * direction[..., 1][..., None] - ey * direction[..., 0][..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        tcross = -f0 / df
    lower = np.where(df > 0, tcross, -np.inf)
    upper = np.where(df < 0, tcross, np.inf)
    dead = (df == 0) & (f0 < 0)
    t0 = np.maximum(lower.max(axis=-1), 0.0)
    t1 = np.minimum(upper.min(axis=-1), 1.0)
    t1 = np.where(dead.any(axis=-1), t0, t1)
    return t0, np.maximum(t1, t0)


def overlap_values(A, B, kind, K):
    """Overlap measure of convex polygon A with B shifted by -k, for each row k of K.

    kind "area": B is a convex polygon, result is area(A cap (B - k)).
    kind "length": B is (S, 2, 2) segments, result is the total length of
    the shifted segments lying inside A.
    """
    A = np.asarray(A, dtype=float)
    K = np.asarray(K, dtype=float)
    a_edge = np.roll(A, -1, axis=0) - A
    if kind == "length":
        segs = np.asarray(B, dtype=float)
        c = segs[:, 0][None, :, :] - K[:, None, :]
        d = np.broadcast_to(segs[:, 1] - segs[:, 0], c.shape)
        t0, t1 = _clip_params(c, d, A, a_edge)
        lengths = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)
        return ((t1 - t0) * lengths).sum(axis=1)
    B = np.asarray(B, dtype=float)
    b_edge = np.roll(B, -1, axis=0) - B
    total = np.zeros(len(K))
    # edges of A clipped by B - k (done as A + k against B, then shifted back)
    base = A[None, :, :] + K[:, None, :]
    dirn = np.broadcast_to(a_edge[None], base.shape)
    t0, t1 = _clip_params(base, dirn, B, b_edge)
    p0 = A[None] + t0[..., None] * dirn
    p1 = A[None] + t1[..., None] * dirn
    total += 0.5 * (p0[..., 0] * p1[..., 1] - p0[..., 1] * p1[..., 0]).sum(axis=1)
    # edges of B - k clipped by A
    base = B[None, :, :] - K[:, None, :]
    dirn = np.broadcast_to(b_edge[None], base.shape)
    t0, t1 = _clip_params(base, dirn, A, a_edge)
    p0 = base + t0[..., None] * dirn
    p1 = base + t1[..., None] * dirn
    total += 0.5 * (p0[..., 0] * p1[..., 1] - p0[..., 1] * p1[..., 0]).sum(axis=1)
    return total


def simplex_points(simplices, cdf, U):
    """Map uniforms U (n, 1 + k) to points uniform on a union of k-simplices."""
    n = len(U)
    k = simplices.shape[1] - 1
    idx = np.searchsorted(cdf, U[:, 0] * cdf[-1], side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    verts = simplices[idx]
    if k == 0:
        return verts[:, 0, :].copy()
    s = np.sort(U[:, 1 : 1 + k], axis=1)
    bary = np.diff(np.concatenate([np.zeros((n, 1)), s, np.ones((n, 1))], axis=1), axis=1)
    return np.einsum("nk,nkd->nd", bary, verts)


def mc_accumulate(simp_a, cdf_a, simp_b, cdf_b, p, UA, UB):
    """Sum and sum of squares of |X - Y|^p over one block of uniforms."""
    X = simplex_points(simp_a, cdf_a, UA)
    Y = simplex_points(simp_b, cdf_b, UB)
    r2 = ((X - Y) ** 2).sum(axis=1)
    v = r2 ** (0.5 * p)
    return float(v.sum()), float((v * v).sum())
