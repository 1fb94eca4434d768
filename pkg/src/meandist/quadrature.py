"""Adaptive cubature on triangles.

Each leaf triangle carries a collapsed Gauss-Legendre estimate computed on its
four midpoint children; the error indicator is the difference from the
estimate on the parent itself.  Leaves holding the bulk of the indicator are
split until the summed indicator falls below the requested absolute
tolerance.  The whole level is evaluated in one vectorised call so the
integrand only has to accept coordinate arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import fail


def _collapsed_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric nodes and weights on the reference triangle (area 1/2)."""
    x, w = np.polynomial.legendre.leggauss(n)
    u = (x + 1) / 2
    wu = w / 2
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(wu, wu)
    # Duffy map (u, v) -> (u, v (1 - u)), Jacobian (1 - u)
    a = uu
    b = vv * (1 - uu)
    wt = ww * (1 - uu)
    return np.stack([a.ravel(), b.ravel()], axis=1), wt.ravel()


_NODES, _WEIGHTS = _collapsed_rule(5)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_evals: int
    n_leaves: int


def _children(tris: np.ndarray) -> np.ndarray:
    """Split (N, 3, 2) triangles into (4N, 3, 2) midpoint children."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
    kids = np.stack(
        [
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([bc, ca, ab], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 3, 2)


def _rule(f: Callable, tris: np.ndarray) -> np.ndarray:
    a = tris[:, 0]
    e1 = tris[:, 1] - a
    e2 = tris[:, 2] - a
    jac = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = a[:, None, :] + _NODES[None, :, 0:1] * e1[:, None, :] + _NODES[None, :, 1:2] * e2[:, None, :]
    vals = np.asarray(f(pts[..., 0].ravel(), pts[..., 1].ravel()), dtype=float)
    vals = vals.reshape(len(tris), len(_WEIGHTS))
    return jac * (vals @ _WEIGHTS)


def _as_triangles(region) -> np.ndarray:
    reg = np.asarray(region, dtype=float)
    if reg.ndim == 3:
        return reg
    if reg.ndim != 2 or reg.shape[1] != 2 or len(reg) < 3:
        raise fail("DEGENERATE", "region must be a polygon or a list of triangles")
    if len(reg) == 3:
        return reg[None]
    c = reg.mean(axis=0)
    nxt = np.roll(reg, -1, axis=0)
    return np.stack([np.broadcast_to(c, reg.shape), reg, nxt], axis=1)


def quad2d(
    f: Callable,
    region,
    abs_tol: float = 1e-10,
    max_leaves: int = 400_000,
) -> QuadResult:
    """Integrate ``f(x, y)`` over a convex polygon or a triangle list.

    Raises TOLERANCE_NOT_MET when the leaf budget runs out first.
    """
    tris = _as_triangles(region)
    n_evals = 0

    def evaluate(tri_set):
        nonlocal n_evals
        kids = _children(tri_set)
        coarse = _rule(f, tri_set)
        fine = _rule(f, kids).reshape(-1, 4)
        n_evals += (len(tri_set) + len(kids)) * len(_WEIGHTS)
        return fine.sum(axis=1), np.abs(fine.sum(axis=1) - coarse), kids.reshape(-1, 4, 3, 2)

    vals, errs, kids = evaluate(tris)
    while True:
        total = errs.sum()
        if total <= abs_tol:
            break
        if len(vals) + 3 * len(vals) > max_leaves:
            raise fail(
                "TOLERANCE_NOT_MET",
                f"error estimate {total:.3e} above {abs_tol:.3e}",
                value=float(vals.sum()),
                error=float(total),
            )
        order = np.argsort(-errs)
        csum = np.cumsum(errs[order])
        n_mark = int(np.searchsorted(csum, 0.5 * total)) + 1
        # split every leaf whose indicator is not negligible against the target
        n_mark = max(n_mark, int(np.count_nonzero(errs > abs_tol / max(len(errs), 1))))
        n_mark = min(n_mark, len(vals))
        marked = order[:n_mark]
        keep = np.ones(len(vals), dtype=bool)
        keep[marked] = False
        new_tris = kids[marked].reshape(-1, 3, 2)
        v2, e2, k2 = evaluate(new_tris)
        vals = np.concatenate([vals[keep], v2])
        errs = np.concatenate([errs[keep], e2])
        kids = np.concatenate([kids[keep], k2])
    return QuadResult(float(vals.sum()), float(errs.sum()), n_evals, len(vals))
