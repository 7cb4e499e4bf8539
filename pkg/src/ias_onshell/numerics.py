"""Float Jacobians of IAS maps: exact derivative polynomials when available, else central differences."""
from __future__ import annotations

import numpy as np

FD_STEP = 1e-6


def jacobian(ias, which: str, pts: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """d(which)/d(params) at ``pts`` (..., 2n) -> (..., 2n, 2n), rows = components."""
    pts = np.asarray(pts, dtype=float)
    m = 2 * ias.n
    if ias.polys is not None and which in ("x", "y"):
        comps = ias.polys[which]
        cache = ias.__dict__.setdefault("_jac_cache", {})
        if which not in cache:
            cache[which] = [[c.diff(j).compile() for j in range(m)] for c in comps]
        fns = cache[which]
        return np.stack([np.stack([fns[i][j](pts) for j in range(m)], axis=-1) for i in range(m)], axis=-2)
    fn = getattr(ias, which)
    cols = []
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        cols.append((fn(pts + e) - fn(pts - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def gradient_fd(fn, pts: np.ndarray, h: float) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    m = pts.shape[-1]
    out = []
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        out.append((fn(pts + e) - fn(pts - e)) / (2 * h))
    return np.stack(out, axis=-1)
