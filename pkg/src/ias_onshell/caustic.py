"""On-shell caustics E^s(L) and their Legendrian lifts as polished point samples.

For an on-shell family G = g(q, beta) - p.beta the critical set is
parametrised by (q, beta) with p = grad_beta g, and the caustic is the
image of the zero set of D(q, beta) = det d^2g/dbeta^2.  Samples are
emitted in arrays; :meth:`CausticSet.samples` yields per-point records.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import ndimage
from skimage import measure

from .construct import GeneratingFamily, IASMap
from .numerics import jacobian
from .polyjet import Poly

TOL_POLISH = 1e-10
NEWTON_MAX_ITER = 30
DEFAULT_RES_1D = 512
DEFAULT_RES_2D = 64
SHELL_BRANCH = 0
SHELL_TOL = 1e-9


class CausticError(ValueError):
    pass


def make_window(window, ncoords: int) -> list[tuple[float, float]]:
    """Normalize a window to one (lo, hi) pair per coordinate.

    Accepts per-coordinate pairs, or a flat 4-tuple (alo, ahi, blo, bhi)
    applied to the first and second half of the coordinates.
    """
    w = list(window)
    if len(w) == 4 and not isinstance(w[0], (tuple, list)):
        half = ncoords // 2
        w = [(w[0], w[1])] * half + [(w[2], w[3])] * half
    w = [(float(lo), float(hi)) for lo, hi in w]
    if len(w) != ncoords:
        raise CausticError(f"window has {len(w)} ranges, expected {ncoords}")
    for lo, hi in w:
        if not hi > lo:
            raise CausticError(f"empty window range [{lo}, {hi}]")
    return w


@dataclass(frozen=True)
class CausticSample:
    x: np.ndarray
    z: float
    param: np.ndarray
    branch: int
    res_grad: float
    res_det: float


@dataclass
class Locus:
    """Polished zero set of D in (q, beta) coordinates (columns q..., beta...)."""

    n: int
    params: np.ndarray
    branch: np.ndarray
    degenerate: bool = False
    dropped: int = 0
    residual: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.params)

    def shell_mask(self) -> np.ndarray:
        return self.branch == SHELL_BRANCH


@dataclass
class CausticSet:
    n: int
    param_names: list
    params: np.ndarray
    x: np.ndarray
    z: np.ndarray
    branch: np.ndarray
    res_grad: np.ndarray
    res_det: np.ndarray
    degenerate: bool = False
    dropped: int = 0
    source: str = "family"

    def __len__(self):
        return len(self.z)

    def samples(self) -> Iterator[CausticSample]:
        for k in range(len(self)):
            yield CausticSample(self.x[k], float(self.z[k]), self.params[k], int(self.branch[k]),
                                float(self.res_grad[k]), float(self.res_det[k]))

    def branches(self) -> list[int]:
        return sorted(set(int(b) for b in self.branch))

    def select(self, mask) -> "CausticSet":
        return CausticSet(self.n, self.param_names, self.params[mask], self.x[mask], self.z[mask],
                          self.branch[mask], self.res_grad[mask], self.res_det[mask],
                          self.degenerate, self.dropped, self.source)

    def header(self) -> list[str]:
        return ["branch", *self.param_names, *[f"x{i + 1}" for i in range(2 * self.n)], "z",
                "res_grad", "res_det"]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for k in range(len(self)):
            w.writerow([int(self.branch[k]), *(f"{v:.17g}" for v in self.params[k]),
                        *(f"{v:.17g}" for v in self.x[k]), f"{self.z[k]:.17g}",
                        f"{self.res_grad[k]:.3e}", f"{self.res_det[k]:.3e}"])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CausticError(f"{path}: empty CSV")
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(header))
    return header, data


# -- family path ---------------------------------------------------------------------

def _beta_hessian_det(fam: GeneratingFamily) -> tuple[Poly, Poly]:
    """(g, D) with g in (beta, q) variables and D = det d^2g/dbeta^2 (reordered to (q, beta))."""
    n = fam.n
    g = fam.generating_function()
    H = [[g.diff(i).diff(j) for j in range(n)] for i in range(n)]
    if n == 1:
        D = H[0][0]
    elif n == 2:
        D = H[0][0] * H[1][1] - H[0][1] * H[1][0]
    else:
        raise CausticError("caustic extraction supports n = 1 or 2")
    # reorder (beta, q) -> (q, beta)
    perm = list(range(n, 2 * n)) + list(range(n))
    to_qb = [0] * (2 * n)
    for new, old in enumerate(perm):
        to_qb[old] = new
    return g.embed(2 * n, to_qb), D.embed(2 * n, to_qb)


def _divide_by_var(p: Poly, var: int) -> Poly:
    terms = {}
    for e, c in p.items():
        if e[var] == 0:
            raise CausticError("polynomial is not divisible by the variable")
        ne = list(e)
        ne[var] -= 1
        terms[tuple(ne)] = c
    return Poly(p.nvars, terms)


def _grad_fns(p: Poly):
    return [p.diff(i).compile() for i in range(p.nvars)]


def _newton_polish(F, grads, pts, tol, max_iter, window):
    """Gradient-direction Newton on the scalar F; returns (pts, converged mask)."""
    pts = np.array(pts, dtype=float)
    active = np.ones(len(pts), dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        p = pts[active]
        val = F(p)
        done = np.abs(val) <= tol
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        p, val, idx = p[~done], val[~done], idx[~done]
        if not len(p):
            break
        g = np.stack([gf(p) for gf in grads], axis=-1)
        nrm2 = np.sum(g * g, axis=-1)
        bad = nrm2 == 0
        step = np.where(bad[:, None], 0.0, val[:, None] * g / np.where(bad, 1.0, nrm2)[:, None])
        pts[idx] = p - step
    val = F(pts)
    lo = np.array([w[0] for w in window])
    hi = np.array([w[1] for w in window])
    span = hi - lo
    inside = np.all((pts >= lo - 1e-9 * span) & (pts <= hi + 1e-9 * span), axis=-1)
    ok = np.isfinite(val) & (np.abs(val) <= tol) & inside
    return pts, ok


def _cell_labels(values: np.ndarray) -> np.ndarray:
    """Connected components of grid cells whose corners change sign."""
    pos = values > 0
    neg = values < 0
    any_pos = pos
    any_neg = neg
    for ax in range(values.ndim):
        sl_a = [slice(None)] * values.ndim
        sl_b = [slice(None)] * values.ndim
        sl_a[ax] = slice(0, -1)
        sl_b[ax] = slice(1, None)
        any_pos = any_pos[tuple(sl_a)] | any_pos[tuple(sl_b)]
        any_neg = any_neg[tuple(sl_a)] | any_neg[tuple(sl_b)]
    crossing = any_pos & any_neg
    labels, _ = ndimage.label(crossing, structure=np.ones((3,) * values.ndim))
    return labels


def _edge_crossings(values: np.ndarray, axes_coords: list[np.ndarray], labels: np.ndarray):
    """Linear interpolation of sign changes along every grid edge; returns (points, labels)."""
    pts, labs = [], []
    ndim = values.ndim
    for ax in range(ndim):
        sl_a = [slice(None)] * ndim
        sl_b = [slice(None)] * ndim
        sl_a[ax] = slice(0, -1)
        sl_b[ax] = slice(1, None)
        va, vb = values[tuple(sl_a)], values[tuple(sl_b)]
        idx = np.argwhere(va * vb < 0)
        if not len(idx):
            continue
        a = va[tuple(idx.T)]
        b = vb[tuple(idx.T)]
        frac = a / (a - b)
        coords = np.stack([axes_coords[d][idx[:, d]] for d in range(ndim)], axis=-1)
        step = axes_coords[ax][1] - axes_coords[ax][0]
        coords[:, ax] += frac * step
        cell = np.minimum(idx, np.array(labels.shape) - 1)
        pts.append(coords)
        labs.append(labels[tuple(cell.T)])
    if not pts:
        return np.zeros((0, ndim)), np.zeros(0, dtype=int)
    return np.concatenate(pts), np.concatenate(labs)


def _grid_eval(fn, axes: list[np.ndarray]) -> np.ndarray:
    """fn on the tensor grid of ``axes``, one slab of the first axis at a time to bound memory."""
    out = np.empty(tuple(len(a) for a in axes))
    rest = np.meshgrid(*axes[1:], indexing="ij")
    for i, a0 in enumerate(axes[0]):
        pts = np.stack([np.full_like(rest[0], a0), *rest], axis=-1)
        out[i] = fn(pts)
    return out


def singular_locus(fam: GeneratingFamily, window, resolution: int | None = None,
                   tol_polish: float = TOL_POLISH, max_iter: int = NEWTON_MAX_ITER) -> Locus:
    """Zero set of D = det d^2g/dbeta^2 over a (q, beta) window.

    The shell beta = 0 always belongs to the locus and is emitted exactly
    as branch 0.  For n = 1, D is odd in beta, so the shell factor is
    divided out and the remaining factor is contoured by marching squares.
    For n = 2 the grid is scanned for sign changes along edges.
    """
    n = fam.n
    if n not in (1, 2):
        raise CausticError("caustic extraction supports n = 1 or 2")
    win = make_window(window, 2 * n)
    res = resolution or (DEFAULT_RES_1D if n == 1 else DEFAULT_RES_2D)
    if res < 2:
        raise CausticError("resolution must be >= 2")
    g, D = _beta_hessian_det(fam)
    if D.is_zero():
        return Locus(n, np.zeros((0, 2 * n)), np.zeros(0, dtype=int), degenerate=True)
    axes = [np.linspace(lo, hi, res) for lo, hi in win]

    shell_pts = np.zeros((0, 2 * n))
    if all(lo <= 0 <= hi for lo, hi in win[n:]):
        grids = np.meshgrid(*axes[:n], indexing="ij")
        q = np.stack([gr.ravel() for gr in grids], axis=-1)
        shell_pts = np.concatenate([q, np.zeros_like(q)], axis=-1)

    dropped = 0
    if n == 1:
        R = _divide_by_var(D, 1)
        if R.degree <= 0:
            off, off_lab = np.zeros((0, 2)), np.zeros(0, dtype=int)
        else:
            Rf = R.compile()
            Q, B = np.meshgrid(axes[0], axes[1], indexing="ij")
            vals = Rf(np.stack([Q, B], axis=-1))
            raw, lab = [], []
            for k, c in enumerate(measure.find_contours(vals, 0.0)):
                qq = np.interp(c[:, 0], np.arange(res), axes[0])
                bb = np.interp(c[:, 1], np.arange(res), axes[1])
                raw.append(np.stack([qq, bb], axis=-1))
                lab.append(np.full(len(c), k + 1))
            if raw:
                raw, lab = np.concatenate(raw), np.concatenate(lab)
                pol, ok = _newton_polish(Rf, _grad_fns(R), raw, tol_polish * 1e-2, max_iter, win)
                dropped = int((~ok).sum())
                off, off_lab = pol[ok], lab[ok]
            else:
                off, off_lab = np.zeros((0, 2)), np.zeros(0, dtype=int)
    else:
        Df = D.compile()
        vals = _grid_eval(Df, axes)
        labels = _cell_labels(vals)
        raw, lab = _edge_crossings(vals, axes, labels)
        # crossings sitting on the shell itself belong to branch 0
        keep = np.max(np.abs(raw[:, n:]), axis=-1) > 0 if len(raw) else np.zeros(0, dtype=bool)
        raw, lab = raw[keep], lab[keep]
        pol, ok = _newton_polish(Df, _grad_fns(D), raw, tol_polish, max_iter, win)
        dropped = int((~ok).sum())
        off, off_lab = pol[ok], lab[ok]

    params = np.concatenate([shell_pts, off])
    branch = np.concatenate([np.full(len(shell_pts), SHELL_BRANCH), off_lab]).astype(int)
    if n == 1:
        # keep marching-squares order inside each contour so branches draw as polylines
        order = np.argsort(branch, kind="stable")
    else:
        order = np.lexsort(tuple(params[:, k] for k in reversed(range(params.shape[1]))) + (branch,))
    params, branch = params[order], branch[order]
    resid = np.abs(D.compile()(params)) if len(params) else np.zeros(0)
    return Locus(n, params, branch, dropped=dropped, residual=resid)


def caustic_points(fam: GeneratingFamily, locus: Locus) -> CausticSet:
    """Push the locus forward: x = (q, grad_beta g), z = g - beta.grad_beta g."""
    n = fam.n
    names = ([f"q{i + 1}" for i in range(n)] + [f"beta{i + 1}" for i in range(n)]) if n > 1 else ["q", "beta"]
    if locus.degenerate or not len(locus):
        empty = np.zeros((0, 2 * n))
        return CausticSet(n, names, empty, empty, np.zeros(0), np.zeros(0, dtype=int),
                          np.zeros(0), np.zeros(0), locus.degenerate, locus.dropped)
    g, D = _beta_hessian_det(fam)
    P = locus.params
    grad = np.stack([g.diff(n + i).compile()(P) for i in range(n)], axis=-1)
    gval = g.compile()(P)
    beta = P[:, n:]
    x = np.concatenate([P[:, :n], grad], axis=-1)
    z = gval - np.sum(beta * grad, axis=-1)
    # residuals re-evaluated on the full family G(beta, q, p)
    full = np.concatenate([beta, P[:, :n], grad], axis=-1)
    dG = np.stack([fam.G.diff(i).compile()(full) for i in range(n)], axis=-1)
    res_grad = np.max(np.abs(dG), axis=-1)
    res_det = np.abs(D.compile()(P))
    Gval = fam.G.compile()(full)
    if len(Gval) and np.max(np.abs(Gval - z)) > 1e-9 * (1 + np.max(np.abs(z))):
        raise CausticError("Legendrian lift disagrees with G at the samples")
    return CausticSet(n, names, P, x, z, locus.branch.copy(), res_grad, res_det, False, locus.dropped)


def family_caustic(fam: GeneratingFamily, window, resolution: int | None = None,
                   tol_polish: float = TOL_POLISH) -> CausticSet:
    return caustic_points(fam, singular_locus(fam, window, resolution, tol_polish))


# -- parametric path -----------------------------------------------------------------

def _det_x(ias: IASMap, pts: np.ndarray) -> np.ndarray:
    return np.linalg.det(jacobian(ias, "x", pts))


def parametric_caustic(ias: IASMap, window, resolution: int = 256, tol: float = 1e-12,
                       max_bisect: int = 60) -> CausticSet:
    """Singular set of the map x over a parameter box, by det(Dx) sign changes.

    Each sign change along a grid edge is refined by bisection; nodes where
    det(Dx) already vanishes to ``tol`` are kept as they are.  ``res_grad``
    holds the smallest singular value of Dx and ``res_det`` |det Dx|.
    Samples on the shell get branch 0; the other components are numbered
    from 1 in grid order.
    """
    m = 2 * ias.n
    win = make_window(window, m)
    if resolution < 2:
        raise CausticError("resolution must be >= 2")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in win]
    grids = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack(grids, axis=-1)
    vals = _grid_eval(lambda p: _det_x(ias, p), axes)
    labels = _cell_labels(vals)

    pts, labs = [], []
    ndim = m
    for ax in range(ndim):
        sl_a = [slice(None)] * ndim
        sl_b = [slice(None)] * ndim
        sl_a[ax] = slice(0, -1)
        sl_b[ax] = slice(1, None)
        va, vb = vals[tuple(sl_a)], vals[tuple(sl_b)]
        idx = np.argwhere(va * vb < 0)
        if not len(idx):
            continue
        a = nodes[tuple(sl_a)][tuple(idx.T)]
        b = nodes[tuple(sl_b)][tuple(idx.T)]
        fa = va[tuple(idx.T)]
        for _ in range(max_bisect):
            mid = 0.5 * (a + b)
            fm = _det_x(ias, mid)
            left = np.sign(fm) == np.sign(fa)
            a = np.where(left[:, None], mid, a)
            fa = np.where(left, fm, fa)
            b = np.where(left[:, None], b, mid)
        pts.append(0.5 * (a + b))
        cell = np.minimum(idx, np.array(labels.shape) - 1)
        labs.append(labels[tuple(cell.T)])
    zero_nodes = np.argwhere(np.abs(vals) <= tol)
    if len(zero_nodes):
        pts.append(nodes[tuple(zero_nodes.T)])
        cell = np.minimum(zero_nodes, np.array(labels.shape) - 1)
        labs.append(labels[tuple(cell.T)])
    if pts:
        P = np.concatenate(pts)
        L = np.concatenate(labs).astype(int)
        # merge duplicates produced by edges sharing a zero node
        key = np.round(P, 9)
        _, first = np.unique(key, axis=0, return_index=True)
        first = np.sort(first)
        P, L = P[first], L[first]
    else:
        P, L = np.zeros((0, m)), np.zeros(0, dtype=int)
    if len(P):
        on_shell = _shell_gap(P, ias.n, ias.kind) <= SHELL_TOL
        L = np.where(on_shell, 0, L)
        _, L = np.unique(L, return_inverse=True)
        L = L.reshape(-1) + (0 if on_shell.any() else 1)
    J = jacobian(ias, "x", P) if len(P) else np.zeros((0, m, m))
    svals = np.linalg.svd(J, compute_uv=False) if len(P) else np.zeros((0, m))
    res_sv = svals[:, -1] if len(P) else np.zeros(0)
    res_det = np.abs(np.linalg.det(J)) if len(P) else np.zeros(0)
    x = ias.x(P) if len(P) else np.zeros((0, m))
    z = ias.f(P) if len(P) else np.zeros(0)
    order = np.lexsort(tuple(P[:, k] for k in reversed(range(m))) + (L,)) if len(P) else np.zeros(0, dtype=int)
    return CausticSet(ias.n, ias.param_names, P[order], x[order], z[order], L[order], res_sv[order],
                      res_det[order], source=f"parametric:{ias.kind}")


def _shell_gap(P: np.ndarray, n: int, kind: str) -> np.ndarray:
    if kind == "cc":
        return np.max(np.abs(P[:, :n] - P[:, n:]), axis=-1)
    return np.max(np.abs(P[:, n:]), axis=-1)


def shell_distance(cs: CausticSet, kind: str) -> np.ndarray:
    """Distance of parametric samples from the shell (|u - v| for cc, |t| for sp)."""
    return _shell_gap(cs.params, cs.n, kind)
