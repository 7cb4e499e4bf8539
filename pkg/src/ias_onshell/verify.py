"""Checks of the defining identities of constructed improper affine spheres.

Polynomial germs are checked symbolically (exact term maps); the circle and
torus builtins by finite differences over a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy import ndimage

from .construct import IASMap, cc_sp_transform, gen_family, holomorphic_extension
from .germ import LagrangianGerm
from .numerics import jacobian
from .polyjet import Poly

EXACT_PASS = "exact-pass"
TOL_REGULAR = 1e-6
TOL_MA = 1e-6
TOL_FD = 1e-7
FD_H = 1e-4


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_residual: object = EXACT_PASS
    samples: int = 0
    order: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"check": self.name, "passed": bool(self.passed),
             "max_residual": self.max_residual if isinstance(self.max_residual, str)
             else float(f"{self.max_residual:.6e}"),
             "samples": self.samples}
        if self.order is not None:
            d["order"] = round(float(self.order), 3)
        if self.details:
            d["details"] = self.details
        return d


def _nonzero_terms(p: Poly, names) -> dict:
    return {p.format(names): "nonzero"} if not p.is_zero() else {}


def default_grid(ias: IASMap, res: int | None = None, window=None) -> np.ndarray:
    """Grid of parameter points (res^(2n), 2n), avoiding the shell itself."""
    m = 2 * ias.n
    if res is None:
        res = 64 if ias.n == 1 else 9
    if window is None:
        if ias.is_polynomial:
            window = [(-0.45, 0.55)] * m
        else:
            window = [(-2.9, 3.1)] * ias.n + ([(-2.8, 3.2)] if ias.kind == "cc" else [(0.1, 1.0)]) * ias.n
    axes = [np.linspace(lo, hi, res) for lo, hi in window]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


# -- Hamiltonian relation f_a = omega(x_a, y) ---------------------------------------

def hamiltonian_residual_polys(ias: IASMap) -> list[Poly]:
    m = 2 * ias.n
    x, y, f = ias.polys["x"], ias.polys["y"], ias.polys["f"]
    om = ias.omega
    out = []
    for a in range(m):
        r = f.diff(a)
        for i in range(m):
            xa = x[i].diff(a)
            for j in range(m):
                if om[i, j]:
                    r = r - xa * y[j] * Fraction(int(om[i, j]))
        out.append(r)
    return out


def _fd_hamiltonian(ias: IASMap, pts: np.ndarray, h: float) -> float:
    m = 2 * ias.n
    y = ias.y(pts)
    worst = 0.0
    for a in range(m):
        e = np.zeros(m)
        e[a] = h
        fa = (ias.f(pts + e) - ias.f(pts - e)) / (2 * h)
        xa = (ias.x(pts + e) - ias.x(pts - e)) / (2 * h)
        res = fa - np.einsum("...i,ij,...j->...", xa, ias.omega, y)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def check_hamiltonian(ias: IASMap, grid: np.ndarray | None = None, h: float = FD_H,
                      tol: float = TOL_FD) -> CheckReport:
    """f_a - omega(x_a, y) for every parameter a: exact for polynomial germs, else FD at h and h/2."""
    if ias.is_polynomial:
        res = hamiltonian_residual_polys(ias)
        bad = {}
        for a, r in enumerate(res):
            bad.update(_nonzero_terms(r, ias.param_names))
        return CheckReport("hamiltonian", not bad, EXACT_PASS if not bad else "nonzero", len(res),
                           details={"nonzero": bad} if bad else {})
    pts = default_grid(ias) if grid is None else np.asarray(grid, dtype=float)
    r1 = _fd_hamiltonian(ias, pts, h)
    r2 = _fd_hamiltonian(ias, pts, h / 2)
    order = math.log2(r1 / r2) if r1 > 0 and r2 > 0 else None
    n_pts = int(np.prod(pts.shape[:-1]))
    return CheckReport("hamiltonian", r2 < tol, r2, n_pts, order, {"h": h, "residual_h": r1, "residual_h/2": r2})


# -- Monge-Ampere --------------------------------------------------------------------

def _det_poly(M: list[list[Poly]]) -> Poly:
    """Leibniz determinant; fine for the 2x2 and 4x4 Jacobians used here."""
    k = len(M)
    total = Poly.zero(M[0][0].nvars)
    for perm in permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = Poly.const(M[0][0].nvars, -1 if inv % 2 else 1)
        for i in range(k):
            term = term * M[i][perm[i]]
            if term.is_zero():
                break
        total = total + term
    return total


def monge_ampere_symbolic(ias: IASMap) -> tuple[int | None, Poly, Poly]:
    """(sign, det Dx, det Dy) with det Dy == sign * det Dx identically, or sign None if neither holds."""
    m = 2 * ias.n
    dX = _det_poly([[c.diff(j) for j in range(m)] for c in ias.polys["x"]])
    dY = _det_poly([[c.diff(j) for j in range(m)] for c in ias.polys["y"]])
    for sign in (1, -1):
        if (dY - dX * sign).is_zero():
            return sign, dX, dY
    return None, dX, dY


def _frac_det(M: list[list[Fraction]]) -> Fraction:
    M = [list(r) for r in M]
    k = len(M)
    det = Fraction(1)
    for c in range(k):
        pr = next((i for i in range(c, k) if M[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, k):
            fct = M[i][c] / M[c][c]
            M[i] = [a - fct * b for a, b in zip(M[i], M[c])]
    return det


def monge_ampere_at(ias: IASMap, point) -> Fraction:
    """Exact det Dy / det Dx at a rational parameter point of a polynomial germ."""
    m = 2 * ias.n
    pt = [Fraction(p) for p in point]
    dX = _frac_det([[c.diff(j).evaluate(pt) for j in range(m)] for c in ias.polys["x"]])
    dY = _frac_det([[c.diff(j).evaluate(pt) for j in range(m)] for c in ias.polys["y"]])
    if dX == 0:
        raise ValueError("point is singular: det Dx = 0")
    return dY / dX


def check_monge_ampere(ias: IASMap, grid: np.ndarray | None = None, tol_regular: float = TOL_REGULAR,
                       tol: float = TOL_MA) -> CheckReport:
    """|det Dy| = |det Dx| and symmetry of J^-1 Dy Dx^-1 at regular grid points.

    The sign of det Dy / det Dx is recorded per connected regular component
    of the grid and must be constant on each.
    """
    pts = default_grid(ias) if grid is None else np.asarray(grid, dtype=float)
    Dx = jacobian(ias, "x", pts)
    Dy = jacobian(ias, "y", pts)
    detx = np.linalg.det(Dx)
    dety = np.linalg.det(Dy)
    regular = np.abs(detx) > tol_regular
    n_reg = int(regular.sum())
    if not n_reg:
        raise ValueError("no regular points in window")
    ratio_res = np.abs(np.abs(dety[regular]) - np.abs(detx[regular])) / np.abs(detx[regular])
    Jinv = np.linalg.inv(ias.omega)
    H = Jinv @ Dy[regular] @ np.linalg.inv(Dx[regular])
    scale = np.maximum(1.0, np.max(np.abs(H), axis=(-2, -1)))
    sym_res = np.max(np.abs(H - np.swapaxes(H, -1, -2)), axis=(-2, -1)) / scale
    sign = np.sign(dety / np.where(regular, detx, 1.0))

    comp_signs = {}
    constant = True
    if pts.ndim > 2:
        labels, ncomp = ndimage.label(regular)
        for k in range(1, ncomp + 1):
            s = set(np.unique(sign[labels == k]).astype(int).tolist())
            constant &= len(s) == 1
            comp_signs[k] = sorted(s)
    signs = sorted(set(np.unique(sign[regular]).astype(int).tolist()))
    worst = max(float(ratio_res.max()), float(sym_res.max()))
    passed = bool(ratio_res.max() < tol and sym_res.max() < tol and constant)
    details = {"ratio_residual": float(ratio_res.max()), "symmetry_residual": float(sym_res.max()),
               "signs": signs, "components": len(comp_signs), "sign_constant_per_component": bool(constant)}
    return CheckReport("monge_ampere", passed, worst, n_reg, details=details)


# -- shell ---------------------------------------------------------------------------

def check_shell(ias: IASMap, samples: int = 257, tol: float = 1e-10) -> CheckReport:
    """y = 0 and f = 0 on the shell (u = v, resp. t = 0); Hess_t Q = 0 on t = 0 for sp."""
    n = ias.n
    m = 2 * n
    if ias.is_polynomial:
        if ias.kind == "cc":
            on_shell = [Poly.var(n, i) for i in range(n)] * 2
        else:
            on_shell = [Poly.var(n, i) for i in range(n)] + [Poly.zero(n)] * n
        exprs = {f"y{i + 1}": c for i, c in enumerate(ias.polys["y"])}
        exprs["f"] = ias.polys["f"]
        if ias.kind == "sp":
            Q = ias.polys["Q"]
            for j in range(n):
                for k in range(j, n):
                    exprs[f"Q_t{j + 1}t{k + 1}"] = Q.diff(n + j).diff(n + k)
        names = ["q"] if n == 1 else [f"q{i + 1}" for i in range(n)]
        bad = {}
        for label, p in exprs.items():
            r = p.subs(on_shell)
            if not r.is_zero():
                bad[label] = r.format(names)
        return CheckReport("shell", not bad, EXACT_PASS if not bad else "nonzero", len(exprs),
                           details={"nonzero": bad} if bad else {})
    a = np.linspace(-math.pi, math.pi, samples)
    grids = np.meshgrid(*([a] * n), indexing="ij")
    base = np.stack([g.ravel() for g in grids], axis=-1)
    pts = ias.shell(base)
    ry = float(np.max(np.abs(ias.y(pts))))
    rf = float(np.max(np.abs(ias.f(pts))))
    worst = max(ry, rf)
    return CheckReport("shell", worst < tol, worst, len(pts), details={"y": ry, "f": rf})


# -- family consistency --------------------------------------------------------------

def check_family_consistency(g: LagrangianGerm) -> CheckReport:
    """Exact: oddness in beta, cc <-> sp transform round trip, and the Q identities.

    Pluriharmonicity of Q is checked as Q_{s_j s_k} + Q_{t_j t_k} = 0 and
    Q_{s_j t_k} = Q_{s_k t_j}; the real slice condition as Q_t(s, 0) = dS(s).
    """
    n = g.n
    fails = {}
    fams = {k: gen_family(g, k) for k in ("cc", "sp")}
    for k, fam in fams.items():
        if not fam.G.is_odd_in(fam.beta_vars()):
            fails[f"{k}_odd"] = "G not odd in beta"
    if not fails:
        if cc_sp_transform(fams["cc"]).G != fams["sp"].G:
            fails["cc_to_sp"] = "transform(G_cc) != G_sp"
        if cc_sp_transform(fams["sp"]).G != fams["cc"].G:
            fails["sp_to_cc"] = "transform(G_sp) != G_cc"
    Q = holomorphic_extension(g)
    for j in range(n):
        for k in range(j, n):
            lap = Q.diff(j).diff(k) + Q.diff(n + j).diff(n + k)
            if not lap.is_zero():
                fails[f"Q_s{j + 1}s{k + 1}+Q_t{j + 1}t{k + 1}"] = "nonzero"
            mixed = Q.diff(j).diff(n + k) - Q.diff(k).diff(n + j)
            if not mixed.is_zero():
                fails[f"Q_s{j + 1}t{k + 1}-Q_s{k + 1}t{j + 1}"] = "nonzero"
    on_real = [Poly.var(n, i) for i in range(n)] + [Poly.zero(n)] * n
    for k in range(n):
        if Q.diff(n + k).subs(on_real) != g.S.diff(k):
            fails[f"Q_t{k + 1}(s,0)"] = "differs from dS"
    checks = 2 + 2 + n * (n + 1) + n
    return CheckReport("family", not fails, EXACT_PASS if not fails else "nonzero", checks,
                       details={"failures": fails} if fails else {})


CHECKS = ("hamiltonian", "ma", "shell", "family")


def run_checks(ias: IASMap | None, germ: LagrangianGerm | None, checks, grid=None) -> list[CheckReport]:
    out = []
    for c in checks:
        if c == "hamiltonian":
            out.append(check_hamiltonian(ias, grid))
        elif c == "ma":
            out.append(check_monge_ampere(ias, grid))
        elif c == "shell":
            out.append(check_shell(ias))
        elif c == "family":
            if germ is None:
                raise ValueError("the family check needs a polynomial germ")
            out.append(check_family_consistency(germ))
        else:
            raise ValueError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")
    return out
