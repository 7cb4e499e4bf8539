"""Center-chord and special improper affine spheres of a Lagrangian germ.

Polynomial germs get exact (x, y, f) maps plus compiled float evaluators;
the circle and torus builtins carry their closed forms as float evaluators.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from .germ import LagrangianGerm
from .polyjet import Poly, PolyError

KINDS = ("cc", "sp")


class ConstructError(ValueError):
    pass


def standard_omega(n: int) -> np.ndarray:
    """Matrix of omega = sum dq_i ^ dp_i in (q_1..q_n, p_1..p_n) coordinates."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def interleaved_omega(n: int) -> np.ndarray:
    """omega in (q_1, p_1, ..., q_n, p_n) coordinates, as used by the torus."""
    J = np.zeros((2 * n, 2 * n))
    for i in range(n):
        J[2 * i, 2 * i + 1] = 1.0
        J[2 * i + 1, 2 * i] = -1.0
    return J


def _stack(fns: list[Callable]) -> Callable:
    def ev(a):
        return np.stack([f(a) for f in fns], axis=-1)
    return ev


@dataclass
class IASMap:
    """An improper affine map (x, f) with its symplectic gradient y.

    ``x``, ``y`` take an array of parameters with trailing dimension 2n and
    return trailing dimension 2n; ``f`` returns the scalar.  Parameters are
    (u, v) for center-chord maps and (s, t) for special ones.  ``polys`` is
    set for polynomial germs: {"x": [...], "y": [...], "f": Poly}.
    """

    kind: str
    n: int
    x: Callable[[np.ndarray], np.ndarray]
    y: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]
    omega: np.ndarray
    source: object
    polys: dict | None = None
    formulas: dict = field(default_factory=dict)

    @property
    def param_names(self) -> list[str]:
        a, b = ("u", "v") if self.kind == "cc" else ("s", "t")
        return [f"{a}{i + 1}" for i in range(self.n)] + [f"{b}{i + 1}" for i in range(self.n)]

    def shell(self, a: np.ndarray) -> np.ndarray:
        """Parameters of the shell point over ``a``: (a, a) for cc, (a, 0) for sp."""
        a = np.asarray(a, dtype=float)
        other = a if self.kind == "cc" else np.zeros_like(a)
        return np.concatenate([a, other], axis=-1)

    @property
    def is_polynomial(self) -> bool:
        return self.polys is not None


@dataclass(frozen=True)
class GeneratingFamily:
    """G(beta, q, p) = g(q, beta) - p.beta, as a Poly in (beta_1..n, q_1..n, p_1..n)."""

    kind: str
    n: int
    G: Poly
    source: LagrangianGerm | None = None

    def beta_vars(self) -> list[int]:
        return list(range(self.n))

    def q_vars(self) -> list[int]:
        return list(range(self.n, 2 * self.n))

    def p_vars(self) -> list[int]:
        return list(range(2 * self.n, 3 * self.n))

    def generating_function(self) -> Poly:
        """g as a Poly in (beta, q), i.e. G with the p-terms removed."""
        n = self.n
        g = self.G + sum((Poly.var(3 * n, 2 * n + i) * Poly.var(3 * n, i) for i in range(n)),
                         Poly.zero(3 * n))
        if any(any(e[2 * n:]) for e, _ in g.items()):
            raise ConstructError("family has p-dependence beyond -p.beta")
        return g.restrict(list(range(2 * n)))

    def var_names(self) -> list[str]:
        n = self.n
        if n == 1:
            return ["b", "q", "p"]
        return [f"b{i + 1}" for i in range(n)] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "G": self.G.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "GeneratingFamily":
        try:
            kind, n = d["kind"], int(d["n"])
            G = Poly.from_dict(d["G"])
        except (KeyError, TypeError, ValueError, PolyError) as exc:
            raise ConstructError(f"family: {exc}") from None
        if kind not in KINDS:
            raise ConstructError(f"family.kind must be cc or sp, got {kind!r}")
        if G.nvars != 3 * n:
            raise ConstructError(f"family.G must have 3n = {3 * n} variables")
        return cls(kind, n, G)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# -- polynomial constructions --------------------------------------------------

def center_chord_maps(g: LagrangianGerm) -> IASMap:
    n = g.n
    m = 2 * n
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    Su = g.S.embed(m, list(range(n)))
    Sv = g.S.embed(m, list(range(n, m)))
    dSu = [Su.diff(i) for i in range(n)]
    dSv = [Sv.diff(n + i) for i in range(n)]
    u = [Poly.var(m, i) for i in range(n)]
    v = [Poly.var(m, n + i) for i in range(n)]
    x = [(u[i] + v[i]) * half for i in range(n)] + [(dSu[i] + dSv[i]) * half for i in range(n)]
    y = [(u[i] - v[i]) * half for i in range(n)] + [(dSu[i] - dSv[i]) * half for i in range(n)]
    f = (Su - Sv) * half
    for i in range(n):
        f = f - (dSu[i] + dSv[i]) * (u[i] - v[i]) * quarter
    return _poly_ias("cc", g, x, y, f)


def holomorphic_extension(g: LagrangianGerm) -> Poly:
    """Q(s, t) = Im S(s + i t), expanded monomial by monomial."""
    n = g.n
    acc: dict[tuple, Fraction] = {}
    for K, c in g.S.items():
        # choose j_k factors of (i t_k) from each (s_k + i t_k)^{K_k}
        partial = [((), (), 1, 0)]
        for k in range(n):
            nxt = []
            for s_exp, t_exp, w, m in partial:
                for j in range(K[k] + 1):
                    nxt.append((s_exp + (K[k] - j,), t_exp + (j,), w * comb(K[k], j), m + j))
            partial = nxt
        for s_exp, t_exp, w, m in partial:
            if m % 2 == 0:
                continue
            sign = -1 if (m // 2) % 2 else 1
            e = s_exp + t_exp
            acc[e] = acc.get(e, 0) + c * w * sign
    return Poly(2 * n, acc)


def special_maps(g: LagrangianGerm) -> IASMap:
    n = g.n
    m = 2 * n
    Q = holomorphic_extension(g)
    s = [Poly.var(m, i) for i in range(n)]
    t = [Poly.var(m, n + i) for i in range(n)]
    Qs = [Q.diff(i) for i in range(n)]
    Qt = [Q.diff(n + i) for i in range(n)]
    x = s + Qt
    y = t + Qs
    f = Q
    for k in range(n):
        f = f - t[k] * Qt[k]
    ias = _poly_ias("sp", g, x, y, f)
    ias.polys["Q"] = Q
    return ias


def _poly_ias(kind, g, x, y, f) -> IASMap:
    n = g.n
    xs = [p.compile() for p in x]
    ys = [p.compile() for p in y]
    fc = f.compile()
    names = [f"u{i + 1}" for i in range(n)] + [f"v{i + 1}" for i in range(n)] if kind == "cc" \
        else [f"s{i + 1}" for i in range(n)] + [f"t{i + 1}" for i in range(n)]
    return IASMap(
        kind=kind, n=n, x=_stack(xs), y=_stack(ys), f=fc,
        omega=standard_omega(n), source=g,
        polys={"x": x, "y": y, "f": f},
        formulas={"f": f.format(names)},
    )


def ias_maps(g: LagrangianGerm, kind: str) -> IASMap:
    if kind == "cc":
        return center_chord_maps(g)
    if kind == "sp":
        return special_maps(g)
    raise ConstructError(f"unknown kind {kind!r}")


def gen_family(g: LagrangianGerm, kind: str) -> GeneratingFamily:
    """On-shell generating family, odd in beta.

    cc: 1/2 S(q+beta) - 1/2 S(q-beta) - p.beta
    sp: Q(q, beta) - p.beta
    """
    n = g.n
    N = 3 * n
    beta = [Poly.var(N, i) for i in range(n)]
    q = [Poly.var(N, n + i) for i in range(n)]
    p = [Poly.var(N, 2 * n + i) for i in range(n)]
    if kind == "cc":
        plus = g.S.subs([q[i] + beta[i] for i in range(n)])
        minus = g.S.subs([q[i] - beta[i] for i in range(n)])
        G = (plus - minus) * Fraction(1, 2)
    elif kind == "sp":
        Q = holomorphic_extension(g)
        G = Q.subs(q + beta)
    else:
        raise ConstructError(f"unknown kind {kind!r}")
    for i in range(n):
        G = G - p[i] * beta[i]
    return GeneratingFamily(kind, n, G, g)


def cc_sp_transform(fam: GeneratingFamily) -> GeneratingFamily:
    """Map G_cc <-> G_sp: a term of beta-degree j picks up (-1)^floor(j/2)."""
    beta = fam.beta_vars()
    if not fam.G.is_odd_in(beta):
        raise ConstructError("cc_sp_transform needs a family odd in beta")
    acc = {}
    for e, c in fam.G.items():
        j = sum(e[i] for i in beta)
        acc[e] = -c if (j // 2) % 2 else c
    other = "sp" if fam.kind == "cc" else "cc"
    return GeneratingFamily(other, fam.n, Poly(fam.G.nvars, acc, fam.G.truncation), fam.source)


# -- builtins ------------------------------------------------------------------

def parse_builtin(name: str) -> int:
    """'circle' -> 1, 'torus:n' or 'torus(n)' -> n."""
    name = name.strip().lower()
    if name == "circle":
        return 1
    m = re.fullmatch(r"torus(?::|\()(\d+)\)?", name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise ConstructError("torus dimension must be >= 1")
        return n
    raise ConstructError(f"unknown builtin {name!r} (expected circle or torus:n)")


def _torus_cc(n: int) -> IASMap:
    def x(a):
        a = np.asarray(a, dtype=float)
        u, v = a[..., :n], a[..., n:]
        w, mid = (u - v) / 2, (u + v) / 2
        cols = []
        for i in range(n):
            cols += [np.cos(w[..., i]) * np.cos(mid[..., i]), np.cos(w[..., i]) * np.sin(mid[..., i])]
        return np.stack(cols, axis=-1)

    def y(a):
        a = np.asarray(a, dtype=float)
        u, v = a[..., :n], a[..., n:]
        w, mid = (u - v) / 2, (u + v) / 2
        cols = []
        for i in range(n):
            cols += [-np.sin(w[..., i]) * np.sin(mid[..., i]), np.sin(w[..., i]) * np.cos(mid[..., i])]
        return np.stack(cols, axis=-1)

    def f(a):
        a = np.asarray(a, dtype=float)
        u, v = a[..., :n], a[..., n:]
        return 0.25 * np.sum(v - u + np.sin(u - v), axis=-1)

    formula = "f = 1/4*(v - u + sin(u - v))" if n == 1 else "f = 1/4*sum_i(v_i - u_i + sin(u_i - v_i))"
    return IASMap("cc", n, x, y, f, interleaved_omega(n), source=("circle" if n == 1 else f"torus:{n}"),
                  formulas={"x": "cos((u-v)/2)*(cos((u+v)/2), sin((u+v)/2))",
                            "y": "sin((u-v)/2)*(-sin((u+v)/2), cos((u+v)/2))", "f": formula})


def _torus_sp(n: int) -> IASMap:
    def x(a):
        a = np.asarray(a, dtype=float)
        s, t = a[..., :n], a[..., n:]
        cols = []
        for i in range(n):
            cols += [np.cosh(t[..., i]) * np.cos(s[..., i]), np.cosh(t[..., i]) * np.sin(s[..., i])]
        return np.stack(cols, axis=-1)

    def y(a):
        a = np.asarray(a, dtype=float)
        s, t = a[..., :n], a[..., n:]
        cols = []
        for i in range(n):
            cols += [-np.sinh(t[..., i]) * np.sin(s[..., i]), np.sinh(t[..., i]) * np.cos(s[..., i])]
        return np.stack(cols, axis=-1)

    def f(a):
        a = np.asarray(a, dtype=float)
        t = a[..., n:]
        return 0.25 * np.sum(np.sinh(2 * t) - 2 * t, axis=-1)

    formula = "f = 1/4*(sinh(2t) - 2t)" if n == 1 else "f = 1/4*sum_i(sinh(2t_i) - 2t_i)"
    return IASMap("sp", n, x, y, f, interleaved_omega(n), source=("circle" if n == 1 else f"torus:{n}"),
                  formulas={"x": "cosh(t)*(cos(s), sin(s))", "y": "sinh(t)*(-sin(s), cos(s))", "f": formula})


def builtin(name: str) -> dict[str, IASMap]:
    """Closed-form center-chord and special maps of the unit circle / flat n-torus."""
    n = parse_builtin(name)
    return {"cc": _torus_cc(n), "sp": _torus_sp(n)}
