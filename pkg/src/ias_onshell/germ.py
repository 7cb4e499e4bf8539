"""Lagrangian submanifold germs L = graph(dS), recentering and cubic normalization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from pathlib import Path
from typing import Sequence

from .polyjet import Poly, PolyError

FLOAT_ZERO_TOL = 1e-10


class GermError(ValueError):
    pass


def _frac_vector(v, n) -> tuple[Fraction, ...]:
    if v is None:
        return (Fraction(0),) * n
    out = tuple(Fraction(str(x)) if not isinstance(x, (int, Fraction)) else Fraction(x) for x in v)
    if len(out) != n:
        raise GermError(f"basepoint has {len(out)} coordinates, expected {n}")
    return out


@dataclass(frozen=True)
class LagrangianGerm:
    """The germ of L = {(q, dS(q))} at ``basepoint``; S is expressed in q - basepoint."""

    n: int
    S: Poly
    basepoint: tuple = field(default=None)

    def __post_init__(self):
        if self.S.nvars != self.n:
            raise GermError(f"S has {self.S.nvars} variables but n = {self.n}")
        object.__setattr__(self, "basepoint", _frac_vector(self.basepoint, self.n))

    @classmethod
    def from_terms(cls, n: int, terms, basepoint=None) -> "LagrangianGerm":
        return cls(n, Poly(n, terms), basepoint)

    def gradient(self) -> list[Poly]:
        return [self.S.diff(i) for i in range(self.n)]

    def hessian(self) -> list[list[Poly]]:
        return [[self.S.diff(i).diff(j) for j in range(self.n)] for i in range(self.n)]

    def with_S(self, S: Poly) -> "LagrangianGerm":
        return LagrangianGerm(self.n, S, self.basepoint)

    def to_dict(self) -> dict:
        return {"n": self.n, "S": self.S.to_dict(), "basepoint": [str(b) for b in self.basepoint]}

    @classmethod
    def from_dict(cls, d) -> "LagrangianGerm":
        if not isinstance(d, dict):
            raise GermError("germ must be a JSON object")
        try:
            n = int(d["n"])
        except (KeyError, TypeError, ValueError):
            raise GermError("germ.n: missing or not an integer") from None
        if "S" not in d:
            raise GermError("germ.S: missing")
        try:
            S = Poly.from_dict(d["S"])
        except PolyError as exc:
            raise GermError(f"germ.S.{exc}") from None
        try:
            bp = _frac_vector(d.get("basepoint"), n)
        except (ValueError, ZeroDivisionError) as exc:
            raise GermError(f"germ.basepoint: {exc}") from None
        return cls(n, S, bp)


def load_germ(path: str | Path) -> LagrangianGerm:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GermError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return LagrangianGerm.from_dict(data)
    except GermError as exc:
        raise GermError(f"{path}: {exc}") from None


def save_germ(g: LagrangianGerm, path: str | Path) -> None:
    Path(path).write_text(json.dumps(g.to_dict(), indent=2) + "\n")


def recenter(g: LagrangianGerm, q0: Sequence) -> LagrangianGerm:
    """Move the study point to ``q0``: S~(q) = S(q0+q) - S(q0) - grad S(q0).q."""
    q0 = _frac_vector(q0, g.n)
    n = g.n
    shifted = g.S.subs([Poly.var(n, i) + Poly.const(n, q0[i]) for i in range(n)])
    one_jet = {e: c for e, c in shifted.items() if sum(e) <= 1}
    S = shifted - Poly(n, one_jet)
    return LagrangianGerm(n, S, tuple(b + d for b, d in zip(g.basepoint, q0)))


def normalize_cubic(g: LagrangianGerm) -> tuple[LagrangianGerm, list[list[Fraction]]]:
    """Strip the quadratic part of S, returning it as its Hessian (the shear A).

    The removed part is absorbed by p -> p - A q in the generating family,
    which is an odd fibred change of parameters.
    """
    if any(sum(e) <= 1 for e, _ in g.S.items()):
        raise GermError("normalize_cubic needs a germ with zero 1-jet; recenter first")
    quad = g.S.homogeneous_part(2)
    n = g.n
    A = [[Fraction(0)] * n for _ in range(n)]
    for e, c in quad.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            A[i][i] = 2 * c
        else:
            A[i][j] = A[j][i] = c
    return g.with_S(g.S - quad), A


def normalized(g: LagrangianGerm, q0: Sequence | None = None) -> LagrangianGerm:
    """recenter (at ``q0``, default the origin of S's coordinates) then normalize_cubic."""
    h = recenter(g, q0 if q0 is not None else [0] * g.n)
    return normalize_cubic(h)[0]


class JetTable:
    """Partial derivatives S_K = K! * coef_K of a germ at its basepoint.

    Indexed by a multi-index tuple, or by an int for curves.  Entries may be
    exact (Fraction) or float; ``exact`` tells which.
    """

    def __init__(self, n: int, values: dict, max_order: int, exact: bool = True):
        self.n = n
        self.max_order = max_order
        self.exact = exact
        self._values = dict(values)

    def __getitem__(self, key):
        if isinstance(key, int):
            key = (key,)
        key = tuple(key)
        if len(key) != self.n:
            raise KeyError(key)
        if sum(key) > self.max_order:
            raise KeyError(f"order {sum(key)} exceeds table order {self.max_order}")
        return self._values.get(key, Fraction(0) if self.exact else 0.0)

    def items(self):
        return sorted(self._values.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def is_zero_between(self, lo: int, hi: int, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for k, v in self._values.items() if lo <= sum(k) <= hi)

    def to_dict(self) -> dict:
        return {",".join(map(str, k)): str(v) for k, v in self.items()}

    def __repr__(self):
        return f"JetTable(n={self.n}, {self.to_dict()})"


def jets(g: LagrangianGerm, max_order: int = 7) -> JetTable:
    """Exact jet table of a germ whose 2-jet vanishes."""
    if any(sum(e) <= 2 for e, _ in g.S.items()):
        raise GermError("jets needs a normalized germ (zero 2-jet)")
    vals = {}
    for e, c in g.S.items():
        if sum(e) <= max_order:
            w = 1
            for k in e:
                w *= factorial(k)
            vals[e] = c * w
    return JetTable(g.n, vals, max_order, exact=True)


def float_jets(g: LagrangianGerm, point: Sequence[float], max_order: int = 7) -> JetTable:
    """Float jet table of S at a float point (orders 3..max_order).

    Orders 3 and up are unaffected by recentering and by stripping the
    quadratic part, so they are just the derivatives of S at the point.
    """
    pt = [float(x) for x in point]
    if len(pt) != g.n:
        raise GermError(f"point has {len(pt)} coordinates, expected {g.n}")
    vals = {}
    for e in product(range(max_order + 1), repeat=g.n):
        if not 3 <= sum(e) <= max_order:
            continue
        d = g.S
        for i, k in enumerate(e):
            if k:
                d = d.diff(i, k)
        if d.is_zero():
            continue
        v = float(d.evaluate(pt))
        if v != 0.0:
            vals[e] = v
    return JetTable(g.n, vals, max_order, exact=False)
