"""Exact multivariate polynomials and truncated jets over the rationals.

Coefficients are :class:`fractions.Fraction`; every operation is exact.  A
separate float path (:meth:`Poly.compile`) evaluates on numpy arrays for
the numeric caustic and verification code.
"""
from __future__ import annotations

import json
from fractions import Fraction
from itertools import product
from math import factorial
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

DEFAULT_TRUNCATION = 9

MultiIndex = tuple


class PolyError(ValueError):
    pass


def glex_key(exp: Sequence[int]):
    """Graded-lex sort key: lower degree first, then x0 > x1 > ... within a degree."""
    return (sum(exp), tuple(-e for e in exp))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, float):
        # floats are accepted only when they are exactly representable rationals
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Poly:
    """Immutable polynomial in ``nvars`` variables with rational coefficients.

    ``truncation`` (optional) marks the value as a jet: terms of total degree
    above it are discarded on construction and by every operation.
    """

    __slots__ = ("nvars", "truncation", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable = (), truncation: int | None = None):
        if nvars < 1:
            raise PolyError("nvars must be >= 1")
        if truncation is not None and truncation < 0:
            raise PolyError("truncation degree must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, Fraction] = {}
        for exp, coef in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise PolyError(f"multi-index {exp} has length {len(exp)}, expected {nvars}")
            if any(e < 0 for e in exp):
                raise PolyError(f"negative exponent in {exp}")
            if truncation is not None and sum(exp) > truncation:
                continue
            acc[exp] = acc.get(exp, Fraction(0)) + _as_fraction(coef)
        self.nvars = nvars
        self.truncation = truncation
        self._terms = {e: acc[e] for e in sorted(acc, key=glex_key) if acc[e] != 0}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, truncation: int | None = None) -> "Poly":
        return cls(nvars, {}, truncation)

    @classmethod
    def const(cls, nvars: int, c, truncation: int | None = None) -> "Poly":
        return cls(nvars, {(0,) * nvars: c}, truncation)

    @classmethod
    def var(cls, nvars: int, i: int, truncation: int | None = None) -> "Poly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1}, truncation)

    @classmethod
    def monomial(cls, exp: Sequence[int], coef=1, truncation: int | None = None) -> "Poly":
        return cls(len(exp), {tuple(exp): coef}, truncation)

    @classmethod
    def gens(cls, nvars: int, truncation: int | None = None) -> list["Poly"]:
        return [cls.var(nvars, i, truncation) for i in range(nvars)]

    # -- basic properties ---------------------------------------------------

    @property
    def terms(self) -> dict[tuple, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    @property
    def lowest_degree(self) -> int:
        """Lowest total degree among nonzero terms; -1 for zero."""
        return min((sum(e) for e in self._terms), default=-1)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self._terms.items() if sum(e) == d}, self.truncation)

    def truncate(self, d: int) -> "Poly":
        return Poly(self.nvars, self._terms, _min_trunc(self.truncation, d))

    def without_truncation(self) -> "Poly":
        return Poly(self.nvars, self._terms, None)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise PolyError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction, str)):
            return Poly.const(self.nvars, other)
        raise TypeError(f"unsupported operand {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return Poly(self.nvars, acc, _min_trunc(self.truncation, other.truncation))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self._terms.items()}, self.truncation)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = _as_fraction(c)
        return Poly(self.nvars, {e: c * v for e, v in self._terms.items()}, self.truncation)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        trunc = _min_trunc(self.truncation, other.truncation)
        acc: dict[tuple, Fraction] = {}
        for e1, c1 in self._terms.items():
            d1 = sum(e1)
            for e2, c2 in other._terms.items():
                if trunc is not None and d1 + sum(e2) > trunc:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return Poly(self.nvars, acc, trunc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolyError("negative power")
        result = Poly.const(self.nvars, 1, self.truncation)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and composition -------------------------------------------

    def diff(self, var: int, order: int = 1) -> "Poly":
        if not 0 <= var < self.nvars:
            raise PolyError(f"variable index {var} out of range for nvars={self.nvars}")
        if order < 0:
            raise PolyError("negative derivative order")
        acc = {}
        for e, c in self._terms.items():
            k = e[var]
            if k < order:
                continue
            falling = factorial(k) // factorial(k - order)
            ne = list(e)
            ne[var] = k - order
            acc[tuple(ne)] = c * falling
        return Poly(self.nvars, acc, self.truncation)

    def subs(self, images: Sequence["Poly"]) -> "Poly":
        """Compose: replace variable i by ``images[i]`` (all in a common ring)."""
        if len(images) != self.nvars:
            raise PolyError(f"need {self.nvars} images, got {len(images)}")
        target = images[0].nvars
        trunc = self.truncation
        for im in images:
            if im.nvars != target:
                raise PolyError("substitution images have different variable counts")
            trunc = _min_trunc(trunc, im.truncation)
        one = Poly.const(target, 1, trunc)
        powers: list[list[Poly]] = [[one] for _ in range(self.nvars)]

        def power(i, k):
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * images[i])
            return cache[k]

        result = Poly.zero(target, trunc)
        for e, c in self._terms.items():
            term = Poly.const(target, c, trunc)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def parity_split(self, vars: Iterable[int]) -> tuple["Poly", "Poly"]:
        """Split into (even, odd) parts with respect to the total degree in ``vars``."""
        vs = list(vars)
        even, odd = {}, {}
        for e, c in self._terms.items():
            (odd if sum(e[v] for v in vs) % 2 else even)[e] = c
        return Poly(self.nvars, even, self.truncation), Poly(self.nvars, odd, self.truncation)

    def is_odd_in(self, vars: Iterable[int]) -> bool:
        even, _ = self.parity_split(vars)
        return even.is_zero()

    def partial_degree(self, vars: Iterable[int]) -> "dict[int, Poly]":
        """Group terms by their total degree in ``vars``."""
        vs = list(vars)
        groups: dict[int, dict] = {}
        for e, c in self._terms.items():
            groups.setdefault(sum(e[v] for v in vs), {})[e] = c
        return {d: Poly(self.nvars, t, self.truncation) for d, t in sorted(groups.items())}

    def embed(self, nvars: int, positions: Sequence[int]) -> "Poly":
        """Re-express in a larger ring, variable i going to slot ``positions[i]``."""
        if len(positions) != self.nvars:
            raise PolyError("positions must list one slot per variable")
        acc = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            acc[tuple(ne)] = c
        return Poly(nvars, acc, self.truncation)

    def restrict(self, keep: Sequence[int], values: Mapping[int, object] | None = None) -> "Poly":
        """Drop to the variables in ``keep`` after fixing the others.

        Variables not kept are set to ``values[i]`` (default 0).
        """
        values = values or {}
        acc: dict[tuple, Fraction] = {}
        for e, c in self._terms.items():
            coef = c
            for i, k in enumerate(e):
                if i in keep or not k:
                    continue
                coef *= _as_fraction(values.get(i, 0)) ** k
                if coef == 0:
                    break
            if coef == 0:
                continue
            ne = tuple(e[i] for i in keep)
            acc[ne] = acc.get(ne, 0) + coef
        return Poly(len(keep), acc, self.truncation)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple, np.ndarray)):
            point = point[0]
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Horner evaluation, recursive in the leading variable.

        Exact for Fraction/int inputs, float otherwise.
        """
        if len(point) != self.nvars:
            raise PolyError(f"point has {len(point)} coordinates, expected {self.nvars}")
        if not self._terms:
            return Fraction(0) if all(isinstance(x, (int, Fraction)) for x in point) else 0.0
        if all(isinstance(x, (int, Fraction)) for x in point):
            zero = Fraction(0)
        else:
            zero = 0.0
        return _horner(list(self._terms.items()), list(point), 0, zero)

    def compile(self) -> Callable[[np.ndarray], np.ndarray]:
        """Vectorised float evaluator: array (..., nvars) -> array (...)."""
        exps = np.array(list(self._terms.keys()), dtype=np.int64).reshape(-1, self.nvars)
        coefs = np.array([float(c) for c in self._terms.values()], dtype=float)
        maxdeg = int(exps.max()) if exps.size else 0
        nvars = self.nvars

        def f(x):
            x = np.asarray(x, dtype=float)
            if x.shape[-1] != nvars:
                raise PolyError(f"expected trailing dimension {nvars}, got {x.shape[-1]}")
            out = np.zeros(x.shape[:-1])
            if not len(coefs):
                return out
            pw = [np.ones((maxdeg + 1,) + x.shape[:-1]) for _ in range(nvars)]
            for i in range(nvars):
                for k in range(1, maxdeg + 1):
                    pw[i][k] = pw[i][k - 1] * x[..., i]
            for e, c in zip(exps, coefs):
                t = c
                for i, k in enumerate(e):
                    if k:
                        t = t * pw[i][k]
                out = out + t
            return out

        return f

    # -- formatting and serialisation ---------------------------------------

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.nvars}, {self.format()!r})"

    def to_dict(self) -> dict:
        d = {
            "nvars": self.nvars,
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in self._terms.items()],
        }
        if self.truncation is not None:
            d["truncation"] = self.truncation
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Poly":
        try:
            nvars = int(d["nvars"])
            raw = d["terms"]
        except (KeyError, TypeError) as exc:
            raise PolyError(f"polynomial object needs 'nvars' and 'terms': {exc}") from None
        terms = []
        for k, t in enumerate(raw):
            try:
                coef = t["coef"]
                if isinstance(coef, float):
                    raise PolyError(f"terms[{k}].coef must be an exact rational string, got float {coef}")
                terms.append((t["exp"], Fraction(str(coef))))
            except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
                raise PolyError(f"terms[{k}]: {exc}") from None
        return cls(nvars, terms, d.get("truncation"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "Poly":
        return cls.from_dict(json.loads(s))


def _horner(terms, point, var, zero):
    # terms: list of (exp, coef) all sharing exps[:var]
    if var == len(point):
        return sum((c for _, c in terms), zero)
    groups: dict[int, list] = {}
    for e, c in terms:
        groups.setdefault(e[var], []).append((e, c))
    x = point[var]
    acc = zero
    prev = None
    for k in sorted(groups, reverse=True):
        if prev is not None:
            acc = acc * x ** (prev - k)
        acc = acc + _horner(groups[k], point, var + 1, zero)
        prev = k
    return acc * x ** prev if prev else acc


# -- functional interface ----------------------------------------------------

def arith(a: Poly, b, op: str) -> Poly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise PolyError(f"unknown op {op!r}")


def differentiate(p: Poly, var: int, order: int = 1) -> Poly:
    return p.diff(var, order)


def substitute(p: Poly, images: Sequence[Poly]) -> Poly:
    return p.subs(images)


def parity_split(p: Poly, vars: Iterable[int]) -> tuple[Poly, Poly]:
    return p.parity_split(vars)


def evaluate(p: Poly, point: Sequence):
    return p.evaluate(point)


def odd_monomials(nvars: int, max_degree: int, min_degree: int = 1) -> list[tuple]:
    """Monomials of odd total degree in [min_degree, max_degree], graded-lex order."""
    out = [e for e in product(range(max_degree + 1), repeat=nvars)
           if min_degree <= sum(e) <= max_degree and sum(e) % 2 == 1]
    return sorted(out, key=glex_key)


def even_monomials(nvars: int, max_degree: int) -> list[tuple]:
    out = [e for e in product(range(max_degree + 1), repeat=nvars)
           if sum(e) <= max_degree and sum(e) % 2 == 0]
    return sorted(out, key=glex_key)

