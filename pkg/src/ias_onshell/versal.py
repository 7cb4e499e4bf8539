"""Odd versality of deformations by truncated linear algebra, and the simple-odd catalog.

A deformation G(beta, lambda) of an odd germ G0 is versal when the odd
germs are spanned by the even-function module generated by
beta_j dG0/dbeta_i together with the real span of the directions
dG/dlambda_l at lambda = 0.  Everything here works modulo odd monomials of
degree above ``cutoff``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .construct import GeneratingFamily
from .polyjet import Poly, even_monomials, glex_key, odd_monomials

DEFAULT_CUTOFF = 9

VERSAL, NOT_VERSAL, INCONCLUSIVE = "versal", "not_versal", "inconclusive"


class VersalError(ValueError):
    pass


def monomial_name(exp: Sequence[int]) -> str:
    return " ".join(f"b{i + 1}^{k}" for i, k in enumerate(exp) if k)


@dataclass(frozen=True)
class OddDeformation:
    G0: Poly
    directions: tuple
    cutoff: int = DEFAULT_CUTOFF

    @property
    def n(self) -> int:
        return self.G0.nvars

    def without(self, index: int) -> "OddDeformation":
        dirs = tuple(d for i, d in enumerate(self.directions) if i != index)
        return OddDeformation(self.G0, dirs, self.cutoff)

    def with_cutoff(self, cutoff: int) -> "OddDeformation":
        return OddDeformation(self.G0, self.directions, cutoff)


@dataclass(frozen=True)
class Verdict:
    verdict: str
    missing: tuple = ()
    cutoff: int = DEFAULT_CUTOFF
    rank: int = 0
    dimension: int = 0
    note: str = ""

    def __bool__(self):
        return self.verdict == VERSAL

    def to_dict(self) -> dict:
        d = {"verdict": self.verdict, "missing": [monomial_name(e) for e in self.missing],
             "cutoff": self.cutoff}
        if self.note:
            d["note"] = self.note
        return d


def _check_cutoff(cutoff: int) -> None:
    if cutoff < 3 or cutoff % 2 == 0:
        raise VersalError(f"cutoff must be odd and >= 3, got {cutoff}")


def _vector(p: Poly, index: dict) -> list[Fraction]:
    v = [Fraction(0)] * len(index)
    for e, c in p.items():
        if e in index:
            v[index[e]] = c
    return v


def tangent_generators(G0: Poly) -> list[Poly]:
    """beta_j * dG0/dbeta_i for all i, j (zero generators dropped)."""
    n = G0.nvars
    gens = []
    for i in range(n):
        d = G0.diff(i)
        for j in range(n):
            gen = Poly.var(n, j) * d
            if not gen.is_zero():
                gens.append(gen)
    return gens


def tangent_module_basis(G0: Poly, cutoff: int = DEFAULT_CUTOFF) -> tuple[list[list[Fraction]], list[tuple]]:
    """Rows spanning the even-module tangent space modulo degree > cutoff.

    Returns (rows, basis) where ``basis`` lists the odd monomials of degree
    <= cutoff in graded-lex order and each row is a coefficient vector.
    """
    _check_cutoff(cutoff)
    if not G0.is_odd_in(range(G0.nvars)):
        raise VersalError("G0 must be odd")
    n = G0.nvars
    basis = odd_monomials(n, cutoff)
    index = {e: k for k, e in enumerate(basis)}
    rows = []
    for gen in tangent_generators(G0):
        gen = gen.truncate(cutoff)
        low = gen.lowest_degree
        if low < 0:
            continue
        for e in even_monomials(n, cutoff - low):
            row = (Poly.monomial(e, 1, cutoff) * gen)
            if not row.is_zero():
                rows.append(_vector(row, index))
    return rows, basis


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; pivots chosen left to right (graded-lex columns)."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: list[list[Fraction]]) -> int:
    return len(rref(rows)[1])


def monomials_outside(rows: list[list[Fraction]], basis: list[tuple], reduced=None) -> list[tuple]:
    """Basis monomials that are not individually in the row space."""
    R, pivots = reduced if reduced is not None else rref(rows)
    inside = set()
    for row, c in zip(R, pivots):
        if sum(1 for x in row if x != 0) == 1:
            inside.add(c)
    return [e for k, e in enumerate(basis) if k not in inside]


def is_versal(d: OddDeformation, mode: str = "full") -> Verdict:
    """Truncated versality test.

    mode ``full``: odd germs = tangent module + span(directions).
    mode ``on_shell``: the degree-one monomials are supplied by the p.beta
    term of an on-shell family, so they are added to the directions.
    """
    if mode not in ("full", "on_shell"):
        raise VersalError(f"mode must be full or on_shell, got {mode!r}")
    _check_cutoff(d.cutoff)
    n = d.n
    beta = range(n)
    if not d.G0.is_odd_in(beta):
        raise VersalError("G0 must be odd in beta")
    for k, v in enumerate(d.directions):
        if v.nvars != n:
            raise VersalError(f"direction {k} has {v.nvars} variables, expected {n}")
        if not v.is_odd_in(beta):
            raise VersalError(f"direction {k} is not odd in beta")
    low = d.G0.lowest_degree
    if low < 0 or low > d.cutoff - 2:
        note = ("G0 vanishes identically (degenerate family)" if low < 0 else
                f"lowest degree of G0 is {low}; raise the cutoff to at least {low + 2}")
        return Verdict(INCONCLUSIVE, (), d.cutoff, note=note)
    rows, basis = tangent_module_basis(d.G0, d.cutoff)
    index = {e: k for k, e in enumerate(basis)}
    for v in d.directions:
        rows.append(_vector(v.truncate(d.cutoff), index))
    if mode == "on_shell":
        for i in range(n):
            rows.append(_vector(Poly.var(n, i), index))
    reduced = rref(rows)
    missing = monomials_outside(rows, basis, reduced)
    r = len(reduced[1])
    if missing:
        return Verdict(NOT_VERSAL, tuple(missing), d.cutoff, r, len(basis))
    return Verdict(VERSAL, (), d.cutoff, r, len(basis))


def on_shell_deformation(fam: GeneratingFamily, cutoff: int = DEFAULT_CUTOFF) -> OddDeformation:
    """G0 = g(0, beta) and directions dg/dq_l(0, beta) of an on-shell family."""
    n = fam.n
    g = fam.generating_function()  # variables (beta, q)
    betas = list(range(n))
    G0 = g.restrict(betas)
    dirs = tuple(g.diff(n + l).restrict(betas) for l in range(n))
    return OddDeformation(G0, dirs, cutoff)


def stability_check(fam: GeneratingFamily, cutoff: int = DEFAULT_CUTOFF) -> Verdict:
    """Infinitesimal odd stability of an on-shell family (equivalently its versality)."""
    return is_versal(on_shell_deformation(fam, cutoff), mode="on_shell")


# -- normal-form catalog -----------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    label: str
    normal_form: Poly
    directions: tuple  # monomial exponents

    def deformation(self, cutoff: int = DEFAULT_CUTOFF) -> OddDeformation:
        return OddDeformation(self.normal_form, tuple(Poly.monomial(e) for e in self.directions), cutoff)

    def to_dict(self) -> dict:
        return {"label": self.label, "normal_form": self.normal_form.format(
            ["t"] if self.normal_form.nvars == 1 else ["t1", "t2"]),
            "directions": [monomial_name(e) for e in self.directions]}


@dataclass
class NormalFormCatalog:
    entries: dict = field(default_factory=dict)

    def __getitem__(self, label: str) -> CatalogEntry:
        return self.entries[label]

    def __iter__(self):
        return iter(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def labels(self) -> list[str]:
        return list(self.entries)


def _entry(label, terms, dirs) -> CatalogEntry:
    n = len(dirs[0])
    return CatalogEntry(label, Poly(n, terms), tuple(sorted(dirs, key=glex_key)))


def default_catalog(max_a: int = 3, max_d: int = 4) -> NormalFormCatalog:
    """Simple odd singularities with their miniversal deformation monomials.

    A_{2k/2}: t^{2k+1} + sum_j l_j t^{2j-1}
    D_{2k/2}+-: t1^2 t2 +- t2^{2k-1} + l_1 t1 + sum_{i>=2} l_i t2^{2i-3}
    E_{8/2}, J_{10/2}+-, E_{12/2} as listed with their quasi-homogeneous bases.
    Defaults keep every normal form's degree within the default cutoff.
    """
    cat = {}
    for k in range(1, max_a + 1):
        cat[f"A_{{{2 * k}/2}}"] = _entry(f"A_{{{2 * k}/2}}", {(2 * k + 1,): 1},
                                         [(2 * j - 1,) for j in range(1, k + 1)])
    for k in range(2, max_d + 1):
        dirs = [(1, 0)] + [(0, 2 * i - 3) for i in range(2, k + 1)]
        for sign, tag in ((1, "+"), (-1, "-")):
            lab = f"D_{{{2 * k}/2}}{tag}"
            cat[lab] = _entry(lab, {(2, 1): 1, (0, 2 * k - 1): sign}, dirs)
    cat["E_{8/2}"] = _entry("E_{8/2}", {(3, 0): 1, (0, 5): 1},
                            [(1, 0), (0, 1), (1, 2), (0, 3)])
    for sign, tag in ((1, "+"), (-1, "-")):
        lab = f"J_{{10/2}}{tag}"
        cat[lab] = _entry(lab, {(3, 0): 1, (1, 4): sign},
                          [(1, 0), (0, 1), (2, 1), (1, 2), (0, 3)])
    cat["E_{12/2}"] = _entry("E_{12/2}", {(3, 0): 1, (0, 7): 1},
                             [(1, 0), (0, 1), (1, 2), (0, 3), (1, 4), (0, 5)])
    return NormalFormCatalog(cat)
