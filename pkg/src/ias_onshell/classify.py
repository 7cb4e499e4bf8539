"""Exact classification of stable on-shell singularities for curves and surfaces.

All sign tests run on the jet table's own number type.  On the exact path
(Fraction jets) every test is decidable.  On the float path any quantity
whose sign matters and lies within ``zero_tol`` of zero yields the
``SignUncertain`` outcome instead of a decision.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from fractions import Fraction
from math import comb
from typing import Sequence

from .germ import FLOAT_ZERO_TOL, JetTable, LagrangianGerm, float_jets, jets, normalize_cubic, recenter

A22, A42 = "A_{2/2}", "A_{4/2}"
D42P, D42M = "D_{4/2}+", "D_{4/2}-"
D62P, D62M = "D_{6/2}+", "D_{6/2}-"
D82P, D82M = "D_{8/2}+", "D_{8/2}-"
E82 = "E_{8/2}"
DEGENERATE, NONSIMPLE, UNRECOGNIZED = "Degenerate", "NonSimple", "Unrecognized"
SIGN_UNCERTAIN = "SignUncertain"

LABELS = (A22, A42, D42P, D42M, D62P, D62M, D82P, D82M, E82, DEGENERATE, NONSIMPLE, UNRECOGNIZED,
          SIGN_UNCERTAIN)


class ClassifierInconsistency(RuntimeError):
    """Two witnesses of the surface decision tree disagree, or a jet identity failed."""


class _Uncertain(Exception):
    pass


def _sign(x, tol):
    if tol is None:
        return (x > 0) - (x < 0)
    if abs(x) <= tol:
        raise _Uncertain(x)
    return 1 if x > 0 else -1


@dataclass(frozen=True)
class SingularityClass:
    label: str
    fired: str
    kind: str | None = None
    invariants: dict = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        d = {
            "class": self.label,
            "fired": self.fired,
            "invariants": {k: str(v) for k, v in self.invariants.items()},
            "kind": self.kind,
        }
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class ClassifierInvariants:
    Delta: object = None
    delta1: object = None
    delta2: object = None
    r1: object = None
    r2: object = None
    r1_tilde: object = None
    r2_tilde: object = None
    sigma05: object = None
    sigma07: object = None
    sigma50: object = None
    sigma70: object = None

    def present(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}


def discriminant(j: JetTable):
    """Discriminant of the cubic part of a surface germ."""
    s30, s21, s12, s03 = j[3, 0], j[2, 1], j[1, 2], j[0, 3]
    val = (3 * s12**2 * s21**2 - 4 * s03 * s21**3 - 4 * s12**3 * s30
           - s03**2 * s30**2 + 6 * s03 * s12 * s21 * s30)
    return val / 48 if j.exact else val / 48.0


def _sigma(j: JetTable, order: int, r, denom, swap: bool):
    total = 0
    for k in range(order + 1):
        idx = (order - k, k) if swap else (k, order - k)
        total += comb(order, k) * j[idx] * r**k
    return total / denom**order


def sigma_invariants(j: JetTable, tol: float | None = None) -> ClassifierInvariants:
    """delta_i, r_i and sigma quantities; a branch is absent when its denominator vanishes."""
    s30, s21, s12, s03 = j[3, 0], j[2, 1], j[1, 2], j[0, 3]
    delta1 = s30 * s12 - s21**2
    delta2 = s03 * s21 - s12**2
    out = {"Delta": discriminant(j), "delta1": delta1, "delta2": delta2}
    if _sign(delta1, tol) != 0:
        r1 = (s21 * s12 - s30 * s03) / (2 * delta1)
        r2 = (s30**2 * s03 - 4 * s30 * s21 * s12 + 3 * s21**3) / delta1
        out["r1"], out["r2"] = r1, r2
        denom = s30 * r1 - r2
        if _sign(denom, tol) != 0:
            out["sigma05"] = _sigma(j, 5, r1, denom, swap=False)
            out["sigma07"] = _sigma(j, 7, r1, denom, swap=False)
    if _sign(delta2, tol) != 0:
        r1t = (s21 * s12 - s30 * s03) / (2 * delta2)
        r2t = (s03**2 * s30 - 4 * s03 * s21 * s12 + 3 * s12**3) / delta2
        out["r1_tilde"], out["r2_tilde"] = r1t, r2t
        denom = s03 * r1t - r2t
        if _sign(denom, tol) != 0:
            # the second branch is the first with the roles of q1 and q2 exchanged
            out["sigma50"] = _sigma(j, 5, r1t, denom, swap=True)
            out["sigma70"] = _sigma(j, 7, r1t, denom, swap=True)
    return ClassifierInvariants(**out)


def _e8_sum(j: JetTable, lead, other, swap: bool):
    total = 0
    for k in range(6):
        idx = (5 - k, k) if swap else (k, 5 - k)
        total += comb(5, k) * j[idx] * (-other) ** k * lead ** (5 - k)
    return total


def classify_curve_jets(j: JetTable, tol: float | None = None) -> SingularityClass:
    inv = {"S3": j[3], "S4": j[4], "S5": j[5]}
    try:
        if tol is None and j.is_zero_between(3, j.max_order):
            return SingularityClass(DEGENERATE, "jets of order 3..7 vanish", invariants=inv)
        if _sign(j[3], tol) != 0:
            return SingularityClass(A22, "S3!=0", invariants=inv)
        if _sign(j[4], tol) != 0 and _sign(j[5], tol) != 0:
            return SingularityClass(A42, "S3=0,S4!=0,S5!=0", invariants=inv)
    except _Uncertain as exc:
        return SingularityClass(SIGN_UNCERTAIN, f"sign uncertain: |value| = {abs(exc.args[0]):.3g} <= tol",
                                invariants=inv)
    return SingularityClass(UNRECOGNIZED, "no clause", invariants=inv)


def classify_surface_jets(j: JetTable, kind: str, tol: float | None = None) -> SingularityClass:
    if kind not in ("cc", "sp"):
        raise ValueError(f"kind must be cc or sp, got {kind!r}")
    try:
        if tol is None and j.is_zero_between(3, j.max_order):
            return SingularityClass(DEGENERATE, "jets of order 3..7 vanish", kind=kind)
        sD = _sign(discriminant(j), tol)
        if sD != 0:
            # the sigma quantities are only reported here, so no tolerance applies to them
            present = sigma_invariants(j).present()
            return SingularityClass(D42M if sD > 0 else D42P, "Delta>0" if sD > 0 else "Delta<0", kind,
                                    present)
        inv = sigma_invariants(j, tol)
        present = inv.present()

        d1, d2 = _sign(inv.delta1, tol), _sign(inv.delta2, tol)
        if d1 > 0 or d2 > 0:
            raise ClassifierInconsistency(f"Delta=0 but delta1={inv.delta1}, delta2={inv.delta2}")

        hits: list[tuple[str, str]] = []
        for delta, dsign, s5, s7, tag in ((inv.delta1, d1, inv.sigma05, inv.sigma07, "1"),
                                          (inv.delta2, d2, inv.sigma50, inv.sigma70, "2")):
            if s5 is None:
                continue
            s5_name = "sigma05" if tag == "1" else "sigma50"
            s7_name = "sigma07" if tag == "1" else "sigma70"
            prod = _sign(s5, tol) * dsign
            if prod < 0:
                hits.append((D62P if kind == "cc" else D62M, f"delta{tag}*{s5_name}<0"))
            elif prod > 0:
                hits.append((D62M if kind == "cc" else D62P, f"delta{tag}*{s5_name}>0"))
            elif dsign < 0:
                s7sign = _sign(s7, tol)
                if s7sign > 0:
                    hits.append((D82P, f"delta{tag}<0,{s5_name}=0,{s7_name}>0"))
                elif s7sign < 0:
                    hits.append((D82M, f"delta{tag}<0,{s5_name}=0,{s7_name}<0"))

        s30, s21, s12, s03 = j[3, 0], j[2, 1], j[1, 2], j[0, 3]
        if d1 == 0 and _sign(s30, tol) != 0 and _sign(_e8_sum(j, s30, s21, swap=False), tol) != 0:
            hits.append((E82, "delta1=0,S30!=0,quintic sum!=0"))
        if d2 == 0 and _sign(s03, tol) != 0 and _sign(_e8_sum(j, s03, s12, swap=True), tol) != 0:
            hits.append((E82, "delta2=0,S03!=0,quintic sum!=0"))
    except _Uncertain as exc:
        return SingularityClass(SIGN_UNCERTAIN, f"sign uncertain: |value| = {abs(exc.args[0]):.3g} <= tol",
                                kind)

    labels = {lab for lab, _ in hits}
    if len(labels) > 1:
        raise ClassifierInconsistency(f"conflicting clauses fired: {hits}")
    if not hits:
        return SingularityClass(UNRECOGNIZED, "no clause", kind, present)
    return SingularityClass(hits[0][0], " | ".join(key for _, key in hits), kind, present)


def classify_curve(g: LagrangianGerm) -> SingularityClass:
    if g.n != 1:
        raise ValueError("classify_curve needs n = 1")
    return classify_curve_jets(jets(g, 7))


def classify_surface(g: LagrangianGerm, kind: str) -> SingularityClass:
    if g.n != 2:
        raise ValueError("classify_surface needs n = 2")
    return classify_surface_jets(jets(g, 7), kind)


def classify(g: LagrangianGerm, kind: str = "cc", at: Sequence | None = None,
             zero_tol: float = FLOAT_ZERO_TOL) -> SingularityClass:
    """Classify the on-shell singularity of ``kind`` at the point ``at`` of L.

    ``at`` is given in the coordinates of S (default: the origin).  Rational
    points take the exact path (recenter, normalize_cubic, classify); float
    points use float jets with ``zero_tol``.
    """
    if g.n >= 3:
        return SingularityClass(NONSIMPLE, "n>=3", kind,
                                note="for n >= 3 odd singularities are not simple; nothing to classify")
    at = [0] * g.n if at is None else list(at)
    if any(isinstance(a, float) for a in at):
        jt = float_jets(g, at, 7)
        res = classify_curve_jets(jt, zero_tol) if g.n == 1 else classify_surface_jets(jt, kind, zero_tol)
    else:
        h, _ = normalize_cubic(recenter(g, [Fraction(a) for a in at]))
        res = classify_curve(h) if g.n == 1 else classify_surface(h, kind)
    if res.kind != kind:
        res = SingularityClass(res.label, res.fired, kind, res.invariants, res.note)
    return res
