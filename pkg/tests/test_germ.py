from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TEST_FIXTURES, germ, small_fraction
from ias_onshell.germ import (GermError, LagrangianGerm, float_jets, jets, load_germ, normalize_cubic,
                              normalized, recenter, save_germ)


def test_jets_are_factorial_scaled_coefficients():
    g = germ(2, {(2, 1): 1, (0, 3): Fraction(-1, 2)})
    j = jets(g)
    assert j[2, 1] == 2  # 2!*1!*1
    assert j[0, 3] == -3  # 3!*(-1/2)
    assert j[3, 0] == 0
    with pytest.raises(KeyError):
        j[8, 0]


def test_jets_need_zero_two_jet():
    with pytest.raises(GermError, match="normalized"):
        jets(germ(1, {(2,): 1, (3,): 1}))


def test_recenter_by_hand():
    # S = q^3 at q0 = 1: (1+q)^3 - 1 - 3q = 3q^2 + q^3
    g = recenter(germ(1, {(3,): 1}), [1])
    assert g.S.terms == {(2,): 3, (3,): 1}
    assert g.basepoint == (Fraction(1),)


def test_normalize_cubic_returns_shear():
    g = germ(2, {(2, 0): 3, (1, 1): 2, (3, 0): 1})
    h, A = normalize_cubic(g)
    assert h.S.terms == {(3, 0): 1}
    assert A == [[6, 2], [2, 0]]


def test_normalize_cubic_rejects_linear_part():
    with pytest.raises(GermError, match="recenter"):
        normalize_cubic(germ(1, {(1,): 1, (3,): 1}))


@given(st.lists(small_fraction, min_size=4, max_size=4), small_fraction)
def test_higher_jets_survive_normalization(coefs, q0):
    # the jets of order >= 3 at q0 equal S^(k)(q0), whatever the recentering does
    S = germ(1, {(k + 2,): c for k, c in enumerate(coefs)})
    h = normalized(S, [q0])
    j = jets(h, 5) if not h.S.is_zero() else None
    for k in (3, 4, 5):
        exact = S.S.diff(0, k).evaluate([q0])
        assert (j[k] if j else 0) == exact


def test_float_jets_match_exact():
    g = germ(2, {(3, 0): 1, (1, 3): Fraction(1, 3), (0, 5): -1})
    j = float_jets(g, [0.5, -0.25], 5)
    h = normalized(g, [Fraction(1, 2), Fraction(-1, 4)])
    je = jets(h, 5)
    for k in [(3, 0), (1, 2), (0, 3), (1, 3), (0, 5)]:
        assert j[k] == pytest.approx(float(je[k]), abs=1e-12)


def test_json_round_trip(tmp_path):
    g = LagrangianGerm.from_terms(2, {(2, 1): Fraction(1, 3)}, basepoint=[Fraction(1, 2), 0])
    p = tmp_path / "g.json"
    save_germ(g, p)
    assert load_germ(p) == g


def test_malformed_file_reports_position():
    with pytest.raises(GermError, match=r"malformed\.json:\d+:\d+"):
        load_germ(TEST_FIXTURES / "malformed.json")


def test_float_coefficient_rejected():
    with pytest.raises(GermError, match="exact rational"):
        load_germ(TEST_FIXTURES / "float_coef.json")


def test_dimension_mismatch():
    with pytest.raises(GermError):
        LagrangianGerm.from_dict({"n": 2, "S": {"nvars": 1, "terms": []}})
    with pytest.raises(GermError):
        LagrangianGerm.from_terms(1, {(3,): 1}, basepoint=[0, 0])
