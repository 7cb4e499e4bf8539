from fractions import Fraction

import numpy as np
import pytest

from conftest import fixture, germ, seeded_germs
from ias_onshell.construct import (ConstructError, GeneratingFamily, builtin, cc_sp_transform, gen_family,
                                   holomorphic_extension, ias_maps, parse_builtin)
from ias_onshell.polyjet import Poly

b, q, p = Poly.gens(3)
b1, b2, q1, q2, p1, p2 = Poly.gens(6)


def test_a22_families_match_printed():
    g = fixture("a22")
    assert gen_family(g, "cc").G == b**3 + q**2 * b * 3 - p * b
    assert gen_family(g, "sp").G == -(b**3) + q**2 * b * 3 - p * b


def test_a42_families_match_printed():
    g = fixture("a42")
    common = b**5 + q**4 * b * 5 + q**3 * b - p * b
    assert gen_family(g, "cc").G == common + q**2 * b**3 * 10 + q * b**3
    assert gen_family(g, "sp").G == common - q**2 * b**3 * 10 - q * b**3


@pytest.mark.parametrize("s", [1, -1])
def test_d42_families_match_printed(s):
    g = fixture("d42p" if s > 0 else "d42m")
    rest = -p1 * b1 - p2 * b2 + q2**2 * b2 * (3 * s) + q1**2 * b2 + q1 * q2 * b1 * 2
    assert gen_family(g, "cc").G == b2**3 * s + b1**2 * b2 + rest
    assert gen_family(g, "sp").G == b2**3 * (-s) - b1**2 * b2 + rest


@pytest.mark.parametrize("s", [1, -1])
def test_d62_families_match_printed(s):
    g = fixture("d62p" if s > 0 else "d62m")
    rest = -p1 * b1 - p2 * b2 + q1**2 * b2 + q1 * q2 * b1 * 2 + b2 * q2**4 * (5 * s) + b2 * q2**3
    cc = b1**2 * b2 + b2**5 * s + q2 * b2**3 + b2**3 * q2**2 * (10 * s) + rest
    sp = -(b1**2) * b2 + b2**5 * s - q2 * b2**3 - b2**3 * q2**2 * (10 * s) + rest
    assert gen_family(g, "cc").G == cc
    assert gen_family(g, "sp").G == sp


def test_holomorphic_extension_by_hand():
    # Im (s + it)^3 = 3 s^2 t - t^3
    s, t = Poly.gens(2)
    assert holomorphic_extension(germ(1, {(3,): 1})) == s**2 * t * 3 - t**3


def test_special_f_by_hand():
    # S = q^3: Q = 3s^2t - t^3, f = Q - t Q_t = 2 t^3
    s, t = Poly.gens(2)
    assert ias_maps(germ(1, {(3,): 1}), "sp").polys["f"] == t**3 * 2


def test_center_chord_f_of_quadratic_vanishes():
    assert ias_maps(germ(1, {(2,): 1}), "cc").polys["f"].is_zero()


def test_transform_round_trip_on_random_germs():
    for g in seeded_germs(30, seed=11):
        cc, sp = gen_family(g, "cc"), gen_family(g, "sp")
        assert cc_sp_transform(cc).G == sp.G
        assert cc_sp_transform(sp).G == cc.G


def test_transform_rejects_non_odd():
    fam = GeneratingFamily("cc", 1, b**2 + q)
    with pytest.raises(ConstructError, match="odd"):
        cc_sp_transform(fam)


def test_generating_function_strips_p():
    g = gen_family(fixture("a22"), "cc").generating_function()
    bb, qq = Poly.gens(2)
    assert g == bb**3 + qq**2 * bb * 3


def test_family_json_round_trip():
    fam = gen_family(fixture("e82"), "sp")
    assert GeneratingFamily.from_dict(fam.to_dict()).G == fam.G
    with pytest.raises(ConstructError):
        GeneratingFamily.from_dict({"kind": "xx", "n": 1, "G": fam.G.to_dict()})


def test_empty_germ_gives_minus_p_beta():
    fam = gen_family(germ(1, {}), "cc")
    assert fam.G == -p * b


@pytest.mark.parametrize("name,n", [("circle", 1), ("torus:2", 2), ("torus(3)", 3), (" Torus:1 ", 1)])
def test_parse_builtin(name, n):
    assert parse_builtin(name) == n


@pytest.mark.parametrize("name", ["sphere", "torus:0", "torus:"])
def test_parse_builtin_rejects(name):
    with pytest.raises(ConstructError):
        parse_builtin(name)


def test_circle_closed_forms():
    maps = builtin("circle")
    cc, sp = maps["cc"], maps["sp"]
    a = np.array([[0.3, -1.1], [2.0, 0.5]])
    u, v = a[:, 0], a[:, 1]
    np.testing.assert_allclose(cc.f(a), 0.25 * (v - u + np.sin(u - v)))
    np.testing.assert_allclose(np.linalg.norm(cc.x(a), axis=-1), np.abs(np.cos((u - v) / 2)))
    s, t = a[:, 0], a[:, 1]
    np.testing.assert_allclose(sp.f(a), 0.25 * (np.sinh(2 * t) - 2 * t))
    np.testing.assert_allclose(np.linalg.norm(sp.x(a), axis=-1), np.cosh(t))
    assert sp.formulas["f"] == "f = 1/4*(sinh(2t) - 2t)"


def test_torus_is_product_of_circles():
    t2 = builtin("torus:2")["cc"]
    c = builtin("circle")["cc"]
    a = np.array([0.1, 0.7, -0.4, 1.9])
    np.testing.assert_allclose(t2.x(a)[:2], c.x(a[[0, 2]]))
    np.testing.assert_allclose(t2.x(a)[2:], c.x(a[[1, 3]]))
    np.testing.assert_allclose(t2.f(a), c.f(a[[0, 2]]) + c.f(a[[1, 3]]))


def test_shell_parameters():
    assert builtin("circle")["cc"].shell(np.array([0.5])).tolist() == [0.5, 0.5]
    assert builtin("circle")["sp"].shell(np.array([0.5])).tolist() == [0.5, 0.0]


def test_unknown_kind():
    with pytest.raises(ConstructError):
        gen_family(germ(1, {(3,): 1}), "xx")
