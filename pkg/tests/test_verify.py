from fractions import Fraction

import numpy as np
import pytest

from conftest import fixture, germ, seeded_germs
from ias_onshell.construct import builtin, ias_maps
from ias_onshell.polyjet import Poly
from ias_onshell.verify import (EXACT_PASS, check_family_consistency, check_hamiltonian, check_monge_ampere,
                                check_shell, hamiltonian_residual_polys, monge_ampere_at,
                                monge_ampere_symbolic, run_checks)


@pytest.mark.parametrize("kind", ["cc", "sp"])
def test_hamiltonian_exact_for_cubic(kind):
    r = check_hamiltonian(ias_maps(germ(1, {(3,): 1}), kind))
    assert r.passed and r.max_residual == EXACT_PASS


def test_hamiltonian_exact_for_zero_germ():
    assert check_hamiltonian(ias_maps(germ(1, {}), "cc")).max_residual == EXACT_PASS


def test_hamiltonian_detects_a_wrong_f():
    ias = ias_maps(germ(1, {(3,): 1}), "cc")
    ias.polys["f"] = ias.polys["f"] + Poly.var(2, 0)
    r = check_hamiltonian(ias)
    assert not r.passed and r.details["nonzero"]


def test_hamiltonian_fd_order_on_circle():
    r = check_hamiltonian(builtin("circle")["cc"], h=1e-4)
    assert r.passed and r.max_residual < 1e-7
    assert 1.7 <= r.order <= 2.3


@pytest.mark.parametrize("kind,sign", [("cc", -1), ("sp", 1)])
def test_monge_ampere_circle(kind, sign):
    r = check_monge_ampere(builtin("circle")[kind])
    assert r.passed
    assert r.details["ratio_residual"] < 1e-6 and r.details["symmetry_residual"] < 1e-6
    assert r.details["signs"] == [sign]


def test_monge_ampere_circle_sp_strip():
    # t in [0.1, 1]: closed-form Jacobians give ratio exactly 1 up to FD error
    ias = builtin("circle")["sp"]
    s, t = np.meshgrid(np.linspace(-3, 3, 40), np.linspace(0.1, 1, 40), indexing="ij")
    r = check_monge_ampere(ias, np.stack([s, t], axis=-1))
    assert r.details["ratio_residual"] < 1e-8 and r.details["signs"] == [1]


def test_monge_ampere_symbolic_cubic():
    ias = ias_maps(germ(1, {(3,): 1}), "cc")
    sign, dX, dY = monge_ampere_symbolic(ias)
    assert sign == -1 and not dX.is_zero()
    assert abs(monge_ampere_at(ias, [Fraction(1, 3), Fraction(-1, 2)])) == 1


def test_monge_ampere_exact_point_singular():
    ias = ias_maps(germ(1, {(3,): 1}), "cc")
    with pytest.raises(ValueError, match="singular"):
        monge_ampere_at(ias, [1, 1])


def test_monge_ampere_no_regular_points():
    ias = ias_maps(germ(1, {(2,): 1}), "sp")  # x = (s, s): det Dx = 0 everywhere
    with pytest.raises(ValueError, match="no regular"):
        check_monge_ampere(ias)


@pytest.mark.parametrize("g", seeded_germs(10, seed=3, max_degree=5), ids=lambda g: g.S.format())
def test_monge_ampere_symbolic_random(g):
    for kind in ("cc", "sp"):
        sign, _, _ = monge_ampere_symbolic(ias_maps(g, kind))
        assert sign in (1, -1)


@pytest.mark.parametrize("name", ["circle", "torus:2"])
def test_shell_builtins(name):
    for kind, ias in builtin(name).items():
        r = check_shell(ias)
        assert r.passed and r.max_residual < 1e-10


@pytest.mark.parametrize("name", ["a42", "d62m", "e82"])
def test_shell_exact(name):
    for kind in ("cc", "sp"):
        assert check_shell(ias_maps(fixture(name), kind)).max_residual == EXACT_PASS


def test_family_consistency_fixtures():
    for name in ("a22", "d42p", "e82"):
        assert check_family_consistency(fixture(name)).max_residual == EXACT_PASS


def test_hamiltonian_residual_polys_vanish_random():
    for g in seeded_germs(10, seed=8):
        for kind in ("cc", "sp"):
            assert all(r.is_zero() for r in hamiltonian_residual_polys(ias_maps(g, kind)))


def test_run_checks_dispatch():
    ias = builtin("circle")["sp"]
    reports = run_checks(ias, None, ["ma", "shell"])
    assert [r.name for r in reports] == ["monge_ampere", "shell"]
    with pytest.raises(ValueError):
        run_checks(ias, None, ["family"])
    with pytest.raises(ValueError):
        run_checks(ias, None, ["bogus"])


def test_report_dict():
    d = check_hamiltonian(builtin("circle")["cc"]).to_dict()
    assert set(d) >= {"check", "passed", "max_residual", "samples", "order"}
