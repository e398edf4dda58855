"""Homogeneous pairs, passivity, gamma, associate checking."""

from fractions import Fraction

import pytest

from homcirc import expr as ex
from homcirc import projective as pj


def test_homog_pair_rejects_zero_zero():
    with pytest.raises(pj.DegenerateDifferentialError):
        pj.HomogPair(0, 0)


def test_projective_equality():
    assert pj.HomogPair(1, 2).projectively_equal(pj.HomogPair(-3, -6))
    assert not pj.HomogPair(1, 2).projectively_equal(pj.HomogPair(2, 1))


def test_homog_resistance_example():
    f = ex.parse_expr("i - mu*v - v^2")
    h = pj.homog_resistance(f, (Fraction(0), Fraction(0)),
                            {"mu": Fraction(1, 2)})
    assert h.projectively_equal(pj.HomogPair(Fraction(1, 2), 1))
    assert pj.dehomogenize(h, "voltage") == Fraction(1, 2)


def test_dehomogenize_patches():
    h = pj.HomogPair(Fraction(0), Fraction(1))  # R = q/p undefined, G = 0
    assert pj.dehomogenize(h, "voltage") == 0
    with pytest.raises(pj.PatchError):
        pj.dehomogenize(h, "current")


def test_homog_memristance():
    f = ex.parse_expr("phi - R0*sigma")
    h = pj.homog_memristance(f, (Fraction(0), Fraction(0)),
                             {"R0": Fraction(3)})
    assert h.projectively_equal(pj.HomogPair(1, Fraction(3)))


def test_strict_local_passivity():
    f = ex.parse_expr("i - mu*v - v^2")
    origin = (Fraction(0), Fraction(0))
    assert pj.is_strictly_locally_passive(f, origin, {"mu": Fraction(1, 2)})
    # mu = 0 kills f_v at the origin: the bifurcating configuration
    assert not pj.is_strictly_locally_passive(f, origin, {"mu": Fraction(0)})
    assert not pj.is_strictly_locally_passive(
        ex.parse_expr("i + v"), origin, {})


def test_gamma_at_gradient_branch():
    f1 = ex.parse_expr("(1 + v^2)*(v - i)")
    f2 = ex.parse_expr("v - i")
    assert pj.gamma_at(f1, f2, (1.0, 1.0)) == pytest.approx(2.0)
    # off the zero set both branch formulas agree
    assert pj.gamma_at(f1, f2, (0.5, 1.0)) == pytest.approx(2.0)


def test_gamma_degenerate_error():
    f1 = ex.parse_expr("v - i")
    f2 = ex.parse_expr("v^2 - i^2")
    with pytest.raises(pj.DegenerateDifferentialError):
        pj.gamma_at(f1, f2, (0.0, 0.0))


def test_check_associates_explicit_factor():
    f1 = ex.parse_expr("v - i^2")
    f2 = ex.parse_expr("(2 + sin(i))*(v - i^2)")
    rep = pj.check_associates(f1, f2, (-2, 2, -2, 2), grid=32)
    assert rep.associates
    # gamma here is f2/f1 measured as f1/f2 inverse; report tracks |gamma|
    assert 1 / 3 - 1e-9 <= rep.gamma_min_abs <= rep.gamma_max_abs <= 1 + 1e-9


def test_check_associates_distinct_lines():
    f1 = ex.parse_expr("v - i")
    f2 = ex.parse_expr("v + i")
    rep = pj.check_associates(f1, f2, (-1, 1, -1, 1), grid=32)
    assert not rep.associates
    assert rep.zero_set_mismatches


def test_check_associates_degenerate_rejected():
    f1 = ex.parse_expr("v - i")
    f2 = ex.parse_expr("v^2 - i^2")
    with pytest.raises(pj.DegenerateDifferentialError):
        pj.check_associates(f1, f2, (-1, 1, -1, 1), grid=32)


def test_check_associates_transitive_on_samples():
    f1 = ex.parse_expr("v - i")
    f2 = ex.parse_expr("2*v - 2*i")
    f3 = ex.parse_expr("(3 + cos(v))*(v - i)")
    dom = (-1, 1, -1, 1)
    assert pj.check_associates(f1, f2, dom, grid=16).associates
    assert pj.check_associates(f2, f3, dom, grid=16).associates
    assert pj.check_associates(f1, f3, dom, grid=16).associates
