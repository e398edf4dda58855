"""Sparse multivariate polynomials with exact rational coefficients."""

import random
from fractions import Fraction

import pytest

from homcirc import poly as pl
from homcirc.poly import LAMBDA, MultiPoly


def _random_poly(rng: random.Random) -> MultiPoly:
    syms = [pl.P("a"), pl.Q("a"), pl.P("b"), pl.cap("c"), pl.param("mu"), LAMBDA]
    out = MultiPoly.zero()
    for _ in range(rng.randint(0, 5)):
        factors = [(rng.choice(syms), rng.randint(1, 3))
                   for _ in range(rng.randint(0, 3))]
        coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        out = out + MultiPoly.monomial(factors, coeff)
    return out


def test_ring_axioms_random():
    rng = random.Random(41)
    for _ in range(100):
        a, b, c = (_random_poly(rng) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + MultiPoly.zero() == a
        assert a * MultiPoly.constant(1) == a
        assert a - a == MultiPoly.zero()


def test_monomial_merging_and_zero_pruning():
    p = MultiPoly.monomial([(pl.P("x"), 1)], Fraction(1, 2))
    q = MultiPoly.monomial([(pl.P("x"), 1)], Fraction(-1, 2))
    assert (p + q).is_zero()
    assert p + p == MultiPoly.monomial([(pl.P("x"), 1)], 1)


def test_multihomogeneity_check():
    good = (MultiPoly.monomial([(pl.P("a"), 1), (pl.Q("b"), 1)])
            + MultiPoly.monomial([(pl.Q("a"), 1), (pl.P("b"), 1)]))
    assert pl.is_multihomogeneous_in_pair(good, "a")
    assert pl.is_multihomogeneous_in_pair(good, "b")
    bad = good + MultiPoly.monomial([(pl.P("a"), 2)])
    assert not pl.is_multihomogeneous_in_pair(bad, "a")


def test_lambda_coefficients():
    p = (MultiPoly.monomial([(pl.P("a"), 1), (LAMBDA, 2)])
         + MultiPoly.monomial([(pl.Q("a"), 1), (LAMBDA, 1)])
         + MultiPoly.constant(3))
    coeffs = pl.lambda_coefficients(p)
    assert len(coeffs) == 3
    assert coeffs[0] == MultiPoly.constant(3)
    assert coeffs[1] == MultiPoly.symbol(pl.Q("a"))
    assert coeffs[2] == MultiPoly.symbol(pl.P("a"))


def test_substitute_and_eval():
    p = MultiPoly.monomial([(pl.P("a"), 1), (pl.Q("b"), 2)])
    q = pl.substitute(p, {pl.P("a"): MultiPoly.constant(Fraction(1, 2))})
    assert q == MultiPoly.monomial([(pl.Q("b"), 2)], Fraction(1, 2))
    val = pl.eval_poly(p, {pl.P("a"): Fraction(2), pl.Q("b"): Fraction(3)})
    assert val == 18
    with pytest.raises(pl.PolyError, match="unbound"):
        pl.eval_poly(p, {pl.P("a"): 1})


def test_dehomogenize_current_and_voltage():
    # P_a*Q_b + Q_a*P_b with a current-controlled, b voltage-controlled:
    # P_a -> 1, Q_a -> R_a, P_b -> G_b, Q_b -> 1
    p = (MultiPoly.monomial([(pl.P("a"), 1), (pl.Q("b"), 1)])
         + MultiPoly.monomial([(pl.Q("a"), 1), (pl.P("b"), 1)]))
    d = pl.dehomogenize(p, {"a": "current", "b": "voltage"}, frozenset())
    expect = (MultiPoly.constant(1)
              + MultiPoly.monomial([(pl.param("R_a"), 1),
                                    (pl.param("G_b"), 1)]))
    assert d == expect


def test_dehomogenize_memristor_symbols():
    p = MultiPoly.monomial([(pl.P("m"), 1)]) + MultiPoly.monomial([(pl.Q("m"), 1)])
    d = pl.dehomogenize(p, {"m": "voltage"}, frozenset({"m"}))
    expect = MultiPoly.symbol(pl.param("W_m")) + MultiPoly.constant(1)
    assert d == expect


def test_dehomogenize_rejects_unknown_control():
    p = MultiPoly.symbol(pl.P("a"))
    with pytest.raises(pl.PolyError):
        pl.dehomogenize(p, {"a": "sideways"}, frozenset())


def test_to_text_ordering():
    p = (MultiPoly.monomial([(pl.P("a"), 1), (LAMBDA, 1)])
         + MultiPoly.constant(Fraction(-1, 2)))
    text = pl.to_text(p)
    assert "lambda" in text and ("- 1/2" in text or "-1/2" in text)
