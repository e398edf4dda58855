"""Acceptance gate: ten checks, one pass/fail line each.

Run with `pytest -v tests/test_acceptance.py` (add -s to see the lines
on success; a failing criterion always prints its line).
"""

import math
import random
import time
from fractions import Fraction

from homcirc import analysis as an
from homcirc import bifurcation as bi
from homcirc import expr as ex
from homcirc import graph as gr
from homcirc import netlist as nl
from homcirc import poly as pl
from homcirc import projective as pj
from homcirc.poly import LAMBDA, MultiPoly

from conftest import (BIF_NETLIST, MLC_NETLIST, random_dynamic_netlist,
                      random_resistive_netlist)
from test_expr import _random_expr, finite_difference
from test_graph import _laplacian_tree_count

ORIGIN = an.OperatingPoint()


class _gate:
    """Prints exactly one PASS/FAIL line per criterion."""

    def __init__(self, number: int, title: str, budget: float):
        self.number = number
        self.title = title
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None and elapsed <= self.budget else "FAIL"
        print(f"ACCEPTANCE {self.number:2d} [{status}] {self.title} "
              f"({elapsed:.2f}s / budget {self.budget:.0f}s)")
        if exc_type is None:
            assert elapsed <= self.budget, (
                f"criterion {self.number} exceeded its {self.budget}s budget")
        return False


def _mono(*factors, coeff=1):
    return MultiPoly.monomial(list(factors), coeff)


def test_01_mlc_golden_polynomial():
    with _gate(1, "memristive loop symbolic characteristic polynomial", 1.0):
        c = nl.parse_netlist(MLC_NETLIST)
        got = an.char_poly_memristive(c, mode="symbolic").poly
        P, Q, C, L = pl.P, pl.Q, pl.cap, pl.ind
        expect = (
            _mono((C("C1"), 1), (L("L1"), 1), (P("R1"), 1), (Q("M1"), 1), (LAMBDA, 3))
            + _mono((C("C1"), 1), (Q("R1"), 1), (Q("M1"), 1), (LAMBDA, 2))
            + _mono((L("L1"), 1), (P("R1"), 1), (P("M1"), 1), (LAMBDA, 2))
            + _mono((P("R1"), 1), (Q("M1"), 1), (LAMBDA, 1))
            + _mono((P("M1"), 1), (Q("R1"), 1), (LAMBDA, 1)))
        assert got == expect
        assert pl.to_text(got) == pl.to_text(expect)


def test_02_mlc_dehomogenization():
    with _gate(2, "memristive loop dehomogenized polynomial", 1.0):
        c = nl.parse_netlist(MLC_NETLIST)
        res = an.char_poly_memristive(c, mode="symbolic")
        got = pl.dehomogenize(res.poly, {"R1": "current", "M1": "voltage"},
                              frozenset(res.memristor_branches))
        C, L = pl.cap, pl.ind
        R = pl.param("R_R1")
        W = pl.param("W_M1")
        expect = (
            _mono((C("C1"), 1), (L("L1"), 1), (LAMBDA, 3))
            + _mono((R, 1), (C("C1"), 1), (LAMBDA, 2))
            + _mono((W, 1), (L("L1"), 1), (LAMBDA, 2))
            + _mono((LAMBDA, 1))
            + _mono((R, 1), (W, 1), (LAMBDA, 1)))
        assert got == expect


def test_03_two_resistor_rlc_golden_polynomials():
    with _gate(3, "two-resistor RLC symbolic and conductance forms", 1.0):
        c = nl.parse_netlist(BIF_NETLIST)
        got = an.char_poly(c, mode="symbolic").poly
        P, Q, C, L = pl.P, pl.Q, pl.cap, pl.ind
        expect = (
            _mono((C("C1"), 1), (L("L1"), 1), (P("R1"), 1), (Q("R2"), 1), (LAMBDA, 2))
            + _mono((C("C1"), 1), (L("L1"), 1), (Q("R1"), 1), (P("R2"), 1), (LAMBDA, 2))
            + _mono((C("C1"), 1), (Q("R1"), 1), (Q("R2"), 1), (LAMBDA, 1))
            + _mono((L("L1"), 1), (P("R1"), 1), (P("R2"), 1), (LAMBDA, 1))
            + _mono((P("R1"), 1), (Q("R2"), 1)))
        assert got == expect
        dehom = pl.dehomogenize(got, {"R1": "voltage", "R2": "voltage"},
                                frozenset())
        G1 = pl.param("G_R1")
        G2 = pl.param("G_R2")
        expect_g = (
            _mono((C("C1"), 1), (L("L1"), 1), (G1, 1), (LAMBDA, 2))
            + _mono((C("C1"), 1), (L("L1"), 1), (G2, 1), (LAMBDA, 2))
            + _mono((C("C1"), 1), (LAMBDA, 1))
            + _mono((L("L1"), 1), (G1, 1), (G2, 1), (LAMBDA, 1))
            + _mono((G1, 1)))
        assert dehom == expect_g


def test_04_weighted_tree_sum_equals_determinant():
    with _gate(4, "tree-sum polynomial vs determinant oracle, 100 graphs", 30.0):
        rng = random.Random(20240401)
        for _ in range(100):
            c = nl.parse_netlist(random_resistive_netlist(rng, rng.randint(4, 8)))
            m = len(c.branches)
            p = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
            q = [Fraction(rng.randint(-5, 5)) for _ in range(m)]
            bindings = {}
            for k, b in enumerate(c.branches):
                bindings[pl.P(b.name)] = p[k]
                bindings[pl.Q(b.name)] = q[k]
            lhs = pl.eval_poly(an.kirchhoff_poly(c), bindings)
            assert lhs == an.det_oracle_kirchhoff(c, p, q)


def test_05_charpoly_proportional_to_pencil_oracle():
    with _gate(5, "characteristic polynomial vs matrix pencil, 25 circuits", 30.0):
        rng = random.Random(20240405)
        done = 0
        while done < 25:
            text = random_dynamic_netlist(rng, rng.randint(4, 7),
                                          with_memristor=bool(done % 3 == 0))
            c = nl.parse_netlist(text)
            op = an.solve_equilibrium(c, ORIGIN)
            tree = an.char_poly_memristive(c, op, mode="numeric").coefficients
            if all(x == 0 for x in tree):
                continue
            pencil = an.pencil_oracle(c, op)
            n = max(len(tree), len(pencil))
            a = list(tree) + [Fraction(0)] * (n - len(tree))
            b = list(pencil) + [Fraction(0)] * (n - len(pencil))
            pivot = max(range(n), key=lambda k: abs(float(a[k])))
            ratio = float(b[pivot]) / float(a[pivot])
            for j in range(n):
                scale = max(1.0, abs(float(b[j])))
                assert abs(float(a[j]) * ratio - float(b[j])) / scale <= 1e-9
            done += 1


def test_06_nondegeneracy_sum_equals_signed_determinant():
    with _gate(6, "nondegeneracy tree sum vs signed matrix determinant", 10.0):
        rng = random.Random(20240406)
        for _ in range(25):
            c = nl.parse_netlist(random_resistive_netlist(rng, rng.randint(4, 7)))
            m = len(c.branches)
            n = c.node_count
            sign = -1 if (m - n + 1) % 2 else 1
            total = an.nondegeneracy_sum(c, ORIGIN)
            assert total == sign * an.det_oracle_matrix0(c, ORIGIN)


def test_07_associate_invariance():
    with _gate(7, "scaling one characteristic scales every output", 10.0):
        rng = random.Random(20240407)

        def scale_first_resistor(lines):
            for k, line in enumerate(lines):
                if line.startswith("R"):
                    head, inner = line.split(' f="')
                    inner = inner.rstrip('"')
                    lines[k] = head + f' f="(2 + tanh(i+v))*({inner})"'
                    return lines
            raise AssertionError("no resistor to scale")

        gamma0 = 2.0  # tanh(0) = 0
        for case in range(10):
            if case % 2 == 0:
                base = random_resistive_netlist(rng, rng.randint(4, 6))
                c = nl.parse_netlist(base)
                c2 = nl.parse_netlist("\n".join(
                    scale_first_resistor(base.splitlines())))
                t1 = float(an.nondegeneracy_sum(c, ORIGIN))
                t2 = float(an.nondegeneracy_sum(c2, ORIGIN))
                assert abs(t2 - gamma0 * t1) <= 1e-9 * max(1.0, abs(t1))
            else:
                while True:
                    base = random_dynamic_netlist(rng, rng.randint(4, 6))
                    if any(line.startswith("R") for line in base.splitlines()):
                        break
                c = nl.parse_netlist(base)
                c2 = nl.parse_netlist("\n".join(
                    scale_first_resistor(base.splitlines())))
                a = an.char_poly(c, ORIGIN, mode="numeric").coefficients
                b = an.char_poly(c2, ORIGIN, mode="numeric").coefficients
                assert len(a) == len(b)
                for x, y in zip(a, b):
                    scale = max(1.0, abs(float(x)))
                    assert abs(float(y) - gamma0 * float(x)) / scale <= 1e-9


def test_08_bifurcation_certified_and_refuted():
    with _gate(8, "stationary bifurcation certified, mutations refuted", 5.0):
        c = nl.parse_netlist(BIF_NETLIST)
        report = bi.check_bifurcation(c, "R1", "mu")
        assert report.overall == "certified"
        assert report.indep_term_k == 1  # lambda^0 coefficient is exactly k*mu
        assert report.lambda1_at_zero != 0
        flipped = nl.parse_netlist(
            BIF_NETLIST.replace('R2 a c f="i - v"', 'R2 a c f="i + v"'))
        rep = bi.check_bifurcation(flipped, "R1", "mu")
        assert rep.overall == "refuted"
        assert not rep.hypotheses["D2"].passed and "R2" in rep.hypotheses["D2"].witness
        broken = nl.parse_netlist(BIF_NETLIST.replace(
            '.param mu=sym', 'R3 a b f="i - v"\n.param mu=sym'))
        rep = bi.check_bifurcation(broken, "R1", "mu")
        assert rep.overall == "refuted"
        assert not rep.hypotheses["T2"].passed and "R1" in rep.hypotheses["T2"].witness


def test_09_stability_exchange_probe():
    with _gate(9, "eigenvalue crosses zero with the parameter", 5.0):
        c = nl.parse_netlist(BIF_NETLIST)
        rows = bi.eigen_exchange_probe(
            c, "R1", [Fraction(-1, 10), Fraction(0), Fraction(1, 10)])
        zero = {float(r.mu): r for r in rows if r.branch_label == "v1=0"}
        assert zero[0.1].root_sign == -1
        assert zero[-0.1].root_sign == 1
        assert zero[0.0].zero_root_exact
        assert zero[0.0].coefficients[0] == 0


def test_10_property_suites():
    with _gate(10, "derivative, orthogonality, tree-count, associates", 30.0):
        rng = random.Random(20240410)
        checked = 0
        while checked < 200:
            e = _random_expr(rng, 4)
            name = rng.choice(["i", "v"])
            point = {"i": rng.uniform(-1, 1), "v": rng.uniform(-1, 1),
                     "sigma": rng.uniform(-1, 1), "phi": rng.uniform(-1, 1)}
            try:
                exact = float(ex.evaluate(ex.diff(e, name), point))
                approx = finite_difference(e, name, point)
            except (ex.ExprError, OverflowError):
                continue
            if not (math.isfinite(exact) and math.isfinite(approx)):
                continue
            assert abs(exact - approx) / max(1.0, abs(exact), abs(approx)) <= 1e-5
            checked += 1

        for _ in range(50):
            c = nl.parse_netlist(random_resistive_netlist(rng, rng.randint(4, 8)))
            fm = gr.fundamental_matrices(c, gr.reference_tree(c))
            for arow in fm.A:
                for brow in fm.B:
                    assert sum(a * b for a, b in zip(arow, brow)) == 0

        for _ in range(50):
            c = nl.parse_netlist(random_resistive_netlist(rng, rng.randint(4, 8)))
            assert len(gr.spanning_trees(c)) == _laplacian_tree_count(c)

        rep = pj.check_associates(ex.parse_expr("v - i^2"),
                                  ex.parse_expr("(2 + sin(i))*(v - i^2)"),
                                  (-2, 2, -2, 2), grid=32)
        assert rep.associates
        rep = pj.check_associates(ex.parse_expr("v - i"),
                                  ex.parse_expr("v + i"),
                                  (-1, 1, -1, 1), grid=32)
        assert not rep.associates and rep.zero_set_mismatches
        try:
            pj.check_associates(ex.parse_expr("v - i"),
                                ex.parse_expr("v^2 - i^2"),
                                (-1, 1, -1, 1), grid=32)
            raise AssertionError("degenerate differential not detected")
        except pj.DegenerateDifferentialError:
            pass
