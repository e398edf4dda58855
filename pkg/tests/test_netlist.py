"""Netlist parsing, validation, serialization."""

from fractions import Fraction

import pytest

from homcirc import expr as ex
from homcirc import netlist as nl

from conftest import BIF_NETLIST, MLC_NETLIST


def test_parse_mlc():
    c = nl.parse_netlist(MLC_NETLIST)
    assert [b.name for b in c.branches] == ["V1", "R1", "L1", "C1", "M1"]
    kinds = {b.name: b.kind for b in c.branches}
    assert kinds == {"V1": "vsource", "R1": "resistor", "L1": "inductor",
                     "C1": "capacitor", "M1": "memristor"}
    assert dict(c.params) == {"R": None, "L": None, "C": None, "R0": None}
    m1 = c.branch("M1")
    assert m1.characteristic is not None
    assert ex.evaluate(m1.characteristic,
                       {"phi": 3, "sigma": 1, "R0": 2}) == 1


def test_numeric_params_and_dc():
    c = nl.parse_netlist('V1 0 1 dc=2\nR1 1 0 f="i - g*v"\n.param g=1/3')
    assert c.param_values() == {"g": Fraction(1, 3)}
    v1 = c.branch("V1")
    assert ex.evaluate(v1.value, {}) == 2


def test_source_default_dc_zero():
    c = nl.parse_netlist('I1 0 1\nR1 1 0 f="i - v"')
    assert ex.evaluate(c.branch("I1").value, {}) == 0


def test_comments_and_blank_lines():
    c = nl.parse_netlist("# header\n\nR1 a b f=\"i - v\"  # trailing\nR2 b a\n")
    assert len(c.branches) == 2


def test_sources_as_submersions():
    c = nl.parse_netlist('V1 0 1 dc=2\nI1 1 0 dc=3')
    work = nl.sources_as_submersions(c)
    fv = work.branch("V1").characteristic
    fi = work.branch("I1").characteristic
    assert ex.evaluate(fv, {"v": 2, "i": 99}) == 0
    assert ex.evaluate(fi, {"i": 3, "v": 99}) == 0


@pytest.mark.parametrize("bad,fragment", [
    ('R1 a a f="i - v"', "self-loop"),
    ('R1 a b f="i"\nR1 b a f="v"', "duplicate"),
    ('R1 a b f="i"\nR2 c d f="v"', "connected"),
    ('X1 a b f="i"', "prefix"),
    ('R1 a b f="phi - sigma"', "may not reference"),
    ('C1 a b c="phi"', "may not reference"),
    ('R1 a b', None),  # missing f is fine structurally
])
def test_validation_errors(bad, fragment):
    if fragment is None:
        nl.parse_netlist(bad + '\nR2 b a f="v"')
        return
    with pytest.raises(nl.NetlistError) as err:
        nl.parse_netlist(bad)
    assert fragment.lower() in str(err.value).lower()


def test_serialize_round_trip():
    c = nl.parse_netlist(BIF_NETLIST)
    again = nl.parse_netlist(nl.serialize(c))
    assert [b.name for b in again.branches] == [b.name for b in c.branches]
    assert again.nodes == c.nodes
    assert dict(again.params) == dict(c.params)
    for b, b2 in zip(c.branches, again.branches):
        assert b.kind == b2.kind and (b.tail, b.head) == (b2.tail, b2.head)
