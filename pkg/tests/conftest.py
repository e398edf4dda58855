"""Shared fixtures and random-circuit generators."""

import random
from fractions import Fraction

import pytest

from homcirc import netlist as nl

MLC_NETLIST = """
# series memristive loop
V1 0 1 dc=0
R1 1 2 f="v - R*i"
L1 2 3 l="L"
C1 3 0 c="C"
M1 3 0 f="phi - R0*sigma"
.param R=sym
.param L=sym
.param C=sym
.param R0=sym
"""

# Two-resistor RLC loop with a parameterized implicit resistor. The
# circuit has equilibria at v1 = 0 and v1 = -mu for every mu.
BIF_NETLIST = """
R1 a b f="i - mu*v - v^2"
C1 b c c="C"
L1 a c l="L"
R2 a c f="i - v"
.param mu=sym
.param C=1
.param L=1
"""


@pytest.fixture
def mlc_circuit():
    return nl.parse_netlist(MLC_NETLIST)


@pytest.fixture
def bif_circuit():
    return nl.parse_netlist(BIF_NETLIST)


def random_connected_edges(rng: random.Random, m: int):
    """m edges over a random node count, connected, parallels allowed."""
    n = rng.randint(2, m)
    edges = []
    order = list(range(n))
    rng.shuffle(order)
    for k in range(1, n):
        a = order[rng.randrange(k)]
        edges.append((a, order[k]))
    while len(edges) < m:
        a, b = rng.sample(range(n), 2)
        edges.append((a, b))
    rng.shuffle(edges)
    return n, edges


def _pos_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 5), rng.randint(1, 5))


def random_resistive_netlist(rng: random.Random, m: int) -> str:
    """Linear strictly-passive resistors through the origin; the all-zero
    operating point is always a solution."""
    _, edges = random_connected_edges(rng, m)
    lines = []
    for k, (a, b) in enumerate(edges):
        slope = _pos_fraction(rng)
        lines.append(f'R{k} n{a} n{b} f="i - ({slope})*v"')
    return "\n".join(lines)


def random_dynamic_netlist(rng: random.Random, m: int,
                           with_memristor: bool = False) -> str:
    """Mixed R/C/L (optionally one memristor) circuit, all characteristics
    through the origin, so all-zeros is an equilibrium."""
    _, edges = random_connected_edges(rng, m)
    kinds = ["resistor", "capacitor", "inductor"]
    lines = []
    mem_placed = False
    for k, (a, b) in enumerate(edges):
        val = _pos_fraction(rng)
        if with_memristor and not mem_placed and k == len(edges) - 1:
            lines.append(f'M{k} n{a} n{b} f="phi - ({val})*sigma"')
            mem_placed = True
            continue
        kind = rng.choice(kinds)
        if kind == "resistor":
            lines.append(f'R{k} n{a} n{b} f="i - ({val})*v"')
        elif kind == "capacitor":
            lines.append(f'C{k} n{a} n{b} c="{val}"')
        else:
            lines.append(f'L{k} n{a} n{b} l="{val}"')
    if not any(line.startswith(("C", "L")) for line in lines):
        lines[0] = lines[0].replace("R0", "C0").split(" f=")[0] + ' c="1"'
    return "\n".join(lines)
