"""Netlist parsing: text circuit descriptions into immutable Circuit values.

Line format, one branch or directive per line, ``#`` starts a comment:

    .param mu=sym            # symbolic parameter
    .param E=5               # bound parameter
    R<name> <tail> <head> f="<expr over i, v>"
    C<name> <tail> <head> c="<expr over v>"
    L<name> <tail> <head> l="<expr over i>"
    M<name> <tail> <head> f="<expr over sigma, phi>"
    V<name> <tail> <head> dc=<expr>
    I<name> <tail> <head> dc=<expr>

Branch order in the file is the canonical branch order used by every
analysis.  Expressions may be omitted for purely symbolic analyses;
operations needing them report the offending branch.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from . import expr as ex
from .expr import Expression

KINDS = ("resistor", "capacitor", "inductor", "memristor", "vsource", "isource")

_PREFIX_KIND = {
    "R": "resistor",
    "C": "capacitor",
    "L": "inductor",
    "M": "memristor",
    "V": "vsource",
    "I": "isource",
}

_ALLOWED_VARS = {
    "resistor": {"i", "v"},
    "memristor": {"sigma", "phi"},
    "capacitor": {"v"},
    "inductor": {"i"},
    "vsource": set(),
    "isource": set(),
}


class NetlistError(ValueError):
    pass


@dataclass(frozen=True)
class Branch:
    name: str
    tail: str
    head: str
    kind: str
    # resistor/memristor implicit characteristic f, capacitor/inductor
    # reactance, or source value; None when the netlist omitted it.
    characteristic: Optional[Expression] = None
    reactance: Optional[Expression] = None
    value: Optional[Expression] = None


@dataclass(frozen=True)
class Circuit:
    nodes: tuple[str, ...]
    branches: tuple[Branch, ...]
    params: tuple[tuple[str, Optional[Fraction]], ...] = ()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def node_index(self, name: str) -> int:
        return self.nodes.index(name)

    def branch(self, name: str) -> Branch:
        for b in self.branches:
            if b.name == name:
                return b
        raise NetlistError(f"no branch named {name!r}")

    def branch_index(self, name: str) -> int:
        for idx, b in enumerate(self.branches):
            if b.name == name:
                return idx
        raise NetlistError(f"no branch named {name!r}")

    def param_values(self) -> dict[str, Fraction]:
        return {name: val for name, val in self.params if val is not None}

    def edges(self) -> list[tuple[int, int]]:
        index = {n: k for k, n in enumerate(self.nodes)}
        return [(index[b.tail], index[b.head]) for b in self.branches]


_TOKEN_RE = re.compile(r'([A-Za-z_.][\w.]*=(?:"[^"]*"|\S+))|(\S+)')


def _split_line(line: str) -> list[str]:
    return [m.group(0) for m in _TOKEN_RE.finditer(line)]


def _connected(node_count: int, edges: list[tuple[int, int]]) -> bool:
    if node_count == 0:
        return False
    parent = list(range(node_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    root = find(0)
    return all(find(k) == root for k in range(node_count))


def parse_netlist(text: str) -> Circuit:
    nodes: list[str] = []
    branches: list[Branch] = []
    params: list[tuple[str, Optional[Fraction]]] = []
    seen_names: set[str] = set()
    param_names: set[str] = set()

    def intern_node(name: str) -> str:
        if name not in nodes:
            nodes.append(name)
        return name

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = _split_line(line)
        if tokens[0].startswith(".param"):
            if len(tokens) != 2 or "=" not in tokens[1]:
                raise NetlistError(f"line {lineno}: malformed .param directive")
            pname, pval = tokens[1].split("=", 1)
            if pname in param_names:
                raise NetlistError(f"line {lineno}: duplicate parameter {pname!r}")
            param_names.add(pname)
            params.append((pname, None if pval == "sym" else Fraction(pval)))
            continue
        if len(tokens) < 3:
            raise NetlistError(f"line {lineno}: expected '<name> <tail> <head> ...'")
        name, tail, head = tokens[0], tokens[1], tokens[2]
        prefix = name[0].upper()
        if prefix not in _PREFIX_KIND:
            raise NetlistError(f"line {lineno}: unknown branch prefix {name[0]!r}")
        kind = _PREFIX_KIND[prefix]
        if name in seen_names:
            raise NetlistError(f"line {lineno}: duplicate branch name {name!r}")
        seen_names.add(name)
        if tail == head:
            raise NetlistError(f"line {lineno}: self-loop on branch {name!r}")
        intern_node(tail)
        intern_node(head)

        fields: dict[str, str] = {}
        for tok in tokens[3:]:
            if "=" not in tok:
                raise NetlistError(f"line {lineno}: unexpected token {tok!r}")
            key, val = tok.split("=", 1)
            fields[key] = val.strip('"')

        expected_key = {"resistor": "f", "memristor": "f", "capacitor": "c",
                        "inductor": "l", "vsource": "dc", "isource": "dc"}[kind]
        for key in fields:
            if key != expected_key:
                raise NetlistError(
                    f"line {lineno}: branch {name!r} does not take {key!r}")

        expression = None
        if expected_key in fields:
            try:
                expression = ex.parse_expr(fields[expected_key])
            except ex.ExprError as err:
                raise NetlistError(f"line {lineno}: branch {name!r}: {err}") from err
            allowed = _ALLOWED_VARS[kind]
            for free in ex.free_names(expression):
                if free in ex.DEVICE_VARIABLES and free not in allowed:
                    raise NetlistError(
                        f"line {lineno}: branch {name!r} may not reference {free!r}")

        branch = Branch(name=name, tail=tail, head=head, kind=kind)
        if kind in ("resistor", "memristor"):
            branch = replace(branch, characteristic=expression)
        elif kind in ("capacitor", "inductor"):
            branch = replace(branch, reactance=expression)
        else:
            branch = replace(branch, value=expression or ex.ZERO)
        branches.append(branch)

    if not branches:
        raise NetlistError("netlist contains no branches")
    circuit = Circuit(tuple(nodes), tuple(branches), tuple(params))
    if not _connected(circuit.node_count, circuit.edges()):
        raise NetlistError("circuit graph is not connected")
    return circuit


def serialize(c: Circuit) -> str:
    lines = []
    for name, val in c.params:
        lines.append(f".param {name}={'sym' if val is None else val}")
    for b in c.branches:
        base = f"{b.name} {b.tail} {b.head}"
        if b.kind in ("resistor", "memristor") and b.characteristic is not None:
            base += f' f="{ex.to_text(b.characteristic)}"'
        elif b.kind == "capacitor" and b.reactance is not None:
            base += f' c="{ex.to_text(b.reactance)}"'
        elif b.kind == "inductor" and b.reactance is not None:
            base += f' l="{ex.to_text(b.reactance)}"'
        elif b.kind in ("vsource", "isource"):
            base += f' dc="{ex.to_text(b.value)}"'
        lines.append(base)
    return "\n".join(lines) + "\n"


def sources_as_submersions(c: Circuit) -> Circuit:
    """Recast sources as implicit resistors: V dc=E -> f = v - E, I dc=J -> f = i - J."""
    out = []
    for b in c.branches:
        if b.kind == "vsource":
            f = ex.Binary("sub", ex.Name("v", False), b.value)
            out.append(Branch(b.name, b.tail, b.head, "resistor", characteristic=f))
        elif b.kind == "isource":
            f = ex.Binary("sub", ex.Name("i", False), b.value)
            out.append(Branch(b.name, b.tail, b.head, "resistor", characteristic=f))
        else:
            out.append(b)
    return Circuit(c.nodes, tuple(out), c.params)
