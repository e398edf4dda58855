"""Multigraph queries on circuits: spanning trees, fundamental matrices,
homogeneous loop/cutset tests and bridge detection.

All matrices use exact integer entries (plain Python ints in nested
lists) so products like A*B^T can be checked for exact zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .netlist import Circuit

SpanningTree = tuple[int, ...]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Join the sets of a and b; False if already joined (cycle)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _is_spanning_tree(node_count: int, edges: Sequence[tuple[int, int]],
                      subset: Iterable[int]) -> bool:
    uf = _UnionFind(node_count)
    count = 0
    for idx in subset:
        a, b = edges[idx]
        if not uf.union(a, b):
            return False
        count += 1
    return count == node_count - 1


def spanning_trees(c: Circuit) -> list[SpanningTree]:
    """All spanning trees as sorted twig index tuples, lexicographic order."""
    edges = c.edges()
    n = c.node_count
    return [subset for subset in combinations(range(len(edges)), n - 1)
            if _is_spanning_tree(n, edges, subset)]


def reference_tree(c: Circuit) -> SpanningTree:
    """Lexicographically first spanning tree; exists by connectivity."""
    edges = c.edges()
    n = c.node_count
    uf = _UnionFind(n)
    twigs = []
    for idx, (a, b) in enumerate(edges):
        if uf.union(a, b):
            twigs.append(idx)
            if len(twigs) == n - 1:
                break
    return tuple(twigs)


@dataclass(frozen=True)
class CutCycleMatrices:
    """Fundamental cutset matrix A ((n-1) x m) and cycle matrix B
    ((m-n+1) x m) in canonical branch order, for a reference tree.

    In twigs-first column order A = (I K) and B = (-K^T I); entries are
    in {-1, 0, 1} and A * B^T = 0 exactly.
    """

    A: tuple[tuple[int, ...], ...]
    B: tuple[tuple[int, ...], ...]
    tree: SpanningTree


def _tree_path(edges: Sequence[tuple[int, int]], twigs: Sequence[int],
               start: int, goal: int) -> list[tuple[int, int]]:
    """Path from start to goal along tree edges as (twig index, direction),
    direction +1 when traversed tail->head."""
    adjacency: dict[int, list[tuple[int, int, int]]] = {}
    for t in twigs:
        a, b = edges[t]
        adjacency.setdefault(a, []).append((b, t, +1))
        adjacency.setdefault(b, []).append((a, t, -1))
    stack = [(start, [])]
    seen = {start}
    while stack:
        node, path = stack.pop()
        if node == goal:
            return path
        for nxt, twig, sign in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, path + [(twig, sign)]))
    raise ValueError("tree does not connect the requested nodes")


def fundamental_matrices(c: Circuit, tree: SpanningTree) -> CutCycleMatrices:
    edges = c.edges()
    m = len(edges)
    twigs = sorted(tree)
    chords = [k for k in range(m) if k not in set(twigs)]

    # Each chord's fundamental cycle, oriented by the chord: traverse the
    # chord tail->head, then return through the tree from head to tail.
    b_rows = []
    for chord in chords:
        tail, head = edges[chord]
        row = [0] * m
        row[chord] = 1
        for twig, sign in _tree_path(edges, twigs, head, tail):
            row[twig] = sign
        b_rows.append(tuple(row))

    # With columns permuted twigs-first, B = (B_t I) and A = (I -B_t^T).
    a_rows = []
    for r, twig in enumerate(twigs):
        row = [0] * m
        row[twig] = 1
        for cidx, chord in enumerate(chords):
            row[chord] = -b_rows[cidx][twig]
        a_rows.append(tuple(row))

    return CutCycleMatrices(tuple(a_rows), tuple(b_rows), tuple(twigs))


def _connected_over(node_count: int, edges: Sequence[tuple[int, int]],
                    keep: Iterable[int]) -> bool:
    uf = _UnionFind(node_count)
    for idx in keep:
        uf.union(*edges[idx])
    root = uf.find(0)
    return all(uf.find(k) == root for k in range(node_count))


def has_homogeneous_loop(c: Circuit, kind: str) -> bool:
    """True iff the sub-multigraph of kind-branches contains a cycle."""
    uf = _UnionFind(c.node_count)
    for idx, b in enumerate(c.branches):
        if b.kind == kind:
            a, h = c.edges()[idx]
            if not uf.union(a, h):
                return True
    return False


def has_homogeneous_cutset(c: Circuit, kind: str) -> bool:
    """True iff deleting every kind-branch disconnects the graph."""
    edges = c.edges()
    keep = [k for k, b in enumerate(c.branches) if b.kind != kind]
    return not _connected_over(c.node_count, edges, keep)


def is_bridge_after_deleting(c: Circuit, branch: str, deleted_kind: str) -> bool:
    """True iff `branch` is a cut edge of its component once every
    deleted_kind branch is removed; equivalently a cutset exists made of
    `branch` plus deleted_kind branches only."""
    idx = c.branch_index(branch)
    edges = c.edges()
    keep = [k for k, b in enumerate(c.branches)
            if b.kind != deleted_kind and k != idx]
    uf = _UnionFind(c.node_count)
    for k in keep:
        uf.union(*edges[k])
    tail, head = edges[idx]
    return uf.find(tail) != uf.find(head)


def matmul_int(a: Sequence[Sequence[int]],
               b_t: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact integer product A * B^T given B row-wise."""
    return [[sum(x * y for x, y in zip(row_a, row_b)) for row_b in b_t]
            for row_a in a]
