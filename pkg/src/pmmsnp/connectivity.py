"""Reconfiguration graphs and BKLM prefix/suffix graphs of a relation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .core import FiniteRelation, Tuple


@dataclass(frozen=True)
class ReconfGraph:
    nodes: tuple[Tuple, ...]
    edges: tuple[tuple[Tuple, Tuple], ...]

    def is_connected(self) -> bool:
        return graph_connected(self.nodes, self.edges)

    def to_dot(self, name: str = "reconf") -> str:
        lines = [f"graph {name} {{"]
        for t in self.nodes:
            lines.append(f'  "{_label(t)}";')
        for a, b in self.edges:
            lines.append(f'  "{_label(a)}" -- "{_label(b)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BklmGraph:
    split: int
    left: tuple[Tuple, ...]
    right: tuple[Tuple, ...]
    edges: tuple[tuple[Tuple, Tuple], ...]

    def is_connected(self) -> bool:
        nodes = [("L", p) for p in self.left] + [("R", s) for s in self.right]
        return graph_connected(nodes, [(("L", p), ("R", s)) for p, s in self.edges])

    def to_dot(self, name: str = "bklm") -> str:
        lines = [f"graph {name}_{self.split} {{"]
        for p in self.left:
            lines.append(f'  "L{_label(p)}" [shape=box];')
        for s in self.right:
            lines.append(f'  "R{_label(s)}";')
        for p, s in self.edges:
            lines.append(f'  "L{_label(p)}" -- "R{_label(s)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _label(t: Tuple) -> str:
    return ",".join(map(str, t))


def graph_connected(nodes: Sequence[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> bool:
    """Iterative search; an empty node set counts as connected."""
    if not nodes:
        return True
    adj = defaultdict(list)
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    start = nodes[0]
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(set(nodes))


def reconfiguration_graph(R: FiniteRelation) -> ReconfGraph:
    """Tuples of ``R``, joined when they differ in exactly one coordinate."""
    nodes = R.tuples
    # bucket by the tuple with one coordinate blanked out
    buckets = defaultdict(list)
    for t in nodes:
        for i in range(R.arity):
            buckets[(i, t[:i] + t[i + 1:])].append(t)
    edges = set()
    for group in buckets.values():
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                edges.add((group[a], group[b]))
    return ReconfGraph(nodes, tuple(sorted(edges)))


def is_reconfigurable(R: FiniteRelation) -> bool:
    if len(R) <= 1:
        return True
    return reconfiguration_graph(R).is_connected()


def bklm_graph(R: FiniteRelation, split: int) -> BklmGraph:
    if not 1 <= split < R.arity:
        raise ValueError(f"split index must lie in [1, {R.arity - 1}]")
    edges = sorted({(t[:split], t[split:]) for t in R.tuples})
    left = tuple(sorted({p for p, _ in edges}))
    right = tuple(sorted({s for _, s in edges}))
    return BklmGraph(split, left, right, tuple(edges))


def is_bklm_connected(R: FiniteRelation) -> tuple[bool, list[BklmGraph]]:
    """Connectivity of every prefix/suffix graph; the per-split graphs are returned too."""
    if R.arity < 2:
        raise ValueError("BKLM-connectedness needs arity at least 2")
    graphs = [bklm_graph(R, i) for i in range(1, R.arity)]
    return all(g.is_connected() for g in graphs), graphs


def line_graph_edges(g: BklmGraph) -> set[frozenset]:
    """Pairs of full tuples that share the prefix or the suffix in ``g``."""
    by_left, by_right = defaultdict(list), defaultdict(list)
    for p, s in g.edges:
        by_left[p].append(p + s)
        by_right[s].append(p + s)
    out = set()
    for group in list(by_left.values()) + list(by_right.values()):
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                out.add(frozenset((group[a], group[b])))
    return out
