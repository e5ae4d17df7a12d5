"""Compiling instances between forbidden-pattern problems and promise CSPs.

``sigma_reduce`` turns an input structure into a CSP instance by listing all
homomorphic copies of every pattern reduct; ``tau_reduce`` goes back by
gluing a copy of the reduct onto every constraint tuple.  The auxiliary
binary symbol ``SIM`` is full in every template component.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import (
    RelStructure,
    SignatureError,
    Tuple,
    disjoint_union,
    enumerate_homomorphisms,
    find_homomorphism,
)
from .mmsnp import PatternFamily, check_expansion_free, find_recolouring

SIM = "~"


class MissingContainment(ValueError):
    def __init__(self, i: int):
        super().__init__(f"family F[{i}] recolours into no family of Gs")
        self.index = i


class GirthError(ValueError):
    def __init__(self, report: "GirthReport"):
        super().__init__(f"instance has a cycle of at most {report.bound} tuples: {report.witness}")
        self.report = report


class PartialSimError(ValueError):
    """The auxiliary relation is present but not full."""


@dataclass(frozen=True)
class TemplatePair:
    S: RelStructure
    T: RelStructure
    reducts: Mapping[str, RelStructure]
    pairing: tuple[int, ...]  # F index -> witnessing G index
    S_parts: tuple[RelStructure, ...] = field(repr=False)
    T_parts: tuple[RelStructure, ...] = field(repr=False)
    max_pattern_size: int = 0

    def symbols_of(self, j: int) -> list[str]:
        return [s for s in self.reducts if s.startswith(f"R{j}_")]


@dataclass(frozen=True)
class GirthReport:
    bound: int
    verdict: bool
    witness: Optional[tuple[tuple[str, Tuple], ...]] = None

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "girth_exceeds": self.verdict,
            "witness": None if self.witness is None else [[s, list(t)] for s, t in self.witness],
        }


def _colourings(G: RelStructure, colours: int):
    return itertools.product(range(colours), repeat=G.domain_size)


def _symbols(Gs: Sequence[PatternFamily]) -> dict[str, tuple[int, RelStructure]]:
    """Symbol ``R{j}_{i}`` names the ``i``-th distinct reduct of ``Gs[j]``."""
    out = {}
    for j, fam in enumerate(Gs):
        for i, G in enumerate(fam.reducts()):
            out[f"R{j}_{i}"] = (j, G)
    return out


def build_template_pair(Fs: Sequence[PatternFamily], Gs: Sequence[PatternFamily], check: bool = True) -> TemplatePair:
    if not Fs or not Gs:
        raise ValueError("need at least one family on each side")
    sig = Fs[0].signature
    for fam in list(Fs) + list(Gs):
        if fam.signature != sig:
            raise SignatureError("all families must share the input signature")
    symbols = _symbols(Gs)

    def component(colours: int, own: int, allowed) -> RelStructure:
        rels = {}
        for name, (j, G) in symbols.items():
            if j == own:
                rels[name] = (G.domain_size, [t for t in _colourings(G, colours) if allowed(G, t)])
            else:
                rels[name] = (G.domain_size, list(_colourings(G, colours)))
        rels[SIM] = (2, list(itertools.product(range(colours), repeat=2)))
        return RelStructure(colours, rels)

    T_parts = []
    for j, fam in enumerate(Gs):
        forbidden = {(p.reduct, p.colouring) for p in fam.patterns}
        T_parts.append(component(fam.colour_count, j, lambda G, t, fb=forbidden: (G, t) not in fb))

    pairing = []
    S_parts = []
    for i, fam in enumerate(Fs):
        j = next((j for j, g in enumerate(Gs) if find_recolouring(fam, g) is not None), None)
        if j is None:
            raise MissingContainment(i)
        pairing.append(j)
        S_parts.append(component(fam.colour_count, j, lambda G, t, f=fam: check_expansion_free(G, t, f)))

    S, T = disjoint_union(S_parts), disjoint_union(T_parts)
    if check and find_homomorphism(S, T) is None:
        raise ValueError("constructed S does not map to T")
    size = max_pattern_size(list(Fs) + list(Gs))
    return TemplatePair(S, T, {name: G for name, (_, G) in symbols.items()}, tuple(pairing),
                        tuple(S_parts), tuple(T_parts), size)


def reduct_context(Gs: Sequence[PatternFamily]) -> dict[str, RelStructure]:
    """Symbol to reduct map for families given without a full template pair."""
    return {name: G for name, (_, G) in _symbols(Gs).items()}


def max_pattern_size(fams: Sequence[PatternFamily]) -> int:
    return max((p.reduct.domain_size for fam in fams for p in fam.patterns), default=0)


def _reducts(context) -> Mapping[str, RelStructure]:
    return context.reducts if isinstance(context, TemplatePair) else context


def sigma_reduce(X: RelStructure, context, include_sim: bool = True) -> RelStructure:
    """Same domain as ``X``; symbol ``R_G`` holds every homomorphism ``G -> X``.

    ``context`` is a TemplatePair or a mapping from symbol to reduct.
    """
    rels = {}
    for name, G in _reducts(context).items():
        rels[name] = (G.domain_size, enumerate_homomorphisms(G, X))
    if include_sim:
        rels[SIM] = (2, list(itertools.product(range(X.domain_size), repeat=2)))
    return RelStructure(X.domain_size, rels)


def with_full_sim(I: RelStructure) -> RelStructure:
    return I.with_relation(SIM, 2, itertools.product(range(I.domain_size), repeat=2))


def without_sim(I: RelStructure) -> RelStructure:
    rels = {n: v for n, v in I.relations.items() if n != SIM}
    return RelStructure(I.domain_size, rels)


def girth_exceeds(S: RelStructure, k: int, ignore: Sequence[str] = (SIM,)) -> GirthReport:
    """Whether every set of at most ``k`` tuples spans more elements than the sum of (arity - 1).

    Works on the tuple/element incidence multigraph: a violating set exists
    exactly when that graph has a cycle through at most ``k`` tuple nodes.
    """
    if k < 1:
        raise ValueError("girth bound must be at least 1")
    tuples = [(name, t) for name, t in S.all_tuples() if name not in ignore]
    # node ids: ('t', i) for tuples, ('e', x) for elements; edge ids: (i, position)
    adj: dict = {}
    for i, (_, t) in enumerate(tuples):
        for p, x in enumerate(t):
            adj.setdefault(("t", i), []).append((("e", x), (i, p)))
            adj.setdefault(("e", x), []).append((("t", i), (i, p)))

    best = None
    max_len = 2 * k - 1  # path length (edges) closing a cycle with <= k tuple nodes
    for i, (_, t) in enumerate(tuples):
        for p, x in enumerate(t):
            banned = (i, p)
            start, goal = ("e", x), ("t", i)
            parent = {start: None}
            dist = {start: 0}
            queue = deque([start])
            found = False
            while queue and not found:
                node = queue.popleft()
                if dist[node] >= max_len:
                    continue
                for nxt, eid in adj[node]:
                    if eid == banned or nxt in parent:
                        continue
                    parent[nxt] = node
                    dist[nxt] = dist[node] + 1
                    if nxt == goal:
                        found = True
                        break
                    queue.append(nxt)
            if not found:
                continue
            length = dist[goal] + 1
            if best is None or length < best[0]:
                path = []
                node = goal
                while node is not None:
                    path.append(node)
                    node = parent[node]
                best = (length, [tuples[j] for kind, j in path if kind == "t"])
        if best is not None and best[0] == 2:
            break
    if best is None:
        return GirthReport(k, True, None)
    return GirthReport(k, False, tuple(best[1]))


def girth_exceeds_naive(S: RelStructure, k: int, ignore: Sequence[str] = (SIM,)) -> bool:
    """Subset enumeration straight from the definition."""
    tuples = [t for name, t in S.all_tuples() if name not in ignore]
    for size in range(1, min(k, len(tuples)) + 1):
        for subset in itertools.combinations(tuples, size):
            elements = set().union(*subset)
            if len(elements) <= sum(len(t) - 1 for t in subset):
                return False
    return True


def _check_sim(I: RelStructure) -> None:
    if SIM in I.relations:
        full = I.domain_size ** 2
        if len(I.tuples(SIM)) != full:
            raise PartialSimError("the auxiliary relation must be full (or omitted)")


def tau_reduce(I: RelStructure, context, k: int) -> RelStructure:
    """Replace every ``R_G`` tuple of ``I`` with a copy of ``G`` placed on its entries.

    ``I`` must have girth greater than ``k`` and ``k`` must exceed every
    pattern size; high girth is checked here but never manufactured.
    """
    _check_sim(I)
    reducts = _reducts(context)
    if isinstance(context, TemplatePair) and k <= context.max_pattern_size:
        raise ValueError(f"girth bound {k} must exceed the largest pattern size {context.max_pattern_size}")
    report = girth_exceeds(I, k)
    if not report.verdict:
        raise GirthError(report)
    sig: dict[str, int] = {}
    for G in reducts.values():
        sig.update(G.signature)
    out: dict[str, list] = {name: [] for name in sig}
    for name, t in I.all_tuples():
        if name == SIM:
            continue
        try:
            G = reducts[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None
        for gname, gt in G.all_tuples():
            out[gname].append(tuple(t[x] for x in gt))
    return RelStructure(I.domain_size, {name: (sig[name], ts) for name, ts in out.items()})


def sandwich_check(A: RelStructure, B: RelStructure, C: RelStructure, D: RelStructure) -> bool:
    """``A -> B -> C -> D``."""
    return all(find_homomorphism(x, y) is not None for x, y in ((A, B), (B, C), (C, D)))
