"""Finite relational structures, single relations and homomorphism search.

Elements of a structure with ``domain_size == n`` are the integers ``0..n-1``.
Tuple sets are stored sorted, so two structures compare equal exactly when
they have the same domain and the same relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence

Tuple = tuple[int, ...]


class SignatureError(ValueError):
    """Two structures do not share symbols and arities."""


def _canon_tuples(tuples: Iterable[Sequence[int]], arity: int, domain: int) -> tuple[Tuple, ...]:
    out = set()
    for t in tuples:
        t = tuple(int(x) for x in t)
        if len(t) != arity:
            raise ValueError(f"tuple {t} has length {len(t)}, expected arity {arity}")
        for x in t:
            if not 0 <= x < domain:
                raise ValueError(f"tuple {t} has entry outside domain of size {domain}")
        out.add(t)
    return tuple(sorted(out))


class RelStructure:
    """An immutable finite relational structure.

    ``relations`` maps a symbol name to ``(arity, tuples)``.
    """

    __slots__ = ("domain_size", "_items", "_hash")

    def __init__(self, domain_size: int, relations: Mapping[str, tuple[int, Iterable[Sequence[int]]]] = None):
        if domain_size < 0:
            raise ValueError("domain size must be non-negative")
        items = []
        for name, (arity, tuples) in sorted((relations or {}).items()):
            if arity < 1:
                raise ValueError(f"symbol {name!r} must have positive arity")
            items.append((name, arity, _canon_tuples(tuples, arity, domain_size)))
        object.__setattr__(self, "domain_size", int(domain_size))
        object.__setattr__(self, "_items", tuple(items))
        object.__setattr__(self, "_hash", hash((self.domain_size, self._items)))

    def __setattr__(self, key, value):
        raise AttributeError("RelStructure is immutable")

    @property
    def relations(self) -> Mapping[str, tuple[int, tuple[Tuple, ...]]]:
        return MappingProxyType({name: (arity, ts) for name, arity, ts in self._items})

    @property
    def signature(self) -> dict[str, int]:
        return {name: arity for name, arity, _ in self._items}

    def tuples(self, symbol: str) -> tuple[Tuple, ...]:
        return self.relations[symbol][1]

    def all_tuples(self) -> Iterator[tuple[str, Tuple]]:
        for name, _, ts in self._items:
            for t in ts:
                yield name, t

    def __eq__(self, other):
        if not isinstance(other, RelStructure):
            return NotImplemented
        return self.domain_size == other.domain_size and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rels = ", ".join(f"{n}/{a}:{len(ts)}" for n, a, ts in self._items)
        return f"RelStructure({self.domain_size}; {rels})"

    def gaifman_neighbours(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.domain_size)]
        for _, t in self.all_tuples():
            for x in t:
                nbrs[x].update(t)
        for x in range(self.domain_size):
            nbrs[x].discard(x)
        return nbrs

    def induced(self, elements: Sequence[int]) -> "RelStructure":
        """Substructure induced on ``elements``, relabelled in the given order."""
        index = {x: i for i, x in enumerate(elements)}
        rels = {}
        for name, arity, ts in self._items:
            rels[name] = (arity, [tuple(index[x] for x in t) for t in ts if all(x in index for x in t)])
        return RelStructure(len(elements), rels)

    def with_relation(self, name: str, arity: int, tuples: Iterable[Sequence[int]]) -> "RelStructure":
        rels = dict(self.relations)
        rels[name] = (arity, tuples)
        return RelStructure(self.domain_size, rels)


@dataclass(frozen=True)
class FiniteRelation:
    """A single relation of arity ``arity`` over ``0..domain_size-1``."""

    domain_size: int
    arity: int
    tuples: tuple[Tuple, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        object.__setattr__(self, "tuples", _canon_tuples(self.tuples, self.arity, self.domain_size))

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._set

    @property
    def _set(self) -> frozenset:
        # cached lazily; dataclass is frozen so go through object.__setattr__
        try:
            return self.__dict__["_tupleset"]
        except KeyError:
            s = frozenset(self.tuples)
            object.__setattr__(self, "_tupleset", s)
            return s

    def as_structure(self, symbol: str = "R") -> RelStructure:
        return RelStructure(self.domain_size, {symbol: (self.arity, self.tuples)})


@dataclass(frozen=True)
class TwoToOneMap:
    """A map ``[2n] -> [n]`` where each value has exactly two preimages.

    ``table`` is stored 0-based: ``table[j]`` is the image of ``j``.
    """

    n: int
    table: Tuple

    def __post_init__(self):
        table = tuple(int(x) for x in self.table)
        object.__setattr__(self, "table", table)
        if self.n < 1 or len(table) != 2 * self.n:
            raise ValueError(f"2-to-1 map on n={self.n} needs a table of length {2 * self.n}")
        counts = [0] * self.n
        for x in table:
            if not 0 <= x < self.n:
                raise ValueError(f"value {x} outside [0, {self.n})")
            counts[x] += 1
        if any(c != 2 for c in counts):
            raise ValueError(f"{table} is not 2-to-1")

    def __call__(self, j: int) -> int:
        return self.table[j]

    def fibres(self) -> list[tuple[int, int]]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for j, x in enumerate(self.table):
            out[x].append(j)
        return [tuple(f) for f in out]


# ---------------------------------------------------------------------------
# named relations


def make_urel(c: int, k: int, l: int) -> FiniteRelation:
    """All ``l``-tuples over ``[c]`` where every colour appears fewer than ``k`` times."""
    if min(c, k, l) < 1:
        raise ValueError("c, k, l must be positive")
    tuples = [t for t in itertools.product(range(c), repeat=l) if all(t.count(a) < k for a in range(c))]
    return FiniteRelation(c, l, tuple(tuples))


def urel_size(c: int, k: int, l: int) -> int:
    """Multinomial count of ``make_urel(c, k, l)`` by colour histograms."""
    total = 0
    for hist in itertools.product(range(min(k, l + 1)), repeat=c):
        if sum(hist) == l:
            term = factorial(l)
            for h in hist:
                term //= factorial(h)
            total += term
    return total


def nae(d: int, r: int) -> FiniteRelation:
    if min(d, r) < 1:
        raise ValueError("d, r must be positive")
    tuples = [t for t in itertools.product(range(d), repeat=r) if len(set(t)) > 1]
    return FiniteRelation(d, r, tuple(tuples))


def kinl(k: int, l: int) -> FiniteRelation:
    if l < 1 or k < 0:
        raise ValueError("need l >= 1 and k >= 0")
    if k > l:
        raise ValueError(f"k-in-l needs k <= l, got k={k}, l={l}")
    tuples = [t for t in itertools.product((0, 1), repeat=l) if sum(t) == k]
    return FiniteRelation(2, l, tuple(tuples))


def lo(c: int, r: int) -> FiniteRelation:
    """Linearly ordered colouring relation: the maximum appears exactly once."""
    if min(c, r) < 1:
        raise ValueError("c, r must be positive")
    tuples = [t for t in itertools.product(range(c), repeat=r) if t.count(max(t)) == 1]
    return FiniteRelation(c, r, tuple(tuples))


def clique(k: int, symbol: str = "E") -> RelStructure:
    if k < 0:
        raise ValueError("clique size must be non-negative")
    return RelStructure(k, {symbol: (2, [(a, b) for a in range(k) for b in range(k) if a != b])})


def make_named(kind: str, *params: int):
    """Dispatch by name: ``nae(d, r)``, ``kinl(k, l)``, ``lo(c, r)``, ``clique(k)``, ``urel(c, k, l)``."""
    table = {"nae": nae, "kinl": kinl, "lo": lo, "clique": clique, "urel": make_urel}
    try:
        fn = table[kind]
    except KeyError:
        raise ValueError(f"unknown relation kind {kind!r}") from None
    return fn(*params)


def is_symmetric(R: FiniteRelation) -> bool:
    """Closed under all coordinate permutations (checked on adjacent transpositions)."""
    members = R._set
    for t in R.tuples:
        for i in range(R.arity - 1):
            s = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
            if s not in members:
                return False
    return True


def pullback(x: Sequence, pi: TwoToOneMap) -> tuple:
    """``y[j] = x[pi(j)]`` for ``j`` in ``[2n]``."""
    if len(x) != pi.n:
        raise ValueError(f"pullback needs a tuple of length {pi.n}, got {len(x)}")
    return tuple(x[p] for p in pi.table)


# ---------------------------------------------------------------------------
# homomorphisms


def is_homomorphism(mapping: Sequence[int], source: RelStructure, target: RelStructure) -> bool:
    """Plain scan of every source tuple."""
    if len(mapping) != source.domain_size:
        return False
    if any(not 0 <= y < target.domain_size for y in mapping):
        return False
    for name, (_, ts) in source.relations.items():
        allowed = set(target.tuples(name))
        for t in ts:
            if tuple(mapping[x] for x in t) not in allowed:
                return False
    return True


def check_signature(source: RelStructure, target: RelStructure) -> None:
    if source.signature != target.signature:
        raise SignatureError(f"signature mismatch: {source.signature} vs {target.signature}")


def _supports(t: Tuple, s: Tuple, assign: list, doms: list) -> bool:
    seen: dict[int, int] = {}
    for v, val in zip(t, s):
        if seen.setdefault(v, val) != val:
            return False
        fixed = assign[v]
        if fixed is None:
            if val not in doms[v]:
                return False
        elif fixed != val:
            return False
    return True


class _Search:
    """Backtracking with forward checking over the constraints of ``source``."""

    def __init__(self, source: RelStructure, target: RelStructure, domains: Optional[Sequence[Iterable[int]]]):
        check_signature(source, target)
        n = source.domain_size
        self.n = n
        if domains is None:
            self.domains = [tuple(range(target.domain_size)) for _ in range(n)]
        else:
            if len(domains) != n:
                raise ValueError("one candidate list per source element is required")
            self.domains = [tuple(sorted(set(d))) for d in domains]
        # constraints: (source tuple, target tuples of that symbol)
        self.constraints = []
        self.by_var: list[list[int]] = [[] for _ in range(n)]
        for name, (_, ts) in source.relations.items():
            tt = target.tuples(name)
            for t in ts:
                ci = len(self.constraints)
                self.constraints.append((t, tt))
                for x in set(t):
                    self.by_var[x].append(ci)
        nbrs = source.gaifman_neighbours()
        self.order = sorted(range(n), key=lambda x: (-len(nbrs[x]), x))

    def _prune(self, x: int, assign: list, doms: list) -> Optional[list]:
        new = list(doms)
        for ci in self.by_var[x]:
            t, tt = self.constraints[ci]
            live = [s for s in tt if _supports(t, s, assign, new)]
            if not live:
                return None
            for p, v in enumerate(t):
                if assign[v] is None:
                    vals = {s[p] for s in live}
                    narrowed = new[v] & vals
                    if not narrowed:
                        return None
                    new[v] = narrowed
        return new

    def run(self) -> Iterator[Tuple]:
        assign: list = [None] * self.n
        doms = [set(d) for d in self.domains]
        if any(not d for d in doms) and self.n:
            return
        # constraints with no variables cannot occur (arity >= 1); nullary source is trivially fine
        yield from self._rec(0, assign, doms)

    def _rec(self, depth: int, assign: list, doms: list) -> Iterator[Tuple]:
        if depth == self.n:
            yield tuple(assign)
            return
        x = self.order[depth]
        for val in sorted(doms[x]):
            assign[x] = val
            new = list(doms)
            new[x] = {val}
            new = self._prune(x, assign, new)
            if new is not None:
                yield from self._rec(depth + 1, assign, new)
            assign[x] = None


def find_homomorphism(
    source: RelStructure, target: RelStructure, domains: Optional[Sequence[Iterable[int]]] = None
) -> Optional[Tuple]:
    """Some homomorphism ``source -> target`` as a tuple indexed by source element, or ``None``.

    ``domains`` optionally restricts the image of each source element.
    """
    for h in _Search(source, target, domains).run():
        return h
    return None


def iter_homomorphisms(
    source: RelStructure, target: RelStructure, domains: Optional[Sequence[Iterable[int]]] = None
) -> Iterator[Tuple]:
    """All homomorphisms in search order (not sorted)."""
    return _Search(source, target, domains).run()


def enumerate_homomorphisms(
    source: RelStructure, target: RelStructure, domains: Optional[Sequence[Iterable[int]]] = None
) -> list[Tuple]:
    """All homomorphisms, lexicographically sorted by mapping tuple."""
    return sorted(iter_homomorphisms(source, target, domains))


def disjoint_union(parts: Sequence[RelStructure]) -> RelStructure:
    if not parts:
        return RelStructure(0, {})
    sig = parts[0].signature
    for p in parts[1:]:
        if p.signature != sig:
            raise SignatureError("disjoint union needs a shared signature")
    offset = 0
    rels: dict[str, list] = {name: [] for name in sig}
    for p in parts:
        for name, t in p.all_tuples():
            rels[name].append(tuple(x + offset for x in t))
        offset += p.domain_size
    return RelStructure(offset, {name: (sig[name], ts) for name, ts in rels.items()})


def connected_components(S: RelStructure) -> list[list[int]]:
    """Components of the Gaifman graph, each a sorted element list."""
    nbrs = S.gaifman_neighbours()
    seen = [False] * S.domain_size
    comps = []
    for start in range(S.domain_size):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nbrs[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def is_connected(S: RelStructure) -> bool:
    return len(connected_components(S)) <= 1
