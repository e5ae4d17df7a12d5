"""Forbidden colour patterns, F-free colourings, recolourings and the clique dichotomy."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .core import (
    RelStructure,
    SignatureError,
    Tuple,
    clique,
    find_homomorphism,
    is_connected,
)


class BudgetExceeded(RuntimeError):
    """An exhaustive search would need more candidates than allowed."""

    def __init__(self, needed: int, budget: int, what: str = "candidates"):
        super().__init__(f"search needs {needed} {what}, budget is {budget}")
        self.needed = needed
        self.budget = budget


DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class ColouredPattern:
    reduct: RelStructure
    colouring: Tuple

    def __post_init__(self):
        object.__setattr__(self, "colouring", tuple(int(x) for x in self.colouring))
        if len(self.colouring) != self.reduct.domain_size:
            raise ValueError("pattern colouring must colour every element")
        if not is_connected(self.reduct):
            raise ValueError("forbidden patterns must be connected")


@dataclass(frozen=True)
class PatternFamily:
    colour_count: int
    patterns: tuple[ColouredPattern, ...]
    signature: dict = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        sig = self.signature
        if sig is None:
            sig = self.patterns[0].reduct.signature if self.patterns else {}
        object.__setattr__(self, "signature", dict(sig))
        for p in self.patterns:
            if p.reduct.signature != self.signature:
                raise SignatureError("all patterns of a family share one signature")
            if any(not 0 <= x < self.colour_count for x in p.colouring):
                raise ValueError(f"pattern colour outside [0, {self.colour_count})")

    def reducts(self) -> list[RelStructure]:
        """Distinct reducts in order of first appearance."""
        out: list[RelStructure] = []
        for p in self.patterns:
            if p.reduct not in out:
                out.append(p.reduct)
        return out


@dataclass(frozen=True)
class Recolouring:
    table: Tuple

    def __call__(self, colour: int) -> int:
        return self.table[colour]


class Verdict(str, Enum):
    NO_CONTAINMENT = "NoContainment"
    TRACTABLE_AIP = "TractableAIP"
    HARD_RICH_2TO1 = "HardUnderRich2to1"


@dataclass(frozen=True)
class DichotomyVerdict:
    verdict: Verdict
    c: int
    d: int
    k: int
    l: int
    boundary: int  # c*(k-1)

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "c": self.c, "d": self.d, "k": self.k, "l": self.l,
                "boundary": self.boundary, "containment": self.verdict is not Verdict.NO_CONTAINMENT}


def mono_clique_family(c: int, k: int) -> PatternFamily:
    """``c`` patterns; pattern ``i`` is ``K_k`` with every vertex coloured ``i``."""
    if c < 1 or k < 1:
        raise ValueError("c and k must be positive")
    K = clique(k)
    return PatternFamily(c, tuple(ColouredPattern(K, (i,) * k) for i in range(c)))


def _check_colouring(g: Sequence[int], size: int, colours: int) -> None:
    if len(g) != size:
        raise ValueError(f"colouring has length {len(g)}, structure has {size} elements")
    for x in g:
        if not 0 <= x < colours:
            raise ValueError(f"colour {x} outside [0, {colours})")


def pattern_occurs(pattern: ColouredPattern, I: RelStructure, g: Sequence[int]) -> Optional[Tuple]:
    """A homomorphism ``h`` from the pattern into ``I`` with ``g∘h`` equal to the pattern colouring."""
    by_colour: dict[int, list[int]] = {}
    for y, col in enumerate(g):
        by_colour.setdefault(col, []).append(y)
    domains = [by_colour.get(col, []) for col in pattern.colouring]
    return find_homomorphism(pattern.reduct, I, domains)


def check_expansion_free(I: RelStructure, g: Sequence[int], fam: PatternFamily) -> bool:
    _check_colouring(g, I.domain_size, fam.colour_count)
    return not any(pattern_occurs(p, I, g) is not None for p in fam.patterns)


def solve_mmsnp_brute(I: RelStructure, fam: PatternFamily, budget: int = DEFAULT_BUDGET) -> Optional[Tuple]:
    """Lexicographically first F-free colouring, or ``None``; raises BudgetExceeded."""
    needed = fam.colour_count ** I.domain_size
    if needed > budget:
        raise BudgetExceeded(needed, budget, "colourings")
    for g in itertools.product(range(fam.colour_count), repeat=I.domain_size):
        if check_expansion_free(I, g, fam):
            return g
    return None


class _FreeCache:
    """Memoised F-freeness of colourings of a fixed reduct."""

    def __init__(self, fam: PatternFamily):
        self.fam = fam
        self.memo: dict = {}

    def free(self, G: RelStructure, h: Tuple) -> bool:
        key = (G, h)
        res = self.memo.get(key)
        if res is None:
            res = check_expansion_free(G, h, self.fam)
            self.memo[key] = res
        return res


def _is_recolouring(r: Tuple, F: PatternFamily, G: PatternFamily, cache: _FreeCache) -> bool:
    for pat in G.patterns:
        for h in recolouring_preimages(r, pat):
            if cache.free(pat.reduct, h):
                return False
    return True


def find_recolouring(F: PatternFamily, G: PatternFamily) -> Optional[Recolouring]:
    """Lexicographically first map ``[c] -> [d]`` under which no pattern of G has an F-free preimage."""
    if F.signature != G.signature:
        raise SignatureError("families must share a signature")
    cache = _FreeCache(F)
    for r in itertools.product(range(G.colour_count), repeat=F.colour_count):
        if _is_recolouring(r, F, G, cache):
            return Recolouring(r)
    return None


def is_recolouring(r: Sequence[int], F: PatternFamily, G: PatternFamily) -> bool:
    return _is_recolouring(tuple(r), F, G, _FreeCache(F))


def balanced_map(c: int, d: int) -> Tuple:
    """A map ``[c] -> [d]`` whose fibres have sizes ``floor(c/d)`` or ``ceil(c/d)``."""
    return tuple(i % d for i in range(c))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def containment_condition(c: int, d: int, k: int, l: int) -> bool:
    if min(c, d, k, l) < 1:
        raise ValueError("parameters must be positive")
    return k <= _ceil_div(l, _ceil_div(c, d))


def classify(c: int, d: int, k: int, l: int) -> DichotomyVerdict:
    boundary = c * (k - 1)
    if not containment_condition(c, d, k, l):
        v = Verdict.NO_CONTAINMENT
    elif l >= boundary:
        v = Verdict.TRACTABLE_AIP
    else:
        v = Verdict.HARD_RICH_2TO1
    return DichotomyVerdict(v, c, d, k, l, boundary)


# ---------------------------------------------------------------------------
# normal-form primitives


def _relabel(S: RelStructure, perm: Sequence[int]) -> tuple:
    """Sorted relation items of ``S`` after renaming element ``x`` to ``perm[x]``."""
    return tuple(
        (name, tuple(sorted(tuple(perm[x] for x in t) for t in ts)))
        for name, (_, ts) in sorted(S.relations.items())
    )


def canonical_form(p: ColouredPattern) -> tuple:
    """Minimum relabelling over colour-preserving orderings; fine for patterns up to ~8 elements."""
    n = p.reduct.domain_size
    classes: dict[int, list[int]] = {}
    for x, col in enumerate(p.colouring):
        classes.setdefault(col, []).append(x)
    cols = sorted(classes)
    best = None
    for parts in itertools.product(*(itertools.permutations(classes[c]) for c in cols)):
        order = [x for part in parts for x in part]
        perm = [0] * n
        for new, old in enumerate(order):
            perm[old] = new
        cand = _relabel(p.reduct, perm)
        if best is None or cand < best:
            best = cand
    colouring = tuple(col for col in cols for _ in classes[col])
    return (n, colouring, best)


def identify(p: ColouredPattern, x: int, y: int) -> Optional[ColouredPattern]:
    """Quotient merging elements ``x < y``; ``None`` when their colours differ."""
    if x == y or p.colouring[x] != p.colouring[y]:
        return None
    if x > y:
        x, y = y, x
    n = p.reduct.domain_size

    def f(z):
        if z == y:
            return x
        return z - 1 if z > y else z

    rels = {name: (a, [tuple(f(z) for z in t) for t in ts]) for name, (a, ts) in p.reduct.relations.items()}
    colouring = tuple(c for i, c in enumerate(p.colouring) if i != y)
    return ColouredPattern(RelStructure(n - 1, rels), colouring)


def quotient_closure(fam: PatternFamily) -> PatternFamily:
    """Close under identifying two equally coloured elements, deduplicated up to isomorphism."""
    seen = {}
    queue = []
    for p in fam.patterns:
        key = canonical_form(p)
        if key not in seen:
            seen[key] = p
            queue.append(p)
    while queue:
        p = queue.pop()
        n = p.reduct.domain_size
        for x in range(n):
            for y in range(x + 1, n):
                q = identify(p, x, y)
                if q is None:
                    continue
                key = canonical_form(q)
                if key not in seen:
                    seen[key] = q
                    queue.append(q)
    return PatternFamily(fam.colour_count, tuple(seen.values()), signature=fam.signature)


def is_biconnected(S: RelStructure) -> bool:
    if not is_connected(S):
        return False
    n = S.domain_size
    for x in range(n):
        rest = [y for y in range(n) if y != x]
        if not is_connected(S.induced(rest)):
            return False
    return True


def recolouring_preimages(r: Sequence[int], pattern: ColouredPattern) -> Iterable[Tuple]:
    """All colourings ``h`` of the pattern's reduct with ``r∘h`` equal to its colouring."""
    fibres: dict[int, list[int]] = {}
    for colour, image in enumerate(r):
        fibres.setdefault(image, []).append(colour)
    return itertools.product(*(fibres.get(col, []) for col in pattern.colouring))
