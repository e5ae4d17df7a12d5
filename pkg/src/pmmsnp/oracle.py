"""Brute-force deciders used as ground truth.

Nothing here prunes: every candidate map or colouring is generated with
``itertools.product`` and checked by scanning tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .core import RelStructure, Tuple, check_signature, find_homomorphism
from .mmsnp import DEFAULT_BUDGET, BudgetExceeded, PatternFamily, check_expansion_free, find_recolouring


class VerdictKind(str, Enum):
    YES = "YesMapsToPromise"
    NO = "NoNotEvenTarget"
    GAP = "GapInstance"


@dataclass(frozen=True)
class PcspVerdict:
    kind: VerdictKind
    witness: Optional[Tuple] = None  # into A (or F-free) for YES, into B (or G-free) for GAP

    def to_json(self) -> dict:
        return {"verdict": self.kind.value, "witness": None if self.witness is None else list(self.witness)}


def _first_hom(I: RelStructure, target: RelStructure) -> Optional[Tuple]:
    allowed = {name: set(target.tuples(name)) for name in I.relations}
    rels = [(allowed[name], ts) for name, (_, ts) in I.relations.items()]
    for h in itertools.product(range(target.domain_size), repeat=I.domain_size):
        if all(tuple(h[x] for x in t) in ok for ok, ts in rels for t in ts):
            return h
    return None


def pcsp_decide_brute(I: RelStructure, A: RelStructure, B: RelStructure, budget: int = DEFAULT_BUDGET) -> PcspVerdict:
    check_signature(I, A)
    check_signature(I, B)
    needed = A.domain_size ** I.domain_size + B.domain_size ** I.domain_size
    if needed > budget:
        raise BudgetExceeded(needed, budget, "candidate maps")
    if find_homomorphism(A, B) is None:
        raise ValueError("promise template does not map to the target template")
    h = _first_hom(I, A)
    if h is not None:
        return PcspVerdict(VerdictKind.YES, h)
    h = _first_hom(I, B)
    if h is not None:
        return PcspVerdict(VerdictKind.GAP, h)
    return PcspVerdict(VerdictKind.NO)


def _first_free(X: RelStructure, fam: PatternFamily) -> Optional[Tuple]:
    for g in itertools.product(range(fam.colour_count), repeat=X.domain_size):
        if check_expansion_free(X, g, fam):
            return g
    return None


def pmmsnp_decide_brute(X: RelStructure, F: PatternFamily, G: PatternFamily, budget: int = DEFAULT_BUDGET) -> PcspVerdict:
    needed = F.colour_count ** X.domain_size + G.colour_count ** X.domain_size
    if needed > budget:
        raise BudgetExceeded(needed, budget, "colourings")
    if find_recolouring(F, G) is None:
        raise ValueError("F does not recolour into G")
    g = _first_free(X, F)
    if g is not None:
        return PcspVerdict(VerdictKind.YES, g)
    g = _first_free(X, G)
    if g is not None:
        return PcspVerdict(VerdictKind.GAP, g)
    return PcspVerdict(VerdictKind.NO)


def verdicts_compatible(pmmsnp: VerdictKind, pcsp: VerdictKind) -> bool:
    """Yes on the pattern side forces Yes on the compiled side, and No forces No; Gap is free."""
    if pmmsnp is VerdictKind.GAP:
        return True
    return pmmsnp is pcsp
