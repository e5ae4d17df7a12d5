"""Promise forbidden-pattern problems and promise CSPs at desk scale."""

from .core import (
    FiniteRelation,
    RelStructure,
    TwoToOneMap,
    clique,
    enumerate_homomorphisms,
    find_homomorphism,
    kinl,
    lo,
    make_named,
    make_urel,
    nae,
)
from .mmsnp import PatternFamily, classify, containment_condition, mono_clique_family

__version__ = "0.1.0"

__all__ = [
    "FiniteRelation",
    "PatternFamily",
    "RelStructure",
    "TwoToOneMap",
    "classify",
    "clique",
    "containment_condition",
    "enumerate_homomorphisms",
    "find_homomorphism",
    "kinl",
    "lo",
    "make_named",
    "make_urel",
    "mono_clique_family",
    "nae",
]
