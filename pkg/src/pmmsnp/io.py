"""JSON formats for structures, relations, pattern families and relation specs."""

from __future__ import annotations

import itertools
import json
import sys
from typing import Any, Union

from .core import FiniteRelation, RelStructure, make_named
from .mmsnp import ColouredPattern, PatternFamily
from .reduce import SIM


def structure_to_json(S: RelStructure, include_sim: bool = True) -> dict:
    rels = {}
    for name, (arity, ts) in S.relations.items():
        if name == SIM and not include_sim:
            continue
        rels[name] = {"arity": arity, "tuples": [list(t) for t in ts]}
    return {"domain": S.domain_size, "relations": rels}


def instance_to_json(I: RelStructure, materialize_sim: bool = False) -> dict:
    """Instances leave the auxiliary relation implicit unless asked otherwise."""
    return structure_to_json(I, include_sim=materialize_sim)


def structure_from_json(data: dict, materialize_sim: bool = False) -> RelStructure:
    n = int(data["domain"])
    rels = {name: (int(r["arity"]), [tuple(t) for t in r["tuples"]]) for name, r in data["relations"].items()}
    if materialize_sim and SIM not in rels:
        rels[SIM] = (2, list(itertools.product(range(n), repeat=2)))
    return RelStructure(n, rels)


def relation_to_json(R: FiniteRelation) -> dict:
    return {"domain": R.domain_size, "arity": R.arity, "tuples": [list(t) for t in R.tuples]}


def relation_from_json(data: dict) -> FiniteRelation:
    return FiniteRelation(int(data["domain"]), int(data["arity"]), tuple(tuple(t) for t in data["tuples"]))


def family_to_json(fam: PatternFamily) -> dict:
    return {
        "colours": fam.colour_count,
        "signature": dict(fam.signature),
        "patterns": [{"structure": structure_to_json(p.reduct), "colouring": list(p.colouring)} for p in fam.patterns],
    }


def family_from_json(data: dict) -> PatternFamily:
    patterns = tuple(ColouredPattern(structure_from_json(p["structure"]), tuple(p["colouring"])) for p in data["patterns"])
    return PatternFamily(int(data["colours"]), patterns, signature=data.get("signature"))


def families_from_json(data: Union[dict, list]) -> list[PatternFamily]:
    """A single family object or a list of them."""
    if isinstance(data, dict):
        return [family_from_json(data)]
    return [family_from_json(d) for d in data]


def parse_relation_spec(spec: str) -> FiniteRelation:
    """``nae:d:r``, ``urel:c:k:l``, ``kinl:k:l`` or ``lo:c:r``."""
    arity = {"nae": 2, "urel": 3, "kinl": 2, "lo": 2}
    kind, *rest = spec.split(":")
    if kind not in arity or len(rest) != arity[kind]:
        raise ValueError(f"bad relation spec {spec!r}; expected nae:d:r, urel:c:k:l, kinl:k:l or lo:c:r")
    try:
        params = [int(x) for x in rest]
    except ValueError:
        raise ValueError(f"bad relation spec {spec!r}: parameters must be integers") from None
    return make_named(kind, *params)


def read_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def write_json(obj: Any, path: str = "-") -> None:
    text = json.dumps(obj, indent=None, separators=(",", ":"))
    if path == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")
