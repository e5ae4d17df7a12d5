"""Command-line frontend.

Machine-readable JSON goes to stdout, human summaries to stderr.  Exit codes:
0 success, 1 promise violation, 2 no containment, 64 usage or bad input,
65 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .aip import HyperInstance, PromiseViolation, solve_tractable_pcsp, verify_colouring
from .connectivity import is_bklm_connected, reconfiguration_graph
from .core import RelStructure, clique, nae
from .gadget import (
    LabelCoverInstance,
    audit_gadget,
    build_gadget,
    count_2to1_maps,
    decode_and_check,
    parse_mode,
    planted_instance,
    planted_rich_instance,
    richness_certificate,
)
from .io import (
    families_from_json,
    instance_to_json,
    parse_relation_spec,
    read_json,
    relation_from_json,
    structure_from_json,
    structure_to_json,
    write_json,
)
from .mmsnp import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Verdict,
    check_expansion_free,
    classify,
    find_recolouring,
    mono_clique_family,
)
from .oracle import pcsp_decide_brute, pmmsnp_decide_brute
from .reduce import SIM, GirthError, girth_exceeds, max_pattern_size, reduct_context, sigma_reduce, tau_reduce

EXIT_OK = 0
EXIT_PROMISE_VIOLATION = 1
EXIT_NO_CONTAINMENT = 2
EXIT_USAGE = 64
EXIT_BUDGET = 65

RICH_MAP_LIMIT = 2520  # enumerate 2-to-1 maps up to n = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _relation_arg(text: str):
    try:
        return parse_relation_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_families(paths: Sequence[str]):
    fams = []
    for p in paths:
        fams.extend(families_from_json(read_json(p)))
    return fams


def _tractable_or_exit(c, d, k, l) -> Optional[int]:
    v = classify(c, d, k, l)
    if v.verdict is Verdict.NO_CONTAINMENT:
        write_json(v.to_json())
        _say(f"no containment for (c,d,k,l)=({c},{d},{k},{l})")
        return EXIT_NO_CONTAINMENT
    if v.verdict is Verdict.HARD_RICH_2TO1:
        _say(f"(c,d,k,l)=({c},{d},{k},{l}) is on the hard side (l < c(k-1) = {v.boundary}); "
             "no polynomial solver applies, see the `gadget` subcommand for the hardness construction")
        return EXIT_USAGE
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> int:
    v = classify(args.c, args.d, args.k, args.l)
    write_json(v.to_json())
    _say(f"{v.verdict.value} (boundary c(k-1) = {v.boundary})")
    return EXIT_NO_CONTAINMENT if v.verdict is Verdict.NO_CONTAINMENT else EXIT_OK


def cmd_reduce(args) -> int:
    fams = _load_families(args.family)
    ctx = reduct_context(fams)
    X = structure_from_json(read_json(args.input))
    if args.direction == "sigma":
        out = sigma_reduce(X, ctx)
        write_json(instance_to_json(out, materialize_sim=args.materialize_sim), args.out)
        _say(", ".join(f"{name}: {len(out.tuples(name))} tuples" for name in ctx))
        return EXIT_OK
    if args.bound is None:
        raise ValueError("tau needs --bound")
    if args.bound <= max_pattern_size(fams):
        raise ValueError(f"--bound must exceed the largest pattern size {max_pattern_size(fams)}")
    try:
        out = tau_reduce(X, ctx, args.bound)
    except GirthError as exc:
        write_json(exc.report.to_json())
        _say(str(exc))
        return EXIT_USAGE
    write_json(structure_to_json(out), args.out)
    _say(f"tau: {sum(1 for _ in out.all_tuples())} tuples on {out.domain_size} elements")
    return EXIT_OK


def cmd_girth(args) -> int:
    S = structure_from_json(read_json(args.input))
    report = girth_exceeds(S, args.bound)
    write_json(report.to_json())
    _say(f"girth exceeds {args.bound}: {report.verdict}")
    return EXIT_OK


def cmd_solve(args) -> int:
    code = _tractable_or_exit(args.c, args.d, args.k, args.l)
    if code is not None:
        return code
    inst = HyperInstance.from_json(read_json(args.input))
    try:
        col = solve_tractable_pcsp(inst, args.c, args.d, args.k, args.l)
    except PromiseViolation as exc:
        write_json({"result": "PROMISE_VIOLATION", "reason": str(exc)})
        _say(f"PROMISE_VIOLATION: {exc}")
        return EXIT_PROMISE_VIOLATION
    ok = verify_colouring(inst, col, nae(args.d, args.l))
    write_json({"result": "OK", "colouring": col, "valid": ok})
    _say(f"coloured {inst.variables} variables, {len(inst.edges)} edges, valid={ok}")
    return EXIT_OK


def _align_sim(I: RelStructure, A: RelStructure, B: RelStructure):
    """Instances may leave the auxiliary relation implicit; drop it everywhere when the templates have it full."""
    if SIM in I.relations:
        return I, A, B

    def strip(S):
        if SIM not in S.relations:
            return S
        if len(S.tuples(SIM)) != S.domain_size ** 2:
            raise ValueError("template has a partial auxiliary relation")
        return RelStructure(S.domain_size, {n: v for n, v in S.relations.items() if n != SIM})

    return I, strip(A), strip(B)


def _template(data: dict, I: RelStructure) -> RelStructure:
    if "arity" in data:
        names = [n for n in I.relations if n != SIM]
        return relation_from_json(data).as_structure(names[0] if len(names) == 1 else "R")
    return structure_from_json(data)


def cmd_oracle(args) -> int:
    if args.kind == "pcsp":
        I = structure_from_json(read_json(args.input))
        A = _template(read_json(args.A), I)
        B = _template(read_json(args.B), I)
        verdict = pcsp_decide_brute(*_align_sim(I, A, B), budget=args.budget)
    else:
        X = structure_from_json(read_json(args.input))
        F = _load_families([args.F])[0]
        G = _load_families([args.G])[0]
        verdict = pmmsnp_decide_brute(X, F, G, budget=args.budget)
    write_json(verdict.to_json())
    _say(verdict.kind.value)
    return EXIT_OK


def cmd_connectivity(args) -> int:
    R = args.relation if args.relation is not None else relation_from_json(read_json(args.relation_file))
    if args.kind == "reconf":
        g = reconfiguration_graph(R)
        if args.dot:
            sys.stdout.write(g.to_dot())
        else:
            write_json({"reconfigurable": g.is_connected(), "nodes": len(g.nodes), "edges": len(g.edges)})
        _say(f"reconfiguration graph: {len(g.nodes)} nodes, {len(g.edges)} edges, connected={g.is_connected()}")
        return EXIT_OK
    ok, graphs = is_bklm_connected(R)
    if args.dot:
        sys.stdout.write("".join(g.to_dot() for g in graphs))
    else:
        write_json({"bklm_connected": ok,
                    "splits": [{"split": g.split, "connected": g.is_connected(), "left": len(g.left),
                                "right": len(g.right), "edges": len(g.edges)} for g in graphs]})
    _say(f"BKLM-connected (every split): {ok}")
    return EXIT_OK


def cmd_recolour(args) -> int:
    if args.clique:
        c, k, d, l = args.clique
        F, G = mono_clique_family(c, k), mono_clique_family(d, l)
    elif args.F and args.G:
        F, G = _load_families([args.F])[0], _load_families([args.G])[0]
    else:
        raise ValueError("give --clique C K D L or both --F and --G")
    r = find_recolouring(F, G)
    write_json({"recolouring": None if r is None else list(r.table), "containment": r is not None})
    _say("no recolouring exists" if r is None else f"recolouring {list(r.table)}")
    return EXIT_OK if r is not None else EXIT_NO_CONTAINMENT


def cmd_gadget(args) -> int:
    R, n = args.relation, args.n
    s = s_prime = None
    if args.instance:
        inst = LabelCoverInstance.from_json(read_json(args.instance))
        if inst.n != n:
            raise ValueError(f"instance has n={inst.n}, --n is {n}")
    elif not args.no_rich and count_2to1_maps(n) <= RICH_MAP_LIMIT:
        inst, s, s_prime = planted_rich_instance(n, args.m, seed=args.seed)
    else:
        if not args.no_rich:
            _say(f"richness certificate disabled: n={n} has {count_2to1_maps(n)} 2-to-1 maps")
        inst, s, s_prime = planted_instance(n, args.m, args.v or 2 * n, seed=args.seed)
    if args.instance_out:
        write_json(inst.to_json(), args.instance_out)

    H = build_gadget(inst, R, args.mode, budget=args.budget)
    audit = audit_gadget(inst, H)
    rich = richness_certificate(inst) if count_2to1_maps(n) <= RICH_MAP_LIMIT else None
    complete = decode_and_check(inst, s, s_prime, R, H) if s is not None else None
    summary = {"classes": H.num_classes, "edges": len(H.edges), "attempts": H.attempts,
               "rich_certificate": rich, "audit": audit, "planted_completeness": complete,
               "side_conditions": H.side_conditions}

    write_json(H.to_instance().to_json(), args.out)
    prov_path = args.provenance or (args.out + ".provenance.json" if args.out != "-" else None)
    if prov_path:
        write_json({**H.provenance_json(), "summary": summary}, prov_path)
    _say(f"gadget: {H.num_classes} classes, {len(H.edges)} edges ({H.mode}, {H.attempts} attempts)")
    _say(f"  all edges mu-valid: {audit['mu_valid']}; rows in multislice: {audit['rows_in_multislice']}")
    _say(f"  rich certificate: {rich}; completeness for planted labelling: "
         f"{'passed' if complete else 'FAILED' if complete is False else 'not checked'}")
    _say("  side conditions: " + ", ".join(f"{k}={v}" for k, v in H.side_conditions.items()))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    c, d, k, l = args.c, args.d, args.k, args.l
    code = _tractable_or_exit(c, d, k, l)
    if code is not None:
        return code
    X = structure_from_json(read_json(args.input))
    if X.signature != {"E": 2}:
        raise ValueError("pipeline expects a graph with the single binary symbol E")
    inst_struct = sigma_reduce(X, {"K": clique(l)}, include_sim=False)
    inst = HyperInstance(X.domain_size, l, inst_struct.tuples("K"))
    try:
        col = solve_tractable_pcsp(inst, c, d, k, l)
    except PromiseViolation as exc:
        write_json({"result": "PROMISE_VIOLATION", "reason": str(exc)})
        _say(f"PROMISE_VIOLATION: {exc}")
        return EXIT_PROMISE_VIOLATION
    free = check_expansion_free(X, col, mono_clique_family(d, l))
    write_json({"result": "OK", "colouring": col, "no_monochromatic_clique": free})
    _say(f"{len(inst.edges)} copies of K_{l}; colouring avoids monochromatic K_{l}: {free}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pmmsnp", description="Forbidden-pattern promise problems: classify, compile, solve, certify.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cdkl(q, positional=False):
        for name in ("c", "d", "k", "l"):
            if positional:
                q.add_argument(name, type=_positive)
            else:
                q.add_argument(f"--{name}", type=_positive, required=True)

    q = sub.add_parser("classify", help="dichotomy verdict for monochromatic clique families")
    cdkl(q, positional=True)
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("reduce", help="compile instances between the two sides")
    q.add_argument("direction", choices=["sigma", "tau"])
    q.add_argument("--input", required=True)
    q.add_argument("--family", action="append", required=True, help="target family JSON (repeatable)")
    q.add_argument("--bound", type=_positive, help="girth bound for tau")
    q.add_argument("--materialize-sim", action="store_true", help="write the auxiliary relation explicitly")
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_reduce)

    q = sub.add_parser("girth", help="check that short tuple cycles are absent")
    q.add_argument("--input", required=True)
    q.add_argument("--bound", type=_positive, required=True)
    q.set_defaults(func=cmd_girth)

    q = sub.add_parser("solve", help="AIP solver on the tractable side")
    cdkl(q)
    q.add_argument("--input", required=True, help="hypergraph instance JSON")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("oracle", help="brute-force deciders")
    q.add_argument("kind", choices=["pcsp", "pmmsnp"])
    q.add_argument("--input", required=True)
    q.add_argument("--A", help="promise template (structure or relation JSON)")
    q.add_argument("--B", help="target template (structure or relation JSON)")
    q.add_argument("--F", help="promise family JSON")
    q.add_argument("--G", help="target family JSON")
    q.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    q.set_defaults(func=cmd_oracle)

    q = sub.add_parser("connectivity", help="reconfiguration and BKLM graphs")
    q.add_argument("kind", choices=["reconf", "bklm"])
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--relation", type=_relation_arg, help="nae:d:r, urel:c:k:l, kinl:k:l or lo:c:r")
    g.add_argument("--relation-file")
    q.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    q.set_defaults(func=cmd_connectivity)

    q = sub.add_parser("recolour", help="search for a recolouring between families")
    q.add_argument("--clique", type=_positive, nargs=4, metavar=("C", "K", "D", "L"))
    q.add_argument("--F")
    q.add_argument("--G")
    q.set_defaults(func=cmd_recolour)

    q = sub.add_parser("gadget", help="build and audit the label cover gadget")
    q.add_argument("action", nargs="?", choices=["build"], default="build")
    q.add_argument("--n", type=_positive, required=True)
    q.add_argument("--rel", "--relation", dest="relation", type=_relation_arg, required=True)
    q.add_argument("--mode", default="exhaustive", help="exhaustive or sample:COUNT:SEED")
    q.add_argument("--m", type=_positive, default=2, help="left vertices of the generated instance")
    q.add_argument("--v", type=_positive, help="right vertices when richness is off (default 2n)")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--instance", help="label cover JSON to use instead of generating one")
    q.add_argument("--no-rich", action="store_true", help="generate a planted instance without richness")
    q.add_argument("--instance-out")
    q.add_argument("--out", default="-")
    q.add_argument("--provenance")
    q.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET)
    q.set_defaults(func=cmd_gadget)

    q = sub.add_parser("pipeline", help="graph -> compiled instance -> AIP colouring")
    q.add_argument("--input", required=True, help="graph JSON with binary symbol E")
    cdkl(q, positional=True)
    q.set_defaults(func=cmd_pipeline)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gadget":
        try:
            parse_mode(args.mode)
        except ValueError as exc:
            parser.error(str(exc))
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        _say(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
