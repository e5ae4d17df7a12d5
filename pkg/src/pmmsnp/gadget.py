"""Rich 2-to-1 Label Cover instances and the multislice long-code gadget.

Labels are 0-based throughout: U-labels live in ``range(2n)`` and V-labels in
``range(n)``; a 2-to-1 map is stored as its table ``[2n] -> [n]``.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Iterator, Optional, Sequence

from .aip import HyperInstance
from .core import FiniteRelation, TwoToOneMap, Tuple, is_symmetric, pullback
from .mmsnp import DEFAULT_BUDGET, BudgetExceeded


class IntegralityError(ValueError):
    """A frequency requirement is not an integer."""


# ---------------------------------------------------------------------------
# 2-to-1 maps and label cover


def count_2to1_maps(n: int) -> int:
    return factorial(2 * n) // 2**n


def enumerate_2to1_maps(n: int, budget: int = 10**6) -> list[TwoToOneMap]:
    """All 2-to-1 maps ``[2n] -> [n]`` in lexicographic order of their tables."""
    if n < 1:
        raise ValueError("n must be positive")
    total = count_2to1_maps(n)
    if total > budget:
        raise BudgetExceeded(total, budget, "2-to-1 maps")
    out = []
    table = [0] * (2 * n)
    used = [0] * n

    def rec(j):
        if j == 2 * n:
            out.append(TwoToOneMap(n, tuple(table)))
            return
        for x in range(n):
            if used[x] < 2:
                used[x] += 1
                table[j] = x
                rec(j + 1)
                used[x] -= 1

    rec(0)
    return out


@dataclass(frozen=True)
class LabelCoverInstance:
    n: int
    U: int
    V: int
    edges: tuple[tuple[int, int, TwoToOneMap], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for u, v, pi in self.edges:
            if not (0 <= u < self.U and 0 <= v < self.V):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if pi.n != self.n:
                raise ValueError("constraint map has the wrong label size")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    def neighbours(self, u: int) -> list[tuple[int, TwoToOneMap]]:
        return self._adj[u]

    @property
    def _adj(self) -> list[list[tuple[int, TwoToOneMap]]]:
        try:
            return self.__dict__["_adj_cache"]
        except KeyError:
            adj: list[list] = [[] for _ in range(self.U)]
            for u, v, pi in self.edges:
                adj[u].append((v, pi))
            object.__setattr__(self, "_adj_cache", adj)
            return adj

    def edge_map(self) -> dict[tuple[int, int], TwoToOneMap]:
        return {(u, v): pi for u, v, pi in self.edges}

    def is_biregular(self) -> bool:
        du = Counter(u for u, _, _ in self.edges)
        dv = Counter(v for _, v, _ in self.edges)
        return len({du[u] for u in range(self.U)}) <= 1 and len({dv[v] for v in range(self.V)}) <= 1

    def to_json(self) -> dict:
        return {"n": self.n, "U": self.U, "V": self.V,
                "edges": [{"u": u, "v": v, "pi": list(pi.table)} for u, v, pi in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "LabelCoverInstance":
        n = int(data["n"])
        edges = tuple((int(e["u"]), int(e["v"]), TwoToOneMap(n, tuple(e["pi"]))) for e in data["edges"])
        return cls(n, int(data["U"]), int(data["V"]), edges)


def richness_certificate(inst: LabelCoverInstance, budget: int = 10**6) -> bool:
    """Every ``u`` sees every 2-to-1 map equally often on its incident edges."""
    all_maps = enumerate_2to1_maps(inst.n, budget)
    for u in range(inst.U):
        counts = Counter(pi.table for _, pi in inst.neighbours(u))
        if not counts or set(counts) != {m.table for m in all_maps} or len(set(counts.values())) != 1:
            return False
    return inst.is_biregular()


def gen_rich_instance(n: int, m: int, budget: int = 10**6) -> LabelCoverInstance:
    """``m`` left vertices, one right vertex per 2-to-1 map, maps laid out as a cyclic Latin square."""
    maps = enumerate_2to1_maps(n, budget)
    D = len(maps)
    edges = [(u, v, maps[(u + v) % D]) for u in range(m) for v in range(D)]
    return LabelCoverInstance(n, m, D, tuple(edges))


def _balanced_v_labels(count: int, n: int) -> list[int]:
    return [v % n for v in range(count)]


def planted_rich_instance(n: int, m: int, seed: int = 0, budget: int = 10**6):
    """A rich instance built around a random perfect labelling.

    Returns ``(instance, s, s_prime)`` with value 1.
    """
    rng = random.Random(seed)
    maps = enumerate_2to1_maps(n, budget)
    D = len(maps)
    s_prime = _balanced_v_labels(D, n)
    s = [rng.randrange(2 * n) for _ in range(m)]
    edges = []
    for u in range(m):
        groups: dict[int, list[TwoToOneMap]] = {}
        for pi in maps:
            groups.setdefault(pi(s[u]), []).append(pi)
        for t, group in groups.items():
            vs = [v for v in range(D) if s_prime[v] == t]
            rng.shuffle(group)
            edges.extend((u, v, pi) for v, pi in zip(vs, group))
    edges.sort(key=lambda e: (e[0], e[1]))
    return LabelCoverInstance(n, m, D, tuple(edges)), s, s_prime


def random_2to1_map(n: int, rng: random.Random) -> TwoToOneMap:
    perm = list(range(2 * n))
    rng.shuffle(perm)
    return TwoToOneMap(n, tuple(p // 2 for p in perm))


def planted_instance(n: int, m: int, V: int, seed: int = 0):
    """Complete bipartite ``m x V`` instance with random maps consistent with a planted labelling.

    No richness certificate; this is the option for ``n`` too large to enumerate.
    """
    rng = random.Random(seed)
    s_prime = _balanced_v_labels(V, n)
    s = [rng.randrange(2 * n) for _ in range(m)]
    edges = []
    for u in range(m):
        for v in range(V):
            table = list(random_2to1_map(n, rng).table)
            a, b = table[s[u]], s_prime[v]
            table = [b if x == a else a if x == b else x for x in table]
            edges.append((u, v, TwoToOneMap(n, tuple(table))))
    return LabelCoverInstance(n, m, V, tuple(edges)), s, s_prime


def _check_labels(inst: LabelCoverInstance, s: Sequence[int], s_prime: Sequence[int]) -> None:
    if len(s) != inst.U or len(s_prime) != inst.V:
        raise ValueError("labelling sizes do not match the instance")
    if any(not 0 <= x < 2 * inst.n for x in s) or any(not 0 <= x < inst.n for x in s_prime):
        raise ValueError("label out of range")


def label_cover_value(inst: LabelCoverInstance, s: Sequence[int], s_prime: Sequence[int]) -> Fraction:
    _check_labels(inst, s, s_prime)
    if not inst.edges:
        return Fraction(1)
    good = sum(1 for u, v, pi in inst.edges if s_prime[v] == pi(s[u]))
    return Fraction(good, len(inst.edges))


def has_perfect_labelling(inst: LabelCoverInstance, budget: int = DEFAULT_BUDGET) -> Optional[tuple[list, list]]:
    """Exhaustive over U-labels; each V-label is then forced."""
    needed = (2 * inst.n) ** inst.U
    if needed > budget:
        raise BudgetExceeded(needed, budget, "U-labellings")
    for s in itertools.product(range(2 * inst.n), repeat=inst.U):
        forced: dict[int, int] = {}
        ok = True
        for u, v, pi in inst.edges:
            if forced.setdefault(v, pi(s[u])) != pi(s[u]):
                ok = False
                break
        if ok:
            return list(s), [forced.get(v, 0) for v in range(inst.V)]
    return None


# ---------------------------------------------------------------------------
# multislices and distributions


def multislice_size(hist: Sequence[int]) -> int:
    return factorial(sum(hist)) // prod(factorial(h) for h in hist)


def multislice_enumerate(n: int, hist: Sequence[int]) -> Iterator[Tuple]:
    """Tuples of length ``n`` where value ``a`` appears exactly ``hist[a]`` times, lexicographically."""
    hist = list(hist)
    if sum(hist) != n or any(h < 0 for h in hist):
        raise ValueError(f"histogram {hist} does not sum to {n}")
    out = [0] * n

    def rec(j):
        if j == n:
            yield tuple(out)
            return
        for a in range(len(hist)):
            if hist[a]:
                hist[a] -= 1
                out[j] = a
                yield from rec(j + 1)
                hist[a] += 1

    return rec(0)


def histogram(t: Sequence[int], size: int) -> Tuple:
    h = [0] * size
    for x in t:
        h[x] += 1
    return tuple(h)


@dataclass(frozen=True)
class TupleDistribution:
    relation: FiniteRelation
    weights: tuple[tuple[Tuple, Fraction], ...]  # positive weights only, sorted by tuple

    def __post_init__(self):
        w = tuple(sorted((tuple(t), Fraction(p)) for t, p in self.weights))
        object.__setattr__(self, "weights", w)
        if any(p <= 0 for _, p in w):
            raise ValueError("weights must be positive on the support")
        if sum(p for _, p in w) != 1:
            raise ValueError("weights must sum to 1")
        if any(t not in self.relation for t, _ in w):
            raise ValueError("support must lie inside the relation")

    def weight(self, t: Tuple) -> Fraction:
        return dict(self.weights).get(tuple(t), Fraction(0))

    @property
    def support(self) -> tuple[Tuple, ...]:
        return tuple(t for t, _ in self.weights)

    def marginal(self, i: int) -> list[Fraction]:
        out = [Fraction(0)] * self.relation.domain_size
        for t, p in self.weights:
            out[t[i]] += p
        return out

    def counts(self, total: int) -> dict[Tuple, int]:
        """``total * weight`` per support tuple; raises if not integral."""
        out = {}
        for t, p in self.weights:
            q = p * total
            if q.denominator != 1:
                raise IntegralityError(f"{total} * Ω{t} = {q} is not an integer")
            out[t] = int(q)
        return out


def largest_remainder(weights: Sequence[Fraction], total: int) -> list[int]:
    """Integers summing to ``total`` proportional to ``weights``; ties go to the earlier index."""
    quotas = [Fraction(w) * total for w in weights]
    base = [q.numerator // q.denominator for q in quotas]
    left = total - sum(base)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:left]:
        base[i] += 1
    return base


def round_distribution(R: FiniteRelation, n: int, allow_support_loss: bool = False) -> TupleDistribution:
    """Uniform distribution on ``R`` rounded to multiples of ``1/n``.

    With ``allow_support_loss`` a too-small ``n`` keeps only the first tuples
    instead of raising.
    """
    if not len(R):
        raise ValueError("cannot put a distribution on an empty relation")
    if n < len(R) and not allow_support_loss:
        raise ValueError(f"n={n} is smaller than |R|={len(R)}; support would be lost")
    counts = largest_remainder([Fraction(1, len(R))] * len(R), n)
    return TupleDistribution(R, tuple((t, Fraction(m, n)) for t, m in zip(R.tuples, counts) if m))


def check_mu_membership(M: Sequence[Sequence[int]], omega: TupleDistribution) -> bool:
    """Column frequencies of the ``r x 2n`` matrix match ``2n * Ω`` exactly."""
    r = omega.relation.arity
    if len(M) != r:
        raise ValueError(f"matrix needs {r} rows")
    width = len(M[0])
    if any(len(row) != width for row in M):
        raise ValueError("ragged matrix")
    need = omega.counts(width)
    cols = Counter(tuple(row[j] for row in M) for j in range(width))
    return all(col in need for col in cols) and all(cols[t] == k for t, k in need.items())


# ---------------------------------------------------------------------------
# gadget construction


class UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


Vertex = tuple[int, Tuple]  # (v, y)


@dataclass
class GadgetHypergraph:
    arity: int
    n: int
    distribution: TupleDistribution
    histograms: tuple[Tuple, ...]  # per coordinate, each summing to n
    class_of: dict  # Vertex -> class id
    members: list  # class id -> sorted list of vertices
    edges: list  # list of class-id tuples, deduplicated, in emission order
    witnesses: list  # per edge: (u, [Vertex, ...])
    side_conditions: dict = field(default_factory=dict)
    mode: str = "exhaustive"
    attempts: int = 0

    @property
    def num_classes(self) -> int:
        return len(self.members)

    def to_instance(self) -> HyperInstance:
        return HyperInstance(self.num_classes, self.arity, tuple(self.edges))

    def provenance_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "attempts": self.attempts,
            "distribution": [[list(t), str(p)] for t, p in self.distribution.weights],
            "histograms": [list(h) for h in self.histograms],
            "classes": [{"id": i, "size": len(ms), "representatives": [[v, list(y)] for v, y in ms[:3]]}
                        for i, ms in enumerate(self.members)],
            "edge_witnesses": [{"u": u, "vertices": [[v, list(y)] for v, y in vs]} for u, vs in self.witnesses],
            "side_conditions": self.side_conditions,
        }


def parse_mode(mode) -> tuple[str, int, int]:
    if isinstance(mode, tuple):
        return mode
    if mode == "exhaustive":
        return ("exhaustive", 0, 0)
    parts = str(mode).split(":")
    if parts[0] == "sample" and len(parts) == 3:
        return ("sample", int(parts[1]), int(parts[2]))
    raise ValueError(f"mode must be 'exhaustive' or 'sample:COUNT:SEED', got {mode!r}")


def _side_conditions(R: FiniteRelation, omega: TupleDistribution, hists, n: int) -> dict:
    alpha = Fraction(1, 2 * len(R))
    return {
        "full_support": set(omega.support) == set(R.tuples),
        "symmetric_marginals": len(set(hists)) == 1,
        "positive_histogram": all(h > 0 for hist in hists for h in hist),
        "alpha": str(alpha),
        "alpha_balanced": all(h >= alpha * n for hist in hists for h in hist),
    }


def _fibre_projection(x: Tuple, pi: TwoToOneMap) -> Optional[Tuple]:
    """``y`` with ``pullback(y, pi) == x`` if ``x`` is constant on the fibres of ``pi``."""
    y = []
    for a, b in pi.fibres():
        if x[a] != x[b]:
            return None
        y.append(x[a])
    return tuple(y)


def build_gadget(
    inst: LabelCoverInstance,
    R: FiniteRelation,
    mode="exhaustive",
    omega: Optional[TupleDistribution] = None,
    budget: int = DEFAULT_BUDGET,
) -> GadgetHypergraph:
    """Fold the V-clouds along shared pullbacks and add the μ-constrained hyperedges.

    ``mode`` is ``"exhaustive"`` or ``"sample:COUNT:SEED"``.
    """
    kind, count, seed = parse_mode(mode)
    if not len(R):
        raise ValueError("relation must be nonempty")
    if not is_symmetric(R):
        raise ValueError("relation must be symmetric")
    n, r, A = inst.n, R.arity, R.domain_size
    if omega is None:
        omega = round_distribution(R, n, allow_support_loss=True)
    omega.counts(n)  # n·Ω integral implies 2n·Ω and n·marginal integral
    hists = []
    for i in range(r):
        marg = omega.marginal(i)
        hists.append(tuple(int(p * n) for p in marg))
    hists = tuple(hists)
    clouds = {h: list(multislice_enumerate(n, h)) for h in dict.fromkeys(hists)}
    cloud = [y for h in clouds for y in clouds[h]]

    fold_cost = len(inst.edges) * len(cloud)
    if fold_cost > budget:
        raise BudgetExceeded(fold_cost, budget, "folding steps")

    uf = UnionFind()
    for v in range(inst.V):
        for y in cloud:
            uf.add((v, y))
    # per u: pullback -> some vertex realising it
    realised: list[dict[Tuple, Vertex]] = []
    for u in range(inst.U):
        seen: dict[Tuple, Vertex] = {}
        for v, pi in inst.neighbours(u):
            for y in cloud:
                x = pullback(y, pi)
                first = seen.setdefault(x, (v, y))
                uf.union(first, (v, y))
        realised.append(seen)

    roots: dict = {}
    for vert in sorted(uf.parent):
        roots.setdefault(uf.find(vert), []).append(vert)
    members = sorted(roots.values(), key=lambda ms: ms[0])
    class_of = {vert: cid for cid, ms in enumerate(members) for vert in ms}

    edges: list = []
    witnesses: list = []
    seen_edges: set = set()

    def emit(u, verts):
        e = tuple(class_of[x] for x in verts)
        if e not in seen_edges:
            seen_edges.add(e)
            edges.append(e)
            witnesses.append((u, list(verts)))

    double = [tuple(2 * c for c in h) for h in hists]
    if kind == "exhaustive":
        per_u = []
        cost = 0
        for u in range(inst.U):
            rows = [[x for x in realised[u] if histogram(x, A) == double[i]] for i in range(r)]
            per_u.append(rows)
            cost += prod(len(c) for c in rows)
        if cost > budget:
            raise BudgetExceeded(cost, budget, "candidate matrices")
        for u, rows in enumerate(per_u):
            for mat in itertools.product(*rows):
                if check_mu_membership(mat, omega):
                    emit(u, [realised[u][x] for x in mat])
        attempts = cost
    else:
        rng = random.Random(seed)
        columns = [t for t, k in omega.counts(2 * n).items() for _ in range(k)]
        us = [u for u in range(inst.U) if inst.neighbours(u)]
        for _ in range(count if us else 0):
            u = rng.choice(us)
            cols = columns[:]
            rng.shuffle(cols)
            mat = [tuple(col[i] for col in cols) for i in range(r)]
            verts = []
            for x in mat:
                options = []
                for v, pi in inst.neighbours(u):
                    y = _fibre_projection(x, pi)
                    if y is not None:
                        options.append((v, y))
                if not options:
                    break
                verts.append(rng.choice(options))
            else:
                emit(u, verts)
        attempts = count

    side = _side_conditions(R, omega, hists, n)
    return GadgetHypergraph(r, n, omega, hists, class_of, members, edges, witnesses, side,
                            kind if kind == "exhaustive" else f"sample:{count}:{seed}", attempts)


def edge_matrix(inst: LabelCoverInstance, u: int, verts: Sequence[Vertex]) -> list[Tuple]:
    """Rows are the pullbacks of the witness vertices along their constraint maps from ``u``."""
    emap = inst.edge_map()
    return [pullback(y, emap[(u, v)]) for v, y in verts]


def audit_gadget(inst: LabelCoverInstance, H: GadgetHypergraph) -> dict:
    """Recheck every emitted edge: μ-membership and row multislices."""
    mu_ok = rows_ok = True
    double = [tuple(2 * c for c in h) for h in H.histograms]
    A = H.distribution.relation.domain_size
    for u, verts in H.witnesses:
        mat = edge_matrix(inst, u, verts)
        if not check_mu_membership(mat, H.distribution):
            mu_ok = False
        if any(histogram(row, A) != double[i] for i, row in enumerate(mat)):
            rows_ok = False
    return {"edges": len(H.edges), "mu_valid": mu_ok, "rows_in_multislice": rows_ok}


def decode_and_check(
    inst: LabelCoverInstance, s: Sequence[int], s_prime: Sequence[int], R: FiniteRelation, H: GadgetHypergraph
) -> bool:
    """Decode ``h(v, y) = y[s'(v)]`` and check it is well defined on classes and maps H into R."""
    if label_cover_value(inst, s, s_prime) != 1:
        raise ValueError("decoding needs a perfect labelling")
    values = []
    for ms in H.members:
        vals = {y[s_prime[v]] for v, y in ms}
        if len(vals) != 1:
            return False
        values.append(vals.pop())
    return all(tuple(values[c] for c in e) in R for e in H.edges)
