"""Instance generators and exact oracles shared by the test modules."""

import itertools
import random
from math import gcd

from pmmsnp.aip import matmul, smith_normal_form
from pmmsnp.core import RelStructure


def random_graph(rng: random.Random, n: int, p: float) -> RelStructure:
    edges = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < p]
    return RelStructure(n, {"E": (2, [e for a, b in edges for e in ((a, b), (b, a))])})


def tree_instance(rng: random.Random, symbols: dict, n_tuples: int, max_elements: int) -> RelStructure:
    """Tuples on distinct elements; each new tuple meets the earlier ones in at most one element.

    The tuple/element incidence graph is then a forest, so the girth is unbounded.
    """
    names = sorted(symbols)
    rels = {name: (symbols[name], []) for name in names}
    used = 0
    for _ in range(n_tuples):
        name = rng.choice(names)
        arity = symbols[name]
        share = used > 0 and rng.random() < 0.8
        need = arity - (1 if share else 0)
        if used + need > max_elements:
            break
        elems = list(range(used, used + need))
        used += need
        if share:
            elems.insert(rng.randrange(arity), rng.randrange(used - need))
        rels[name][1].append(tuple(elems))
    return RelStructure(max(used, 1), rels)


def det(M):
    """Bareiss fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def minor_gcds(M):
    """gcd of all i x i minors for every i, by Laplace expansion over row/column subsets."""
    m, n = len(M), len(M[0]) if M else 0
    out = []
    prev = {(0, 0): 1}
    for size in range(1, min(m, n) + 1):
        cur = {}
        g = 0
        for rows in itertools.combinations(range(m), size):
            r_last = rows[-1]
            rmask = sum(1 << r for r in rows)
            rprev = rmask & ~(1 << r_last)
            for cols in itertools.combinations(range(n), size):
                cmask = sum(1 << c for c in cols)
                total = 0
                for pos, c in enumerate(cols):
                    a = M[r_last][c]
                    if a:
                        sub = prev[(rprev, cmask & ~(1 << c))]
                        total += (-1) ** (size - 1 + pos) * a * sub
                cur[(rmask, cmask)] = total
                g = gcd(g, total)
        out.append(g)
        prev = cur
    return out


def check_snf(M):
    m, n = len(M), len(M[0])
    snf = smith_normal_form(M)
    U, D, V = [list(r) for r in snf.U], [list(r) for r in snf.D], [list(r) for r in snf.V]
    assert matmul(matmul(U, M), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    diag = [D[i][i] for i in range(min(m, n))]
    assert all(D[i][j] == 0 for i in range(m) for j in range(n) if i != j)
    r = snf.rank
    assert all(d > 0 for d in diag[:r]) and all(d == 0 for d in diag[r:])
    assert all(diag[i + 1] % diag[i] == 0 for i in range(r - 1))
    gs = minor_gcds(M)
    prod = 1
    for i in range(min(m, n)):
        prod *= diag[i]
        assert prod == gs[i]
