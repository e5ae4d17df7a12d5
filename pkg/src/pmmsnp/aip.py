"""Smith normal form over the integers and the AIP solver for the tractable clique case.

Everything is exact Python ``int`` arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import FiniteRelation
from .mmsnp import Verdict, classify

Matrix = list[list[int]]


class PromiseViolation(Exception):
    """The instance cannot satisfy the promise (no integer solution, or an empty template)."""


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular."""

    U: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    rank: int

    @property
    def invariant_factors(self) -> list[int]:
        return [self.D[i][i] for i in range(self.rank)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], inner: Optional[int] = None) -> Matrix:
    if inner is None:
        inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(inner)) for j in range(cols)] for i in range(len(A))]


def smith_normal_form(M: Sequence[Sequence[int]], cols: Optional[int] = None) -> SnfDecomposition:
    """Pivot on the smallest nonzero absolute value, ties broken by (row, col).

    ``cols`` is needed only for matrices with zero rows.
    """
    m = len(M)
    n = len(M[0]) if m else (cols or 0)
    A = [list(map(int, row)) for row in M]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst += q * row src
        if q:
            A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):  # col dst += q * col src
        if q:
            for row in A:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    rank = 0
    for t in range(min(m, n)):
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (pivot is None or abs(a) < pivot[0]):
                    pivot = (abs(a), i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[1])
        swap_cols(t, pivot[2])
        while True:
            # clear column t and row t; restart with a smaller pivot on any remainder
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), "r", i)
                for j in range(t, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), "c", j)
                if best[1] == "r":
                    swap_rows(t, best[2])
                else:
                    swap_cols(t, best[2])
                continue
            # divisibility: fold an offending row into row t and go again
            p = A[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        rank += 1

    freeze = lambda X: tuple(tuple(r) for r in X)
    return SnfDecomposition(freeze(U), freeze(A), freeze(V), rank)


def solve_integer_linear(A: Sequence[Sequence[int]], b: Sequence[int], cols: Optional[int] = None) -> Optional[list[int]]:
    """Some integer ``x`` with ``A x = b``, or ``None`` if there is none."""
    m = len(A)
    if len(b) != m:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {m} rows")
    n = len(A[0]) if m else (cols or 0)
    if m == 0:
        return [0] * n
    snf = smith_normal_form(A, n)
    c = [sum(snf.U[i][t] * b[t] for t in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        if i < snf.rank:
            d = snf.D[i][i]
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    return [sum(snf.V[i][j] * y[j] for j in range(n)) for i in range(n)]


def aip_round(x: Sequence[int]) -> list[int]:
    return [1 if v >= 1 else 0 for v in x]


@dataclass(frozen=True)
class HyperInstance:
    """An ``arity``-uniform hypergraph on variables ``0..variables-1``; edges are multisets."""

    variables: int
    arity: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if len(e) != self.arity:
                raise ValueError(f"edge {e} does not have arity {self.arity}")
            if any(not 0 <= v < self.variables for v in e):
                raise ValueError(f"edge {e} mentions an unknown variable")

    def to_json(self) -> dict:
        return {"variables": self.variables, "arity": self.arity, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "HyperInstance":
        return cls(int(data["variables"]), int(data["arity"]), tuple(tuple(e) for e in data["edges"]))


def verify_colouring(instance: HyperInstance, colouring: Sequence[int], target: FiniteRelation) -> bool:
    if len(colouring) != instance.variables:
        raise ValueError("colouring must assign every variable")
    if any(not 0 <= x < target.domain_size for x in colouring):
        raise ValueError("colour outside the target domain")
    return all(tuple(colouring[v] for v in e) in target for e in instance.edges)


def solve_tractable_pcsp(instance: HyperInstance, c: int, d: int, k: int, l: int) -> list[int]:
    """Search version of PCSP(U(c,k,l), NAE(d,l)) on the tractable side of the dichotomy.

    Raises PromiseViolation when the instance cannot admit a promise solution.
    """
    verdict = classify(c, d, k, l)
    if verdict.verdict is not Verdict.TRACTABLE_AIP:
        raise ValueError(f"parameters {(c, d, k, l)} are not on the tractable side: {verdict.verdict.value}")
    if instance.arity != l:
        raise ValueError(f"instance arity {instance.arity} does not match l={l}")
    if not instance.edges:
        return [0] * instance.variables
    if l > c * (k - 1):
        raise PromiseViolation("promise relation is empty but the instance has constraints")
    if d == 1:
        raise PromiseViolation("target relation is empty but the instance has constraints")
    rows = []
    for e in instance.edges:
        row = [0] * instance.variables
        for v in e:
            row[v] += 1
        rows.append(row)
    x = solve_integer_linear(rows, [k - 1] * len(rows), instance.variables)
    if x is None:
        raise PromiseViolation("the affine relaxation has no integer solution")
    return aip_round(x)
