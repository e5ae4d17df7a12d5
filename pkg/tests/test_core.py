import itertools
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmmsnp.core import (
    FiniteRelation,
    RelStructure,
    SignatureError,
    TwoToOneMap,
    clique,
    connected_components,
    disjoint_union,
    enumerate_homomorphisms,
    find_homomorphism,
    is_homomorphism,
    is_symmetric,
    kinl,
    lo,
    make_named,
    make_urel,
    nae,
    pullback,
    urel_size,
)


def brute_homs(S, T):
    """Every map checked by direct tuple scan, no pruning."""
    out = []
    for h in itertools.product(range(T.domain_size), repeat=S.domain_size):
        if all(tuple(h[x] for x in t) in set(T.tuples(n)) for n, t in S.all_tuples()):
            out.append(h)
    return out


@st.composite
def structures(draw, max_size=4, symbols=(("E", 2),), max_tuples=6):
    n = draw(st.integers(1, max_size))
    rels = {}
    for name, arity in symbols:
        ts = draw(st.lists(st.tuples(*[st.integers(0, n - 1)] * arity), max_size=max_tuples))
        rels[name] = (arity, ts)
    return RelStructure(n, rels)


# -- structures


def test_structure_canonical_and_hashable():
    a = RelStructure(3, {"E": (2, [(1, 2), (0, 1), (1, 2)])})
    b = RelStructure(3, {"E": (2, [(0, 1), (1, 2)])})
    assert a == b and hash(a) == hash(b)
    assert a.tuples("E") == ((0, 1), (1, 2))


@pytest.mark.parametrize(
    "rels",
    [{"E": (2, [(0, 3)])}, {"E": (2, [(0, 1, 2)])}, {"E": (2, [(-1, 0)])}],
)
def test_structure_rejects_bad_tuples(rels):
    with pytest.raises(ValueError):
        RelStructure(3, rels)


def test_induced_relabels():
    P = RelStructure(4, {"E": (2, [(0, 1), (1, 2), (2, 3)])})
    sub = P.induced([1, 3, 2])
    assert sub.domain_size == 3
    assert set(sub.tuples("E")) == {(0, 2), (2, 1)}


def test_disjoint_union_and_components():
    U = disjoint_union([clique(2), clique(3)])
    assert U.domain_size == 5
    assert len(U.tuples("E")) == 2 + 6
    assert sorted(map(sorted, connected_components(U))) == [[0, 1], [2, 3, 4]]


# -- named relations


def test_urel_examples():
    assert set(make_urel(2, 3, 3).tuples) == set(itertools.product((0, 1), repeat=3)) - {(0, 0, 0), (1, 1, 1)}
    assert len(make_urel(3, 2, 2)) == 6
    assert all(a != b for a, b in make_urel(3, 2, 2).tuples)
    for c in range(1, 4):
        for l in range(1, 4):
            assert len(make_urel(c, 1, l)) == 0


def test_urel_2_3_4_has_six_tuples():
    # exactly the 2+2 tuples: a 3+1 split already repeats a colour three times
    expected = {t for t in itertools.product((0, 1), repeat=4) if sum(t) == 2}
    assert set(make_urel(2, 3, 4).tuples) == expected
    assert len(expected) == 6


@pytest.mark.parametrize("c,k,l", [(c, k, l) for c in range(1, 5) for k in range(1, 5) for l in range(1, 6)])
def test_urel_size_matches_enumeration(c, k, l):
    direct = sum(1 for t in itertools.product(range(c), repeat=l) if max(t.count(a) for a in range(c)) < k)
    assert urel_size(c, k, l) == direct == len(make_urel(c, k, l))


@pytest.mark.parametrize("d,r", [(d, r) for d in range(1, 4) for r in range(1, 5)])
def test_nae_equals_urel(d, r):
    assert set(nae(d, r).tuples) == set(make_urel(d, r, r).tuples)
    assert set(make_named("nae", d, r).tuples) == set(nae(d, r).tuples)


def test_kinl():
    R = kinl(2, 4)
    assert len(R) == 6 == factorial(4) // (factorial(2) ** 2)
    assert all(sum(t) == 2 for t in R.tuples)
    with pytest.raises(ValueError):
        kinl(5, 4)


FIG_LABELS = ["112", "113", "121", "123", "131", "132", "211", "213", "223", "231", "232", "311", "312", "321", "322"]


def test_lo_3_3_matches_figure_labels():
    expected = {tuple(int(ch) - 1 for ch in s) for s in FIG_LABELS}
    assert set(lo(3, 3).tuples) == expected


def test_clique():
    K = clique(4)
    assert len(K.tuples("E")) == 12
    assert all(a != b for a, b in K.tuples("E"))
    assert make_named("clique", 3) == clique(3)


def test_make_named_unknown():
    with pytest.raises(ValueError):
        make_named("foo", 1)


def test_is_symmetric_examples():
    assert is_symmetric(make_urel(2, 3, 3))
    assert not is_symmetric(FiniteRelation(2, 2, ((0, 1),)))
    assert is_symmetric(lo(3, 3))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_is_symmetric_against_full_permutation_closure(c, r, data):
    all_t = list(itertools.product(range(c), repeat=r))
    ts = data.draw(st.lists(st.sampled_from(all_t), unique=True))
    R = FiniteRelation(c, r, tuple(ts))
    closed = all(tuple(t[i] for i in p) in R for t in ts for p in itertools.permutations(range(r)))
    assert is_symmetric(R) == closed


# -- 2-to-1 maps and pullbacks


def test_two_to_one_map_validation():
    TwoToOneMap(2, (0, 1, 1, 0))
    with pytest.raises(ValueError):
        TwoToOneMap(2, (0, 0, 0, 1))
    with pytest.raises(ValueError):
        TwoToOneMap(2, (0, 1, 1))


def test_pullback_examples():
    assert pullback(("a",), TwoToOneMap(1, (0, 0))) == ("a", "a")
    assert pullback(("a", "b"), TwoToOneMap(2, (0, 0, 1, 1))) == ("a", "a", "b", "b")
    assert pullback((0, 1), TwoToOneMap(2, (0, 1, 1, 0))) == (0, 1, 1, 0)
    with pytest.raises(ValueError):
        pullback((0,), TwoToOneMap(2, (0, 0, 1, 1)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.data())
def test_pullback_along_section_recovers(n, data):
    perm = data.draw(st.permutations(range(2 * n)))
    pi = TwoToOneMap(n, tuple(p // 2 for p in perm))
    x = tuple(data.draw(st.lists(st.integers(0, 5), min_size=n, max_size=n)))
    y = pullback(x, pi)
    section = [pi.table.index(i) for i in range(n)]
    assert tuple(y[j] for j in section) == x
    assert all(y[j] == x[pi(j)] for j in range(2 * n))


# -- homomorphisms


def test_hom_examples():
    K2, K3, K4 = clique(2), clique(3), clique(4)
    assert len(enumerate_homomorphisms(K3, K3)) == 6
    assert find_homomorphism(K3, K2) is None
    assert find_homomorphism(RelStructure(1, {"E": (2, [])}), K2) is not None
    assert len(enumerate_homomorphisms(K2, K3)) == 6
    assert enumerate_homomorphisms(K4, K3) == []
    single = RelStructure(1, {"E": (2, [])})
    assert len(enumerate_homomorphisms(single, K4)) == 4


def test_signature_mismatch():
    with pytest.raises(SignatureError):
        find_homomorphism(clique(2), RelStructure(2, {"F": (2, [(0, 1)])}))


@settings(max_examples=200, deadline=None)
@given(structures(max_size=4), structures(max_size=3))
def test_enumerate_equals_brute(S, T):
    got = enumerate_homomorphisms(S, T)
    assert got == sorted(got)
    assert got == brute_homs(S, T)
    h = find_homomorphism(S, T)
    assert (h is None) == (not got)
    if h is not None:
        assert is_homomorphism(h, S, T)


@settings(max_examples=100, deadline=None)
@given(structures(max_size=4, symbols=(("R", 3), ("E", 2)), max_tuples=4),
       structures(max_size=3, symbols=(("R", 3), ("E", 2)), max_tuples=10))
def test_enumerate_equals_brute_mixed_arity(S, T):
    assert enumerate_homomorphisms(S, T) == brute_homs(S, T)


def test_domains_restrict_search():
    got = enumerate_homomorphisms(clique(2), clique(3), domains=[[0], [1, 2]])
    assert got == [(0, 1), (0, 2)]
