from itertools import combinations, permutations

import pytest
from hypothesis import given, strategies as st

from ddplab.digraph import Digraph, is_semicomplete
from ddplab.errors import ParseError
from ddplab.instances import counterexample, random_semicomplete
from ddplab.triples import (KTriple, counterexample_triple, find_triple, iter_triples, plant_triple,
                            read_triple, validate_triple, write_triple)


def transitive(n):
    return Digraph.from_arcs(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def brute_has_triple(D, k):
    """Every ordered choice of A, B, C, with C matched to A in order."""
    V = range(D.n)
    for B in combinations(V, k):
        rest = [v for v in V if v not in B]
        for A in combinations(rest, k):
            left = [v for v in rest if v not in A]
            for C in permutations(left, k):
                if validate_triple(D, KTriple(A, B, C)).ok:
                    return True
    return False


def test_four_triple_validates_and_defects_are_named():
    D, t = plant_triple(4, 0, 3)
    assert validate_triple(D, t).ok and t.k == 4
    c2, a2 = t.C[1], t.A[1]
    arcs = [e for e in D.arcs() if e != (c2, a2)]
    v = validate_triple(Digraph.from_arcs(D.n, arcs), t)
    assert not v.ok and f"({c2},{a2})" in str(v)
    bad = KTriple(t.A, (t.A[0],) + t.B[1:], t.C)
    assert "share" in str(validate_triple(D, bad))
    assert "sizes" in str(validate_triple(D, KTriple(t.A, t.B[:3], t.C)))


def test_plant_small_and_deterministic():
    D, t = plant_triple(2, 0, 1)
    assert D.n == 6 and is_semicomplete(D) and validate_triple(D, t).ok
    assert plant_triple(3, 2, 9) == plant_triple(3, 2, 9)
    with pytest.raises(ValueError):
        plant_triple(0, 1, 0)


def test_find_planted():
    D, _ = plant_triple(3, 4, 0)
    t = find_triple(D, 3)
    assert t is not None and validate_triple(D, t).ok
    D, _ = plant_triple(4, 6, 1)
    assert validate_triple(D, find_triple(D, 4)).ok


def test_transitive_has_no_triple():
    assert find_triple(transitive(9), 2) is None
    assert not brute_has_triple(transitive(6), 2)


def test_counterexample_triple():
    D = counterexample(2).graph
    assert validate_triple(D, counterexample_triple(2)).ok
    t = find_triple(D, 2)
    assert t is not None and validate_triple(D, t).ok


@given(st.integers(6, 8), st.integers(0, 10 ** 6), st.sampled_from([0.0, 0.3]))
def test_exhaustive_search_matches_brute_force(n, seed, rate):
    D = random_semicomplete(n, rate, seed)
    assert (find_triple(D, 2) is not None) == brute_has_triple(D, 2)


def test_iter_triples_all_valid():
    D, _ = plant_triple(3, 3, 5, digon_rate=0.2)
    ts = list(iter_triples(D, 3))
    assert ts and all(validate_triple(D, t).ok for t in ts)
    assert len({t.B for t in ts}) == len(ts)


def test_text_format():
    t = KTriple((1, 2), (3, 4), (5, 6))
    assert read_triple(write_triple(t)) == t
    assert t.mat(6) == 2
    with pytest.raises(ParseError):
        read_triple("triple 1\n1\n2\n3\n")
    with pytest.raises(ParseError):
        read_triple("ktriple 1\n1 2\n3 4\n")
    with pytest.raises(ParseError):
        read_triple("ktriple 1\n1 x\n3 4\n5 6\n")
