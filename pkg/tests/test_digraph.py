from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from ddplab.digraph import (CliquePartition, Digraph, bits, clique_cover_number, h_semicompleteness,
                            independence_number, is_semicomplete, is_tournament, popcount, to_mask,
                            verify_clique_partition)
from ddplab.errors import CapExceeded
from ddplab.instances import counterexample, random_semicomplete, random_tournament


@st.composite
def digraphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    arcs = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    return Digraph.from_arcs(n, arcs)


def test_bit_helpers():
    assert list(bits(0b10110)) == [1, 2, 4]
    assert popcount(to_mask([0, 3, 5])) == 3


def test_rejects_loops_and_bad_masks():
    with pytest.raises(ValueError):
        Digraph.from_arcs(2, [(1, 1)])
    with pytest.raises(ValueError):
        Digraph(2, [0b100, 0])


@given(digraphs())
def test_arcs_round_trip_and_neighbourhoods(D):
    E = Digraph.from_arcs(D.n, D.arcs())
    assert E == D and hash(E) == hash(D)
    for u in range(D.n):
        for v in D.out_neighbors(u):
            assert D.has_arc(u, v) and u in D.in_neighbors(v)
    assert D.num_arcs() == len(D.arcs())


def test_tournament_examples():
    assert is_tournament(Digraph.empty(1))
    assert not is_tournament(Digraph.from_arcs(2, [(0, 1), (1, 0)]))
    T2 = counterexample(2).graph
    assert T2.n == 12 and is_tournament(T2)


def test_semicomplete_examples():
    assert is_semicomplete(random_tournament(6, 1))
    assert not is_semicomplete(Digraph.from_arcs(3, [(0, 1), (1, 2)]))
    T = Digraph.from_arcs(3, [(0, 1), (1, 2), (0, 2)])
    assert is_semicomplete(Digraph.from_arcs(3, T.arcs() + [(2, 0)]))


def test_h_semicompleteness_examples():
    assert h_semicompleteness(random_tournament(7, 3)) == 0
    arcs = [(u, v) for u in range(4) for v in range(u + 1, 4) if (u, v) not in ((0, 1), (0, 2))]
    assert h_semicompleteness(Digraph.from_arcs(4, arcs)) == 2
    assert h_semicompleteness(Digraph.empty(5)) == 4


def test_clique_cover_examples():
    h, cp = clique_cover_number(random_tournament(6, 0))
    assert h == 1 and len(cp) == 1
    h, cp = clique_cover_number(Digraph.empty(3))
    assert h == 3 and verify_clique_partition(Digraph.empty(3), cp)
    assert not verify_clique_partition(Digraph.empty(2), CliquePartition((frozenset({0, 1}),)))


def test_independence_examples():
    assert independence_number(random_tournament(6, 2)) == 1
    assert independence_number(Digraph.empty(4)) == 4
    assert independence_number(Digraph.from_arcs(4, [(0, 1), (2, 3)])) == 2


def _adjacent_set(D, vs):
    return all(D.adjacent(u, v) for u, v in combinations(vs, 2))


@given(digraphs(6))
def test_independence_matches_subset_oracle(D):
    best = max((len(S) for r in range(D.n + 1) for S in combinations(range(D.n), r)
                if all(not D.adjacent(u, v) for u, v in combinations(S, 2))), default=0)
    assert independence_number(D) == best


def _cover_oracle(D):
    n = D.n
    cliques = [m for m in range(1, 1 << n) if _adjacent_set(D, list(bits(m)))]
    best = {0: 0}
    for full in range(1, 1 << n):
        low = full & -full
        best[full] = min(best[full & ~m] + 1 for m in cliques if m & low and m & ~full == 0)
    return best[(1 << n) - 1]


@given(digraphs(6))
def test_clique_cover_matches_subset_oracle(D):
    h, cp = clique_cover_number(D)
    assert verify_clique_partition(D, cp) and len(cp) == h
    assert h == _cover_oracle(D)


def test_random_semicomplete_extremes():
    assert random_semicomplete(5, 0.0, 7) == random_semicomplete(5, 0.0, 7)
    assert is_tournament(random_semicomplete(6, 0.0, 1))
    full = random_semicomplete(6, 1.0, 1)
    assert full.num_arcs() == 30 and h_semicompleteness(full) == 0


def test_caps():
    with pytest.raises(CapExceeded):
        independence_number(Digraph.empty(40), cap=10)
