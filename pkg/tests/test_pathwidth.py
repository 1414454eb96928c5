import pytest
from hypothesis import given, strategies as st

from ddplab import reductions as R
from ddplab.digraph import Digraph
from ddplab.errors import CapExceeded, ParseError
from ddplab.instances import Instance, Request, counterexample, random_instance, verify_solution
from ddplab.pathwidth import (DirectedPathDecomposition, decomposition_to_layout, dp_decide, dp_solve,
                              exact_dpw, layout_oracle_dpw, layout_to_decomposition,
                              read_decomposition, validate_decomposition, width,
                              write_decomposition)
from ddplab.solver import solve


def transitive(n):
    return Digraph.from_arcs(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


@st.composite
def digraphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    return Digraph.from_arcs(n, draw(st.sets(st.sampled_from(pairs))) if pairs else [])


def test_validate_examples():
    D = transitive(4)
    one = DirectedPathDecomposition([range(4)])
    assert validate_decomposition(D, one).ok and width(one) == 3
    singles = DirectedPathDecomposition([[3], [2], [1], [0]])
    assert validate_decomposition(D, singles).ok and width(singles) == 0
    gap = DirectedPathDecomposition([[0, 1, 2, 3], [1], [0]])
    assert "contiguity" in str(validate_decomposition(D, gap))
    assert "cover" in str(validate_decomposition(D, DirectedPathDecomposition([[0, 1, 2]])))
    wrong = DirectedPathDecomposition([[0], [1], [2], [3]])
    assert "arc" in str(validate_decomposition(D, wrong))
    assert width(DirectedPathDecomposition([[0, 1, 2], [2]])) == 2


def test_exact_examples():
    for n in range(1, 8):
        assert exact_dpw(transitive(n))[0] == 0
    assert exact_dpw(Digraph.from_arcs(3, [(0, 1), (1, 2), (2, 0)]))[0] == 1
    T1 = counterexample(1).graph
    assert exact_dpw(T1)[0] == layout_oracle_dpw(T1)
    with pytest.raises(CapExceeded):
        exact_dpw(transitive(20), cap=18)


def test_obs3_layout_has_width_two():
    mcc, _ = R.random_mcc(2, 2, 0.5, 3, plant=True)
    art = R.reduce_mcc(mcc)
    dec = layout_to_decomposition(art.instance.graph, art.extras["layout"])
    assert validate_decomposition(art.instance.graph, dec).ok and width(dec) == 2


@given(digraphs())
def test_exact_matches_layout_oracle(D):
    w, dec = exact_dpw(D)
    assert w == layout_oracle_dpw(D)
    assert validate_decomposition(D, dec).ok and width(dec) == w


@given(digraphs())
def test_layout_decomposition_round_trip(D):
    w, dec = exact_dpw(D)
    dec2 = layout_to_decomposition(D, decomposition_to_layout(dec))
    assert validate_decomposition(D, dec2).ok and width(dec2) <= w
    assert read_decomposition(write_decomposition(dec)) == dec


def test_read_decomposition_errors():
    with pytest.raises(ParseError):
        read_decomposition("dpd 2\n")
    with pytest.raises(ParseError):
        read_decomposition("dpd 1\n0 a\n")


def test_dp_trivial():
    D = transitive(3)
    assert dp_solve(Instance(D, []), exact_dpw(D)[1]).paths == ()
    inst = Instance(D, [Request(0, 2)])
    sol = dp_solve(inst, exact_dpw(D)[1])
    assert verify_solution(inst, sol).ok
    assert dp_solve(Instance(D, [Request(2, 0)]), exact_dpw(D)[1]) is None


@pytest.mark.parametrize("seed", range(25))
def test_dp_matches_solver(seed):
    n, k, c = 5 + seed % 3, 1 + seed % 3, 1 + seed % 2
    inst = random_instance(n, k, c, 500 + seed, digon_rate=0.15)
    sol = dp_decide(inst)
    assert (sol is None) == (solve(inst) is None)
    if sol is not None:
        assert verify_solution(inst, sol).ok


def test_dp_restricted_mode():
    for seed in range(10):
        inst = random_instance(6, 3, 2, 900 + seed)
        inst = Instance(inst.graph, inst.requests, 2, True)
        sol = dp_decide(inst)
        assert (sol is None) == (solve(inst) is None)
        if sol is not None:
            assert verify_solution(inst, sol).ok


def test_dp_on_mcc_with_attached_decomposition():
    for seed, plant, p in [(0, True, 0.5), (5, False, 0.0)]:
        mcc, _ = R.random_mcc(2, 2, p, seed, plant=plant)
        art = R.reduce_mcc(mcc)
        sol = dp_solve(art.instance, art.extras["decomposition"])
        assert (sol is not None) == (R.brute_force_clique(mcc) is not None)
        if sol is not None:
            assert verify_solution(art.instance, sol).ok
