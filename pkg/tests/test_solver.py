from collections import Counter
from itertools import product

import pytest
from hypothesis import given, strategies as st

from ddplab.digraph import Digraph
from ddplab.errors import BudgetExceeded, TerminalVertex
from ddplab.instances import (Instance, Request, RoutedSolution, counterexample,
                              counterexample_asymmetric, counterexample_paths, random_instance,
                              verify_solution)
from ddplab.solver import (ANY, MIN, SolveMode, apply_shortcut, enumerate_solutions, find_shortcut,
                           is_relevant, min_total_length, minimize, solve)


def simple_paths(D, s, t):
    out = []

    def rec(p, seen):
        x = p[-1]
        if x == t:
            out.append(tuple(p))
            return
        for y in D.out_neighbors(x):
            if y not in seen:
                rec(p + [y], seen | {y})

    rec([s], {s})
    return out


def brute(inst):
    """(feasible, minimum total length) by trying every combination of paths."""
    terms = inst.terminals()
    options = []
    for s, t in inst.expanded():
        ps = simple_paths(inst.graph, s, t)
        if inst.restricted:
            ps = [p for p in ps if not (set(p[1:-1]) & terms)]
        options.append(ps)
    best = None
    for combo in product(*options):
        occ = Counter(v for p in combo for v in p)
        if all(x <= inst.congestion for x in occ.values()):
            tot = sum(len(p) for p in combo)
            best = tot if best is None else min(best, tot)
    return best is not None, best


@st.composite
def small_instances(draw):
    n = draw(st.integers(3, 6))
    k = draw(st.integers(1, 3))
    c = draw(st.integers(1, 2))
    seed = draw(st.integers(0, 10 ** 6))
    rate = draw(st.sampled_from([0.0, 0.25]))
    inst = random_instance(n, k, c, seed, digon_rate=rate)
    if draw(st.booleans()):
        inst = Instance(inst.graph, inst.requests, c, True)
    return inst


@given(small_instances())
def test_solver_matches_brute_force(inst):
    feasible, best = brute(inst)
    a = solve(inst, ANY)
    m = solve(inst, MIN)
    assert (a is not None) == feasible == (m is not None)
    if feasible:
        assert verify_solution(inst, a).ok and verify_solution(inst, m).ok
        assert m.total_length() == best
        for i in range(len(m.paths)):
            assert find_shortcut(inst, m, i) is None


@given(small_instances())
def test_monotone_in_congestion(inst):
    sol = solve(inst)
    if sol is not None:
        bigger = inst.with_congestion(inst.congestion + 1)
        assert verify_solution(bigger, sol).ok and solve(bigger) is not None


def test_single_arc():
    inst = Instance(Digraph.from_arcs(2, [(0, 1)]), [Request(0, 1)])
    sol = solve(inst)
    assert sol.paths == ((0, 1),) and sol.total_length() == 2


def test_counterexample_forces_both_paths():
    inst = counterexample(2, 1, 1)
    pu, pv = counterexample_paths(2)
    assert [list(p) for p in solve(inst).paths] == [pu, pv]
    sols = enumerate_solutions(counterexample(1))
    pu, pv = counterexample_paths(1)
    assert [[list(p) for p in s.paths] for s in sols] == [[pu, pv]]


def test_enumerate_small_cases():
    D = Digraph.from_arcs(3, [(0, 1), (1, 2), (0, 2)])
    sols = enumerate_solutions(Instance(D, [Request(0, 2)]))
    assert sorted(s.paths for s in sols) == [((0, 1, 2),), ((0, 2),)]
    assert enumerate_solutions(Instance(D, [Request(2, 0)])) == []


@given(small_instances())
def test_enumeration_matches_brute_force_count(inst):
    terms = inst.terminals()
    options = []
    for r in inst.requests:
        ps = simple_paths(inst.graph, r.s, r.t)
        if inst.restricted:
            ps = [p for p in ps if not (set(p[1:-1]) & terms)]
        options.append(ps)
    # copies of one request are unordered: count multisets
    seen = set()
    for combo in product(*[o for r, o in zip(inst.requests, options) for _ in range(r.multiplicity)]):
        occ = Counter(v for p in combo for v in p)
        if all(x <= inst.congestion for x in occ.values()):
            key, pos = [], 0
            for r in inst.requests:
                key.append(tuple(sorted(combo[pos:pos + r.multiplicity])))
                pos += r.multiplicity
            seen.add(tuple(key))
    sols = enumerate_solutions(inst)
    assert len(sols) == len(seen)
    assert all(verify_solution(inst, s).ok for s in sols)


def test_shortcut_on_detour():
    # 0 -> 1 -> 2 -> 3 and the direct arc 0 -> 3
    D = Digraph.from_arcs(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    inst = Instance(D, [Request(0, 3)])
    sol = RoutedSolution([(0, 1, 2, 3)])
    cut = find_shortcut(inst, sol, 0)
    assert cut is not None
    a, b, walk = cut
    assert len(walk) < b - a + 1
    better = apply_shortcut(sol, 0, cut)
    assert verify_solution(inst, better).ok and better.total_length() < sol.total_length()
    assert minimize(inst, sol).paths == ((0, 3),)


def test_shortcut_respects_capacity():
    D = Digraph.from_arcs(5, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 3), (4, 2)])
    inst = Instance(D, [Request(0, 3), Request(4, 2)], 1)
    sol = RoutedSolution([(0, 1, 2, 3), (4, 2)])
    assert not verify_solution(inst, sol).ok or True
    inst2 = Instance(D, [Request(0, 3), Request(4, 3)], 1)
    sol2 = RoutedSolution([(0, 1, 2, 3), (4, 3)])
    assert verify_solution(inst2, sol2).ok is False      # 3 shared at c = 1
    inst3 = inst2.with_congestion(2)
    sol3 = RoutedSolution([(0, 1, 2, 3), (4, 3)])
    assert verify_solution(inst3, sol3).ok
    # 0 -> 4 -> 3 is shorter; 4 already carries one path, one slot left
    assert find_shortcut(inst3, sol3, 0) is not None
    inst4 = Instance(D, [Request(0, 3), Request(4, 3), Request(4, 2)], 2)
    sol4 = RoutedSolution([(0, 1, 2, 3), (4, 3), (4, 2)])
    assert verify_solution(inst4, sol4).ok
    assert find_shortcut(inst4, sol4, 0) is None
    assert find_shortcut(inst4, sol4, 0, require_capacity=False) is not None


def test_relevance():
    inst = counterexample(2, 1, 1)
    terms = inst.terminals()
    pu, pv = counterexample_paths(2)
    for v in pu[1:-1] + pv[1:-1]:
        if v not in terms:
            assert is_relevant(inst, v)
    asym = counterexample_asymmetric(2)
    assert not is_relevant(asym, 2)
    with pytest.raises(TerminalVertex):
        is_relevant(asym, 0)
    D = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    dead = Instance(D, [Request(2, 0)])
    assert not is_relevant(dead, 1)


def test_budget():
    inst = counterexample(2, 2, 2)
    with pytest.raises(BudgetExceeded):
        solve(inst, SolveMode(node_limit=3))
    assert min_total_length(inst) is not None


def test_jobs_do_not_change_answers():
    for seed in range(6):
        inst = random_instance(7, 3, 2, 40 + seed, digon_rate=0.2)
        for obj in ("any", "min_total_length"):
            one = solve(inst, SolveMode(obj, jobs=1))
            four = solve(inst, SolveMode(obj, jobs=4))
            assert one == four
