import pytest
from hypothesis import given, strategies as st

from ddplab.digraph import Digraph, is_semicomplete
from ddplab.errors import ArityMismatch, ParseError
from ddplab.instances import (Instance, Request, RoutedSolution, counterexample,
                              counterexample_asymmetric, counterexample_paths, random_instance,
                              read_instance, read_solution, verify_solution, write_instance,
                              write_solution)
from ddplab.solver import solve


def test_verify_trivial_cases():
    assert verify_solution(Instance(Digraph.empty(2), []), RoutedSolution([])).ok
    g = Digraph.from_arcs(2, [(0, 1)])
    assert verify_solution(Instance(g, [Request(0, 1)]), RoutedSolution([(0, 1)])).ok
    g = Digraph.from_arcs(3, [(0, 1), (1, 2)])
    inst = Instance(g, [Request(0, 2, 2)], 1)
    v = verify_solution(inst, RoutedSolution([(0, 1, 2), (0, 1, 2)]))
    assert not v.ok and any("vertex 1 used by 2" in x for x in v.violations)


def test_verify_catches_each_defect():
    g = Digraph.from_arcs(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    inst = Instance(g, [Request(0, 3)], 1, restricted=True)
    assert "missing arc" in str(verify_solution(inst, RoutedSolution([(0, 2, 3)])))
    assert "repeats" in str(verify_solution(inst, RoutedSolution([(0, 1, 2, 1, 2, 3)])))
    assert "joins" in str(verify_solution(inst, RoutedSolution([(0, 1, 2)])))
    with pytest.raises(ArityMismatch):
        verify_solution(inst, RoutedSolution([]))
    inst2 = Instance(g, [Request(0, 3), Request(1, 2)], 2, restricted=True)
    assert "terminal" in str(verify_solution(inst2, RoutedSolution([(0, 1, 2, 3), (1, 2)])))


def test_counterexample_sizes():
    inst = counterexample(2, 1, 1)
    assert inst.n == 12 and inst.k == 2
    inst = counterexample(1, 1, 1)
    assert inst.n == 8 and inst.k == 2
    inst = counterexample(2, 2, 2)
    assert inst.k == 8 and inst.congestion == inst.k // 4
    assert is_semicomplete(inst.graph)
    with pytest.raises(ValueError):
        counterexample(0)


def test_counterexample_paths_validate():
    for n, c, tau in [(1, 1, 1), (2, 2, 2)]:
        inst = counterexample(n, c, tau)
        paths = []
        for cp in range(tau):
            pu, pv = counterexample_paths(n, cp)
            paths += [pu] * c + [pv] * c
        assert verify_solution(inst, RoutedSolution(paths)).ok


def test_asymmetric_named_solution():
    inst = counterexample_asymmetric(2)
    u = lambda i: i - 1
    v = lambda i: 6 + i - 1
    sol = RoutedSolution([(u(1), v(1), u(6)), (u(1), u(2), v(2), u(6)),
                          tuple(v(i) for i in range(6, 0, -1))])
    assert verify_solution(inst, sol).ok
    assert solve(counterexample_asymmetric(1)) is not None


def test_labels():
    inst = counterexample(1)
    assert inst.label(0) == "u1" and inst.index_of("v4") == 7


def test_minimal_file():
    inst = read_instance("ddp 1\nn 2 c 1 restricted 0\narcs\n0 1\nend\nrequests\n0 1 1\nend\n")
    assert inst.k == 1 and inst.graph.has_arc(0, 1)
    inst = read_instance("ddp 1\nn 2 c 1 restricted 0\narcs\n0 1\nend\nrequests\n0 1 5\nend\n")
    assert inst.k == 5


@pytest.mark.parametrize("body,line", [
    ("ddp 1\nn 4 c 1 restricted 0\narcs\n3 3\nend\nrequests\nend\n", 4),
    ("ddp 2\n", 1),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\n0 9\nend\nrequests\nend\n", 4),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\n0 1\n0 1\nend\nrequests\nend\n", 5),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\nend\nrequests\n1 1 1\nend\n", 6),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\nend\nrequests\n0 1 0\nend\n", 6),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\nend\n", 4),
    ("ddp 1\nn 4 c 1 restricted 0\narcs\nend\nrequests\nend\nextra\n", 7),
])
def test_parse_errors_name_the_line(body, line):
    with pytest.raises(ParseError) as e:
        read_instance(body)
    assert e.value.lineno == line


@given(st.integers(2, 8), st.integers(0, 4), st.integers(1, 3), st.integers(0, 10 ** 6),
       st.booleans())
def test_instance_round_trip(n, k, c, seed, restricted):
    inst = random_instance(n, k, c, seed, digon_rate=0.2)
    inst = Instance(inst.graph, inst.requests, c, restricted)
    back = read_instance(write_instance(inst))
    assert back == inst
    assert write_instance(back) == write_instance(inst)


def test_labels_survive_round_trip():
    inst = counterexample(2)
    assert read_instance(write_instance(inst)).labels == inst.labels


def test_solution_round_trip_and_errors():
    sol = RoutedSolution([(0, 1, 2), (3, 4)])
    assert read_solution(write_solution(sol)) == sol
    with pytest.raises(ParseError):
        read_solution("sol 2\n")
    with pytest.raises(ParseError):
        read_solution("sol 1\n0 x\n")


def test_random_instance_is_deterministic():
    assert random_instance(7, 3, 2, 5) == random_instance(7, 3, 2, 5)
    assert random_instance(7, 3, 2, 5) != random_instance(7, 3, 2, 6)


def test_delete_vertices_maps_requests():
    inst = counterexample_asymmetric(2)
    smaller, keep = inst.delete_vertices([2])
    assert smaller.n == inst.n - 1 and 2 not in keep
    assert [(keep[r.s], keep[r.t]) for r in smaller.requests] == [(r.s, r.t) for r in inst.requests]
    with pytest.raises(ValueError):
        inst.delete_vertices([0])
