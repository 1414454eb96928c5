"""Reductions from (3,1)-3-SAT to routing on tournaments and on 2-clique-coverable digraphs.

Vertex names used throughout: per variable i (1-based) the butterfly
``s_i t_i sbar_i tbar_i alpha_i xa_i xb_i xc_i xd_i`` where ``xd_i`` is the
negated literal vertex; per clause a the pair ``p_a q_a``.  The wing vertices
xa, xb, xc stand for the variable's positive occurrences in increasing clause
order.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import partial

from ..digraph import CliquePartition
from ..errors import BadRatio, InvalidSolution, NotSatisfying
from ..instances import Request, RoutedSolution, verify_solution
from ..solver import minimize
from .base import NamedBuilder, ReductionArtifact, make_instance
from .sat import Sat31Instance

BUTTERFLY = ("s", "t", "sbar", "tbar", "alpha", "xa", "xb", "xc", "xd")

# arcs of one butterfly, by role name
BUTTERFLY_ARCS = [
    # the centre and the two wings
    ("sbar", "alpha"), ("alpha", "tbar"), ("sbar", "xd"), ("xd", "tbar"),
    ("s", "alpha"), ("alpha", "t"), ("s", "xa"), ("xa", "xb"), ("xb", "xc"), ("xc", "t"),
    ("alpha", "xd"), ("alpha", "xa"), ("alpha", "xb"), ("xc", "alpha"),
    # arcs pointing back from the right-hand side
    ("tbar", "xa"), ("tbar", "xb"), ("tbar", "xc"), ("sbar", "xa"), ("sbar", "xb"), ("sbar", "xc"),
    ("tbar", "s"), ("sbar", "t"), ("sbar", "s"), ("tbar", "t"),
    ("xd", "xc"), ("xd", "t"), ("xd", "xb"), ("xd", "xa"), ("xd", "s"),
    # arcs pointing down
    ("t", "xb"), ("t", "xa"), ("t", "s"), ("xc", "xa"), ("xc", "s"), ("xb", "s"), ("tbar", "sbar"),
]


def _bname(role, i):
    return f"{role}_{i}"


def literal_vertex(f: Sat31Instance, a: int, var: int, positive: bool) -> str:
    """Name of the butterfly vertex standing for the occurrence of var in clause a."""
    if not positive:
        return _bname("xd", var + 1)
    slot = f.positive_clauses(var).index(a)
    return _bname(("xa", "xb", "xc")[slot], var + 1)


def _butterflies(b: NamedBuilder, f: Sat31Instance, reverse_chain=False):
    n = f.n_vars
    for i in range(1, n + 1):
        for role in BUTTERFLY:
            b.add(_bname(role, i))
    for i in range(1, n + 1):
        for x, y in BUTTERFLY_ARCS:
            b.arc(_bname(x, i), _bname(y, i))
    for j in range(1, n + 1):
        for i in range(1, j):
            for x in BUTTERFLY:
                for y in BUTTERFLY:
                    u, v = _bname(x, j), _bname(y, i)
                    if reverse_chain and x == "xa" and y == "xd" and i == j - 1:
                        b.arc(v, u)     # the chain link xd_i -> xa_{i+1}
                    else:
                        b.arc(u, v)


def _butterfly_requests(b, n):
    reqs = []
    for i in range(1, n + 1):
        reqs.append(Request(b[_bname("s", i)], b[_bname("t", i)]))
        reqs.append(Request(b[_bname("sbar", i)], b[_bname("tbar", i)]))
    return reqs


def _all_butterfly_names(n):
    return [_bname(r, i) for i in range(1, n + 1) for r in BUTTERFLY]


def _base_tournament(f: Sat31Instance, reverse_chain=False):
    b = NamedBuilder()
    _butterflies(b, f, reverse_chain)
    n, m = f.n_vars, f.m
    for a in range(1, m + 1):
        b.add(f"p_{a}")
        b.add(f"q_{a}")
    bfly = _all_butterfly_names(n)
    for a in range(1, m + 1):
        p, q = f"p_{a}", f"q_{a}"
        b.arc(q, p)
        lits = {literal_vertex(f, a - 1, v, pos) for v, pos in f.clauses[a - 1]}
        for w in bfly:
            if w in lits:
                b.arc(p, w)
                b.arc(w, q)
            else:
                b.arc(w, p)
                b.arc(q, w)
    clause_vs = [f"p_{a}" for a in range(1, m + 1)] + [f"q_{a}" for a in range(1, m + 1)]
    b.complete_high_to_low(clause_vs)
    reqs = _butterfly_requests(b, n) + [Request(b[f"p_{a}"], b[f"q_{a}"]) for a in range(1, m + 1)]
    return b, reqs


def _critical_names(n):
    seq = []
    for i in range(1, n + 1):
        seq += [_bname(r, i) for r in ("xa", "xb", "xc", "alpha", "xd")]
    return seq


# witness maps ------------------------------------------------------------------

def _butterfly_paths(f, assignment):
    out = {}
    for i in range(1, f.n_vars + 1):
        nm = lambda r: _bname(r, i)
        if assignment[i - 1]:
            out[("s", i)] = [nm("s"), nm("alpha"), nm("t")]
            out[("sbar", i)] = [nm("sbar"), nm("xd"), nm("tbar")]
        else:
            out[("sbar", i)] = [nm("sbar"), nm("alpha"), nm("tbar")]
            out[("s", i)] = [nm("s"), nm("xa"), nm("xb"), nm("xc"), nm("t")]
    return out


def _true_literal(f, a, assignment):
    for v, pos in f.clauses[a]:
        if assignment[v] == pos:
            return literal_vertex(f, a, v, pos)
    raise NotSatisfying(f"clause {a + 1} is not satisfied")


def _forward(art: ReductionArtifact, assignment) -> RoutedSolution:
    f = art.source
    assignment = tuple(bool(x) for x in assignment)
    bad = f.failing_clause(assignment)
    if bad is not None:
        raise NotSatisfying(f"clause {bad + 1} is not satisfied")
    bp = _butterfly_paths(f, assignment)
    inst = art.instance
    names = art.names
    crit = art.extras.get("critical_path")
    paths = []
    for (s, t) in inst.expanded():
        sn, tn = names[s], names[t]
        role, _, i = sn.partition("_")
        if role in ("s", "sbar") and tn.startswith("t"):
            paths.append([art.idx(x) for x in bp[(role, int(i))]])
        elif sn.startswith("p_") or sn == "pstar":
            a = int(tn.split("_")[1]) - 1
            paths.append([s, art.idx(_true_literal(f, a, assignment)), t])
        elif sn == "sstar" and tn == "tstar":
            paths.append(list(crit))
        elif sn == "sstar" and tn == "pstar":
            paths.append(list(crit) + [t])
        elif inst.graph.has_arc(s, t):
            paths.append([s, t])
        else:
            raise AssertionError(f"no rule for request {sn}->{tn}")
    sol = RoutedSolution(paths)
    v = verify_solution(inst, sol)
    if not v.ok:
        raise AssertionError(f"forward map produced an invalid solution: {v}")
    return sol


def _backward(art: ReductionArtifact, sol: RoutedSolution):
    inst = art.instance
    v = verify_solution(inst, sol)
    if not v.ok:
        raise InvalidSolution(str(v))
    sol = minimize(inst, sol)
    f = art.source
    names = art.names
    assignment = [False] * f.n_vars
    for (s, t), p in zip(inst.expanded(), sol.paths):
        role, _, i = names[s].partition("_")
        if role == "sbar" and names[t].startswith("tbar"):
            i = int(i)
            mid = [names[x] for x in p[1:-1]]
            assignment[i - 1] = mid == [_bname("xd", i)]
    assignment = tuple(assignment)
    if not f.satisfied_by(assignment):
        raise InvalidSolution("decoded assignment does not satisfy the formula")
    return assignment


def _artifact(inst, f, tag, b, **extras):
    art = ReductionArtifact(inst, f, tag, list(b.names), extras=extras)
    art.forward = partial(_forward, art)
    art.backward = partial(_backward, art)
    return art


# the reductions -------------------------------------------------------------------

def reduce_sat_to_tournament(f: Sat31Instance) -> ReductionArtifact:
    b, reqs = _base_tournament(f)
    inst = make_instance(b, reqs, 1)
    return _artifact(inst, f, "sat-tournament", b)


def _with_chain_terminals(f):
    """Tournament with the reversed chain arcs plus s* and t*."""
    b, reqs = _base_tournament(f, reverse_chain=True)
    n = f.n_vars
    old = list(range(len(b.names)))
    ss = b.add("sstar")
    tt = b.add("tstar")
    first = b[_bname("xa", 1)]
    last = b[_bname("xd", n)]
    for v in old:
        if v == first:
            b.arc(ss, v)
        else:
            b.arc(v, ss)
        if v == last:
            b.arc(v, tt)
        else:
            b.arc(tt, v)
    b.arc(tt, ss)
    crit = [ss] + [b[x] for x in _critical_names(n)] + [tt]
    return b, reqs, crit


def reduce_restricted(f: Sat31Instance, d: int) -> ReductionArtifact:
    b, reqs, crit = _with_chain_terminals(f)
    K = len(reqs)
    # |K'| = |K| + c and c = |K'| / d give c = |K| / (d - 1)
    if d < 2 or K % (d - 1):
        raise BadRatio(f"|K| = {K} is not divisible by d - 1 = {d - 1}")
    c = K // (d - 1)
    ss, tt = b["sstar"], b["tstar"]
    reqs = list(reqs)
    if c > 1:
        reqs.append(Request(ss, tt, c - 1))
    reqs.append(Request(tt, ss, 1))
    inst = make_instance(b, reqs, c, restricted=True)
    return _artifact(inst, f, "restricted", b, critical_path=crit, d=d)


def epsilon_congestion(x_count: int, eps) -> int:
    """Fixed point of c = ceil(((x_count + 1) * c) ** eps), started from c = 1."""
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    c = 1
    while True:
        K = (x_count + 1) * c
        nxt = _ceil_pow(K, eps)
        if nxt == c:
            return c
        c = nxt


def _ceil_pow(K: int, eps: Fraction) -> int:
    # smallest integer y with y ** q >= K ** p, eps = p / q, done in integers
    p, q = eps.numerator, eps.denominator
    target = K ** p
    y = max(1, int(math.floor(float(K) ** float(eps))) - 1)
    while y ** q < target:
        y += 1
    while y > 1 and (y - 1) ** q >= target:
        y -= 1
    return y


def reduce_epsilon(f: Sat31Instance, epsilon) -> ReductionArtifact:
    b, base_reqs, crit = _with_chain_terminals(f)
    X = len(base_reqs)
    c = epsilon_congestion(X, epsilon)
    ss, tt = b["sstar"], b["tstar"]
    reqs = list(base_reqs)
    if c > 1:
        reqs += [Request(r.t, r.s, c - 1) for r in base_reqs]
        reqs.append(Request(ss, tt, c - 1))
    reqs.append(Request(tt, ss, 1))
    inst = make_instance(b, reqs, c, restricted=False)
    return _artifact(inst, f, "epsilon", b, critical_path=crit, epsilon=Fraction(epsilon), x_count=X)


def reduce_c2(f: Sat31Instance, ratio_d=None) -> ReductionArtifact:
    n, m = f.n_vars, f.m
    b = NamedBuilder()
    _butterflies(b, f, reverse_chain=True)
    bfly = _all_butterfly_names(n)
    tt = b.add("tstar")
    ps = b.add("pstar")
    ss = b.add("sstar")
    qs = [b.add(f"q_{a}") for a in range(1, m + 1)]
    last = b[_bname("xd", n)]
    # second clique: butterflies, t*, p*
    for w in bfly:
        if b[w] == last:
            b.arc(w, tt)
        else:
            b.arc(tt, w)
        b.arc(ps, w)
    b.arc(tt, ps)
    # first clique: s* followed by the subdivision vertices q_1..q_m
    b.arc(ss, qs[0])
    for a in range(m):
        if a + 1 < m:
            b.arc(qs[a], qs[a + 1])
        for a2 in range(a + 2, m):
            b.arc(qs[a2], qs[a])
        if a >= 1:
            b.arc(qs[a], ss)
    # arcs between the cliques
    for a in range(m):
        for v, pos in f.clauses[a]:
            b.arc(literal_vertex(f, a, v, pos), qs[a])
    b.arc(qs[-1], _bname("xa", 1))
    b.arc(tt, ss)
    if ratio_d is None:
        z = 0
    else:
        num = 2 * n + (2 - ratio_d) * m
        den = ratio_d - 1
        if den <= 0 or num < 0 or num % den:
            raise BadRatio(f"padding z = {num}/{den} is not a non-negative integer")
        z = num // den
    c = m + z
    reqs = _butterfly_requests(b, n)
    reqs.append(Request(tt, ss, 1))
    if m > 1:
        reqs.append(Request(ss, tt, m - 1))
    if z:
        reqs.append(Request(ss, ps, z))
    reqs += [Request(ps, q) for q in qs]
    inst = make_instance(b, reqs, c)
    crit = [ss] + qs + [b[x] for x in _critical_names(n)] + [tt]
    part2 = frozenset(b[w] for w in bfly) | {tt, ps}
    part1 = frozenset([ss] + qs)
    return _artifact(inst, f, "c2", b, critical_path=crit, z=z,
                     clique_partition=CliquePartition((part1, part2)))


def sat_solution_from_assignment(art: ReductionArtifact, assignment) -> RoutedSolution:
    return art.forward(assignment)


def sat_assignment_from_solution(art: ReductionArtifact, sol: RoutedSolution):
    return art.backward(sol)
