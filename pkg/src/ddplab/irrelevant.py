"""Irrelevant vertices inside a large k-triple when 2c > k.

Pipeline for an instance I and a triple K = (A, B, C):

1. Drop triple indices that touch terminals and ignore arcs C->B and B->A
   inside the triple (the masked digraph T').
2. Take a minimum-total-length solution P on T'.
3. Round one picks X within B and edits P into Q so that every path entering
   a vertex of X comes from A.
4. Round two picks a special b in X and edits Q into Q' so that every path
   leaving b goes to C.
5. Every path through b now runs a -> b -> c with a in A, c in C, so b can
   be swapped for an unused vertex of B.  The resulting solution of T' - b is
   returned as a certificate and checked with verify_solution.

When an instance is small enough the exact oracle is also asked whether b
is relevant, and a disagreement raises UnsoundDeletion.

Trace format (one event per line, fields separated by single spaces):

    normalize A=<ids> B=<ids> C=<ids>
    min-solution total=<int>
    round1 branch=<B_empty|gamma> X=<ids>
    gamma arcs=<int> semicomplete=<0|1>
    y0 path=<i> distinguished=<v>,<b> arcs=<v>,<b>;...
    yprime path=<i> distinguished=<b>,<v> arcs=<b>,<v>;...
    edit round=<1|2|final> path=<i> kind=<R|S|swap> old=<ids> new=<ids>
    round2 branch=<S_empty|gamma> special=<b>
    certificate ok=<0|1>
    oracle relevant=<0|1|skipped>

Every <ids> is a comma-separated list of vertex indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional

from .digraph import Digraph, bits, is_semicomplete, popcount, to_mask
from .errors import (CapExceeded, NoFreePairAvailable, PreconditionFailed,
                     TripleTooSmall, UnsoundDeletion)
from .instances import Instance, RoutedSolution, verify_solution
from .pathwidth import EXACT_CAP, STATE_LIMIT, dp_solve, exact_dpw
from .solver import find_shortcut, is_relevant, min_total_length, solve
from .triples import KTriple, iter_triples, validate_triple

ORACLE_CAP_N = 40


# thresholds ----------------------------------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    f: int
    d1: int
    m1: int
    d2: int
    m2: int
    x: int
    h: int = 0

    @classmethod
    def default(cls, k: int, c: int, h: int = 0) -> "Thresholds":
        d2 = 8 * k * (4 * k + 1) + 8 * k + c + h
        m2 = 8 * k + c + h
        x = 2 * d2 * m2
        d1 = 7 * k * (4 * k + 1) + 8 * k + x + h
        m1 = 8 * k + x + h
        f = 3 * (4 * comb(k, c) + 2 * k * (8 * c + 4) + x)
        return cls(f=f, d1=d1, m1=m1, d2=d2, m2=m2, x=x, h=h)

    @classmethod
    def scaled(cls, f=3, d1=1, m1=1, d2=1, m2=1, x=1, h=0) -> "Thresholds":
        """Tiny thresholds for desk-sized instances; soundness then rests on
        the certificate check and the oracle, not on the sizes."""
        return cls(f=f, d1=d1, m1=m1, d2=d2, m2=m2, x=x, h=h)


# occupancy -----------------------------------------------------------------------

@dataclass
class Occupancy:
    lists: dict          # vertex -> frozenset of path indices
    c: int

    def list(self, v) -> frozenset:
        return self.lists.get(v, frozenset())

    def is_free(self, v, i) -> bool:
        lv = self.list(v)
        return i in lv or len(lv) <= self.c - 1

    def groups(self) -> dict:
        """V(L) for every list L that occurs."""
        out: dict = {}
        for v, lv in self.lists.items():
            out.setdefault(lv, set()).add(v)
        return out


def _all_lists(sol: RoutedSolution) -> dict:
    lists: dict = {}
    for i, p in enumerate(sol.paths):
        for v in p:
            lists.setdefault(v, set()).add(i)
    return {v: frozenset(s) for v, s in lists.items()}


def compute_occupancy(sol: RoutedSolution, triple: Optional[KTriple], c: int) -> Occupancy:
    """List(v) for the vertices of the triple (all vertices when triple is None)."""
    lists = _all_lists(sol)
    if triple is not None:
        keep = triple.vertices()
        lists = {v: lv for v, lv in lists.items() if v in keep}
    for v, lv in lists.items():
        assert len(lv) <= c, f"vertex {v} carries {len(lv)} paths"
    return Occupancy(lists, c)


def i_free(occ: Occupancy, v, i) -> bool:
    return occ.is_free(v, i)


def common_index(l1, l2, k) -> int:
    """Two saturated lists share a path index when 2c > k."""
    both = set(l1) & set(l2)
    assert both, f"pigeonhole failed for {sorted(l1)} and {sorted(l2)} with k={k}"
    return min(both)


def find_free_pair(triple: KTriple, occ: Occupancy, i, avoid=()):
    """The lowest-index matched pair (u, Mat(u)) with both ends i-free."""
    avoid = set(avoid)
    for u, a in zip(triple.C, triple.A):
        if u in avoid or a in avoid:
            continue
        if occ.is_free(u, i) and occ.is_free(a, i):
            return u, a
    return None


# normalization -------------------------------------------------------------------

def normalize_triple(triple: KTriple, terminals) -> KTriple:
    """Drop matched pairs and B vertices that are terminals."""
    terminals = set(terminals)
    pairs = [(a, c) for a, c in zip(triple.A, triple.C)
             if a not in terminals and c not in terminals]
    B = tuple(b for b in triple.B if b not in terminals)
    return KTriple(tuple(a for a, _ in pairs), B, tuple(c for _, c in pairs))


def masked_graph(D: Digraph, triple: KTriple) -> Digraph:
    """D without the arcs C->B and B->A of the triple."""
    A, B, C = to_mask(triple.A), to_mask(triple.B), to_mask(triple.C)
    out = list(D.out)
    for v in triple.C:
        out[v] &= ~B
    for v in triple.B:
        out[v] &= ~A
    return Digraph(D.n, out)


def _masked_instance(inst: Instance, triple: KTriple) -> Instance:
    return Instance(masked_graph(inst.graph, triple), inst.requests, inst.congestion,
                    inst.restricted, inst.labels)


# auditing -----------------------------------------------------------------------

@dataclass
class Violation:
    bound: str
    path: Optional[int]
    detail: str
    witness: Optional[tuple] = None       # (path index, (a, b, walk))


@dataclass
class AuditReport:
    max_b_per_path: int = 0
    max_a_per_path: int = 0
    max_c_per_path: int = 0
    max_saturated_group_in_b: int = 0
    ac_bounds_apply: bool = False
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def check_walk(inst: Instance, sol: RoutedSolution, i: int, walk, require_capacity=True):
    """(a, b, walk) if `walk` is a shortcut for path i, else None."""
    p = sol.paths[i]
    pos = {v: j for j, v in enumerate(p)}
    x, y = walk[0], walk[-1]
    if x not in pos or y not in pos or pos[x] >= pos[y]:
        return None
    a, b = pos[x], pos[y]
    if len(walk) >= b - a + 1:
        return None
    g = inst.graph
    if any(not g.has_arc(u, v) for u, v in zip(walk, walk[1:])):
        return None
    lists = _all_lists(sol)
    terms = inst.terminals() if inst.restricted else set()
    for v in walk[1:-1]:
        lv = lists.get(v, frozenset())
        if require_capacity and not (i in lv or len(lv) <= inst.congestion - 1):
            return None
        if v in terms and v not in (p[0], p[-1]):
            return None
    return a, b, tuple(walk)


def _first_witness(inst, sol, i, candidates):
    for walk in candidates:
        cut = check_walk(inst, sol, i, walk)
        if cut is not None:
            return i, cut
    cut = find_shortcut(inst, sol, i)
    return (i, cut) if cut is not None else None


def _pair_walks(p, hits, pairs):
    """Candidate shortcuts around the matched pairs (u, Mat(u)): the long
    detour hits[0] -> u -> Mat(u) -> hits[-1] and its fragments."""
    first, last = hits[0], hits[-1]
    out = []
    for u, a in pairs:
        out += [(first, u, a, last), (u, a), (a, last), (first, u),
                (first, u, a), (u, a, last)]
    return out


def audit_lemma_bounds(inst: Instance, triple: KTriple, sol: RoutedSolution,
                       require_minimal: bool = True) -> AuditReport:
    """Count how paths meet the triple and check the four bounds.

    For every violation a shortcut in the style of the matching proof is
    attempted first (b_1 -> u -> Mat(u) -> b_5 and relatives); the exact
    shortcut search is the fallback.  Witnesses are confirmed by check_walk.
    """
    k, c = inst.k, inst.congestion
    if 2 * c <= k:
        raise PreconditionFailed(f"needs 2c > k, got c={c}, k={k}")
    v = verify_solution(inst, sol)
    if not v.ok:
        raise PreconditionFailed(f"solution does not verify: {v}")
    if require_minimal:
        for i in range(len(sol.paths)):
            if find_shortcut(inst, sol, i) is not None:
                raise PreconditionFailed(f"path {i} has a shortcut, solution is not minimal")
    K = normalize_triple(triple, inst.terminals())
    occ = compute_occupancy(sol, K, c)
    A, B, C = set(K.A), set(K.B), set(K.C)
    rep = AuditReport()
    for i, p in enumerate(sol.paths):
        hb = [v for v in p if v in B]
        ha = [v for v in p if v in A]
        hc = [v for v in p if v in C]
        rep.max_b_per_path = max(rep.max_b_per_path, len(hb))
        rep.max_a_per_path = max(rep.max_a_per_path, len(ha))
        rep.max_c_per_path = max(rep.max_c_per_path, len(hc))
        if len(hb) >= 5:
            pairs = [pr for pr in zip(K.C, K.A) if occ.is_free(pr[0], i) and occ.is_free(pr[1], i)]
            if pairs:
                wit = _first_witness(inst, sol, i, _pair_walks(p, hb[:5], pairs))
                rep.violations.append(Violation(
                    "b_free_pair", i, f"path {i} meets B {len(hb)} times with free pair {pairs[0]}", wit))
            # at most four B vertices per path in any case
            wit = _first_witness(inst, sol, i, _pair_walks(p, hb, pairs))
            rep.violations.append(Violation(
                "b_per_path", i, f"path {i} meets B {len(hb)} times", wit))
    for L, vs in occ.groups().items():
        if len(L) == c:
            inb = sorted(vs & B)
            rep.max_saturated_group_in_b = max(rep.max_saturated_group_in_b, len(inb))
            if len(inb) >= 5:
                wit = None
                for i in sorted(L):
                    wit = _first_witness(inst, sol, i, [])
                    if wit:
                        break
                rep.violations.append(Violation(
                    "list_saturation", None, f"list {sorted(L)} saturates {len(inb)} vertices of B", wit))
    spare_b = [b for b in K.B if len(occ.list(b)) <= c - 1]
    rep.ac_bounds_apply = bool(spare_b)
    if spare_b:
        b0 = spare_b[0]
        mat_inv = dict(zip(K.A, K.C))
        mat = dict(zip(K.C, K.A))
        for i, p in enumerate(sol.paths):
            ha = [v for v in p if v in A]
            if len(ha) >= 8 * c + 5:
                cands = [(ha[0], b0, mat_inv[a], a) for a in ha[4:]]
                rep.violations.append(Violation(
                    "a_per_path", i, f"path {i} meets A {len(ha)} times",
                    _first_witness(inst, sol, i, cands)))
            hc = [v for v in p if v in C]
            if len(hc) >= 8 * c + 5:
                cands = [(u, mat[u], b0, hc[-1]) for u in hc[:-4]]
                rep.violations.append(Violation(
                    "c_per_path", i, f"path {i} meets C {len(hc)} times",
                    _first_witness(inst, sol, i, cands)))
    return rep


# rerouting -----------------------------------------------------------------------

@dataclass
class Edit:
    round: str
    path: int
    kind: str
    old: tuple
    new: tuple


@dataclass
class ReroutePlan:
    solution: RoutedSolution
    X: tuple = ()
    special: Optional[int] = None
    branch: str = ""
    edits: list = field(default_factory=list)
    gamma: Optional[Digraph] = None            # on the index set gamma_vertices
    gamma_vertices: tuple = ()
    matchings: list = field(default_factory=list)   # (path, distinguished arc, arcs)


class _Ctx:
    """Shared state of one pipeline run: masked instance, triple, trace."""

    def __init__(self, inst: Instance, K: KTriple, th: Thresholds, trace=None):
        self.inst = inst
        self.g = inst.graph
        self.K = K
        self.th = th
        self.A = to_mask(K.A)
        self.B = to_mask(K.B)
        self.C = to_mask(K.C)
        self.V_K = self.A | self.B | self.C
        self.terms = to_mask(inst.terminals())
        self.trace = trace if trace is not None else []

    def log(self, line):
        self.trace.append(line)

    # sets R_b / S_b (round one) and R'_b / S'_b (round two)
    def in_split(self, b):
        """(R_b, S_b): in-neighbours outside A with many / few out-neighbours in B."""
        R = S = 0
        for v in bits(self.g.inn[b] & ~self.A):
            if popcount(self.g.out[v] & self.B) >= self.th.m1:
                R |= 1 << v
            else:
                S |= 1 << v
        return R, S

    def out_split(self, b):
        """(R'_b, S'_b): out-neighbours outside C with many / few in-neighbours in B."""
        R = S = 0
        for v in bits(self.g.out[b] & ~self.C):
            if popcount(self.g.inn[v] & self.B) >= self.th.m2:
                R |= 1 << v
            else:
                S |= 1 << v
        return R, S


def _ids(vs):
    return ",".join(map(str, vs))


def _usable(lists, c, v, i, path):
    """v may join path i: not on it already and spare capacity left."""
    return v not in path and len(lists.get(v, ())) <= c - 1


def _free_pair_for(ctx: _Ctx, lists, i, path, avoid=()):
    c = ctx.inst.congestion
    for u, a in zip(ctx.K.C, ctx.K.A):
        if u in avoid or a in avoid:
            continue
        if _usable(lists, c, u, i, path) and _usable(lists, c, a, i, path):
            return u, a
    return None


def _replace(sol: RoutedSolution, i, new_path):
    paths = list(sol.paths)
    paths[i] = tuple(new_path)
    return RoutedSolution(paths)


def _splice(path, pos_from, pos_to, middle):
    """Keep path[..pos_from], insert middle, continue from path[pos_to..]."""
    return tuple(path[:pos_from + 1]) + tuple(middle) + tuple(path[pos_to:])


def _check_edit(ctx: _Ctx, sol: RoutedSolution, what):
    v = verify_solution(ctx.inst, sol)
    if not v.ok:
        raise AssertionError(f"{what} broke the solution: {v}")


def _gamma(ctx: _Ctx, verts, split, forward: bool):
    """Auxiliary digraph on `verts`.  forward=True builds the round-one graph:
    (b, b') when every v in S_b lies in S_b' or has an out-neighbour in S_b'.
    forward=False builds the round-two graph: (b', b) when every v in S'_b
    lies in S'_b' or has an in-neighbour in S'_b'."""
    g = ctx.g
    idx = {b: j for j, b in enumerate(verts)}
    S = {b: split(b)[1] for b in verts}
    arcs = []
    for b in verts:
        for b2 in verts:
            if b == b2:
                continue
            ok = True
            for v in bits(S[b]):
                if S[b2] >> v & 1:
                    continue
                reach = g.out[v] if forward else g.inn[v]
                if not (reach & S[b2]):
                    ok = False
                    break
            if ok:
                arcs.append((idx[b], idx[b2]) if forward else (idx[b2], idx[b]))
    G = Digraph.from_arcs(len(verts), arcs)
    semi = is_semicomplete(G)
    assert semi, "auxiliary digraph is not semicomplete"
    ctx.log(f"gamma arcs={G.num_arcs()} semicomplete={int(semi)}")
    return G, S


def reroute_round1(inst: Instance, triple: KTriple, sol: RoutedSolution, th: Thresholds,
                   trace=None, _ctx=None) -> ReroutePlan:
    """First round: find X in B and reroute every entry into X that does not
    come from A.  `inst` and `triple` are taken as already normalized."""
    ctx = _ctx or _Ctx(inst, triple, th, trace)
    g, c = ctx.g, inst.congestion
    if len(triple.B) < th.x:
        raise TripleTooSmall(f"x: |B|={len(triple.B)} < {th.x}")
    splits = {b: ctx.in_split(b) for b in triple.B}
    B_empty = [b for b in triple.B if splits[b][1] == 0]
    plan = ReroutePlan(sol)
    if len(B_empty) >= th.x:
        plan.branch = "B_empty"
        X = tuple(B_empty[:th.x])
    else:
        plan.branch = "gamma"
        BS = [b for b in triple.B if splits[b][1] != 0]
        G, _ = _gamma(ctx, BS, ctx.in_split, forward=True)
        plan.gamma, plan.gamma_vertices = G, tuple(BS)
        need = th.d1 * th.m1
        X = tuple(b for j, b in enumerate(BS) if popcount(G.out[j]) >= need)[:th.x]
        if len(X) < th.x:
            raise TripleTooSmall(f"x: only {len(X)} vertices of the auxiliary digraph "
                                 f"reach out-degree {need}")
    plan.X = X
    ctx.log(f"round1 branch={plan.branch} X={_ids(X)}")
    Xm = to_mask(X)
    exterior_added = [set() for _ in sol.paths]
    new_b, new_pairs = set(), set()
    P0 = sol
    Q = sol
    for _ in range(4 * len(sol.paths) * max(1, len(X)) + 8):
        bad = None
        for i, p in enumerate(Q.paths):
            for j in range(1, len(p)):
                if Xm >> p[j] & 1 and not (ctx.A >> p[j - 1] & 1):
                    bad = (i, j)
                    break
            if bad:
                break
        if bad is None:
            break
        i, j = bad
        p = Q.paths[i]
        v, b = p[j - 1], p[j]
        lists = _all_lists(Q)
        R, S = splits[b]
        if R >> v & 1:
            cands = [w for w in bits(g.out[v] & ctx.B & ~Xm) if _usable(lists, c, w, i, p)]
            if not cands:
                raise NoFreePairAvailable(f"no usable out-neighbour of {v} in B outside X")
            w = cands[0]
            pair = _free_pair_for(ctx, lists, i, p, avoid={w})
            if pair is None:
                raise NoFreePairAvailable(f"no free pair for path {i}")
            u, a = pair
            new = _splice(p, j - 1, j, (w, u, a))
            kind = "R"
            new_b.add(w)
        else:
            assert S >> v & 1
            if plan.gamma is None:
                raise AssertionError("S_b non-empty inside the B_empty branch")
            Y0 = _build_y0(ctx, plan, v, b, splits)
            plan.matchings.append((i, (v, b), Y0))
            ctx.log(f"y0 path={i} distinguished={v},{b} arcs=" + ";".join(f"{x},{y}" for x, y in Y0))
            choice = None
            for vj, bj in Y0:
                if Xm >> vj & 1 or Xm >> bj & 1:
                    continue
                if ctx.terms >> vj & 1:
                    continue
                if _usable(lists, c, vj, i, p) and _usable(lists, c, bj, i, p):
                    pair = _free_pair_for(ctx, lists, i, p, avoid={vj, bj})
                    if pair is not None:
                        choice = (vj, bj, pair)
                        break
            if choice is None:
                raise TripleTooSmall(f"d1: no usable arc of Y0 for path {i}")
            vj, bj, (u, a) = choice
            new = _splice(p, j - 1, j, (vj, bj, u, a))
            kind = "S"
            new_b.add(bj)
            if not (ctx.V_K >> vj & 1) and vj not in P0.paths[i]:
                exterior_added[i].add(vj)
                if len(exterior_added[i]) > 1:
                    raise TripleTooSmall(f"round 1 property (iii): path {i} needs a second "
                                         "exterior vertex")
        new_pairs.add((u, a))
        Q = _replace(Q, i, new)
        _check_edit(ctx, Q, "round 1 edit")
        plan.edits.append(Edit("1", i, kind, p, new))
        ctx.log(f"edit round=1 path={i} kind={kind} old={_ids(p)} new={_ids(new)}")
    else:
        raise AssertionError("round 1 did not terminate")
    k = len(sol.paths)
    if len(new_b) > 4 * k or len(new_pairs) > 4 * k:
        raise TripleTooSmall("round 1 property (ii): too many new triple vertices")
    _assert_entries_from_A(ctx, Q, Xm)
    plan.solution = Q
    return plan


def _build_y0(ctx: _Ctx, plan: ReroutePlan, v, b, splits):
    """Matching from S-sets into B: arcs (v_j, b_j) with v -> v_j, taken from
    out-neighbours b_j of b in the auxiliary digraph, lowest index first."""
    G, verts = plan.gamma, plan.gamma_vertices
    idx = {x: j for j, x in enumerate(verts)}
    g = ctx.g
    chosen_v = set()
    arcs = []
    for j in bits(G.out[idx[b]]):
        b2 = verts[j]
        S2 = splits[b2][1]
        if S2 >> v & 1:
            continue
        if any(S2 >> u & 1 for u in chosen_v):
            continue
        if b2 == v:
            continue
        opts = [w for w in bits(S2 & g.out[v]) if w not in chosen_v and w not in (v, b)]
        if not opts:
            continue
        arcs.append((opts[0], b2))
        chosen_v.add(opts[0])
    return arcs


def _assert_entries_from_A(ctx, Q, Xm):
    for i, p in enumerate(Q.paths):
        for j in range(1, len(p)):
            if Xm >> p[j] & 1:
                assert ctx.A >> p[j - 1] & 1, f"path {i} enters {p[j]} from {p[j - 1]}"


def reroute_round2(inst: Instance, triple: KTriple, X, Q: RoutedSolution, th: Thresholds,
                   trace=None, _ctx=None) -> ReroutePlan:
    """Second round: pick the special b in X and make every exit from b go to C."""
    ctx = _ctx or _Ctx(inst, triple, th, trace)
    g, c = ctx.g, inst.congestion
    X = tuple(X)
    if not X:
        raise TripleTooSmall("x: X is empty")
    splits = {b: ctx.out_split(b) for b in triple.B}
    plan = ReroutePlan(Q, X=X)
    empty = [b for b in X if splits[b][1] == 0]
    if empty:
        plan.branch = "S_empty"
        b = empty[0]
    else:
        plan.branch = "gamma"
        G, _ = _gamma(ctx, list(X), ctx.out_split, forward=False)
        plan.gamma, plan.gamma_vertices = G, X
        need = th.d2 * th.m2
        best = [b for j, b in enumerate(X) if popcount(G.inn[j]) >= need]
        if not best:
            raise TripleTooSmall(f"d2*m2: no vertex of X reaches in-degree {need}")
        b = best[0]
    plan.special = b
    ctx.log(f"round2 branch={plan.branch} special={b}")
    Xm = to_mask(X)
    new_b, new_pairs = set(), set()
    for i in range(len(Q.paths)):
        p = Q.paths[i]
        if b not in p:
            continue
        j = p.index(b)
        v = p[j + 1]
        if ctx.C >> v & 1:
            continue
        lists = _all_lists(Q)
        R, S = splits[b]
        if R >> v & 1:
            cands = [b1 for b1 in bits(g.inn[v] & ctx.B)
                     if b1 != b and _usable(lists, c, b1, i, p)]
            if not cands:
                raise NoFreePairAvailable(f"no usable in-neighbour of {v} in B")
            b1 = cands[0]
            pair = _free_pair_for(ctx, lists, i, p, avoid={b1})
            if pair is None:
                raise NoFreePairAvailable(f"no free pair for path {i}")
            u, a = pair
            new = _splice(p, j, j + 1, (u, a, b1))
            kind = "R"
            new_b.add(b1)
        else:
            Yp = _build_y_prime(ctx, plan, v, b, splits)
            plan.matchings.append((i, (b, v), Yp))
            ctx.log(f"yprime path={i} distinguished={b},{v} arcs=" + ";".join(f"{x},{y}" for x, y in Yp))
            choice = None
            for bj, vj in Yp:
                if bj == b or ctx.terms >> vj & 1:
                    continue
                if _usable(lists, c, vj, i, p) and _usable(lists, c, bj, i, p):
                    pair = _free_pair_for(ctx, lists, i, p, avoid={vj, bj})
                    if pair is not None:
                        choice = (bj, vj, pair)
                        break
            if choice is None:
                raise TripleTooSmall(f"d2: no usable arc of Y' for path {i}")
            bj, vj, (u, a) = choice
            new = _splice(p, j, j + 1, (u, a, bj, vj))
            kind = "S"
            new_b.add(bj)
        new_pairs.add((u, a))
        Q = _replace(Q, i, new)
        _check_edit(ctx, Q, "round 2 edit")
        plan.edits.append(Edit("2", i, kind, p, new))
        ctx.log(f"edit round=2 path={i} kind={kind} old={_ids(p)} new={_ids(new)}")
    if len(new_b) > c or len(new_pairs) > c:
        raise TripleTooSmall("round 2 property (b): too many new triple vertices")
    for i, p in enumerate(Q.paths):
        if b in p:
            j = p.index(b)
            assert ctx.C >> p[j + 1] & 1, f"path {i} leaves {b} to {p[j + 1]}"
    _assert_entries_from_A(ctx, Q, Xm)
    plan.solution = Q
    return plan


def _build_y_prime(ctx: _Ctx, plan: ReroutePlan, v, b, splits):
    """Matching from B into S'-sets: arcs (b_j, v_j) with v_j -> v, taken from
    in-neighbours b_j of b in the round-two auxiliary digraph."""
    G, verts = plan.gamma, plan.gamma_vertices
    if G is None:
        return []
    idx = {x: j for j, x in enumerate(verts)}
    g = ctx.g
    chosen_v = set()
    arcs = []
    for j in bits(G.inn[idx[b]]):
        b2 = verts[j]
        S2 = splits[b2][1]
        if S2 >> v & 1:
            continue
        if any(S2 >> u & 1 for u in chosen_v):
            continue
        if b2 == v:
            continue
        opts = [w for w in bits(S2 & g.inn[v]) if w not in chosen_v and w not in (v, b)]
        if not opts:
            continue
        arcs.append((b2, opts[0]))
        chosen_v.add(opts[0])
    return arcs


def _final_swap(ctx: _Ctx, Q: RoutedSolution, b):
    """Route every path a -> b -> u through an unused b' of B instead."""
    c = ctx.inst.congestion
    for i in range(len(Q.paths)):
        p = Q.paths[i]
        if b not in p:
            continue
        j = p.index(b)
        lists = _all_lists(Q)
        cands = [b2 for b2 in ctx.K.B if b2 != b and _usable(lists, c, b2, i, p)]
        if not cands:
            raise TripleTooSmall(f"final step: no spare vertex of B for path {i}")
        b2 = cands[0]
        new = p[:j] + (b2,) + p[j + 1:]
        Q = _replace(Q, i, new)
        ctx.log(f"edit round=final path={i} kind=swap old={_ids(p)} new={_ids(new)}")
    return Q


# pipeline ------------------------------------------------------------------------

@dataclass
class IrrelevantResult:
    vertex: int
    reason: str                       # "infeasible" or "rerouted"
    triple: KTriple                   # after normalization
    round1: Optional[ReroutePlan] = None
    round2: Optional[ReroutePlan] = None
    certificate: Optional[RoutedSolution] = None   # avoids vertex, original labels
    oracle_checked: bool = False
    trace: list = field(default_factory=list)


def find_irrelevant_vertex(inst: Instance, triple: KTriple, th: Thresholds,
                           oracle: bool = True, oracle_cap: int = ORACLE_CAP_N) -> IrrelevantResult:
    k, c = inst.k, inst.congestion
    if 2 * c <= k:
        raise PreconditionFailed(f"needs 2c > k, got c={c}, k={k}")
    v = validate_triple(inst.graph, triple)
    if not v.ok:
        raise PreconditionFailed(f"not a triple of this digraph: {v}")
    K = normalize_triple(triple, inst.terminals())
    trace = [f"normalize A={_ids(K.A)} B={_ids(K.B)} C={_ids(K.C)}"]
    if len(K.B) < th.x or not K.B:
        raise TripleTooSmall(f"x: normalized |B|={len(K.B)} < {max(1, th.x)}")
    masked = _masked_instance(inst, K)
    P = min_total_length(masked)
    if P is None:
        if solve(inst) is not None:
            raise TripleTooSmall("masking the triple arcs C->B and B->A loses every solution")
        b = min(K.B)
        trace.append("min-solution total=none")
        res = IrrelevantResult(b, "infeasible", K, trace=trace)
    else:
        trace.append(f"min-solution total={P.total_length()}")
        ctx = _Ctx(masked, K, th, trace)
        r1 = reroute_round1(masked, K, P, th, _ctx=ctx)
        r2 = reroute_round2(masked, K, r1.X, r1.solution, th, _ctx=ctx)
        b = r2.special
        cert = _final_swap(ctx, r2.solution, b)
        assert all(b not in p for p in cert.paths)
        ok = verify_solution(masked, cert).ok
        trace.append(f"certificate ok={int(ok)}")
        if not ok:
            raise AssertionError("final certificate does not verify")
        res = IrrelevantResult(b, "rerouted", K, r1, r2, cert, trace=trace)
    if oracle and inst.n <= oracle_cap:
        rel = is_relevant(inst, res.vertex)
        trace.append(f"oracle relevant={int(rel)}")
        if rel:
            raise UnsoundDeletion(f"vertex {res.vertex} was selected but the oracle says it is relevant")
        res.oracle_checked = True
    else:
        trace.append("oracle relevant=skipped")
    return res


@dataclass
class WinWinRun:
    solution: Optional[RoutedSolution]
    deleted: list                    # original vertex indices, in deletion order
    width: int
    trace: list = field(default_factory=list)


def winwin_run(inst: Instance, th: Thresholds, dpw_cap: int = EXACT_CAP,
               oracle: bool = True, max_triples: int = 50,
               state_limit: int = STATE_LIMIT) -> WinWinRun:
    """Delete irrelevant vertices while a triple of order th.f exists among
    the non-terminals, then solve by the decomposition DP."""
    k, c = inst.k, inst.congestion
    if 2 * c <= k:
        raise PreconditionFailed(f"needs 2c > k, got c={c}, k={k}")
    cur = inst
    keep = list(range(inst.n))
    deleted = []
    trace = []
    while True:
        terms = cur.terminals()
        free = [v for v in range(cur.n) if v not in terms]
        if len(free) < 3 * th.f:
            break
        sub, back = cur.graph.induced(free)
        res = None
        tried = 0
        for t in iter_triples(sub, th.f):
            tried += 1
            if tried > max_triples:
                break
            t = KTriple(tuple(back[x] for x in t.A), tuple(back[x] for x in t.B),
                        tuple(back[x] for x in t.C))
            trace.append(f"triple A={_ids(t.A)} B={_ids(t.B)} C={_ids(t.C)}")
            try:
                res = find_irrelevant_vertex(cur, t, th, oracle=oracle)
                break
            except (TripleTooSmall, NoFreePairAvailable) as e:
                trace.append(f"skip reason={type(e).__name__}")
        if res is None:
            trace.append("triple none" if tried == 0 else "stop no usable triple")
            break
        trace.extend(res.trace)
        deleted.append(keep[res.vertex])
        trace.append(f"delete vertex={keep[res.vertex]}")
        cur, kept = cur.delete_vertices([res.vertex])
        keep = [keep[x] for x in kept]
    if cur.n > dpw_cap:
        raise CapExceeded(f"{cur.n} vertices left and no usable triple; exact pathwidth capped at {dpw_cap}")
    w, dec = exact_dpw(cur.graph, cap=dpw_cap)
    trace.append(f"dpw width={w} vertices={cur.n}")
    sol = dp_solve(cur, dec, state_limit=state_limit)
    if sol is not None:
        sol = sol.relabel(keep)
    return WinWinRun(sol, deleted, w, trace)


def winwin_solve(inst: Instance, th: Thresholds, **kw) -> Optional[RoutedSolution]:
    return winwin_run(inst, th, **kw).solution
