"""Exact (k,c)-DDP oracles.

The search routes one expanded request at a time.  Candidate paths for a
request are produced shortest first (lexicographic inside a length) and only
paths that are inclusion-minimal in the current residual graph are offered:
a path whose vertex set contains the vertex set of an earlier candidate can
always be swapped for that candidate.  Copies of the same request are kept in
nondecreasing (length, tuple) order, and infeasible residual states are
memoized.  None of this changes the answer, it only removes symmetric or
dominated branches; the argument is spelled out in the README.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .digraph import bits, popcount
from .errors import BudgetExceeded, CapExceeded, TerminalVertex
from .instances import Instance, RoutedSolution

INF = float("inf")

ENUM_CAP_N = 40
ENUM_CAP_K = 16


@dataclass(frozen=True)
class SolveMode:
    objective: str = "any"          # any | min_total_length | enumerate_all
    time_limit: Optional[float] = None
    node_limit: Optional[int] = None
    jobs: int = 1

    def __post_init__(self):
        if self.objective not in ("any", "min_total_length", "enumerate_all"):
            raise ValueError(f"unknown objective {self.objective!r}")


ANY = SolveMode("any")
MIN = SolveMode("min_total_length")


def _reverse_dist(inn, t, allowed):
    """dist[v] = arcs on a shortest v->t path whose inner vertices lie in allowed."""
    dist = {t: 0}
    frontier = 1 << t
    seen = frontier
    d = 0
    while frontier:
        d += 1
        nxt = 0
        for v in bits(frontier):
            nxt |= inn[v]
        nxt &= ~seen
        # only allowed vertices may be passed through; record them and continue
        for v in bits(nxt):
            dist[v] = d
        seen |= nxt
        frontier = nxt & allowed
    return dist


def _max_flow_at_least(out, inn, src, sinks, cap, demand):
    """Is there a flow of value >= demand from src to the sinks?

    Vertex capacities cap[v] bound the through-traffic of every vertex other
    than src; sinks maps a target to how many paths may end there.  Unit
    augmenting paths on the split graph, explored with bitmask BFS.
    """
    n = len(out)
    flow = {}                   # (u, v) -> units on arc u->v
    into = [0] * n              # mask of u with positive flow u->v, per v
    through = [0] * n
    ended = {t: 0 for t in sinks}
    value = 0
    while value < demand:
        # BFS states: (v, 0) = v_in, (v, 1) = v_out
        par = {(src, 1): None}
        q = [(src, 1)]
        hit = None
        seen_in = 0
        seen_out = 1 << src
        while q and hit is None:
            nq = []
            for v, side in q:
                if side == 1:
                    for w in bits(out[v] & ~seen_in):
                        seen_in |= 1 << w
                        par[(w, 0)] = (v, 1)
                        nq.append((w, 0))
                    if v != src and through[v] > 0 and not (seen_in >> v & 1):
                        seen_in |= 1 << v
                        par[(v, 0)] = (v, 1)
                        nq.append((v, 0))
                else:
                    if v in ended and ended[v] < sinks[v]:
                        hit = v
                        par[("sink", v)] = (v, 0)
                        break
                    if v != src and through[v] < cap[v] and not (seen_out >> v & 1):
                        seen_out |= 1 << v
                        par[(v, 1)] = (v, 0)
                        nq.append((v, 1))
                    for u in bits(into[v] & ~seen_out):
                        seen_out |= 1 << u
                        par[(u, 1)] = (v, 0)
                        nq.append((u, 1))
            q = nq
        if hit is None:
            return False
        ended[hit] += 1
        node = (hit, 0)
        while par[node] is not None:
            prev = par[node]
            (a, sa), (b, sb) = prev, node
            if a == b:
                through[a] += 1 if sa == 0 else -1
            elif sa == 1 and sb == 0:
                flow[(a, b)] = flow.get((a, b), 0) + 1
                into[b] |= 1 << a
            else:
                # undo flow b->a (moving from a_in back to b_out)
                flow[(b, a)] -= 1
                if flow[(b, a)] == 0:
                    into[a] &= ~(1 << b)
            node = prev
        value += 1
    return True


class _Router:
    def __init__(self, inst: Instance, deadline=None, node_limit=None):
        self.inst = inst
        g = inst.graph
        self.out = g.out
        self.inn = g.inn
        self.n = g.n
        self.c = inst.congestion
        self.reqs = inst.expanded()
        self.deadline = deadline
        self.node_limit = node_limit
        self.nodes = 0
        reserved = [0] * self.n
        for s, t in self.reqs:
            reserved[s] += 1
            reserved[t] += 1
        self.reserved = reserved
        self.term_mask = 0
        for s, t in self.reqs:
            self.term_mask |= (1 << s) | (1 << t)
        self.overfull = any(r > self.c for r in reserved)
        # group identical requests; groups keep the order of first appearance
        groups: dict[tuple[int, int], list[int]] = {}
        for idx, st in enumerate(self.reqs):
            groups.setdefault(st, []).append(idx)
        self.groups = list(groups.items())
        self.used = [0] * self.n

    # -- budget -----------------------------------------------------------
    def tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise BudgetExceeded(f"node budget {self.node_limit} exhausted")
        if self.deadline is not None and (self.nodes & 127) == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded("time budget exhausted")

    # -- residual graph ------------------------------------------------------
    def avail_mask(self):
        m = 0
        c = self.c
        for v in range(self.n):
            if self.reserved[v] + self.used[v] < c:
                m |= 1 << v
        if self.inst.restricted:
            m &= ~self.term_mask
        return m

    def shortest(self, s, t, avail):
        """Vertex count of a shortest s->t path with inner vertices in avail, or INF."""
        if self.out[s] >> t & 1:
            return 2
        allowed = avail & ~(1 << s) & ~(1 << t)
        dist = _reverse_dist(self.inn, t, allowed)
        best = INF
        for w in bits(self.out[s] & allowed):
            if w in dist:
                best = min(best, dist[w] + 2)
        return best

    def paths(self, s, t, avail, keymin=None, maxlen=None, minimal=True):
        """Yield s->t paths in (length, lexicographic) order.

        With minimal=True only chordless paths whose vertex set does not
        contain the set of an earlier yielded path are produced.
        """
        out = self.out
        allowed = avail & ~(1 << s) & ~(1 << t)
        dist = _reverse_dist(self.inn, t, allowed)
        if s not in dist:
            return
        first = dist[s] + 1
        top = popcount(allowed) + 2
        if maxlen is not None:
            top = min(top, maxlen)
        kept: list[int] = []
        tbit = 1 << t
        for L in range(first, top + 1):
            if keymin is not None and L < keymin[0]:
                continue
            cut = [False]
            found = []

            def rec(x, path, visited, chord, rem):
                # rem counts the vertices still to append, t included
                if rem == 1:
                    if not cut[0]:
                        # a longer path could still leave x: try the next length
                        ext = out[x] & allowed & ~visited
                        if minimal:
                            ext &= ~chord
                        if any(w in dist for w in bits(ext)):
                            cut[0] = True
                    if out[x] & tbit and not (minimal and chord & tbit):
                        found_path = tuple(path) + (t,)
                        yield found_path, visited
                    return
                if minimal and (chord | out[x]) & tbit:
                    return
                cand = out[x] & allowed & ~visited
                if minimal:
                    cand &= ~chord
                for w in bits(cand):
                    d = dist.get(w)
                    if d is None:
                        continue
                    if d > rem - 1:
                        cut[0] = True
                        continue
                    nv = visited | (1 << w)
                    if minimal and any(km & ~nv == 0 for km in kept):
                        continue
                    path.append(w)
                    yield from rec(w, path, nv, chord | out[x], rem - 1)
                    path.pop()

            for p, vmask in rec(s, [s], 1 << s, 0, L - 1):
                if keymin is not None and (L, p) < keymin:
                    continue
                if minimal:
                    if any(km & ~vmask == 0 for km in kept):
                        continue
                    kept.append(vmask)
                yield p
            if not cut[0]:
                break

    # -- bookkeeping ---------------------------------------------------------
    def place(self, p, sign):
        for v in p[1:-1]:
            self.used[v] += sign


def _order_groups(r: _Router):
    """Most constrained request groups first (fewest minimal candidates)."""
    avail = r.avail_mask()
    scored = []
    for gi, ((s, t), idxs) in enumerate(r.groups):
        cnt = 0
        for _ in r.paths(s, t, avail):
            cnt += 1
            if cnt >= 64:
                break
        scored.append((cnt, gi))
    scored.sort()
    return [gi for _, gi in scored]


class _Search:
    """Depth-first routing with optional total-length budget."""

    def __init__(self, router: _Router, order, budget=None):
        self.r = router
        self.seq = []            # (group index, copy number)
        for gi in order:
            (s, t), idxs = router.groups[gi]
            for j in range(len(idxs)):
                self.seq.append((gi, j))
        self.budget = budget
        self.memo: dict = {}
        self.chosen: list = [None] * len(self.seq)

    def _key(self, pos):
        r = self.r
        gi, j = self.seq[pos]
        prev = self.chosen[pos - 1] if j > 0 else None
        return (pos, bytes(r.used) if r.c < 256 else tuple(r.used), prev)

    def _lower_bound(self, pos, avail):
        r = self.r
        total = 0
        for q in range(pos, len(self.seq)):
            gi, j = self.seq[q]
            s, t = r.groups[gi][0]
            d = r.shortest(s, t, avail)
            if d == INF:
                return INF
            total += d
        return total

    def _flow_ok(self, pos):
        """Bundle the remaining requests by source and by target; each bundle
        must fit through the residual vertex capacities as a single flow."""
        r = self.r
        c = r.c
        cap = [c - r.reserved[v] - r.used[v] for v in range(r.n)]
        if r.inst.restricted:
            for v in bits(r.term_mask):
                cap[v] = 0
        by_src: dict[int, dict[int, int]] = {}
        by_tgt: dict[int, dict[int, int]] = {}
        for q in range(pos, len(self.seq)):
            s, t = r.groups[self.seq[q][0]][0]
            if r.out[s] >> t & 1:
                continue
            d = by_src.setdefault(s, {})
            d[t] = d.get(t, 0) + 1
            d = by_tgt.setdefault(t, {})
            d[s] = d.get(s, 0) + 1
        for s, sinks in by_src.items():
            need = sum(sinks.values())
            if need >= 2 and not _max_flow_at_least(r.out, r.inn, s, sinks, cap, need):
                return False
        for t, srcs in by_tgt.items():
            need = sum(srcs.values())
            if need >= 2 and not _max_flow_at_least(r.inn, r.out, t, srcs, cap, need):
                return False
        return True

    def run(self, pos=0, spent=0):
        r = self.r
        if pos == len(self.seq):
            return True
        avail = r.avail_mask()
        lb = self._lower_bound(pos, avail)
        if lb == INF:
            return False
        left = None
        if self.budget is not None:
            left = self.budget - spent
            if lb > left:
                return False
        key = self._key(pos)
        seen = self.memo.get(key)
        if seen is None and not self._flow_ok(pos):
            self.memo[key] = INF
            return False
        if seen is not None and (left is None or seen >= left):
            return False
        gi, j = self.seq[pos]
        s, t = r.groups[gi][0]
        keymin = None
        if j > 0:
            prev = self.chosen[pos - 1]
            keymin = (len(prev), prev)
        maxlen = None
        if left is not None:
            own = r.shortest(s, t, avail)
            maxlen = left - (lb - own)
        for p in r.paths(s, t, avail, keymin=keymin, maxlen=maxlen):
            r.tick()
            self.chosen[pos] = p
            r.place(p, 1)
            ok = self.run(pos + 1, spent + len(p))
            r.place(p, -1)
            if ok:
                return True
        self.chosen[pos] = None
        self.memo[key] = INF if left is None else left
        return False

    def solution(self):
        r = self.r
        paths = [None] * len(r.reqs)
        for (gi, j), p in zip(self.seq, self.chosen):
            paths[r.groups[gi][1][j]] = p
        return RoutedSolution(paths)


def _deadline(mode: SolveMode):
    if mode.time_limit is None:
        return None
    return time.monotonic() + mode.time_limit


def _search_any(inst, mode, budget=None, fixed_first=None):
    r = _Router(inst, _deadline(mode), mode.node_limit)
    if r.overfull:
        return None
    order = _order_groups(r)
    srch = _Search(r, order, budget)
    if fixed_first is not None:
        # used by worker processes: the first routed path is given
        p = fixed_first
        srch.chosen[0] = p
        r.place(p, 1)
        spent = len(p)
        if budget is not None and spent > budget:
            return None
        ok = srch.run(1, spent)
    else:
        ok = srch.run()
    return srch.solution() if ok else None


def _root_candidates(inst, budget=None):
    r = _Router(inst)
    if r.overfull:
        return []
    order = _order_groups(r)
    if not order:
        return []
    (s, t), _ = r.groups[order[0]]
    return list(r.paths(s, t, r.avail_mask()))


def _worker(args):
    inst, mode, budget, first = args
    try:
        return ("ok", _search_any(inst, mode, budget, first))
    except BudgetExceeded as e:
        return ("budget", str(e))


def _feasible(inst, mode, budget=None):
    if mode.jobs <= 1 or inst.k == 0:
        return _search_any(inst, mode, budget)
    cands = _root_candidates(inst, budget)
    if not cands:
        return _search_any(inst, mode, budget)
    args = [(inst, mode, budget, p) for p in cands]
    with ProcessPoolExecutor(max_workers=mode.jobs) as ex:
        # results are consumed in candidate order, so the answer does not
        # depend on which worker finishes first
        for status, val in ex.map(_worker, args):
            if status == "budget":
                raise BudgetExceeded(val)
            if val is not None:
                return val
    return None


def solve(inst: Instance, mode: SolveMode = ANY) -> Optional[RoutedSolution]:
    """Exact feasibility / minimum-total-length routing.  None means infeasible."""
    if mode.objective == "enumerate_all":
        sols = enumerate_solutions(inst, mode)
        return sols[0] if sols else None
    if inst.k == 0:
        return RoutedSolution(())
    first = _feasible(inst, mode)
    if first is None or mode.objective == "any":
        return first
    # binary search on the total vertex count
    r = _Router(inst)
    lo = _Search(r, _order_groups(r))._lower_bound(0, r.avail_mask())
    best = first
    hi = first.total_length() - 1
    while lo <= hi:
        mid = (lo + hi) // 2
        sol = _feasible(inst, mode, budget=mid)
        if sol is not None:
            best = sol
            hi = sol.total_length() - 1
        else:
            lo = mid + 1
    return best


def min_total_length(inst: Instance, **kw) -> Optional[RoutedSolution]:
    return solve(inst, SolveMode("min_total_length", **kw))


def is_feasible(inst: Instance, **kw) -> bool:
    return solve(inst, SolveMode("any", **kw)) is not None


def enumerate_solutions(inst: Instance, mode: SolveMode = SolveMode("enumerate_all"),
                        cap_n=ENUM_CAP_N, cap_k=ENUM_CAP_K) -> list[RoutedSolution]:
    """Every solution, with copies of one request listed in nondecreasing
    (length, tuple) order so that each multiset of paths appears once."""
    if inst.n > cap_n or inst.k > cap_k:
        raise CapExceeded(f"enumeration capped at n <= {cap_n}, k <= {cap_k}")
    r = _Router(inst, _deadline(mode), mode.node_limit)
    if r.overfull:
        return []
    seq = []
    for gi, (_, idxs) in enumerate(r.groups):
        seq += [(gi, j) for j in range(len(idxs))]
    chosen = [None] * len(seq)
    found = []
    dead = set()

    def rec(pos):
        if pos == len(seq):
            paths = [None] * len(r.reqs)
            for (gi, j), p in zip(seq, chosen):
                paths[r.groups[gi][1][j]] = p
            found.append(RoutedSolution(paths))
            return True
        gi, j = seq[pos]
        prev = chosen[pos - 1] if j > 0 else None
        key = (pos, tuple(r.used), prev)
        if key in dead:
            return False
        avail = r.avail_mask()
        for q in range(pos, len(seq)):
            s, t = r.groups[seq[q][0]][0]
            if r.shortest(s, t, avail) == INF:
                dead.add(key)
                return False
        s, t = r.groups[gi][0]
        keymin = (len(prev), prev) if prev is not None else None
        any_ok = False
        for p in r.paths(s, t, avail, keymin=keymin, minimal=False):
            r.tick()
            chosen[pos] = p
            r.place(p, 1)
            any_ok |= rec(pos + 1)
            r.place(p, -1)
        chosen[pos] = None
        if not any_ok:
            dead.add(key)
        return any_ok

    rec(0)
    return found


def all_paths(inst: Instance, s: int, t: int, avail_mask: Optional[int] = None) -> list[tuple]:
    """Every simple s->t path whose inner vertices lie in avail_mask."""
    r = _Router(inst)
    if avail_mask is None:
        avail_mask = inst.graph.full_mask
    return list(r.paths(s, t, avail_mask, minimal=False))


# shortcuts and relevance --------------------------------------------------------

def _path_lists(sol: RoutedSolution):
    lists: dict[int, set] = {}
    for i, p in enumerate(sol.paths):
        for v in p:
            lists.setdefault(v, set()).add(i)
    return lists


def find_shortcut(inst: Instance, sol: RoutedSolution, i: int, require_capacity: bool = True):
    """A walk R replacing a subpath R' of path i with |V(R)| < |V(R')|, or None.

    Inner vertices of R must be usable by path i: already on it, or spare
    capacity left (switch that test off with require_capacity=False).  The
    search is a BFS between every pair of positions, so it is exact for walks
    of any length.  Returns (start position, end position, walk).
    """
    p = sol.paths[i]
    g = inst.graph
    lists = _path_lists(sol)
    c = inst.congestion
    terms = inst.terminals() if inst.restricted else set()
    ok_mask = 0
    for v in range(g.n):
        lv = lists.get(v, ())
        if require_capacity and not (i in lv or len(lv) <= c - 1):
            continue
        if v in terms and v not in (p[0], p[-1]):
            continue
        ok_mask |= 1 << v
    L = len(p)
    best = None
    for a in range(L):
        x = p[a]
        # BFS from x over ok vertices; parents for reconstruction
        par = {x: None}
        frontier = [x]
        depth = {x: 0}
        while frontier:
            nxt = []
            for u in frontier:
                for w in bits(g.out[u] & ~0):
                    if w in par:
                        continue
                    par[w] = u
                    depth[w] = depth[u] + 1
                    if ok_mask >> w & 1:
                        nxt.append(w)
            frontier = nxt
        for b in range(a + 2, L):
            y = p[b]
            if y in depth and depth[y] + 1 < b - a + 1:
                walk = [y]
                while walk[-1] != x:
                    walk.append(par[walk[-1]])
                walk.reverse()
                cand = (a, b, tuple(walk))
                if best is None:
                    best = cand
        if best is not None:
            return best
    return None


def apply_shortcut(sol: RoutedSolution, i: int, cut) -> RoutedSolution:
    """Splice a shortcut into path i and drop any cycle the walk created."""
    a, b, walk = cut
    p = sol.paths[i]
    w = list(p[:a]) + list(walk) + list(p[b + 1:])
    # loop erasure keeps the result a path
    out = []
    pos = {}
    for v in w:
        if v in pos:
            del out[pos[v] + 1:]
            pos = {u: k for k, u in enumerate(out)}
        else:
            pos[v] = len(out)
            out.append(v)
    paths = list(sol.paths)
    paths[i] = tuple(out)
    return RoutedSolution(paths)


def minimize(inst: Instance, sol: RoutedSolution) -> RoutedSolution:
    """Apply shortcuts until none is left (a local minimum, not a global one)."""
    changed = True
    while changed:
        changed = False
        for i in range(len(sol.paths)):
            cut = find_shortcut(inst, sol, i)
            if cut is not None:
                sol = apply_shortcut(sol, i, cut)
                changed = True
    return sol


def is_relevant(inst: Instance, v: int, mode: SolveMode = ANY) -> bool:
    if v in inst.terminals():
        raise TerminalVertex(f"vertex {v} is a terminal")
    if solve(inst, mode) is None:
        return False
    smaller, _ = inst.delete_vertices([v])
    return solve(smaller, mode) is None
