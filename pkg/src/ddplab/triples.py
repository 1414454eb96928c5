"""k-triples (A, B, C): A complete to B, B complete to C, matching arcs c_i -> a_i."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import networkx as nx

from .digraph import Digraph, bits, popcount, to_mask
from .errors import ParseError
from .instances import Verdict, make_rng

EXACT_CAP_N = 16
EXACT_CAP_K = 4


@dataclass(frozen=True)
class KTriple:
    A: tuple
    B: tuple
    C: tuple

    def __post_init__(self):
        for nm in ("A", "B", "C"):
            object.__setattr__(self, nm, tuple(int(x) for x in getattr(self, nm)))

    @property
    def k(self):
        return len(self.A)

    def mat(self, u):
        """Mat(u) for u in C."""
        return self.A[self.C.index(u)]

    def vertices(self):
        return set(self.A) | set(self.B) | set(self.C)


def validate_triple(D: Digraph, t: KTriple) -> Verdict:
    if not (len(t.A) == len(t.B) == len(t.C)):
        return Verdict([f"sizes differ: |A|={len(t.A)} |B|={len(t.B)} |C|={len(t.C)}"])
    sets = [set(t.A), set(t.B), set(t.C)]
    if any(len(s) != len(t.A) for s in sets):
        return Verdict(["a side repeats a vertex"])
    for (x, sx), (y, sy) in combinations(zip("ABC", sets), 2):
        common = sx & sy
        if common:
            return Verdict([f"{x} and {y} share vertex {min(common)}"])
    for a in t.A:
        for b in t.B:
            if not D.has_arc(a, b):
                return Verdict([f"missing arc ({a},{b}) from A to B"])
    for b in t.B:
        for c in t.C:
            if not D.has_arc(b, c):
                return Verdict([f"missing arc ({b},{c}) from B to C"])
    for c, a in zip(t.C, t.A):
        if not D.has_arc(c, a):
            return Verdict([f"missing matching arc ({c},{a})"])
    return Verdict([])


def _matching_for(D: Digraph, acand: int, ccand: int, k: int):
    """k disjoint arcs c->a with c in ccand, a in acand; a vertex in both
    candidate sets plays one role only.  General matching on the underlying
    graph, each edge remembering an orientation that works."""
    G = nx.Graph()
    orient = {}
    for c in bits(ccand):
        for a in bits(D.out[c] & acand):
            e = (min(a, c), max(a, c))
            if e not in orient:
                orient[e] = (c, a)
                G.add_edge(*e)
    if G.number_of_edges() == 0:
        return None
    M = nx.max_weight_matching(G, maxcardinality=True)
    if len(M) < k:
        return None
    pairs = sorted(orient[(min(x, y), max(x, y))] for x, y in M)[:k]
    return pairs


def iter_triples(D: Digraph, k: int, exact_cap_n=EXACT_CAP_N, exact_cap_k=EXACT_CAP_K,
                 max_b_sets=20000):
    """Yield k-triples, at most one per candidate B set.  Every B set is tried
    when n and k are under the caps; above them only the first max_b_sets
    candidate B sets in the heuristic order are looked at."""
    n = D.n
    if k <= 0 or 3 * k > n:
        return
    exact = n <= exact_cap_n and k <= exact_cap_k
    full = D.full_mask
    # B sets: every b needs k in-neighbours and k out-neighbours
    ok_b = [v for v in range(n) if popcount(D.inn[v]) >= k and popcount(D.out[v]) >= k]
    ok_b.sort(key=lambda v: (popcount(D.out[v]), v))
    for tried, B in enumerate(combinations(ok_b, k), 1):
        if not exact and tried > max_b_sets:
            return
        bm = to_mask(B)
        acand = full & ~bm
        ccand = full & ~bm
        for b in B:
            acand &= D.inn[b]
            ccand &= D.out[b]
        if popcount(acand) < k or popcount(ccand) < k:
            continue
        if popcount(acand | ccand) < 2 * k:
            continue
        pairs = _matching_for(D, acand, ccand, k)
        if pairs is None:
            continue
        t = KTriple(tuple(a for _, a in pairs), tuple(B), tuple(c for c, _ in pairs))
        assert validate_triple(D, t).ok
        yield t


def find_triple(D: Digraph, k: int, **kw) -> Optional[KTriple]:
    """The first triple of iter_triples, or None."""
    return next(iter_triples(D, k, **kw), None)


def plant_triple(k: int, padding: int, seed, digon_rate: float = 0.0):
    """Semicomplete digraph on 3k+padding vertices with a planted k-triple."""
    if k < 1 or padding < 0:
        raise ValueError("need k >= 1 and padding >= 0")
    rng = make_rng(seed)
    n = 3 * k + padding
    perm = [int(x) for x in rng.permutation(n)]
    A, B, C = perm[:k], perm[k:2 * k], perm[2 * k:3 * k]
    forced = set()
    forced |= {(a, b) for a in A for b in B}
    forced |= {(b, c) for b in B for c in C}
    forced |= {(c, a) for c, a in zip(C, A)}
    arcs = set(forced)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) in forced or (v, u) in forced:
                if rng.random() < digon_rate:
                    arcs |= {(u, v), (v, u)}
                continue
            r = rng.random()
            if r < digon_rate:
                arcs |= {(u, v), (v, u)}
            elif rng.random() < 0.5:
                arcs.add((u, v))
            else:
                arcs.add((v, u))
    D = Digraph.from_arcs(n, arcs)
    t = KTriple(tuple(A), tuple(B), tuple(C))
    assert validate_triple(D, t).ok
    return D, t


def counterexample_triple(n: int) -> KTriple:
    """The n-triple inside one copy of the counterexample digraph T_n:
    A = v_1..v_n, B = u_{n+3}..u_{2n+2}, C = u_1..u_n with u_i matched to v_i."""
    L = 2 * n + 2
    u = lambda i: i - 1
    v = lambda i: L + i - 1
    return KTriple(tuple(v(i) for i in range(1, n + 1)),
                   tuple(u(i) for i in range(n + 3, L + 1)),
                   tuple(u(i) for i in range(1, n + 1)))


def write_triple(t: KTriple) -> str:
    return "ktriple 1\n" + "\n".join(" ".join(map(str, side)) for side in (t.A, t.B, t.C)) + "\n"


def read_triple(text: str) -> KTriple:
    rows = [(i, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    rows = [(i, ln) for i, ln in rows if ln or i > 1]
    if not rows or rows[0][1] != "ktriple 1":
        raise ParseError(rows[0][0] if rows else 1, "first line must be 'ktriple 1'")
    body = rows[1:4]
    if len(body) != 3 or any(ln for _, ln in rows[4:]):
        raise ParseError(rows[-1][0], "expected exactly three lines A, B, C")
    try:
        A, B, C = (tuple(int(x) for x in ln.split()) for _, ln in body)
    except ValueError:
        raise ParseError(body[0][0], "non-integer vertex") from None
    return KTriple(A, B, C)
