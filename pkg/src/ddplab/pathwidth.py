"""Directed path decompositions, exact directed pathwidth and a routing DP over a layout.

A layout (vertex ordering) v_1..v_n turns into bags X_i = {v_i} + boundary(S_{i-1}),
S_j being the first j vertices and boundary(S) the vertices of S with an
out-neighbour outside S.  Its width is the largest boundary, and the minimum
over layouts is the directed pathwidth.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Optional, Sequence

from .digraph import Digraph, bits, popcount, to_mask
from .errors import CapExceeded, InvalidDecomposition, ParseError
from .instances import Instance, RoutedSolution, Verdict

EXACT_CAP = 18
STATE_LIMIT = 2_000_000


@dataclass(frozen=True)
class DirectedPathDecomposition:
    bags: tuple

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    def __len__(self):
        return len(self.bags)


def width(dec: DirectedPathDecomposition) -> int:
    if not dec.bags:
        return -1
    return max(len(b) for b in dec.bags) - 1


def validate_decomposition(D: Digraph, dec: DirectedPathDecomposition) -> Verdict:
    """First violated condition (cover, arc, contiguity) with a witness, or ok."""
    first = {}
    last = {}
    for i, bag in enumerate(dec.bags):
        for v in bag:
            if not 0 <= v < D.n:
                return Verdict([f"bag {i} holds unknown vertex {v}"])
            first.setdefault(v, i)
            last[v] = i
    for v in range(D.n):
        if v not in first:
            return Verdict([f"cover: vertex {v} is in no bag"])
    for u, v in D.arcs():
        if last[u] < first[v]:
            return Verdict([f"arc: ({u},{v}) goes from an earlier bag to a later one"])
    for v in range(D.n):
        for i in range(first[v], last[v] + 1):
            if v not in dec.bags[i]:
                return Verdict([f"contiguity: vertex {v} misses bag {i}"])
    return Verdict([])


def boundary(D: Digraph, S: int) -> int:
    out = D.out
    m = 0
    for u in bits(S):
        if out[u] & ~S:
            m |= 1 << u
    return m


def layout_width(D: Digraph, order: Sequence[int]) -> int:
    S = 0
    w = 0
    for v in order:
        w = max(w, popcount(boundary(D, S)))
        S |= 1 << v
    return w


def layout_to_decomposition(D: Digraph, order: Sequence[int]) -> DirectedPathDecomposition:
    bags = []
    S = 0
    for v in order:
        bags.append(frozenset(bits(boundary(D, S))) | {v})
        S |= 1 << v
    return DirectedPathDecomposition(bags)


def decomposition_to_layout(dec: DirectedPathDecomposition) -> list[int]:
    first = {}
    for i, bag in enumerate(dec.bags):
        for v in bag:
            first.setdefault(v, i)
    return sorted(first, key=lambda v: (first[v], v))


def layout_oracle_dpw(D: Digraph) -> int:
    """Brute force over all orderings; only for tiny digraphs."""
    if D.n == 0:
        return -1
    return min(layout_width(D, p) for p in permutations(range(D.n)))


def _layout_within(D: Digraph, w: int):
    """A layout whose every proper prefix has boundary <= w, or None."""
    n = D.n
    full = D.full_mask
    dead = set()
    order: list[int] = []

    def rec(S):
        if S == full:
            return True
        if S in dead:
            return False
        cands = []
        for v in bits(full & ~S):
            S2 = S | (1 << v)
            b = popcount(boundary(D, S2))
            if S2 == full or b <= w:
                cands.append((b, v, S2))
        cands.sort()
        for b, v, S2 in cands:
            order.append(v)
            if rec(S2):
                return True
            order.pop()
        dead.add(S)
        return False

    return order if rec(0) else None


def exact_dpw(D: Digraph, cap: int = EXACT_CAP) -> tuple[int, DirectedPathDecomposition]:
    if D.n > cap:
        raise CapExceeded(f"exact directed pathwidth capped at n <= {cap}, got {D.n}")
    if D.n == 0:
        return -1, DirectedPathDecomposition(())
    for w in range(D.n):
        order = _layout_within(D, w)
        if order is not None:
            dec = layout_to_decomposition(D, order)
            verdict = validate_decomposition(D, dec)
            if not verdict.ok or width(dec) != w:
                raise AssertionError(f"layout conversion broke: {verdict}")
            return w, dec
    raise AssertionError("some layout always exists")


# text format -----------------------------------------------------------------------

def write_decomposition(dec: DirectedPathDecomposition) -> str:
    return "dpd 1\n" + "".join(" ".join(map(str, sorted(b))) + "\n" for b in dec.bags)


def read_decomposition(text: str) -> DirectedPathDecomposition:
    lines = [(i, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines or lines[0][1] != "dpd 1":
        raise ParseError(lines[0][0] if lines else 1, "first line must be 'dpd 1'")
    bags = []
    for i, ln in lines[1:]:
        try:
            bags.append(frozenset(int(x) for x in ln.split()))
        except ValueError:
            raise ParseError(i, "non-integer vertex in bag") from None
    return DirectedPathDecomposition(bags)


# routing DP ------------------------------------------------------------------------
#
# Vertices are placed in layout order.  For every expanded request the state
# keeps the fragments of its path that are already placed.  A fragment with
# first vertex y and last vertex x is summarised by four masks over the
# vertices still to come:
#
#   a  in-neighbours of y (START when y is the source)
#   b  out-neighbours of x (END when x is the target)
#   U  out-neighbours of the fragment's other vertices
#   V  in-neighbours of the fragment's other vertices
#
# Only chordless paths are built: a later vertex z may follow x only if z is
# in b and not in U, and may precede y only if z is in a and not in V.  Any
# solution can be shortened to chordless paths without raising congestion,
# so nothing is lost, and since the rule reads only the masks, fragments
# with equal masks behave identically from here on.  The state keeps the
# sorted multiset of fragment masks per path, and copies of the same request
# are sorted among themselves.

START = -1
END = -1


class _StateLimit(CapExceeded):
    pass


def dp_solve(inst: Instance, dec: DirectedPathDecomposition,
             state_limit: int = STATE_LIMIT) -> Optional[RoutedSolution]:
    D = inst.graph
    verdict = validate_decomposition(D, dec)
    if not verdict.ok:
        raise InvalidDecomposition(str(verdict))
    reqs = inst.expanded()
    k = len(reqs)
    if k == 0:
        return RoutedSolution(())
    c = inst.congestion
    order = decomposition_to_layout(dec)
    terms = inst.terminals() if inst.restricted else set()
    n = D.n
    future_after = [0] * n
    acc = 0
    for i in range(n - 1, -1, -1):
        future_after[i] = acc
        acc |= 1 << order[i]
    groups = _copy_groups(reqs)

    # a state is a tuple (per path) of tuples of fragments (a, b, U, V, seq)
    init = tuple(() for _ in range(k))
    states = {_key(init): init}
    for step, v in enumerate(order):
        fut = future_after[step]
        fin = D.inn[v] & fut
        fout = D.out[v] & fut
        forced = [p for p, (s, t) in enumerate(reqs) if v == s or v == t]
        if len(forced) > c:
            return None
        new_states: dict = {}
        for key in sorted(states):
            st = states[key]
            stay = []
            use = []
            for p in range(k):
                stay.append(None if p in forced else _trim_path(st[p], fut))
                opts = (_trim_path(o, fut) for o in _options(st[p], v, reqs[p], fin, fout, v in terms))
                use.append([o for o in opts if o is not None])
            if any(stay[p] is None and not use[p] for p in range(k)):
                continue
            for combo in _combine(stay, use, c):
                trimmed = _canonical(combo, groups)
                if _complete(trimmed):
                    # every terminal is placed, later vertices can stay unused
                    return RoutedSolution(tuple(fr[0][4] for fr in trimmed))
                nk = _key(trimmed)
                if nk not in new_states:
                    new_states[nk] = trimmed
                    if len(new_states) > state_limit:
                        raise _StateLimit(f"dp state count passed {state_limit}")
        states = new_states
        if not states:
            return None
    return None


def _complete(st):
    return all(len(fr) == 1 and fr[0][0] == START and fr[0][1] == END for fr in st)


def _copy_groups(reqs):
    """Runs of equal requests; expanded() keeps copies adjacent."""
    groups = []
    i = 0
    while i < len(reqs):
        j = i
        while j + 1 < len(reqs) and reqs[j + 1] == reqs[i]:
            j += 1
        if j > i:
            groups.append((i, j + 1))
        i = j + 1
    return groups


def _frag_key(frs):
    return tuple(sorted(f[:4] for f in frs))


def _key(st):
    return tuple(_frag_key(frs) for frs in st)


def _canonical(st, groups):
    if not groups:
        return st
    st = list(st)
    for lo, hi in groups:
        st[lo:hi] = sorted(st[lo:hi], key=_frag_key)
    return tuple(st)


def _options(frags, v, req, fin, fout, v_is_foreign_terminal):
    """Ways path `req` can use vertex v: list of new fragment tuples.

    v may extend a fragment P at its end, a fragment S at its start, both
    (joining them) or neither (a fresh fragment)."""
    s, t = req
    if v_is_foreign_terminal and v not in (s, t):
        return []
    if any(f[0] == START and f[1] == END for f in frags):
        return []              # path already complete
    bit = 1 << v
    preds = [None]
    if v != s:
        preds += [i for i, f in enumerate(frags) if f[1] != END and f[1] & bit and not f[2] & bit]
    succs = [None]
    if v != t:
        succs += [i for i, f in enumerate(frags) if f[0] != START and f[0] & bit and not f[3] & bit]
    out = []
    for pi in preds:
        for si in succs:
            if pi is not None and pi == si:
                continue       # would close a cycle
            U = V = 0
            if pi is None:
                a, pseq = (START if v == s else fin), ()
            else:
                pa, pb, pU, pV, pseq = frags[pi]
                a = pa
                U |= pU | pb
                V |= pV | fin
            if si is None:
                b, sseq = (END if v == t else fout), ()
            else:
                sa, sb, sU, sV, sseq = frags[si]
                b = sb
                U |= fout | sU
                V |= sV | sa
            if a == START:
                V = 0
            if b == END:
                U = 0
            rest = tuple(f for i, f in enumerate(frags) if i != pi and i != si)
            out.append(rest + ((a, b, U, V, pseq + (v,) + sseq),))
    return out


def _combine(stay, use, c):
    """Pick for every path either its unchanged fragments (stay, None when not
    allowed) or one of its ways to use v, with at most c paths using v."""
    k = len(stay)
    cur = [None] * k

    def rec(p, used):
        if p == k:
            yield tuple(cur)
            return
        if stay[p] is not None:
            cur[p] = stay[p]
            yield from rec(p + 1, used)
        if used < c:
            for opt in use[p]:
                cur[p] = opt
                yield from rec(p + 1, used + 1)

    yield from rec(0, 0)


def _trim_path(frs, fut):
    """Restrict masks to the remaining future; None if a fragment is stranded."""
    new = []
    done = False
    for a, b, U, V, seq in frs:
        U &= fut
        V &= fut
        if a != START:
            a &= fut
            if not a & ~V:
                return None
        if b != END:
            b &= fut
            if not b & ~U:
                return None
        if a == START and b == END:
            done = True
        new.append((a, b, U, V, seq))
    if done and len(new) > 1:
        return None
    new.sort(key=lambda f: f[:4] + (f[4],))
    return tuple(new)


def dp_decide(inst: Instance, dec: Optional[DirectedPathDecomposition] = None):
    """Convenience: exact dpw layout (under cap) followed by the DP."""
    if dec is None:
        _, dec = exact_dpw(inst.graph)
    return dp_solve(inst, dec)
