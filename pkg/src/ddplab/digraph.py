"""Bitmask digraphs and the class predicates (tournament, semicomplete, ...).

Vertices are the integers 0..n-1.  Every vertex keeps an out-mask and an
in-mask (python ints used as bitsets), which is what the search code in the
other modules leans on.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapExceeded

EXACT_CAP = 20


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


class Digraph:
    """Immutable simple digraph on vertices 0..n-1."""

    __slots__ = ("n", "out", "inn", "_hash")

    def __init__(self, n: int, out: Iterable[int]):
        out = tuple(out)
        if len(out) != n:
            raise ValueError("need one out-mask per vertex")
        inn = [0] * n
        full = (1 << n) - 1
        for u, m in enumerate(out):
            if m >> u & 1:
                raise ValueError(f"loop at vertex {u}")
            if m & ~full:
                raise ValueError(f"arc out of range at vertex {u}")
            for v in bits(m):
                inn[v] |= 1 << u
        self.n = n
        self.out = out
        self.inn = tuple(inn)
        self._hash = None

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        out = [0] * n
        for u, v in arcs:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc ({u},{v}) out of range")
            out[u] |= 1 << v
        return cls(n, out)

    @classmethod
    def empty(cls, n: int) -> "Digraph":
        return cls(n, [0] * n)

    # basic queries -------------------------------------------------------
    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.out[u] >> v & 1)

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.out[u] | self.inn[u]) >> v & 1)

    def out_neighbors(self, v: int) -> list[int]:
        return list(bits(self.out[v]))

    def in_neighbors(self, v: int) -> list[int]:
        return list(bits(self.inn[v]))

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.out[u])]

    def num_arcs(self) -> int:
        return sum(popcount(m) for m in self.out)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def delete_vertices(self, dead: Iterable[int]) -> tuple["Digraph", list[int]]:
        """Return the digraph without ``dead`` and the list new index -> old index."""
        dead = set(dead)
        keep = [v for v in range(self.n) if v not in dead]
        pos = {v: i for i, v in enumerate(keep)}
        arcs = [(pos[u], pos[v]) for u, v in self.arcs() if u in pos and v in pos]
        return Digraph.from_arcs(len(keep), arcs), keep

    def induced(self, vs: Iterable[int]) -> tuple["Digraph", list[int]]:
        vs = set(vs)
        return self.delete_vertices(v for v in range(self.n) if v not in vs)

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.out == other.out

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.out))
        return self._hash

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={self.num_arcs()})"


# class predicates ---------------------------------------------------------

def is_tournament(D: Digraph) -> bool:
    full = D.full_mask
    for v in range(D.n):
        if D.out[v] & D.inn[v]:
            return False
        if (D.out[v] | D.inn[v] | (1 << v)) != full:
            return False
    return True


def is_semicomplete(D: Digraph) -> bool:
    full = D.full_mask
    return all((D.out[v] | D.inn[v] | (1 << v)) == full for v in range(D.n))


def non_neighbors(D: Digraph, v: int) -> int:
    """Mask of vertices other than v with no arc to or from v."""
    return D.full_mask & ~(D.out[v] | D.inn[v] | (1 << v))


def h_semicompleteness(D: Digraph) -> int:
    if D.n == 0:
        return 0
    return max(popcount(non_neighbors(D, v)) for v in range(D.n))


@dataclass(frozen=True)
class CliquePartition:
    parts: tuple[frozenset, ...]

    def __len__(self):
        return len(self.parts)


def verify_clique_partition(D: Digraph, cp: CliquePartition) -> bool:
    seen = set()
    for part in cp.parts:
        if not part or seen & part:
            return False
        seen |= part
        m = to_mask(part)
        for v in part:
            if (m & ~(1 << v)) & ~(D.out[v] | D.inn[v]):
                return False
    return seen == set(range(D.n))


def _undirected(D: Digraph) -> list[int]:
    return [D.out[v] | D.inn[v] for v in range(D.n)]


def clique_cover_number(D: Digraph, cap: int = EXACT_CAP) -> tuple[int, CliquePartition]:
    """Minimum number of cliques partitioning V(D), with a witness.

    Backtracking over "put vertex into an existing part or open a new one",
    trying h = 1, 2, ... in turn.
    """
    n = D.n
    if n > cap:
        raise CapExceeded(f"clique cover search capped at n <= {cap}, got {n}")
    if n == 0:
        return 0, CliquePartition(())
    adj = _undirected(D)
    # high-degree vertices are the most constrained in the complement
    order = sorted(range(n), key=lambda v: (popcount(adj[v]), v))

    def attempt(h):
        parts: list[int] = []

        def rec(idx):
            if idx == n:
                return True
            v = order[idx]
            for j, pm in enumerate(parts):
                if pm & ~adj[v] == 0:
                    parts[j] = pm | (1 << v)
                    if rec(idx + 1):
                        return True
                    parts[j] = pm
            if len(parts) < h:
                parts.append(1 << v)
                if rec(idx + 1):
                    return True
                parts.pop()
            return False

        return parts if rec(0) else None

    for h in range(1, n + 1):
        found = attempt(h)
        if found is not None:
            cp = CliquePartition(tuple(frozenset(bits(m)) for m in found))
            return h, cp
    raise AssertionError("singletons always work")


def independence_number(D: Digraph, cap: int = EXACT_CAP) -> int:
    """Largest set of pairwise non-adjacent vertices (max clique of the complement)."""
    n = D.n
    if n > cap:
        raise CapExceeded(f"independence search capped at n <= {cap}, got {n}")
    full = D.full_mask
    comp = [full & ~(D.out[v] | D.inn[v] | (1 << v)) for v in range(n)]
    best = 0

    def expand(size, cand):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + popcount(cand) <= best:
            return
        while cand:
            if size + popcount(cand) <= best:
                return
            v = cand.bit_length() - 1
            cand &= ~(1 << v)
            expand(size + 1, cand & comp[v])

    expand(0, full)
    return best
