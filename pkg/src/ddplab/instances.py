"""The (k,c)-DDP instance object, text formats, solution checking and generators."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .digraph import Digraph
from .errors import ArityMismatch, ParseError


def make_rng(seed) -> np.random.Generator:
    """Every random choice in the package goes through numpy's PCG64."""
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class Request:
    s: int
    t: int
    multiplicity: int = 1

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError(f"request endpoints coincide ({self.s})")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


@dataclass(frozen=True)
class Instance:
    graph: Digraph
    requests: tuple = ()
    congestion: int = 1
    restricted: bool = False
    labels: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "requests", tuple(self.requests))
        if self.congestion < 1:
            raise ValueError("congestion must be at least 1")
        n = self.graph.n
        for r in self.requests:
            if not (0 <= r.s < n and 0 <= r.t < n):
                raise ValueError(f"request {r} out of range")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self):
        return self.graph.n

    @property
    def k(self):
        return sum(r.multiplicity for r in self.requests)

    @property
    def c(self):
        return self.congestion

    def expanded(self) -> list[tuple[int, int]]:
        out = []
        for r in self.requests:
            out.extend([(r.s, r.t)] * r.multiplicity)
        return out

    def terminals(self) -> set[int]:
        ts = set()
        for r in self.requests:
            ts.add(r.s)
            ts.add(r.t)
        return ts

    def label(self, v: int) -> str:
        if self.labels is not None and self.labels[v]:
            return self.labels[v]
        return str(v)

    def index_of(self, name: str) -> int:
        return self.labels.index(name)

    def delete_vertices(self, dead: Iterable[int]) -> tuple["Instance", list[int]]:
        """Remove non-terminal vertices; returns (instance, new -> old index map)."""
        dead = set(dead)
        if dead & self.terminals():
            raise ValueError("cannot delete a terminal vertex")
        g, keep = self.graph.delete_vertices(dead)
        pos = {v: i for i, v in enumerate(keep)}
        reqs = [Request(pos[r.s], pos[r.t], r.multiplicity) for r in self.requests]
        labels = None
        if self.labels is not None:
            labels = [self.labels[v] for v in keep]
        return Instance(g, reqs, self.congestion, self.restricted, labels), keep

    def with_congestion(self, c: int) -> "Instance":
        return Instance(self.graph, self.requests, c, self.restricted, self.labels)


@dataclass(frozen=True)
class RoutedSolution:
    paths: tuple

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(p) for p in self.paths))

    @property
    def occupancy(self) -> Counter:
        occ = Counter()
        for p in self.paths:
            for v in set(p):
                occ[v] += 1
        return occ

    def total_length(self) -> int:
        return sum(len(p) for p in self.paths)

    def relabel(self, mapping: Sequence[int]) -> "RoutedSolution":
        return RoutedSolution(tuple(mapping[v] for v in p) for p in self.paths)


@dataclass
class Verdict:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "ok" if self.ok else "; ".join(self.violations)


def verify_solution(inst: Instance, sol: RoutedSolution) -> Verdict:
    reqs = inst.expanded()
    if len(sol.paths) != len(reqs):
        raise ArityMismatch(f"expected {len(reqs)} paths, got {len(sol.paths)}")
    bad = []
    g = inst.graph
    terms = inst.terminals()
    for i, ((s, t), p) in enumerate(zip(reqs, sol.paths)):
        if len(p) < 2:
            bad.append(f"path {i} too short")
            continue
        if any(not (0 <= v < g.n) for v in p):
            bad.append(f"path {i} leaves the vertex range")
            continue
        if p[0] != s or p[-1] != t:
            bad.append(f"path {i} joins {p[0]}->{p[-1]}, request is {s}->{t}")
        if len(set(p)) != len(p):
            bad.append(f"path {i} repeats a vertex")
        for u, v in zip(p, p[1:]):
            if not g.has_arc(u, v):
                bad.append(f"path {i} uses missing arc ({u},{v})")
        if inst.restricted:
            for v in p[1:-1]:
                if v in terms:
                    bad.append(f"path {i} uses terminal {v} as an inner vertex")
    for v, cnt in sorted(sol.occupancy.items()):
        if cnt > inst.congestion:
            bad.append(f"vertex {v} used by {cnt} paths, congestion is {inst.congestion}")
    return Verdict(bad)


# generators -----------------------------------------------------------------

def random_tournament(n: int, seed) -> Digraph:
    return random_semicomplete(n, 0.0, seed)


def random_semicomplete(n: int, digon_rate: float, seed) -> Digraph:
    if not 0 <= digon_rate <= 1:
        raise ValueError("digon_rate must lie in [0, 1]")
    rng = make_rng(seed)
    arcs = []
    for u in range(n):
        for v in range(u + 1, n):
            flip = rng.random() < 0.5
            both = rng.random() < digon_rate
            if both:
                arcs += [(u, v), (v, u)]
            else:
                arcs.append((v, u) if flip else (u, v))
    return Digraph.from_arcs(n, arcs)


def random_digraph(n: int, p: float, seed) -> Digraph:
    """Each ordered pair becomes an arc independently with probability p."""
    rng = make_rng(seed)
    arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return Digraph.from_arcs(n, arcs)


def random_instance(n, k, c, seed, digon_rate=0.0) -> Instance:
    rng = make_rng(seed)
    g = random_semicomplete(n, digon_rate, rng.integers(1 << 62))
    reqs = []
    for _ in range(k):
        s, t = (int(x) for x in rng.choice(n, size=2, replace=False))
        reqs.append(Request(s, t))
    return Instance(g, reqs, c)


# the counterexample family ---------------------------------------------------

def _tn_arcs(n: int, off: int):
    """Arcs of one copy of T_n, vertices u_1..u_{2n+2} then v_1..v_{2n+2}."""
    L = 2 * n + 2
    u = lambda i: off + i - 1
    v = lambda i: off + L + i - 1
    arcs = []
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            if j == i + 1:
                arcs.append((u(i), u(j)))      # P_u runs upward
                arcs.append((v(j), v(i)))      # P_v runs downward
            else:
                arcs.append((u(j), u(i)))
                arcs.append((v(i), v(j)))
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            arcs.append((u(i), v(i)) if i == j else (v(j), u(i)))
    return arcs, u, v


def counterexample_labels(n: int, tau: int = 1) -> list[str]:
    L = 2 * n + 2
    labels = []
    for cp in range(tau):
        suffix = "" if tau == 1 else f"@{cp + 1}"
        labels += [f"u{i}{suffix}" for i in range(1, L + 1)]
        labels += [f"v{i}{suffix}" for i in range(1, L + 1)]
    return labels


def counterexample(n: int, c: int = 1, tau: int = 1) -> Instance:
    if n < 1 or c < 1 or tau < 1:
        raise ValueError("n, c and tau must be positive")
    size = 4 * (n + 1)
    L = 2 * n + 2
    arcs = []
    reqs = []
    for cp in range(tau):
        a, u, v = _tn_arcs(n, cp * size)
        arcs += a
        reqs.append(Request(u(1), u(L), c))
        reqs.append(Request(v(L), v(1), c))
    for i in range(tau):
        for j in range(i + 1, tau):
            arcs += [(i * size + x, j * size + y) for x in range(size) for y in range(size)]
    g = Digraph.from_arcs(size * tau, arcs)
    return Instance(g, reqs, c, False, counterexample_labels(n, tau))


def counterexample_paths(n: int, copy: int = 0) -> tuple[list[int], list[int]]:
    """Vertex lists of P_u and P_v in the given copy."""
    L = 2 * n + 2
    off = copy * 4 * (n + 1)
    pu = [off + i for i in range(L)]
    pv = [off + L + i for i in reversed(range(L))]
    return pu, pv


def counterexample_asymmetric(n: int) -> Instance:
    if n < 1:
        raise ValueError("n must be positive")
    L = 2 * n + 2
    arcs, u, v = _tn_arcs(n, 0)
    g = Digraph.from_arcs(4 * (n + 1), arcs)
    reqs = [Request(u(1), u(L), 2), Request(v(L), v(1), 1)]
    return Instance(g, reqs, 2, False, counterexample_labels(n))


# text formats ----------------------------------------------------------------

def write_instance(inst: Instance) -> str:
    lines = ["ddp 1", f"n {inst.n} c {inst.congestion} restricted {int(inst.restricted)}"]
    if inst.labels is not None:
        for i, name in enumerate(inst.labels):
            if name:
                lines.append(f"# name {i} {name}")
    lines.append("arcs")
    lines += [f"{u} {v}" for u, v in sorted(inst.graph.arcs())]
    lines.append("end")
    lines.append("requests")
    lines += [f"{r.s} {r.t} {r.multiplicity}" for r in inst.requests]
    lines.append("end")
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    """Yield (lineno, tokens, raw comment) with comments stripped."""
    for no, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        yield no, body.split(), comment.strip() if "#" in raw else None


def _ints(toks, no, count, what):
    if len(toks) != count:
        raise ParseError(no, f"{what} needs {count} integers, got {len(toks)} tokens")
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise ParseError(no, f"{what} has a non-integer token") from None


def read_instance(text: str) -> Instance:
    names: dict[int, str] = {}
    rows = []
    for no, toks, comment in _content_lines(text):
        if comment is not None and comment.startswith("name "):
            parts = comment.split(None, 2)
            if len(parts) == 3 and parts[1].isdigit():
                names[int(parts[1])] = parts[2]
        if toks:
            rows.append((no, toks))
    it = iter(rows)
    last_no = len(text.splitlines())

    def take(expect):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(last_no, f"unexpected end of input, expected {expect}") from None

    no, toks = take("header")
    if toks != ["ddp", "1"]:
        raise ParseError(no, "first line must be 'ddp 1'")
    no, toks = take("size line")
    if len(toks) != 6 or toks[0] != "n" or toks[2] != "c" or toks[4] != "restricted":
        raise ParseError(no, "expected 'n <int> c <int> restricted <0|1>'")
    n, c, r = _ints([toks[1], toks[3], toks[5]], no, 3, "size line")
    if n < 0 or c < 1 or r not in (0, 1):
        raise ParseError(no, "bad size line values")
    no, toks = take("'arcs'")
    if toks != ["arcs"]:
        raise ParseError(no, "expected 'arcs'")
    arcs = set()
    while True:
        no, toks = take("arc or 'end'")
        if toks == ["end"]:
            break
        u, v = _ints(toks, no, 2, "arc")
        if u == v:
            raise ParseError(no, f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(no, f"arc ({u},{v}) out of range")
        if (u, v) in arcs:
            raise ParseError(no, f"duplicate arc ({u},{v})")
        arcs.add((u, v))
    no, toks = take("'requests'")
    if toks != ["requests"]:
        raise ParseError(no, "expected 'requests'")
    reqs = []
    while True:
        no, toks = take("request or 'end'")
        if toks == ["end"]:
            break
        s, t, m = _ints(toks, no, 3, "request")
        if s == t:
            raise ParseError(no, "request endpoints coincide")
        if not (0 <= s < n and 0 <= t < n):
            raise ParseError(no, "request endpoint out of range")
        if m < 1:
            raise ParseError(no, "multiplicity must be positive")
        reqs.append(Request(s, t, m))
    for no, toks in it:
        raise ParseError(no, f"unexpected trailing content '{' '.join(toks)}'")
    labels = None
    if names:
        labels = [names.get(i, "") for i in range(n)]
    return Instance(Digraph.from_arcs(n, arcs), reqs, c, bool(r), labels)


def write_solution(sol: RoutedSolution) -> str:
    return "sol 1\n" + "".join(" ".join(map(str, p)) + "\n" for p in sol.paths)


def read_solution(text: str) -> RoutedSolution:
    rows = [(no, toks) for no, toks, _ in _content_lines(text) if toks]
    if not rows or rows[0][1] != ["sol", "1"]:
        raise ParseError(rows[0][0] if rows else 1, "first line must be 'sol 1'")
    paths = []
    for no, toks in rows[1:]:
        try:
            paths.append(tuple(int(t) for t in toks))
        except ValueError:
            raise ParseError(no, "non-integer vertex in path") from None
    return RoutedSolution(paths)
