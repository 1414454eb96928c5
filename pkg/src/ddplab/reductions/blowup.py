"""Congestion blowup: c copies of every vertex, congestion drops to 1."""
from __future__ import annotations

from ..digraph import Digraph
from ..errors import RestrictedUnsupported
from ..instances import Instance, Request


def congestion_blowup(inst: Instance) -> Instance:
    """Copy j of v is vertex v * c + j.  Copies of v form a transitive
    tournament (lower copy -> higher copy) and every copy inherits all arcs of
    v towards every copy of its neighbours.  The endpoint occurrences at a
    vertex are spread over distinct copies in request order, so a request
    list that overloads an endpoint stays infeasible."""
    if inst.restricted:
        raise RestrictedUnsupported("the blowup is defined for unrestricted instances only")
    c = inst.congestion
    g = inst.graph
    arcs = []
    for v in range(g.n):
        for a in range(c):
            for b in range(a + 1, c):
                arcs.append((v * c + a, v * c + b))
    for u, v in g.arcs():
        for a in range(c):
            for b in range(c):
                arcs.append((u * c + a, v * c + b))
    nxt = [0] * g.n
    reqs = []

    def copy(v):
        j = nxt[v] % c
        nxt[v] += 1
        return v * c + j

    for s, t in inst.expanded():
        reqs.append(Request(copy(s), copy(t)))
    labels = None
    if inst.labels is not None:
        labels = [f"{inst.label(v)}#{j}" for v in range(g.n) for j in range(c)]
    return Instance(Digraph.from_arcs(g.n * c, arcs), reqs, 1, False, labels)
