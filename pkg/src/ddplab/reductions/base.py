from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..digraph import Digraph
from ..instances import Instance, Request


class NamedBuilder:
    """Collects named vertices and arcs; the only mutable graph object here."""

    def __init__(self):
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.arcs: set[tuple[int, int]] = set()

    def add(self, name: str) -> int:
        if name in self.index:
            raise ValueError(f"duplicate vertex name {name}")
        self.index[name] = len(self.names)
        self.names.append(name)
        return self.index[name]

    def __getitem__(self, name):
        return self.index[name]

    def arc(self, u, v):
        if isinstance(u, str):
            u = self.index[u]
        if isinstance(v, str):
            v = self.index[v]
        if u == v:
            raise ValueError("loop")
        self.arcs.add((u, v))

    def has(self, u, v):
        return (u, v) in self.arcs

    def path_tournament(self, seq):
        """Consecutive vertices point forward, every other pair points backward."""
        seq = [self.index[x] if isinstance(x, str) else x for x in seq]
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if j == i + 1:
                    self.arc(seq[i], seq[j])
                else:
                    self.arc(seq[j], seq[i])

    def complete_high_to_low(self, vs):
        """Orient every still non-adjacent pair inside vs from higher to lower index."""
        vs = sorted(self.index[x] if isinstance(x, str) else x for x in vs)
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                if (u, v) not in self.arcs and (v, u) not in self.arcs:
                    self.arcs.add((v, u))

    def graph(self) -> Digraph:
        return Digraph.from_arcs(len(self.names), self.arcs)


@dataclass
class ReductionArtifact:
    instance: Instance
    source: Any
    tag: str
    names: list
    forward: Optional[Callable] = None
    backward: Optional[Callable] = None
    extras: dict = field(default_factory=dict)

    def idx(self, name: str) -> int:
        return self.names.index(name) if not hasattr(self, "_index") else self._index[name]

    def __post_init__(self):
        self._index = {nm: i for i, nm in enumerate(self.names)}


def make_instance(b: NamedBuilder, reqs, c, restricted=False) -> Instance:
    rs = [r if isinstance(r, Request) else Request(*r) for r in reqs]
    return Instance(b.graph(), rs, c, restricted, list(b.names))
