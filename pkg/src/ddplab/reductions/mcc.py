"""Multicolored clique to (k,1)-DDP on digraphs covered by few tournaments (dpw 2).

Naming, with row index i and column j (1-based i, columns 0..n+1):
  alpha[i,j]        the single vertex of D^alpha_{i,j}
  a[i,j,l], b[i,j,l] for l = 0..q (the D^a and D^b columns)
  beta1[i,j], beta2[i,j]
  terminals alpha_s[i], alpha_t[i], a_s[i], a_t[i], b_s[i], b_t[i],
            g1_s[i], g1_t[i], g2_s[i], g2_t[i], delta_s[i,l], delta_t[i,l] (i <= l)

Each row carries four "arrows": vertex sequences forming a tournament whose
unique Hamiltonian path is the sequence itself (consecutive arcs forward,
all other arcs backward).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from itertools import combinations, product

from ..digraph import CliquePartition
from ..errors import InvalidSolution, NoGapFound, NotAClique, NotMinimal, UnequalClasses
from ..instances import Request, RoutedSolution, make_rng, verify_solution
from ..pathwidth import layout_to_decomposition
from ..solver import find_shortcut
from .base import NamedBuilder, ReductionArtifact, make_instance


@dataclass(frozen=True)
class MccInstance:
    q: int
    n: int
    edges: frozenset      # frozensets {x, y}; vertex x lies in class x // n, column x % n

    def __post_init__(self):
        es = frozenset(frozenset(e) for e in self.edges)
        object.__setattr__(self, "edges", es)
        for e in es:
            x, y = tuple(e)
            if not (0 <= x < self.q * self.n and 0 <= y < self.q * self.n):
                raise ValueError(f"edge {tuple(e)} out of range")
            if x // self.n == y // self.n:
                raise ValueError(f"edge {tuple(e)} joins one class")

    @classmethod
    def from_classes(cls, classes, edges):
        sizes = {len(c) for c in classes}
        if len(sizes) > 1:
            raise UnequalClasses(f"class sizes differ: {sorted(len(c) for c in classes)}")
        n = sizes.pop() if sizes else 0
        pos = {}
        for i, cl in enumerate(classes):
            for j, x in enumerate(cl):
                pos[x] = i * n + j
        return cls(len(classes), n, frozenset(frozenset((pos[x], pos[y])) for x, y in edges))

    def vertex(self, i, j):
        """0-based class i, 1-based column j."""
        return i * self.n + j - 1

    def is_clique(self, vs) -> bool:
        vs = list(vs)
        if sorted(x // self.n for x in vs) != list(range(self.q)):
            return False
        return all(frozenset((x, y)) in self.edges for x, y in combinations(vs, 2))


def random_mcc(q, n, p, seed, plant=False):
    rng = make_rng(seed)
    edges = set()
    for x in range(q * n):
        for y in range(x + 1, q * n):
            if x // n != y // n and rng.random() < p:
                edges.add(frozenset((x, y)))
    clique = None
    if plant:
        clique = tuple(i * n + int(rng.integers(n)) for i in range(q))
        for x, y in combinations(clique, 2):
            edges.add(frozenset((x, y)))
    return MccInstance(q, n, frozenset(edges)), clique


def brute_force_clique(mcc: MccInstance):
    for cols in product(range(mcc.n), repeat=mcc.q):
        vs = tuple(i * mcc.n + j for i, j in enumerate(cols))
        if mcc.is_clique(vs):
            return vs
    return None


# construction -----------------------------------------------------------------

def _arrows(q, n, i):
    al = [f"alpha_s[{i}]"] + [f"alpha[{i},{j}]" for j in range(n + 2)] + [f"g2_s[{i}]"]
    aa = [f"a_s[{i}]"] + [f"a[{i},{j},{l}]" for j in range(n + 2) for l in range(q + 1)] + \
         [f"alpha_t[{i}]", f"g1_s[{i}]"]
    be = [f"g1_t[{i}]", f"g2_t[{i}]"] + \
         [f"beta{x}[{i},{j}]" for j in range(n + 2) for x in (1, 2)] + [f"b_t[{i}]"]
    bb = [f"b_s[{i}]"] + [f"b[{i},{j},{l}]" for j in range(n + 2) for l in range(q + 1)] + [f"a_t[{i}]"]
    return al, aa, be, bb


def _layout_row(q, n, i):
    al, aa, be, bb = _arrows(q, n, i)
    # beta, b, a, alpha arrows; g1_s and g2_s close the row
    return be + bb + aa[:-1] + al[:-1] + [aa[-1], al[-1]]


def reduce_mcc(mcc: MccInstance) -> ReductionArtifact:
    q, n = mcc.q, mcc.n
    b = NamedBuilder()
    rows = {}
    for i in range(1, q + 1):
        arrows = _arrows(q, n, i)
        rows[i] = arrows
        for arrow in arrows:
            for name in arrow:
                b.add(name)
    for i in range(1, q + 1):
        for l in range(i, q + 1):
            b.add(f"delta_s[{i},{l}]")
            b.add(f"delta_t[{i},{l}]")
    for i in range(1, q + 1):
        for arrow in rows[i]:
            b.path_tournament(arrow)
        for j in range(n + 2):
            for l in range(1, q + 1):
                b.arc(f"a[{i},{j},{l}]", f"b[{i},{j},{l}]")
        for j in range(n):
            b.arc(f"alpha[{i},{j}]", f"a[{i},{j + 2},0]")
            b.arc(f"a[{i},{j},{q}]", f"b[{i},{j + 2},0]")
            b.arc(f"b[{i},{j},{q}]", f"beta1[{i},{j + 1}]")
        for j in range(1, n + 1):
            b.arc(f"alpha[{i},{j}]", f"beta2[{i},{j - 1}]")
            b.arc(f"a[{i},{j},0]", f"beta1[{i},{j - 1}]")
    for i in range(1, q + 1):
        for l in range(i, q + 1):
            for j in range(1, n + 1):
                b.arc(f"delta_s[{i},{l}]", f"a[{i},{j},{l}]")
                b.arc(f"b[{l},{j},{i}]", f"delta_t[{i},{l}]")
    for e in mcc.edges:
        x, y = sorted(e)
        i, u = x // n + 1, x % n + 1
        l, v = y // n + 1, y % n + 1
        b.arc(f"b[{i},{u},{l}]", f"a[{l},{v},{i}]")
    reqs = []
    for i in range(1, q + 1):
        for x in ("alpha", "a", "b", "g1", "g2"):
            reqs.append(Request(b[f"{x}_s[{i}]"], b[f"{x}_t[{i}]"]))
    for i in range(1, q + 1):
        for l in range(i, q + 1):
            reqs.append(Request(b[f"delta_s[{i},{l}]"], b[f"delta_t[{i},{l}]"]))
    inst = make_instance(b, reqs, 1)
    parts = []
    for i in range(1, q + 1):
        for arrow in rows[i]:
            parts.append(frozenset(b[x] for x in arrow))
    for i in range(1, q + 1):
        for l in range(i, q + 1):
            parts.append(frozenset([b[f"delta_s[{i},{l}]"]]))
            parts.append(frozenset([b[f"delta_t[{i},{l}]"]]))
    order = _mcc_layout(b, q, n)
    dec = layout_to_decomposition(inst.graph, order)
    art = ReductionArtifact(inst, mcc, "mcc", list(b.names),
                            extras={"clique_partition": CliquePartition(tuple(parts)),
                                    "decomposition": dec, "layout": order})
    art.forward = partial(mcc_solution_from_clique, art)
    art.backward = partial(mcc_clique_from_solution, art)
    return art


def _mcc_layout(b, q, n, zs=None, zt=None):
    order = []
    deltas = [(i, l) for i in range(1, q + 1) for l in range(i, q + 1)]
    order += [b[f"delta_t[{i},{l}]"] for i, l in deltas]
    if zs is not None:
        order.append(b[zs])
    for i in range(q, 0, -1):
        order += [b[x] for x in _layout_row(q, n, i)]
    if zt is not None:
        order.append(b[zt])
    order += [b[f"delta_s[{i},{l}]"] for i, l in deltas]
    return order


# witness maps -------------------------------------------------------------------

def _columns(art, clique):
    mcc = art.source
    if not mcc.is_clique(clique):
        raise NotAClique(f"{clique} is not a multicolored clique")
    cols = {}
    for x in clique:
        cols[x // mcc.n + 1] = x % mcc.n + 1
    return cols


def mcc_solution_from_clique(art: ReductionArtifact, clique) -> RoutedSolution:
    mcc = art.source
    q, n = mcc.q, mcc.n
    u = _columns(art, clique)
    named = {}
    for i in range(1, q + 1):
        ui = u[i]
        named[("alpha", i)] = [f"alpha_s[{i}]"] + [f"alpha[{i},{j}]" for j in range(ui)] + \
            [f"a[{i},{j},{l}]" for j in range(ui + 1, n + 2) for l in range(q + 1)] + [f"alpha_t[{i}]"]
        named[("a", i)] = [f"a_s[{i}]"] + [f"a[{i},{j},{l}]" for j in range(ui) for l in range(q + 1)] + \
            [f"b[{i},{j},{l}]" for j in range(ui + 1, n + 2) for l in range(q + 1)] + [f"a_t[{i}]"]
        named[("b", i)] = [f"b_s[{i}]"] + [f"b[{i},{j},{l}]" for j in range(ui) for l in range(q + 1)] + \
            [f"beta{x}[{i},{j}]" for j in range(ui, n + 2) for x in (1, 2)] + [f"b_t[{i}]"]
        named[("g1", i)] = [f"g1_s[{i}]", f"a[{i},{ui},0]", f"beta1[{i},{ui - 1}]", f"g1_t[{i}]"]
        named[("g2", i)] = [f"g2_s[{i}]", f"alpha[{i},{ui}]", f"beta2[{i},{ui - 1}]", f"g2_t[{i}]"]
    for i in range(1, q + 1):
        for l in range(i, q + 1):
            if i == l:
                mid = [f"a[{i},{u[i]},{i}]", f"b[{i},{u[i]},{i}]"]
            else:
                mid = [f"a[{i},{u[i]},{l}]", f"b[{i},{u[i]},{l}]", f"a[{l},{u[l]},{i}]", f"b[{l},{u[l]},{i}]"]
            named[("delta", i, l)] = [f"delta_s[{i},{l}]"] + mid + [f"delta_t[{i},{l}]"]
    inst = art.instance
    paths = []
    for s, t in inst.expanded():
        nm = art.names[s]
        head, _, idx = nm.partition("[")
        idx = idx.rstrip("]")
        if head == "delta_s":
            i, l = map(int, idx.split(","))
            key = ("delta", i, l)
        elif head == "z_s":
            paths.append(list(art.extras["z_path"]))
            continue
        else:
            key = (head[:-2], int(idx))
        paths.append([art.idx(x) for x in named[key]])
    sol = RoutedSolution(paths)
    v = verify_solution(inst, sol)
    if not v.ok:
        raise AssertionError(f"forward map produced an invalid solution: {v}")
    return sol


def mcc_clique_from_solution(art: ReductionArtifact, sol: RoutedSolution):
    inst = art.instance
    v = verify_solution(inst, sol)
    if not v.ok:
        raise InvalidSolution(str(v))
    for i in range(len(sol.paths)):
        if find_shortcut(inst, sol, i) is not None:
            raise NotMinimal(f"path {i} admits a shortcut")
    mcc = art.source
    q, n = mcc.q, mcc.n
    internal = {}
    for (s, t), p in zip(inst.expanded(), sol.paths):
        nm = art.names[s]
        head, _, idx = nm.partition("[")
        if head in ("alpha_s", "a_s", "b_s", "g1_s", "g2_s"):
            internal.setdefault(int(idx.rstrip("]")), set()).update(p)
    clique = []
    for i in range(1, q + 1):
        used = internal.get(i, set())
        gaps = []
        for j in range(1, n + 1):
            col = [art.idx(f"{x}[{i},{j},{l}]") for x in ("a", "b") for l in range(1, q + 1)]
            if not any(vv in used for vv in col):
                gaps.append(j)
        if len(gaps) != 1:
            raise NoGapFound(f"row {i}: columns free of internal paths are {gaps}")
        clique.append(mcc.vertex(i - 1, gaps[0]))
    clique = tuple(clique)
    if not mcc.is_clique(clique):
        raise InvalidSolution(f"decoded vertices {clique} are not a clique")
    return clique


def mcc_congested_extension(art: ReductionArtifact, c: int) -> ReductionArtifact:
    if c < 2:
        raise ValueError("the congested extension needs c >= 2")
    mcc = art.source
    q, n = mcc.q, mcc.n
    base = art.instance
    b = NamedBuilder()
    for nm in art.names:
        b.add(nm)
    b.arcs = set(base.graph.arcs())
    zs = b.add("z_s")
    zt = b.add("z_t")
    b.arc(zs, f"g1_t[{q}]")
    b.arc(f"g2_s[1]", zt)
    for i in range(1, q + 1):
        b.arc(f"b_t[{i}]", f"b_s[{i}]")
        b.arc(f"a_t[{i}]", f"a_s[{i}]")
        b.arc(f"g1_s[{i}]", f"alpha_s[{i}]")
        if i > 1:
            b.arc(f"g2_s[{i}]", f"g1_t[{i - 1}]")
    reqs = list(base.requests) + [Request(zs, zt, c - 1)]
    inst = make_instance(b, reqs, c)
    zpath = [zs]
    for i in range(q, 0, -1):
        al, aa, be, bb = _arrows(q, n, i)
        zpath += [b[x] for x in be + bb + aa + al]
    zpath.append(zt)
    order = _mcc_layout(b, q, n, "z_s", "z_t")
    dec = layout_to_decomposition(inst.graph, order)
    ext = ReductionArtifact(inst, mcc, "mcc-congested", list(b.names),
                            extras={"decomposition": dec, "layout": order, "z_path": zpath,
                                    "base": art, "c": c})
    ext.forward = partial(mcc_solution_from_clique, ext)
    ext.backward = partial(_congested_backward, ext)
    return ext


def _congested_backward(ext, sol):
    """Drop the z paths and decode the remaining base solution."""
    base = ext.extras["base"]
    keep = [p for (s, t), p in zip(ext.instance.expanded(), sol.paths) if ext.names[s] != "z_s"]
    return mcc_clique_from_solution(base, RoutedSolution(keep))
