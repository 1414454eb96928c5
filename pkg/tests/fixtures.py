"""Hand-built instances shared by several test files."""
from ddplab.digraph import Digraph
from ddplab.instances import Instance, Request, RoutedSolution
from ddplab.triples import KTriple


def _fill(n, arcs):
    """Complete `arcs` to a semicomplete digraph, orienting every missing pair
    from the higher index to the lower one."""
    arcs = set(arcs)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in arcs and (v, u) not in arcs:
                arcs.add((v, u))
    return Digraph.from_arcs(n, arcs)


def five_crossing():
    """A 5-triple and a single path s -> b1 -> ... -> b5 -> t through B.

    The free pair (c1, a1) gives the shortcut b1 -> c1 -> a1 -> b5.
    Returns (instance, triple, solution)."""
    s, t = 0, 1
    A = list(range(2, 7))
    B = list(range(7, 12))
    C = list(range(12, 17))
    arcs = {(a, b) for a in A for b in B} | {(b, c) for b in B for c in C}
    arcs |= set(zip(C, A))
    arcs |= {(B[i], B[i + 1]) for i in range(4)}
    arcs |= {(s, B[0]), (B[-1], t)}
    arcs |= {(v, s) for v in range(2, 17)} | {(t, v) for v in range(2, 17)} | {(t, s)}
    n = 17
    inst = Instance(_fill(n, arcs), [Request(s, t)], 1)
    sol = RoutedSolution([(s, *B, t)])
    return inst, KTriple(A, B, C), sol


def gamma_prime():
    """18 vertices where round two must use its auxiliary digraph.

    Layout: s=0, t=1, a1..a4=2..5, b1..b4=6..9, c1..c4=10..13, e1..e4=14..17.
    The only shortest s->t path is s a1 b1 e1 t.  Each b_i has the single
    out-neighbour e_i outside C, and e_j -> e_i for j > i, so the round-two
    auxiliary digraph is transitive with b1 of in-degree 3.
    """
    s, t = 0, 1
    A = [2, 3, 4, 5]
    B = [6, 7, 8, 9]
    C = [10, 11, 12, 13]
    E = [14, 15, 16, 17]
    arcs = {(a, b) for a in A for b in B} | {(b, c) for b in B for c in C}
    arcs |= set(zip(C, A))
    for i in range(4):
        for j in range(4):
            if i != j:
                arcs.add((A[i], C[j]))
                arcs.add((E[i], B[j]))
            if i < j:
                arcs |= {(A[i], A[j]), (C[i], C[j]), (B[j], B[i]), (E[j], E[i])}
        arcs.add((B[i], E[i]))
    arcs |= {(e, x) for e in E for x in A + C}
    arcs.add((s, A[0]))
    arcs |= {(v, s) for v in range(1, 18) if v != A[0]}
    arcs.add((E[0], t))
    arcs |= {(t, v) for v in range(2, 18) if v != E[0]}
    D = Digraph.from_arcs(18, arcs)
    inst = Instance(D, [Request(s, t)], 1)
    return inst, KTriple(A, B, C)
