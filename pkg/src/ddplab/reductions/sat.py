"""(3,1)-3-SAT formulas: every variable occurs three times positively and once negated."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..errors import BadArity
from ..instances import make_rng

# a literal is (variable index, positive?)


@dataclass(frozen=True)
class Sat31Instance:
    n_vars: int
    clauses: tuple

    def __post_init__(self):
        cl = tuple(tuple((int(v), bool(p)) for v, p in c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        check_sat31(self)

    @property
    def m(self):
        return len(self.clauses)

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment[v] == p for v, p in c) for c in self.clauses)

    def failing_clause(self, assignment):
        for a, c in enumerate(self.clauses):
            if not any(assignment[v] == p for v, p in c):
                return a
        return None

    def positive_clauses(self, v):
        return [a for a, c in enumerate(self.clauses) if (v, True) in c]

    def negative_clause(self, v):
        return next(a for a, c in enumerate(self.clauses) if (v, False) in c)


def check_sat31(f: Sat31Instance):
    if 3 * len(f.clauses) != 4 * f.n_vars:
        raise BadArity("need 3 * clauses == 4 * variables")
    pos = [0] * f.n_vars
    neg = [0] * f.n_vars
    for c in f.clauses:
        if len(c) != 3:
            raise BadArity("clauses must have exactly three literals")
        vs = [v for v, _ in c]
        if len(set(vs)) != 3:
            raise BadArity(f"clause {c} repeats a variable")
        for v, p in c:
            if not 0 <= v < f.n_vars:
                raise BadArity(f"variable {v} out of range")
            if p:
                pos[v] += 1
            else:
                neg[v] += 1
    if any(x != 3 for x in pos) or any(x != 1 for x in neg):
        raise BadArity("each variable must occur three times positively and once negated")


def random_sat31(n_vars: int, seed, retries: int = 100000) -> Sat31Instance:
    if n_vars <= 0 or n_vars % 3:
        raise BadArity("n_vars must be a positive multiple of 3")
    rng = make_rng(seed)
    occ = []
    for v in range(n_vars):
        occ += [(v, True)] * 3 + [(v, False)]
    m = 4 * n_vars // 3
    for _ in range(retries):
        perm = rng.permutation(len(occ))
        lits = [occ[i] for i in perm]
        clauses = [tuple(lits[3 * a:3 * a + 3]) for a in range(m)]
        if all(len({v for v, _ in c}) == 3 for c in clauses):
            # literal order inside a clause follows variable index
            clauses = [tuple(sorted(c)) for c in clauses]
            return Sat31Instance(n_vars, tuple(clauses))
    raise RuntimeError("could not place the occurrences without repeated variables")


def brute_force_sat(f: Sat31Instance):
    """A satisfying assignment (tuple of bools) or None."""
    for bits in product((True, False), repeat=f.n_vars):
        if f.satisfied_by(bits):
            return bits
    return None
