"""Command line front end: ddplab <command> [flags].

Files go to standard output, diagnostics to standard error.  The last line
on standard error is always ``result status=<word> exit=<code>`` followed by
an optional ``reason=...`` so scripts can parse it.

Exit codes: 0 success or feasible, 1 infeasible or a property violation,
2 usage or input error, 3 budget or size cap exceeded.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .errors import (ArityMismatch, BadArity, BadRatio, BudgetExceeded, CapExceeded,
                     DDPError, ParseError, RestrictedUnsupported, UnequalClasses)
from .instances import (Instance, Request, counterexample, counterexample_asymmetric,
                        make_rng, random_instance, read_instance, read_solution,
                        verify_solution, write_instance, write_solution)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
STATUS = {EXIT_OK: "ok", EXIT_NO: "no", EXIT_USAGE: "usage", EXIT_BUDGET: "budget"}
USAGE_ERRORS = (ParseError, BadArity, BadRatio, UnequalClasses, ArityMismatch,
                RestrictedUnsupported, ValueError, FileNotFoundError)


class _Done(Exception):
    def __init__(self, code, reason=""):
        self.code = code
        self.reason = reason


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Done(EXIT_USAGE, message)


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _note(msg):
    print(msg, file=sys.stderr)


# gen --------------------------------------------------------------------------------

def cmd_gen(a, out):
    if a.kind == "counterexample":
        inst = counterexample_asymmetric(a.n) if a.asymmetric else counterexample(a.n, a.c, a.tau)
    elif a.kind == "random":
        _note(f"seed={a.seed}")
        inst = random_instance(a.n, a.k, a.c, a.seed, digon_rate=a.digon_rate)
        if a.restricted:
            inst = Instance(inst.graph, inst.requests, inst.congestion, True, inst.labels)
    else:
        from .triples import plant_triple, write_triple
        _note(f"seed={a.seed}")
        D, t = plant_triple(a.k, a.padding, a.seed, digon_rate=a.digon_rate)
        rng = make_rng([a.seed, 1])
        outside = [v for v in range(D.n) if v not in t.vertices()]
        pool = outside if len(outside) >= 2 else list(range(D.n))
        reqs = []
        for _ in range(a.requests):
            s, tt = rng.choice(pool, 2, replace=False)
            reqs.append(Request(int(s), int(tt), 1))
        inst = Instance(D, reqs, a.c)
        if a.triple_out:
            _write(a.triple_out, write_triple(t))
    out.write(write_instance(inst))
    return EXIT_OK


# reduce -------------------------------------------------------------------------------

def cmd_reduce(a, out):
    from . import reductions as R
    if a.kind == "blowup":
        inst = read_instance(_read_text(a.input))
        out.write(write_instance(R.congestion_blowup(inst)))
        return EXIT_OK
    _note(f"seed={a.seed}")
    if a.kind in ("mcc", "mcc-congested"):
        mcc, clique = R.random_mcc(a.q, a.n, a.p, a.seed, plant=a.plant)
        art = R.reduce_mcc(mcc)
        if a.kind == "mcc-congested":
            art = R.mcc_congested_extension(art, a.c)
        _note(f"clique={R.brute_force_clique(mcc)}")
        out.write(write_instance(art.instance))
        return EXIT_OK
    f = R.random_sat31(a.vars, a.seed)
    if a.kind == "sat-tournament":
        art = R.reduce_sat_to_tournament(f)
    elif a.kind == "restricted":
        art = R.reduce_restricted(f, a.d)
    elif a.kind == "epsilon":
        art = R.reduce_epsilon(f, Fraction(a.eps))
    else:
        art = R.reduce_c2(f, ratio_d=a.ratio_d)
    _note(f"satisfiable={int(R.brute_force_sat(f) is not None)}")
    out.write(write_instance(art.instance))
    return EXIT_OK


# solve / dpw / triple / irrelevant / winwin / verify --------------------------------

def cmd_solve(a, out):
    from .solver import SolveMode, enumerate_solutions, solve
    inst = read_instance(_read_text(a.input))
    obj = {"any": "any", "min": "min_total_length", "enumerate": "enumerate_all"}[a.mode]
    mode = SolveMode(obj, time_limit=a.time_limit, node_limit=a.node_limit, jobs=a.jobs)
    if obj == "enumerate_all":
        sols = enumerate_solutions(inst, mode)
        for s in sols:
            out.write(write_solution(s))
        _note(f"solutions={len(sols)}")
        return EXIT_OK if sols else EXIT_NO
    sol = solve(inst, mode)
    if sol is None:
        raise _Done(EXIT_NO, "infeasible")
    out.write(write_solution(sol))
    return EXIT_OK


def cmd_dpw(a, out):
    from .pathwidth import exact_dpw, write_decomposition
    inst = read_instance(_read_text(a.input))
    w, dec = exact_dpw(inst.graph, cap=a.cap)
    _note(f"width={w}")
    out.write(write_decomposition(dec))
    return EXIT_OK


def cmd_triple(a, out):
    from .triples import find_triple, write_triple
    inst = read_instance(_read_text(a.input))
    t = find_triple(inst.graph, a.k)
    if t is None:
        raise _Done(EXIT_NO, f"no {a.k}-triple found")
    out.write(write_triple(t))
    return EXIT_OK


def _thresholds(a, inst):
    from .irrelevant import Thresholds
    if a.thresholds == "default":
        th = Thresholds.default(inst.k, inst.congestion, h=a.h)
    else:
        th = Thresholds.scaled(h=a.h)
    over = {nm: getattr(a, nm) for nm in ("f", "d1", "m1", "d2", "m2", "x")
            if getattr(a, nm) is not None}
    if over:
        th = Thresholds(**{**th.__dict__, **over})
    return th


def cmd_irrelevant(a, out):
    from .irrelevant import find_irrelevant_vertex
    from .triples import read_triple
    inst = read_instance(_read_text(a.input))
    t = read_triple(_read_text(a.triple))
    res = find_irrelevant_vertex(inst, t, _thresholds(a, inst), oracle=not a.no_oracle)
    if a.emit_trace:
        _write(a.emit_trace, "\n".join(res.trace) + "\n")
    out.write(f"{res.vertex}\n")
    _note(f"reason={res.reason} oracle_checked={int(res.oracle_checked)}")
    return EXIT_OK


def cmd_winwin(a, out):
    from .irrelevant import winwin_run
    inst = read_instance(_read_text(a.input))
    run = winwin_run(inst, _thresholds(a, inst), oracle=not a.no_oracle)
    if a.emit_trace:
        _write(a.emit_trace, "\n".join(run.trace) + "\n")
    _note(f"deleted={','.join(map(str, run.deleted))} width={run.width}")
    if run.solution is None:
        raise _Done(EXIT_NO, "infeasible")
    out.write(write_solution(run.solution))
    return EXIT_OK


def cmd_verify(a, out):
    inst = read_instance(_read_text(a.instance))
    sol = read_solution(_read_text(a.solution))
    v = verify_solution(inst, sol)
    out.write(f"{v}\n")
    if not v.ok:
        raise _Done(EXIT_NO, "violation")
    return EXIT_OK


# parser ---------------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="ddplab", description="Disjoint paths with congestion on semicomplete digraphs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(q, seed=True):
        if seed:
            q.add_argument("--seed", type=int, default=0)
        q.add_argument("--jobs", type=int, default=1)

    g = sub.add_parser("gen")
    common(g)
    g.add_argument("kind", choices=["counterexample", "random", "planted-triple"])
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--c", type=int, default=1)
    g.add_argument("--tau", type=int, default=1)
    g.add_argument("--asymmetric", action="store_true")
    g.add_argument("--digon-rate", type=float, default=0.0)
    g.add_argument("--restricted", action="store_true")
    g.add_argument("--padding", type=int, default=2)
    g.add_argument("--requests", type=int, default=2)
    g.add_argument("--triple-out")

    r = sub.add_parser("reduce")
    common(r)
    r.add_argument("kind", choices=["sat-tournament", "restricted", "epsilon", "c2",
                                    "mcc", "mcc-congested", "blowup"])
    r.add_argument("input", nargs="?")
    r.add_argument("--vars", type=int, default=3)
    r.add_argument("--d", type=int, default=2)
    r.add_argument("--eps", default="0")
    r.add_argument("--ratio-d", type=int)
    r.add_argument("--q", type=int, default=2)
    r.add_argument("--n", type=int, default=2)
    r.add_argument("--p", type=float, default=0.5)
    r.add_argument("--plant", action="store_true")
    r.add_argument("--c", type=int, default=2)

    s = sub.add_parser("solve")
    common(s, seed=False)
    s.add_argument("input", nargs="?")
    s.add_argument("--mode", choices=["any", "min", "enumerate"], default="any")
    s.add_argument("--time-limit", type=float)
    s.add_argument("--node-limit", type=int)

    d = sub.add_parser("dpw")
    common(d, seed=False)
    d.add_argument("input", nargs="?")
    d.add_argument("--cap", type=int, default=18)

    t = sub.add_parser("triple")
    common(t, seed=False)
    t.add_argument("action", choices=["find"])
    t.add_argument("input", nargs="?")
    t.add_argument("--k", type=int, required=True)

    for name in ("irrelevant", "winwin"):
        q = sub.add_parser(name)
        common(q, seed=False)
        q.add_argument("input", nargs="?")
        if name == "irrelevant":
            q.add_argument("--triple", required=True)
        q.add_argument("--thresholds", choices=["scaled", "default"], default="scaled")
        for nm in ("f", "d1", "m1", "d2", "m2", "x"):
            q.add_argument(f"--{nm}", type=int)
        q.add_argument("--h", type=int, default=0)
        q.add_argument("--no-oracle", action="store_true")
        q.add_argument("--emit-trace")

    v = sub.add_parser("verify")
    common(v, seed=False)
    v.add_argument("instance")
    v.add_argument("solution")
    return p


COMMANDS = {"gen": cmd_gen, "reduce": cmd_reduce, "solve": cmd_solve, "dpw": cmd_dpw,
            "triple": cmd_triple, "irrelevant": cmd_irrelevant, "winwin": cmd_winwin,
            "verify": cmd_verify}


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    reason = ""
    try:
        args = build_parser().parse_args(argv)
        code = COMMANDS[args.command](args, out)
    except _Done as e:
        code, reason = e.code, e.reason
    except (BudgetExceeded, CapExceeded) as e:
        code, reason = EXIT_BUDGET, f"{type(e).__name__}: {e}"
    except USAGE_ERRORS as e:
        code, reason = EXIT_USAGE, f"{type(e).__name__}: {e}"
    except DDPError as e:
        code, reason = EXIT_NO, f"{type(e).__name__}: {e}"
    except SystemExit as e:          # --help and --version
        code = int(e.code or 0)
    line = f"result status={STATUS.get(code, 'error')} exit={code}"
    if reason:
        line += " reason=" + " ".join(str(reason).split())
    print(line, file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
