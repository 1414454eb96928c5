import io
import subprocess
import sys

import pytest

from ddplab import reductions as R
from ddplab.cli import run
from ddplab.instances import read_instance, read_solution, verify_solution, write_instance
from ddplab.pathwidth import read_decomposition, validate_decomposition
from ddplab.triples import read_triple, validate_triple


def call(argv, stdin="", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    out = io.StringIO()
    code = run(argv, out)
    err = capsys.readouterr().err
    return code, out.getvalue(), err


@pytest.fixture
def cli(monkeypatch, capsys):
    return lambda argv, stdin="": call(argv, stdin, monkeypatch, capsys)


def last_line(err):
    return err.strip().splitlines()[-1]


def test_gen_counterexample(cli):
    code, out, err = cli(["gen", "counterexample", "--n", "2", "--c", "1"])
    assert code == 0 and read_instance(out).n == 12
    assert last_line(err) == "result status=ok exit=0"


@pytest.mark.parametrize("argv", [
    ["gen", "counterexample", "--n", "1", "--c", "2", "--tau", "2"],
    ["gen", "counterexample", "--n", "2", "--asymmetric"],
    ["gen", "random", "--n", "7", "--k", "2", "--seed", "4"],
    ["gen", "random", "--n", "6", "--k", "2", "--seed", "4", "--restricted"],
    ["gen", "planted-triple", "--k", "2", "--padding", "3", "--seed", "1"],
    ["reduce", "sat-tournament", "--vars", "3", "--seed", "2"],
    ["reduce", "restricted", "--vars", "3", "--d", "2"],
    ["reduce", "epsilon", "--eps", "1/2"],
    ["reduce", "c2", "--ratio-d", "2"],
    ["reduce", "mcc", "--plant"],
    ["reduce", "mcc-congested", "--plant", "--c", "2"],
])
def test_outputs_parse_back_unchanged(cli, argv):
    code, out, err = cli(argv)
    assert code == 0
    assert write_instance(read_instance(out)) == out


def test_effective_seed_is_reported(cli):
    _, _, err = cli(["gen", "random", "--n", "5", "--seed", "17"])
    assert "seed=17" in err


@pytest.mark.parametrize("seed", [0, 9, 13])
def test_reduce_then_solve_matches_sat(cli, seed):
    _, inst_text, _ = cli(["reduce", "sat-tournament", "--vars", "3", "--seed", str(seed)])
    code, sol_text, _ = cli(["solve"], inst_text)
    sat = R.brute_force_sat(R.random_sat31(3, seed)) is not None
    assert code == (0 if sat else 1)
    if sat:
        assert verify_solution(read_instance(inst_text), read_solution(sol_text)).ok


def test_solve_modes(cli, tmp_path):
    _, inst_text, _ = cli(["gen", "counterexample", "--n", "1"])
    code, out, _ = cli(["solve", "--mode", "min"], inst_text)
    assert code == 0 and read_solution(out).total_length() == 8
    code, out, err = cli(["solve", "--mode", "enumerate"], inst_text)
    assert code == 0 and out.count("sol 1") == 1 and "solutions=1" in err


def test_verify_command(cli, tmp_path):
    _, inst_text, _ = cli(["gen", "counterexample", "--n", "1"])
    _, sol_text, _ = cli(["solve"], inst_text)
    (tmp_path / "i").write_text(inst_text)
    (tmp_path / "s").write_text(sol_text)
    code, out, _ = cli(["verify", str(tmp_path / "i"), str(tmp_path / "s")])
    assert code == 0 and out.strip() == "ok"
    (tmp_path / "bad").write_text("sol 1\n0 1\n7 6\n")
    code, out, err = cli(["verify", str(tmp_path / "i"), str(tmp_path / "bad")])
    assert code == 1 and "reason=violation" in last_line(err)


def test_exit_codes(cli):
    code, _, err = cli(["solve", "--mode", "bogus"])
    assert code == 2 and last_line(err).startswith("result status=usage exit=2 reason=")
    code, _, err = cli(["solve"], "garbage\n")
    assert code == 2 and "ParseError" in last_line(err)
    code, _, err = cli(["reduce", "restricted", "--d", "4"])
    assert code == 2 and "BadRatio" in last_line(err)
    _, inst_text, _ = cli(["gen", "counterexample", "--n", "2", "--tau", "2"])
    code, _, err = cli(["dpw", "--cap", "10"], inst_text)
    assert code == 3 and "CapExceeded" in last_line(err)
    code, _, err = cli(["solve", "--node-limit", "2"], inst_text)
    assert code == 3 and "BudgetExceeded" in last_line(err)
    _, inst_text, _ = cli(["gen", "counterexample", "--n", "2"])
    code, _, err = cli(["winwin"], inst_text)
    assert code == 1 and "PreconditionFailed" in last_line(err)
    code, _, _ = cli(["nonsense"])
    assert code == 2


def test_dpw_and_triple(cli):
    _, inst_text, _ = cli(["gen", "planted-triple", "--k", "2", "--padding", "2", "--seed", "3"])
    code, out, err = cli(["dpw"], inst_text)
    g = read_instance(inst_text).graph
    assert code == 0 and validate_decomposition(g, read_decomposition(out)).ok
    code, out, _ = cli(["triple", "find", "--k", "2"], inst_text)
    assert code == 0 and validate_triple(g, read_triple(out)).ok
    _, trans, _ = cli(["gen", "random", "--n", "3", "--k", "1"])
    code, _, err = cli(["triple", "find", "--k", "2"], trans)
    assert code == 1


def test_irrelevant_and_winwin(cli, tmp_path):
    trip = tmp_path / "t"
    trace = tmp_path / "trace"
    _, inst_text, _ = cli(["gen", "counterexample", "--n", "2", "--asymmetric"])
    code, out, err = cli(["winwin", "--f", "2", "--emit-trace", str(trace)], inst_text)
    assert code == 0 and "deleted=" in err
    assert verify_solution(read_instance(inst_text), read_solution(out)).ok
    assert "delete vertex=" in trace.read_text()
    _, inst_text, _ = cli(["gen", "planted-triple", "--k", "2", "--padding", "3", "--seed", "1",
                           "--c", "2", "--requests", "1", "--triple-out", str(trip)])
    code, out, err = cli(["irrelevant", "--triple", str(trip), "--x", "1",
                          "--emit-trace", str(trace)], inst_text)
    assert code == 0 and int(out) in read_triple(trip.read_text()).B
    assert trace.read_text().startswith("normalize ")
    assert "oracle relevant=0" in trace.read_text()


def test_console_script_pipeline():
    gen = subprocess.run([sys.executable, "-m", "ddplab", "reduce", "sat-tournament", "--vars", "3",
                          "--seed", "9"], capture_output=True, text=True, check=True)
    sol = subprocess.run([sys.executable, "-m", "ddplab", "solve"], input=gen.stdout,
                         capture_output=True, text=True)
    sat = R.brute_force_sat(R.random_sat31(3, 9)) is not None
    assert sol.returncode == (0 if sat else 1)
    assert sol.stderr.strip().splitlines()[-1].startswith("result status=")
