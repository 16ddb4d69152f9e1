from __future__ import annotations

import io
import json
import os
import re
import subprocess
import sys

import pytest

from measurechu import cli, laws
from measurechu.chu import PairedSpace
from measurechu.serialize import load_workspace

from conftest import DATA, GOLDEN

M, V, P, C, F, L = ("measures.json", "vector.json", "pairs.json", "curves.json", "fourier.json", "levy.json")

INVOCATIONS = [
    f"measure flatten --in {M} --in meta.json",
    f"measure push mu --map f --in {M}",
    f"measure product mu nu --in {M}",
    f"measure tv signed --in {M}",
    f"measure isprob mu --in {M}",
    f"integrate --fn F --measure mu --in {M} --in {V}",
    f"integrate --fn G --measure rho --in {M} --in {V}",
    f"integrate --fn F --measure mu --backend float --in {M} --in {V}",
    f"double --fn H --mu mu --nu nu --in {M} --in {V}",
    f"measure product mu nu --backend float --in {M}",
    f"char --measure uniform --point 1 --point 0 --point 1/4 --in {F}",
    f"char --measure planar --grid -1 1 3 --in {F}",
    f"pd --measure signed --point 0 --point 1/2 --in {F}",
    f"pd --measure planar --grid -1 1 3 --tol 1e-9 --in {F}",
    "chu eta --in pair_I2.json",
    f"chu dual A --in {P}",
    f"chu dual g --in {P}",
    f"chu hom A B --in {P}",
    f"chu tensor A C --in {P}",
    f"chu curry A B B --in {P}",
    f"chu separate R --in {P}",
    f"chu ext R --in {P}",
    f"chu free X --in {M}",
    f"chu extend --fn F --in {M} --in {V}",
    f"ftc forward --curve gamma_exact --in {C}",
    f"ftc forward --curve gamma --n 20 --in {C}",
    f"ftc inverse --curve gamma --t 0.5 --h 0.01 --n 1000 --in {C}",
    f"weakconv --limit delta0 --test x1 --test x1^2 --test sin(x1) --tol 0.1 --in {L}",
    f"levy --limit delta0 --test x1 --grid -0.5 0.5 5 --tol 0.1 --in {L}",
    "laws monad --cases 30 --seed 7",
    "laws commutative --cases 20 --seed 1",
    "laws integration --cases 20 --seed 2",
    "laws chu --cases 5 --seed 11",
    "laws fourier --cases 10 --seed 3",
]


def slug(argv: str) -> str:
    s = re.sub(r"--in \S+", "", argv)
    s = re.sub(r"[^A-Za-z0-9.]+", "_", s).strip("_")
    return s[:80] + ".json"


def invoke(argv, cwd=DATA):
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        code = cli.run(argv.split() if isinstance(argv, str) else argv, out, err)
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


def test_enough_golden_invocations():
    assert len(INVOCATIONS) >= 15
    assert len({slug(a) for a in INVOCATIONS}) == len(INVOCATIONS)


@pytest.mark.parametrize("argv", INVOCATIONS)
def test_golden(argv):
    code, out, err = invoke(argv)
    assert code == 0, err
    again = invoke(argv)[1]
    assert out == again  # byte-identical rerun
    path = GOLDEN / slug(argv)
    if os.environ.get("MEASURECHU_REGEN"):
        path.write_text(out)
    assert out == path.read_text()


def test_default_seed_matches_explicit_zero():
    a = invoke("laws monad --cases 25")[1]
    b = invoke("laws monad --cases 25 --seed 0")[1]
    c = invoke("laws monad --cases 25 --seed 1")[1]
    assert a == b and json.loads(a)["seed"] == 0
    assert json.loads(c)["seed"] == 1


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "measurechu", "chu", "eta", "--in", "pair_I2.json"],
                          cwd=DATA, capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / slug("chu eta --in pair_I2.json")).read_text()


# documented examples at the CLI level ---------------------------------------------------------


def test_flatten_of_dirac_prints_mu():
    code, out, _ = invoke(f"measure flatten --in {M} --in meta.json")
    atoms = json.loads(out)["atoms"]
    assert code == 0 and atoms == [{"label": "a", "weight": "1/2"}, {"label": "b", "weight": "1/3"},
                                   {"label": "c", "weight": "1/6"}]


def test_eta_of_identity_pairing():
    out = json.loads(invoke("chu eta --in pair_I2.json")[1])
    assert out["matrix"] == [["1", "0"], ["0", "1"]]


def test_laws_report_full_pass():
    code, out, err = invoke("laws monad --cases 200 --seed 7")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["failures"] == []
    assert all(v == "200/200" for v in rep["checks"].values())
    assert "laws monad:" in err  # wall time goes to stderr only


# exit codes and error locations --------------------------------------------------------


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def test_usage_errors_exit_1():
    assert invoke("frobnicate")[0] == 1
    assert invoke("measure tv")[0] == 1  # no --in
    assert invoke("laws monad --cases 0")[0] == 1
    assert invoke(f"measure push mu --in {M}")[0] == 1


def test_duplicate_names_across_files(tmp_path):
    a = write(tmp_path, "a.json", {"spaces": [{"name": "X", "points": ["p"]}]})
    b = write(tmp_path, "b.json", {"spaces": [{"name": "Y", "points": ["q"]}, {"name": "X", "points": ["r"]}]})
    code, _, err = invoke(["measure", "tv", "--in", a, "--in", b])
    assert code == 2
    assert "a.json:spaces[0]" in err and "b.json:spaces[1]" in err


def test_unknown_space_reference(tmp_path):
    a = write(tmp_path, "a.json", {"measures": [{"name": "m", "space": "Nope", "atoms": []}]})
    code, _, err = invoke(["measure", "tv", "--in", a])
    assert code == 2 and "a.json:measures[0]" in err and "Nope" in err


def test_invalid_json_position(tmp_path):
    a = write(tmp_path, "a.json", '{"spaces": [\n  {"name": }]}')
    code, _, err = invoke(["measure", "tv", "--in", a])
    assert code == 2 and "a.json:2:" in err


def test_bad_weight_location(tmp_path):
    a = write(tmp_path, "a.json", {"spaces": [{"name": "X", "points": ["p"]}],
                                   "measures": [{"name": "m", "space": "X", "atoms": [{"label": "p", "weight": "1/x"}]}]})
    code, _, err = invoke(["measure", "tv", "--in", a])
    assert code == 2 and "measures[0].atoms[0]" in err


def test_expression_error_position():
    code, _, err = invoke(f"weakconv --limit delta0 --test sin( --in {L}")
    assert code == 2 and "position 4" in err


def test_invariant_violations_exit_3(tmp_path):
    a = write(tmp_path, "a.json", {"paired_spaces": [{"name": "S", "dim": 2, "pairing": [["1", "2"], ["2", "4"]]}]})
    code, _, err = invoke(["chu", "dual", "--in", a])
    assert code == 3 and "a.json:paired_spaces[0]" in err
    b = write(tmp_path, "b.json", {"spaces": [{"name": "X", "points": ["p", "p"]}]})
    assert invoke(["measure", "tv", "--in", b])[0] == 3
    c = write(tmp_path, "c.json", {"paired_spaces": [{"name": "A", "dim": 1, "pairing": [["2"]]},
                                                     {"name": "B", "dim": 1, "pairing": [["1"]]}],
                                   "paired_maps": [{"name": "f", "from": "A", "to": "B", "matrix": [["1"]],
                                                    "adjoint": [["5"]]}]})
    code, _, err = invoke(["chu", "dual", "f", "--in", c])
    assert code == 3 and "paired_maps[0]" in err


def test_law_failure_exits_4(monkeypatch):
    def broken(cases, seed):
        rep = laws.LawReport("broken", cases, seed)
        for k in range(cases):
            rep.record(k, "always", k != 1, lambda: {"input": k})
        return rep

    monkeypatch.setitem(laws.SUITES, "monad", broken)
    code, out, _ = invoke("laws monad --cases 3")
    rep = json.loads(out)
    assert code == 4 and not rep["passed"]
    assert rep["failures"] == [{"case": 1, "check": "always", "inputs": {"input": 1}}]


# round trip ------------------------------------------------------------------------------


def test_emitted_measure_reloads(tmp_path):
    out = json.loads(invoke(f"measure product mu nu --in {M}")[1])
    path = write(tmp_path, "p.json", {"spaces": [out["space"]], "measures": [{**out, "name": "p",
                                                                              "space": out["space"]["name"]}]})
    ws = load_workspace([path])
    again = json.loads(invoke(["measure", "isprob", "p", "--in", path])[1])
    assert again["is_probability"] is True
    from measurechu.measures import measure_to_json
    assert measure_to_json(ws.measures["p"], True) == out


def test_emitted_pair_reloads(tmp_path):
    out = json.loads(invoke(f"chu tensor A C --in {P}")[1])
    path = write(tmp_path, "t.json", {"paired_spaces": [out]})
    T = load_workspace([path]).paired_spaces[out["name"]]
    assert isinstance(T, PairedSpace)
    assert json.loads(invoke(["chu", "dual", "--in", path])[1])["pairing"] == [list(r) for r in zip(*out["pairing"])]
