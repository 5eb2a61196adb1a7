import json

import pytest

from jonsson.algebra import generate_free, load_algebra
from jonsson.catalog import catalog_path
from jonsson.cli import main, read_terms
from jonsson.edges import model_edges
from jonsson.paths import realize_in_model
from jonsson.terms import to_sexpr

from conftest import ALGEBRAS
from golden_n6 import CLUB, DIAMOND, STAR

LATTICE = str(ALGEBRAS / "lattice2.alg")
MAJORITY = str(ALGEBRAS / "majority2.alg")
PIXLEY = str(ALGEBRAS / "pixley2.alg")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, [json.loads(line) for line in out.splitlines() if line.startswith("{")], out, err


@pytest.fixture
def sym6(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("".join(f"(t{i} x y z)\n" for i in range(1, 6)))
    return p


def test_free_gen(capsys):
    code, recs, _, err = run(capsys, "free-gen", LATTICE)
    assert code == 0 and len(recs) == 4 and "complete = true" in err
    assert recs[2] == {"record": "element", "index": 2, "witness": "(join x z)", "table": "0111"}
    code, recs, _, _ = run(capsys, "free-gen", MAJORITY, "--arity", "3")
    assert code == 0 and len(recs) == 4
    code, recs, _, err = run(capsys, "free-gen", LATTICE, "--cap", "2")
    assert code == 3 and "warning" in err


def test_find(capsys):
    code, recs, _, _ = run(capsys, "find", MAJORITY, "--condition", "jonsson", "--min-n", "6")
    assert code == 0 and recs[0]["n"] == 2 and recs[1]["term"] == "(m x y z)"
    code, recs, _, err = run(capsys, "find", MAJORITY, "--condition", "pixley")
    assert code == 0 and recs[0]["realized"] is False and "not realizable" in err
    code, recs, _, _ = run(capsys, "find", PIXLEY, "--condition", "pixley")
    assert recs[1]["term"] == "(p x y z)"
    code, recs, _, _ = run(capsys, "find", LATTICE, "--condition", "jonsson", "--n", "3")
    assert code == 0 and recs[0]["pattern"] == "><"


def test_directify_verify_and_dot(capsys, tmp_path, sym6):
    certs, dot = tmp_path / "c.json", tmp_path / "p.dot"
    code, recs, _, _ = run(capsys, "directify", "--condition", "jonsson", "--terms", sym6,
                           "--certs", certs, "--dot", dot)
    assert code == 0 and len(recs) == 5
    assert dot.read_text().startswith("digraph")
    bundle = json.loads(certs.read_text())
    assert bundle["manifest"]["inputs"]["condition"] == "jonsson"
    code, recs, _, _ = run(capsys, "verify", "--certs", certs, "--hypotheses", "jonsson,6")
    assert code == 0 and recs[0]["ok"]
    bundle["steps"][10]["claim"]["rhs"] = bundle["steps"][10]["claim"]["lhs"] + 1
    certs.write_text(json.dumps(bundle))
    code, recs, _, err = run(capsys, "verify", "--certs", certs)
    assert code == 1 and recs[0]["failed_step"] is not None and "rejected at step" in err
    code, _, out, _ = run(capsys, "export-dot", tmp_path / "c.json")
    assert out.startswith("digraph certificate")


def test_directify_passthrough_and_from_model(capsys, tmp_path):
    one = tmp_path / "one.txt"
    one.write_text("(m x y z)\n")
    code, recs, _, _ = run(capsys, "directify", "--condition", "jonsson", "--terms", one)
    assert code == 0 and recs == [{"record": "term", "index": 1, "term": "(m x y z)"}]
    code, recs, _, _ = run(capsys, "directify", "--condition", "jonsson", "--from-model", LATTICE)
    assert code == 0 and recs[0]["term"] == "(join (meet x y) (join (meet x z) (meet y z)))"
    assert recs[-1] == {"record": "model-check", "ok": True}


def test_directify_size_guard(capsys, sym6):
    code, _, _, err = run(capsys, "directify", "--condition", "jonsson", "--terms", sym6,
                          "--max-term-nodes", "10")
    assert code == 3 and "max-term-nodes" in err


def test_directify_gumm_and_alvin(capsys, tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("".join(f"(t{i} x y z)\n" for i in range(1, 5)))
    for cond in ("gumm", "alvin"):
        code, recs, _, _ = run(capsys, "directify", "--condition", cond, "--terms", p)
        assert code == 0 and len(recs) == 4


def _lattice_defs():
    """Definitions t1..t5 := Jónsson terms of the lattice for n = 6."""
    F2 = generate_free(load_algebra(LATTICE), 2)
    F3 = generate_free(F2.algebra, 3)
    edges, _ = model_edges(F2, F3)
    w = realize_in_model(catalog_path("jonsson", 6), edges, F2)
    return [f"t{i} = {to_sexpr(t)}" for i, t in enumerate(w.terms(), start=1)]


def test_verify_club_terms_on_lattice(capsys, tmp_path):
    lines = _lattice_defs()
    lines += [f"{name} = {text}" for name, text in STAR + DIAMOND + CLUB]
    lines += [f"(tc{i} x y z)" for i in range(1, 6)]
    p = tmp_path / "club.txt"
    p.write_text("\n".join(lines) + "\n")
    assert len(read_terms(p)) == 5
    code, recs, _, _ = run(capsys, "verify", "--model", LATTICE, "--terms", p,
                           "--identities", "directed-jonsson,6")
    assert code == 0 and recs[0]["ok"]


def test_directify_output_round_trip(capsys, tmp_path, sym6):
    code, recs, _, _ = run(capsys, "directify", "--condition", "jonsson", "--terms", sym6)
    p = tmp_path / "out.txt"
    p.write_text("\n".join(_lattice_defs() + [r["term"] for r in recs]) + "\n")
    code, recs, _, _ = run(capsys, "verify", "--model", LATTICE, "--terms", p,
                           "--identities", "directed-jonsson,6")
    assert code == 0 and recs[0]["ok"]


def test_verify_model_failure(capsys, tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("(m x y z)\n")
    code, recs, _, _ = run(capsys, "verify", "--model", MAJORITY, "--terms", p,
                           "--identities", "pixley,2")
    assert code == 1 and not recs[0]["ok"] and "assignment" in recs[0]


def test_flip(capsys, tmp_path):
    code, recs, _, err = run(capsys, "flip", PIXLEY, "-f", "alvin-heads,4",
                             "-g", "directed-jonsson,4")
    assert code == 0 and recs[-1]["ok"] and "p'" in err
    code, recs, _, _ = run(capsys, "flip", MAJORITY, "-f", ">", "-g", ">")
    assert code == 0 and recs[0]["term"] == "(m x y z)"
    code, _, _, err = run(capsys, "flip", MAJORITY, "-f", "<", "-g", ">")
    assert code == 1 and "not realized" in err


def test_catalog(capsys):
    code, recs, _, _ = run(capsys, "catalog", "jonsson", "--n", "4", "--identities")
    assert recs[0]["arrows"] == "><>" and len(recs) == 1 + 7
    code, recs, _, _ = run(capsys, "catalog")
    assert {r["condition"] for r in recs} >= {"jonsson", "pixley", "gumm"}


@pytest.mark.parametrize("argv", [
    [], ["find"], ["free-gen", "/nonexistent.alg"], ["verify"],
    ["verify", "--model", LATTICE, "--terms", "/nonexistent", "--identities", "jonsson,2"],
    ["find", LATTICE, "--condition", "jonsson", "--n", "2", "--min-n", "3"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2
    capsys.readouterr()


def test_catalog_reports_bad_n(capsys):
    code, recs, _, err = run(capsys, "catalog", "jonsson", "--n", "1")
    assert code == 2 and recs == [] and "needs n >= 2" in err


def test_deterministic_output(capsys, sym6):
    a = run(capsys, "directify", "--condition", "jonsson", "--terms", sym6)[2]
    b = run(capsys, "directify", "--condition", "jonsson", "--terms", sym6)[2]
    assert a == b
