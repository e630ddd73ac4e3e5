import json

import pytest

from refinery.cli import form_matrix, main
from refinery.fileio import format_polytope, format_refinement, parse_refinement
from refinery.formspace import build_form_space
from refinery.polytope import pentagon, simplex
from refinery.refinement import StatisticalModel, holevo_refinement, square


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    return code, report, err


@pytest.fixture
def files(tmp_path):
    sq = tmp_path / "square.txt"
    sq.write_text(format_polytope(square()))
    pent = tmp_path / "pentagon.txt"
    pent.write_text(format_polytope(pentagon()))
    bad = tmp_path / "bad.txt"
    bad.write_text("ambient 2 field Q\nV\n0 0\n1 oops\n")
    return {"square": str(sq), "pentagon": str(pent), "bad": str(bad), "dir": tmp_path}


def test_example_parallelogram(capsys):
    code, rep, err = run(capsys, "example", "parallelogram")
    assert code == 0
    assert rep["summary"] == "axioms: I,II,III,IV pass"
    assert "axioms: I,II,III,IV pass" in err
    assert set(rep) == {"command", "inputs", "results", "summary", "timing", "version"}


def test_counterexample(capsys):
    code, rep, _ = run(capsys, "counterexample")
    assert code == 0
    res = rep["results"]
    assert res["non_extendable_count"] == 4 and res["all_certificates_verified"]
    certs = [f["certificate"] for f in res["forms"] if not f["extendable"]]
    assert len(certs) == 4
    assert all(isinstance(x, str) for c in certs for x in c)


def test_formspace_malformed_exits_2(capsys, files):
    code, rep, err = run(capsys, "formspace", files["bad"])
    assert code == 2 and rep is None
    assert "line 4, column 3" in err


def test_missing_file_exits_2(capsys, files):
    code, _, _ = run(capsys, "formspace", str(files["dir"] / "nope.txt"))
    assert code == 2


def test_usage_error_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_formspace_pentagon_matrix(capsys, files):
    code, rep, _ = run(capsys, "formspace", files["pentagon"], "--matrix")
    assert code == 0
    res = rep["results"]
    assert res["extreme_form_count"] == 12 and res["dimension"] == 3
    assert len(res["matrix"]) == 5
    assert all(len(row) == 5 for row in res["matrix"])
    assert rep["inputs"][files["pentagon"]]


def test_form_matrix_rows_are_complement_representatives():
    rows = form_matrix(build_form_space(square()))
    assert len(rows) == 2
    assert all(sum(r) == 2 for r in rows)


def test_results_section_is_deterministic(capsys, files):
    _, a, _ = run(capsys, "formspace", files["square"], "--matrix")
    _, b, _ = run(capsys, "formspace", files["square"], "--matrix")
    assert json.dumps(a["results"]) == json.dumps(b["results"])
    assert a["inputs"] == b["inputs"]


def test_holevo_then_verify(capsys, files):
    out = files["dir"] / "ref.txt"
    code, rep, _ = run(capsys, "holevo", files["pentagon"], "--output", str(out))
    assert code == 0 and rep["results"]["verification"]["passed"]
    assert out.read_text() == rep["results"]["refinement"]
    code, rep, _ = run(capsys, "verify", files["pentagon"], str(out))
    assert code == 0 and rep["summary"] == "axioms: I,II,III,IV pass"


def test_verify_failure_exits_1(capsys, files):
    # a refinement of the pentagon checked against the square
    R = holevo_refinement(StatisticalModel.of(square()))
    path = files["dir"] / "sq_ref.txt"
    path.write_text(format_refinement(R.T, R.f, R.g))
    code, rep, _ = run(capsys, "verify", files["pentagon"], str(path))
    assert code == 1 and not rep["results"]["verification"]["axioms"]["II"]["passed"]
    R = holevo_refinement(StatisticalModel.of(square()))
    T, f, g = parse_refinement(format_refinement(R.T, R.f, R.g))
    # swapping g for the identity on the form space keeps shapes but breaks III/IV
    from refinery.affmap import PartialAffineMap
    bad = format_refinement(T, f, PartialAffineMap.identity(R.omegaT.space))
    path.write_text(bad)
    code, rep, _ = run(capsys, "verify", files["square"], str(path))
    assert code == 1 and not rep["results"]["verification"]["passed"]


def test_search_square_found(capsys, files):
    code, rep, _ = run(capsys, "search", "--model", files["square"], "--simplex-vertices", "4",
                       "--grid", "1", "--budget", "10000")
    assert code == 0 and rep["results"]["verdict"] == "found"


def test_search_budget(capsys, files):
    code, rep, _ = run(capsys, "search", "--model", files["pentagon"], "--simplex-vertices", "4",
                       "--grid", "2", "--budget", "0")
    assert code == 0 and rep["results"]["verdict"] == "budget_exhausted"


def test_check_conjectures(capsys, files):
    ref = files["dir"] / "ref.txt"
    R = holevo_refinement(StatisticalModel.of(pentagon()))
    ref.write_text(format_refinement(R.T, R.f, R.g))
    code, rep, _ = run(capsys, "check-conjecture", "1", "--model", files["pentagon"], "--refinement", str(ref))
    assert code == 0 and rep["results"]["witness_verified"]
    code, rep, _ = run(capsys, "check-conjecture", "3", "--model", files["pentagon"], "--refinement", str(ref))
    assert code == 0 and rep["results"]["violations"] == []


def test_export_off(capsys, files):
    out = files["dir"] / "oct.off"
    code, _, _ = run(capsys, "export-off", files["square"], str(out), "--formspace")
    assert code == 0
    assert out.read_text().splitlines()[1] == "6 8 0"
    tet = files["dir"] / "tet.txt"
    tet.write_text(format_polytope(simplex(3)))
    code, _, err = run(capsys, "export-off", str(tet), str(out), "--formspace")
    assert code == 2 and "projection" in err
    code, _, _ = run(capsys, "export-off", str(tet), str(out), "--formspace", "--project")
    assert code == 0 and out.read_text().splitlines()[1].startswith("16 ")
