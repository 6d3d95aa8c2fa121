import json
import random
import shutil
import subprocess

import pytest

from klledger.cli import main
from klledger.fusion import kl_match_verdict
from klledger.report import HYPOTHESES, run_kl_verify


def run(argv):
    return main([str(a) for a in argv])


def test_kl_verify_a1_p2_matches(tmp_path):
    out = tmp_path / "r.json"
    assert run(["kl-verify", "A1", "2", "--json", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["verdict"]["kind"] == "MATCH"
    assert rep["nichols"]["by_total_degree"] == [1, 1]
    assert rep["nichols"]["product_formula_match"] is True
    assert rep["fp_ledger"]["fp_mod_N"]["value"] == 8
    assert rep["fp_ledger"]["fp_relative_center"]["value"] == 16
    assert all(rep["fp_ledger_identities"].values())
    assert rep["hypotheses"] == HYPOTHESES
    assert all(rep["discriminant"]["cocycle_checks"].values())
    assert "timings_seconds" in rep


def test_degenerate_run_is_a_mismatch(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["kl-verify", "A2", "1", "--allow-degenerate", "--cutoff", "8", "--json", out]) == 1
    rep = json.loads(out.read_text())
    assert rep["verdict"]["kind"] == "MISMATCH"
    assert rep["verdict"]["qdim"] is None
    assert rep["nichols"]["status"]["kind"] == "CutoffReached"
    assert rep["nichols"]["infinite_certificate"]["q_ii"] == "1"
    assert "infinite dimensional" in rep["verdict"]["text"]
    assert "standing hypotheses" in capsys.readouterr().out


def test_degenerate_charges_without_override():
    assert run(["kl-verify", "A2", "1"]) == 4


def test_unsupported_type_exit_code():
    assert run(["kl-verify", "B2", "2"]) == 5


def test_usage_errors_exit_64():
    with pytest.raises(SystemExit) as exc:
        run(["kl-verify", "A2"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 64
    assert run(["kl-verify", "A1", "2", "--t-schedule", "0.1,0.01"]) == 64
    assert run(["nichols", "--q-matrix", "/nonexistent/q.json"]) == 64


def test_stable_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["kl-verify", "A1", "3", "--stable", "--json", a]) == 0
    assert run(["kl-verify", "A1", "3", "--stable", "--json", b, "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "timings_seconds" not in json.loads(a.read_text())


def test_inconclusive_when_tolerance_is_tiny():
    rep, code = run_kl_verify("A1", 2, tolerance=1e-6, stable=True)
    assert code in (1, 2)
    assert rep["verdict"]["kind"] in ("MISMATCH", "INCONCLUSIVE")


def test_randomized_verdict_exit_codes():
    rng = random.Random(20240607)
    seen = set()
    for _ in range(200):
        dim_b = rng.randint(1, 100)
        qdim = dim_b * rng.uniform(0.5, 1.5)
        err = rng.uniform(0, 0.2) * dim_b
        tol = rng.uniform(0.01, 0.2) * dim_b
        v = kl_match_verdict(dim_b, qdim, err, tol)
        gap = abs(qdim - dim_b)
        expected = 0 if (gap <= tol and err <= tol) else (1 if gap > tol + err else 2)
        assert v.exit_code == expected
        seen.add(expected)
    assert seen == {0, 1, 2}


def test_nichols_subcommand(tmp_path, capsys):
    qfile = tmp_path / "q.json"
    qfile.write_text(json.dumps({"rank": 2, "exponents": [["1/2", "3/4"], ["3/4", "1/2"]]}))
    out = tmp_path / "t.json"
    assert run(["nichols", "--q-matrix", qfile, "--json", out]) == 0
    table = json.loads(out.read_text())["table"]
    assert table["by_total_degree"] == [1, 2, 2, 2, 1]
    assert table["status"] == {"kind": "Finite", "top_degree": 4, "total_dimension": 8}
    assert "total 8" in capsys.readouterr().out


def test_nichols_subcommand_cutoff(tmp_path):
    qfile = tmp_path / "q.json"
    qfile.write_text(json.dumps({"rank": 2, "exponents": [["0", "1/2"], ["1/2", "0"]]}))
    out = tmp_path / "t.json"
    assert run(["nichols", "--q-matrix", qfile, "--cutoff", "6", "--json", out]) == 0
    table = json.loads(out.read_text())["table"]
    assert table["by_total_degree"] == [1, 2, 3, 4, 5, 6, 7]
    assert table["status"]["kind"] == "CutoffReached"


def test_bad_q_matrix_file(tmp_path):
    qfile = tmp_path / "q.json"
    qfile.write_text(json.dumps({"rank": 3, "exponents": [["1/2"]]}))
    assert run(["nichols", "--q-matrix", qfile]) in (4, 64)


def test_lattice_subcommands(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"gram": [[8]]}))
    out = tmp_path / "o.json"
    assert run(["lattice", "disc", "--gram", g, "--json", out]) == 0
    assert json.loads(out.read_text())["discriminant"]["factors"] == [8]
    assert run(["lattice", "isotropic", "--gram", g, "--json", out]) == 0
    assert json.loads(out.read_text())["isotropic_subgroups"] == [[[0]], [[0], [4]]]
    assert run(["lattice", "extend", "--gram", g, "--subgroup", "4", "--json", out]) == 0
    ext = json.loads(out.read_text())["extensions"]
    assert ext[0]["local"]["factors"] == [2]
    assert run(["lattice", "extend", "--gram", g, "--subgroup", "2"]) == 4


def test_lattice_with_charges(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"gram": [[4, -2], [-2, 4]], "charges": [["1/2", "0"], ["0", "1/2"]]}))
    out = tmp_path / "o.json"
    assert run(["lattice", "disc", "--gram", g, "--json", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["braiding"]["exponents"] == [["1/2", "3/4"], ["3/4", "1/2"]]


def test_character_subcommand(tmp_path):
    out = tmp_path / "c.json"
    assert run(["character", "A1", "2", "--cutoff", "6", "--json", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["expected"] == "1/2"
    assert abs(rep["estimate"]["value"] - 0.5) < 0.05
    assert abs(rep["quantum_dimension"]["value"] - 2) < 0.1
    coeffs = [int(t["coeff"]) for t in rep["character"]["terms"]]
    assert coeffs[:4] == [1, 1, 4, 5]


def test_character_rejects_bad_weight():
    assert run(["character", "A2", "2", "--s", "1"]) == 64


def test_json_to_stdout(capsys):
    assert run(["lattice", "disc", "--gram", "/dev/null"]) == 64
    capsys.readouterr()


@pytest.mark.skipif(shutil.which("kl-ledger") is None, reason="console script not installed")
def test_console_script_entry_point():
    proc = subprocess.run(["kl-ledger", "kl-verify", "A1", "2", "--stable", "--json", "-"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"]["kind"] == "MATCH"
