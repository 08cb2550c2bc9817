"""File format, command dispatch, exit codes, JSON report stability."""

import json
import os

import pytest

from solvspin.cli import (
    AlgebraFileError,
    JobSpec,
    main,
    parse_algebra_text,
    run,
    serialize_algebra,
)

HEIS3 = "dim 3\nsigns +1 +1 +1\n1 2 3 1\n"
BROKEN = "dim 3\nsigns +1 +1 +1\n1 2 3 1\n1 3 2 1\n2 3 2 1\n"


@pytest.fixture
def heis3_file(tmp_path):
    p = tmp_path / "heis3.alg"
    p.write_text(HEIS3)
    return str(p)


class TestParsing:
    def test_heis3(self):
        M, decomp = parse_algebra_text(HEIS3)
        assert M.dim == 3
        assert M.algebra.structure[0][1][2] == 1
        assert M.algebra.structure[1][0][2] == -1
        assert decomp is None

    def test_roundtrip_is_canonical(self):
        M, decomp = parse_algebra_text(HEIS3)
        assert serialize_algebra(M, decomp) == HEIS3
        text = "dim 4\nsigns +1 -1 +1 -1\n1 2 3 1/2\n1 3 4 -2\nabelian: 4\n"
        M2, d2 = parse_algebra_text(text)
        assert serialize_algebra(M2, d2) == text

    def test_duplicate_pair_rejected(self):
        with pytest.raises(AlgebraFileError):
            parse_algebra_text("dim 3\n1 2 3 1\n1 2 3 1\n")

    def test_reversed_pair_rejected(self):
        with pytest.raises(AlgebraFileError) as err:
            parse_algebra_text("dim 3\n1 2 3 1\n2 1 3 1\n")
        assert err.value.line_no == 3

    def test_malformed_line_reports_number(self):
        with pytest.raises(AlgebraFileError) as err:
            parse_algebra_text("dim 3\nsigns +1 +1 +1\n1 2 oops 1\n")
        assert err.value.line_no == 3

    def test_abelian_line_attaches_decomposition(self):
        text = "dim 4\nsigns +1 +1 +1 +1\n1 2 3 1\n1 4 1 1/2\n2 4 2 1/2\n3 4 3 1\nabelian: 4\n"
        M, decomp = parse_algebra_text(text)
        assert decomp is not None
        assert decomp.abelian_indices == (3,)

    def test_bad_signs_rejected(self):
        with pytest.raises(AlgebraFileError):
            parse_algebra_text("dim 2\nsigns +1 +2\n")


class TestCommands:
    def test_validate_ok(self, heis3_file, capsys):
        assert main(["validate", heis3_file]) == 0
        assert "jacobi: ok" in capsys.readouterr().out

    def test_validate_broken_exits_one(self, tmp_path, capsys):
        p = tmp_path / "broken.alg"
        p.write_text(BROKEN)
        assert main(["validate", str(p)]) == 1
        assert "violations" in capsys.readouterr().out

    def test_curvature_json(self, heis3_file, capsys):
        assert main(["curvature", heis3_file, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["schema"] == 1
        assert data["results"]["scalar_curvature"] == "-1/2"
        assert data["results"]["ricci"][0][0] == "-1/2"

    def test_nilsoliton(self, heis3_file, capsys):
        assert main(["nilsoliton", heis3_file, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        res = data["results"]["nilsoliton"]
        assert res["lambda"] == "-3/2"
        assert res["derivation"][2][2] == "2"

    def test_extend_then_classify(self, heis3_file, tmp_path, capsys):
        out = str(tmp_path / "ext.alg")
        assert main(["extend", heis3_file, "--out", out]) == 0
        capsys.readouterr()
        assert main(["classify", out, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        verdict = data["results"]["classification"]["verdict"]
        assert verdict["kind"] == "NoKillingSpinor"
        assert verdict["reason"] == "g non-abelian"

    def test_classify_halfspace_inline(self, capsys):
        code = main(["classify", "halfspace", "n=4", "r=1/2", "signs=+1,+1,+1,+1", "--json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        verdict = data["results"]["classification"]["verdict"]
        assert verdict["kind"] == "HyperbolicHalfSpace"
        assert verdict["r"] == "1/2"

    def test_killing_invariant(self, heis3_file, tmp_path, capsys):
        out = str(tmp_path / "ext.alg")
        main(["extend", heis3_file, "--out", out])
        capsys.readouterr()
        assert main(["killing-invariant", out, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        cands = data["results"]["killing"]["candidates"]
        assert len(cands) == 2
        assert all(c["kernel_dimension"] == 0 for c in cands)

    def test_killing_halfspace(self, capsys):
        assert main(["killing-halfspace", "halfspace n=2 r=1 signs=+1,+1", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["results"]["combined_dimension"] >= 2
        for b in data["results"]["branches"]:
            assert b["residual_zero"] and b["amended_identity"]

    def test_classify_needs_decomposition(self, heis3_file):
        assert main(["classify", heis3_file]) == 1

    def test_missing_file_exits_one(self):
        assert main(["validate", "no-such-file.alg"]) == 1

    def test_classify_float_backend_rejected(self, heis3_file):
        assert main(["classify", heis3_file, "--backend", "float"]) == 1

    def test_float_backend_curvature(self, heis3_file, capsys):
        assert main(["curvature", heis3_file, "--backend", "float", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert abs(data["results"]["ricci"][2][2] - 0.5) < 1e-9

    def test_env_var_backend(self, heis3_file, capsys, monkeypatch):
        monkeypatch.setenv("SOLVSPIN_BACKEND", "float")
        assert main(["curvature", heis3_file, "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["backend"] == "float"


class TestDeterminism:
    def test_identical_jobspec_identical_report(self, heis3_file):
        job = JobSpec(command="curvature", inputs=(heis3_file,))
        rep1, code1 = run(job)
        rep2, code2 = run(job)
        rep1.pop("timing_ms")
        rep2.pop("timing_ms")
        assert rep1 == rep2 and code1 == code2 == 0

    def test_report_carries_schema_and_digest(self, heis3_file):
        rep, _ = run(JobSpec(command="validate", inputs=(heis3_file,)))
        assert rep["schema"] == 1
        assert len(rep["digest"]) == 16


class TestBatch:
    def test_directory_input(self, tmp_path, capsys):
        (tmp_path / "a.alg").write_text(HEIS3)
        (tmp_path / "b.alg").write_text(BROKEN)
        (tmp_path / "ignored.txt").write_text("not an algebra")
        code = main(["validate", str(tmp_path), "--json"])
        data = json.loads(capsys.readouterr().out)
        assert data["summary"]["total"] == 2
        assert data["summary"]["succeeded"] == 1
        assert data["summary"]["failed"] == 1
        assert code == 1

    def test_batch_failure_does_not_abort(self, tmp_path):
        (tmp_path / "bad.alg").write_text("dim oops\n")
        (tmp_path / "good.alg").write_text(HEIS3)
        rep, _ = run(JobSpec(command="validate", inputs=(str(tmp_path),)))
        assert rep["summary"]["total"] == 2
        names = [os.path.basename(item["input"]) for item in rep["batch"]]
        assert names == ["bad.alg", "good.alg"]
        assert "error" in rep["batch"][0]
        assert "error" not in rep["batch"][1]
