import json
import math

import pytest

import entorder as eo
from entorder.cli import run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


@pytest.fixture(scope="module")
def specdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("specs")
    assert run(["gen", "tmss", "--q", "0.5", "--n", "1000", "-o", str(d / "tmss05.spec")]) == 0
    assert run(["gen", "tmss", "--q", "0.6", "--n", "600", "-o", str(d / "tmss06.spec")]) == 0
    assert run(["gen", "tmss", "--q", "0.4", "--n", "600", "-o", str(d / "tmss04.spec")]) == 0
    assert run(["gen", "psi", "--k", "0", "--n", "2000", "-o", str(d / "psi0.spec")]) == 0
    assert run(["gen", "psi", "--k", "1", "--n", "2000", "-o", str(d / "psi1.spec")]) == 0
    eo.write_spectrum(eo.build_spectrum((0.6, 0.4)), d / "rank2.spec")
    eo.write_spectrum(eo.build_spectrum((0.5, 0.3, 0.2)), d / "rank3.spec")
    return d


class TestGenValidate:
    def test_gen_then_validate(self, specdir, capsys):
        code, rep = run_json(capsys, ["validate", str(specdir / "tmss05.spec")])
        assert code == 0
        assert rep["valid"] is True
        assert rep["conditions"]["all_pass"] is True

    def test_info(self, specdir, capsys):
        code, rep = run_json(capsys, ["info", str(specdir / "tmss05.spec")])
        assert code == 0
        assert rep["stats"]["schmidt_rank"] == "truncated"
        assert rep["stats"]["mean_excitation"] == pytest.approx(1 / 3, abs=1e-9)

    def test_info_exact_file(self, specdir, capsys):
        code, rep = run_json(capsys, ["info", str(specdir / "rank2.spec")])
        assert code == 0
        assert rep["stats"]["schmidt_rank"] == 2
        assert rep["stats"]["excitation_tail_bound"] == 0.0
        assert rep["stats"]["log_excitation_tail_bound"] is None

    def test_gen_requires_output(self, capsys):
        assert run(["gen", "tmss", "--q", "0.5"]) == 1


class TestCompare:
    def test_self_slocc_two_way(self, specdir, capsys):
        f = str(specdir / "tmss05.spec")
        code, rep = run_json(capsys, ["compare", f, f, "--mode", "slocc"])
        assert code == 0
        assert rep["verdict"] == "TwoWay"
        assert rep["epsilon"]["a_to_b"] == 1.0

    def test_tmss_one_way(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "compare", str(specdir / "tmss06.spec"), str(specdir / "tmss04.spec"),
            "--mode", "slocc", "--window", "0:500",
        ])
        assert code == 0
        assert rep["verdict"] == "OneWayAtoB"
        assert rep["trend"]["reverse"] == "DivergesDown"

    def test_rank_probability_zero(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "compare", str(specdir / "rank2.spec"), str(specdir / "rank3.spec"),
            "--mode", "prob",
        ])
        assert code == 0
        assert rep["probability"] == 0.0

    def test_locc_modes(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "compare", str(specdir / "tmss04.spec"), str(specdir / "tmss06.spec"),
            "--mode", "locc",
        ])
        assert code == 0 and rep["convertible"] is False
        # the reverse has no in-window violation, so truncation blocks it
        assert run([
            "compare", str(specdir / "tmss06.spec"), str(specdir / "tmss04.spec"),
            "--mode", "locc",
        ]) == 3

    def test_psi_zero_matches_tmss(self, specdir, capsys, tmp_path):
        q = repr(math.exp(-0.5))
        t = tmp_path / "t.spec"
        assert run(["gen", "tmss", "--q", q, "--n", "2000", "-o", str(t)]) == 0
        code, rep = run_json(capsys, [
            "compare", str(specdir / "psi0.spec"), str(t), "--mode", "slocc",
        ])
        assert code == 0
        assert rep["verdict"] == "TwoWay"


class TestCertify:
    def test_psi_pair(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "certify", str(specdir / "psi1.spec"), str(specdir / "psi0.spec"),
        ])
        assert code == 0
        assert rep["found"] is True
        assert len(rep["certificate"]["up_witnesses"]) >= 5
        assert len(rep["certificate"]["down_witnesses"]) >= 5

    def test_monotone_pair_not_found(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "certify", str(specdir / "tmss06.spec"), str(specdir / "tmss04.spec"),
        ])
        assert code == 0
        assert rep["found"] is False


class TestEstimateR:
    def test_smoke(self, specdir, capsys):
        code, rep = run_json(capsys, [
            "estimate-r", str(specdir / "psi0.spec"), "--family", "xi",
            "--r-min", "1.0", "--r-max", "2.0", "--steps", "3",
            "--member-n", "2000",
        ])
        assert code == 0
        assert rep["r_minus"] == 1.0
        assert rep["r_plus"] == 2.0
        assert [v for _, v in rep["per_r"]] == ["Incomparable"] * 3


class TestExitCodes:
    def test_missing_file(self):
        assert run(["validate", "/nonexistent/file.spec"]) == 2

    def test_malformed_file(self, tmp_path):
        f = tmp_path / "bad.spec"
        f.write_text("nonsense\n")
        assert run(["validate", str(f)]) == 2

    def test_usage_error(self):
        assert run(["compare", "a", "b", "--mode", "bogus"]) == 1
        assert run(["frobnicate"]) == 1
        assert run(["gen", "tmss", "--q", "1.5", "-o", "/tmp/x.spec"]) == 1

    def test_sub_nat_witness_step_rejected(self, specdir):
        assert run([
            "certify", str(specdir / "psi1.spec"), str(specdir / "psi0.spec"),
            "--witness-step", "0.5",
        ]) == 1

    def test_flag_validation(self, specdir, tmp_path):
        out = str(tmp_path / "x.spec")
        assert run(["gen", "tmss", "--q", "0.5", "--n", "0", "-o", out]) == 1
        assert run(["gen", "xi", "--r", "1.5", "--offset-grid", "0", "-o", out]) == 1
        assert run(["estimate-r", str(specdir / "psi0.spec"),
                    "--r-min", "2", "--r-max", "1"]) == 1
        assert run(["compare", str(specdir / "psi1.spec"), str(specdir / "psi0.spec"),
                    "--mode", "slocc", "--window", "-5:100"]) == 1

    def test_operation_error(self, specdir):
        # slocc window beyond the truncation-safe horizon
        assert run([
            "compare", str(specdir / "tmss05.spec"), str(specdir / "tmss05.spec"),
            "--mode", "slocc", "--window", "0:1000",
        ]) == 3


class TestDeterminism:
    def test_byte_identical_reports(self, specdir, capsys):
        argv = ["compare", str(specdir / "psi1.spec"), str(specdir / "psi0.spec"), "--mode", "slocc"]
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        second = capsys.readouterr().out
        assert first.encode() == second.encode()

    def test_gen_files_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.spec", tmp_path / "b.spec"
        assert run(["gen", "psi", "--k", "1", "--n", "500", "-o", str(a)]) == 0
        assert run(["gen", "psi", "--k", "1", "--n", "500", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
