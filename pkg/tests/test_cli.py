import json

import numpy as np
import pytest

from psdmask.cli import EXIT_OK, EXIT_REFUTED, EXIT_SUITE_FAIL, EXIT_USAGE, main
from psdmask.linalg import matrix_from_json
from psdmask.verify import canonical_json


@pytest.fixture
def files(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return {
        "rule_k2": write("rule_k2.json", {"kind": "contiguous_partition", "params": {"k": 2}}),
        "rule_k3": write("rule_k3.json", {"kind": "contiguous_partition", "params": {"k": 3}}),
        "rule_singletons": write("rule_s.json", {"kind": "all_singletons", "params": {}}),
        "rule_chain": write("rule_chain.json", {"kind": "overlapping_chain", "params": {}}),
        "f_half": write(
            "f_half.json",
            {"variant": "scalar_multiple",
             "params": {"c": 0.5, "inner": {"variant": "identity", "params": {}}}},
        ),
        "f_neg": write(
            "f_neg.json",
            {"variant": "scalar_multiple",
             "params": {"c": -0.75, "inner": {"variant": "identity", "params": {}}}},
        ),
        "f_id": write("f_id.json", {"variant": "identity", "params": {}}),
        "disc1": write("disc1.json", {"kind": "disc", "rho": 1.0}),
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestClassify:
    def test_singletons_constraint(self, files, capsys):
        code, out, _ = run(
            ["classify", "--rule", files["rule_singletons"], "--json"], capsys
        )
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        assert report["regime"] == "R2-Singletons"
        assert report["constraint"] == "f(x) ≤ x on I∩ℝ≥0"

    def test_partition_interval_fractions(self, files, capsys):
        code, out, _ = run(["classify", "--rule", files["rule_k3"], "--json"], capsys)
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        assert report["regime"] == "R3a-PartitionAll-FiniteK"
        assert report["c_interval"] == ["-1/2", "1"]
        assert report["K"] == 3

    def test_chain_needs_identity(self, files, capsys):
        code, out, _ = run(["classify", "--rule", files["rule_chain"], "--json"], capsys)
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        assert report["regime"] == "R4-Overlapping"
        assert report["family"] == "identity only"


class TestVerify:
    def test_preserved_exit_zero(self, files, capsys):
        code, _, _ = run(
            ["verify", "--rule", files["rule_k2"], "--f", files["f_half"],
             "--domain", files["disc1"], "--samples", "30", "--max-n", "5"],
            capsys,
        )
        assert code == EXIT_OK

    def test_refuted_exit_three(self, files, capsys):
        code, out, _ = run(
            ["verify", "--rule", files["rule_k3"], "--f", files["f_neg"],
             "--domain", files["disc1"], "--samples", "30", "--json"],
            capsys,
        )
        assert code == EXIT_REFUTED
        report = json.loads(out)["report"]
        assert report["outcome"] == "Refuted"
        ce = report["counterexample"]
        assert ce["provenance"] == "all_ones"
        matrix = matrix_from_json(ce["matrix"])
        assert matrix.shape == (3, 3)

    def test_identity_always_passes(self, files, capsys):
        code, _, _ = run(
            ["verify", "--rule", files["rule_chain"], "--f", files["f_id"],
             "--domain", files["disc1"], "--samples", "20", "--max-n", "5"],
            capsys,
        )
        assert code == EXIT_OK

    def test_bad_input_exit_two(self, files, capsys):
        code, _, err = run(
            ["verify", "--rule", str(files["tmp"] / "missing.json"), "--f", files["f_id"]],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "error" in err

    def test_reports_byte_identical_modulo_timestamp(self, files, capsys):
        argv = ["verify", "--rule", files["rule_k3"], "--f", files["f_neg"],
                "--domain", files["disc1"], "--samples", "25", "--seed", "11", "--json"]
        _, out1, _ = run(argv, capsys)
        _, out2, _ = run(argv, capsys)
        body1 = json.loads(out1)["report"]
        body2 = json.loads(out2)["report"]
        assert canonical_json(body1) == canonical_json(body2)
        assert json.loads(out1)["timestamp"] != ""


class TestRefute:
    def test_outside_scalar(self, files, tmp_path, capsys):
        dom = tmp_path / "dinf.json"
        dom.write_text(json.dumps({"kind": "disc", "rho": "inf"}))
        code, out, _ = run(
            ["refute", "--rule", files["rule_k3"], "--c=-11/20",
             "--domain", str(dom), "--x", "1.0", "--json"],
            capsys,
        )
        assert code == EXIT_REFUTED
        report = json.loads(out)["report"]
        assert report["counterexample"]["min_eig"] == pytest.approx(-0.1, abs=1e-10)

    def test_inside_scalar_is_usage_error(self, files, capsys):
        code, _, err = run(
            ["refute", "--rule", files["rule_k3"], "--c=-1/2", "--domain", files["disc1"]],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "inside" in err


class TestWitness:
    def test_all_ones(self, files, capsys):
        code, out, _ = run(
            ["witness", "all_ones", "--x", "1.0", "--n", "4",
             "--domain", files["disc1"], "--json"],
            capsys,
        )
        # x = 1.0 sits on the open boundary of the unit disc
        assert code == EXIT_USAGE
        code, out, _ = run(
            ["witness", "all_ones", "--x", "0.9", "--n", "4",
             "--domain", files["disc1"], "--json"],
            capsys,
        )
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        M = matrix_from_json(report["matrix"])
        assert np.array_equal(M, 0.9 * np.ones((4, 4)))
        assert report["psd"]["is_psd"]

    def test_overlap_probe_boundary(self, files, tmp_path, capsys):
        dom = tmp_path / "dinf.json"
        dom.write_text(json.dumps({"kind": "disc", "rho": "inf"}))
        code, out, _ = run(
            ["witness", "overlap_probe", "--r", "1.0", "--z", "0.5",
             "--domain", str(dom), "--json"],
            capsys,
        )
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        assert report["psd"]["min_eig"] == pytest.approx(0.0, abs=1e-10)

    def test_round_trip_bit_identical(self, files, capsys):
        code, out, _ = run(
            ["witness", "duplicated_pair", "--w", "0.8", "--z", "0.4j",
             "--domain", files["disc1"], "--json"],
            capsys,
        )
        assert code == EXIT_OK
        entries = json.loads(out)["report"]["matrix"]
        M = matrix_from_json(entries)
        from psdmask.linalg import matrix_to_json

        assert matrix_to_json(M) == entries

    def test_rank_one_vector(self, files, capsys):
        code, out, _ = run(
            ["witness", "rank_one", "--v", "[1, 1, 1]", "--json"], capsys
        )
        assert code == EXIT_OK
        M = matrix_from_json(json.loads(out)["report"]["matrix"])
        assert np.array_equal(M, np.ones((3, 3)))

    def test_tail_gram(self, files, capsys):
        code, out, _ = run(
            ["witness", "tail_gram", "--w", "0.4", "--t", "0.8",
             "--domain", files["disc1"], "--json"],
            capsys,
        )
        assert code == EXIT_OK
        assert json.loads(out)["report"]["psd"]["is_psd"]

    def test_tensor_blowup_and_pad(self, files, tmp_path, capsys):
        mat = tmp_path / "eye2.json"
        mat.write_text(json.dumps({"n": 2, "entries": [[1.0, 0.0], [0.0, 1.0]]}))
        code, out, _ = run(
            ["witness", "tensor_blowup", "--m", "2", "--matrix", str(mat), "--json"],
            capsys,
        )
        assert code == EXIT_OK
        assert json.loads(out)["report"]["matrix"]["n"] == 4
        code, out, _ = run(
            ["witness", "pad", "--matrix", str(mat), "--n", "3",
             "--domain", files["disc1"], "--json"],
            capsys,
        )
        assert code == EXIT_OK
        M = matrix_from_json(json.loads(out)["report"]["matrix"])
        assert np.array_equal(M, np.diag([1.0, 1.0, 0.0]))

    def test_corner_auto(self, files, tmp_path, capsys):
        dom = tmp_path / "pos.json"
        dom.write_text(json.dumps({"kind": "open_pos", "rho": 1.0}))
        mat = tmp_path / "A.json"
        mat.write_text(json.dumps({"n": 2, "entries": [[0.5, 0.4], [0.4, 0.5]]}))
        code, out, _ = run(
            ["witness", "corner", "--matrix", str(mat), "--domain", str(dom), "--json"],
            capsys,
        )
        assert code == EXIT_OK
        report = json.loads(out)["report"]
        assert report["psd"]["is_psd"]
        assert report["params"]["eps"] > 0


class TestSuite:
    def test_full_suite_passes_and_writes_report(self, files, capsys, tmp_path):
        out_file = tmp_path / "report.json"
        code, out, _ = run(["suite", "--out", str(out_file)], capsys)
        assert code == EXIT_OK
        assert out.count("[PASS]") == 13
        saved = json.loads(out_file.read_text())
        assert saved["report"]["all_passed"]
        assert len(saved["report"]["criteria"]) == 13

    def test_reduced_budget_still_passes(self, files, capsys):
        code, out, _ = run(["suite", "--max-n", "3"], capsys)
        assert code == EXIT_OK

    def test_zero_tolerance_documents_boundary_failures(self, files, capsys):
        code, out, _ = run(["suite", "--tol", "0"], capsys)
        assert code == EXIT_SUITE_FAIL
        assert "[FAIL]" in out
