"""CLI behavior: parsing, subcommands, exit codes, reproducibility."""

import json

import numpy as np
import pytest

from softmech.cli import main, parse_seeds, parse_vector, read_vector_file


class TestParsing:
    def test_seeds(self):
        assert parse_seeds("0,5,10-12") == [0, 5, 10, 11, 12]
        assert parse_seeds("3") == [3]
        with pytest.raises(ValueError):
            parse_seeds(" ,")

    def test_vector(self):
        assert parse_vector("0.5,0").tolist() == [0.5, 0.0]
        assert parse_vector("1 2 3").tolist() == [1.0, 2.0, 3.0]

    def test_vector_file_error_line(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("1 2\nthree\n", encoding="utf-8")
        with pytest.raises(ValueError) as err:
            read_vector_file(str(path))
        assert "line 2" in str(err.value)


class TestEval:
    def test_plsoftmax_example(self, capsys, tmp_path):
        out = tmp_path / "eval.csv"
        code = main(["eval", "--mech", "plsoftmax:delta=1", "--x", "0.5,0", "--out", str(out)])
        assert code == 0
        body = out.read_text(encoding="utf-8")
        assert "0.75;0.25" in body
        assert ",0.125," in body
        summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert summary["failures"] == []

    def test_uniform_and_pow(self, tmp_path):
        out = tmp_path / "eval.json"
        assert main(["eval", "--mech", "exp:lambda=1", "--x", "0,0,0", "--format", "json", "--out", str(out)]) == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert np.allclose(payload["probs"], 1 / 3)
        assert main(["eval", "--mech", "pow:lambda=1", "--x", "2,1", "--format", "json", "--out", str(out)]) == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert np.allclose(payload["probs"], [2 / 3, 1 / 3], atol=5e-13)

    def test_malformed_input_exits_2(self, tmp_path, capsys):
        path = tmp_path / "x.txt"
        path.write_text("1 2\noops\n", encoding="utf-8")
        code = main(["eval", "--mech", "sparsemax", "--x-file", str(path)])
        assert code == 2
        err = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert "line 2" in err["error"]


class TestLipschitz:
    def test_rows_within_bound(self, tmp_path, capsys):
        out = tmp_path / "lip.csv"
        code = main(
            ["lipschitz", "--mech", "plsoftmax:delta=1", "--d", "8", "--domain", "l2",
             "--range", "l2", "--trials", "200", "--seeds", "0,1", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("mechanism,")
        assert len(lines) == 3
        for line in lines[1:]:
            cols = line.split(",")
            assert float(cols[5]) <= float(cols[6]) + 1e-9

    def test_constant_bound_inf_ok(self, tmp_path):
        out = tmp_path / "lip.csv"
        code = main(
            ["lipschitz", "--mech", "pow:lambda=1", "--d", "4", "--domain", "linf",
             "--range", "l1", "--trials", "100", "--seeds", "0", "--out", str(out)]
        )
        assert code == 0
        assert ",inf," in out.read_text(encoding="utf-8")


class TestSubmodular:
    def test_zero_drop_distances(self, tmp_path):
        out = tmp_path / "frontier.csv"
        code = main(
            ["submodular", "--synthetic", "--num-sets", "8", "--universe", "30", "--k", "3",
             "--mechs", "pow:lambda=2,exp:lambda=0.5", "--drop-prob", "0", "--seeds", "0-2",
             "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "mechanism,param,seed,obj_ratio,l1_dist,linf_dist"
        assert len(lines) == 7
        for line in lines[1:]:
            assert line.split(",")[4] == "0"

    def test_instance_file(self, tmp_path):
        fam = tmp_path / "sets.txt"
        fam.write_text("0 1 2\n2 3\n4\n", encoding="utf-8")
        out = tmp_path / "frontier.csv"
        code = main(
            ["submodular", "--instance-file", str(fam), "--k", "2", "--mechs", "pow:lambda=1",
             "--drop-prob", "0.1", "--seeds", "0,1", "--out", str(out)]
        )
        assert code == 0


class TestAuction:
    def test_audit_and_checks(self, tmp_path):
        spec = tmp_path / "auction.json"
        spec.write_text(json.dumps({"H": 1.0, "k": 2, "bids": [0.9, 0.4]}), encoding="utf-8")
        out = tmp_path / "outcome.json"
        audit = tmp_path / "audit.csv"
        code = main(
            ["auction", "--instance-file", str(spec), "--mech", "plsoftmax:delta=4",
             "--grid-delta", "0.5", "--grid-floor", "0.1", "--audit", "--resolution", "21",
             "--out", str(out), "--audit-out", str(audit)]
        )
        assert code == 0
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["worst_case_revenue_ok"] is True
        assert payload["audit_max_gain"] <= payload["epsilon_ic"] + 1e-9
        lines = audit.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "bidder,deviation_bid,utility_gain"
        gains = [float(l.split(",")[2]) for l in lines[1:]]
        assert max(gains) <= payload["epsilon_ic"] + 1e-9


class TestLossfn:
    def test_default_probes_pass(self, tmp_path):
        out = tmp_path / "loss.csv"
        code = main(["lossfn", "--d", "4", "--delta", "1", "--trials", "100", "--seeds", "0", "--out", str(out)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "seed,convexity_violation,zero_iff_residual,subgradient_error"


class TestSelftest:
    def test_exit_zero(self, capsys):
        assert main(["selftest"]) == 0
        text = capsys.readouterr().out
        assert "FAIL" not in text
