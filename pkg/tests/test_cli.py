import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gbias import __version__
from gbias import cli
from gbias.cli import main, parse_grid
from gbias.errors import ConvergenceError
from gbias.verifier import VerificationReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestGrid:
    def test_geometric(self):
        np.testing.assert_allclose(parse_grid("0.1:10:3"), [0.1, 1.0, 10.0], rtol=1e-15)

    def test_list(self):
        assert parse_grid("1,2.5") == [1.0, 2.5]

    def test_single(self):
        assert parse_grid("2:2:1") == [2.0]


class TestEval:
    def test_exponential(self, capsys):
        data = run_json(capsys, "eval", "--g0n", "--a", "0", "--x", "1")
        assert data["command"] == "eval" and data["kernel"] == "g0n"
        assert data["params"] == {"a": [0.0]}
        res = data["results"][0]
        np.testing.assert_allclose(res["value"], math.exp(-1.0), rtol=1e-12)
        assert 0 <= res["error"] < 1e-12

    def test_bessel(self, capsys):
        data = run_json(capsys, "eval", "--g0n", "--a", "0,0", "--x", "1")
        # 2 K0(2)
        np.testing.assert_allclose(data["results"][0]["value"], 0.22778774549906694,
                                   rtol=1e-12)

    def test_gnn(self, capsys):
        data = run_json(capsys, "eval", "--gnn", "--r", "1,2", "--x", "0.5")
        np.testing.assert_allclose(data["results"][0]["value"], 0.5, rtol=1e-13)

    def test_pn(self, capsys):
        data = run_json(capsys, "eval", "--pn", "--n", "1", "--x", "0")
        np.testing.assert_allclose(data["results"][0]["value"], 1 / math.sqrt(2 * math.pi),
                                   rtol=1e-15)

    def test_grid_csv(self, capsys):
        code, out, _ = run(capsys, "eval", "--g0n", "--a", "0", "--grid", "0.5:2:3",
                           "--format", "csv")
        lines = out.strip().split("\r\n")
        assert code == 0 and lines[0] == "x,value,error" and len(lines) == 4
        x, v, _ = map(float, lines[2].split(","))
        np.testing.assert_allclose(v, math.exp(-x), rtol=1e-12)

    def test_abscissa(self, capsys):
        a = run_json(capsys, "eval", "--g0n", "--a", "0,1", "--x", "2", "--abscissa", "0.5")
        b = run_json(capsys, "eval", "--g0n", "--a", "0,1", "--x", "2", "--abscissa", "3")
        np.testing.assert_allclose(a["results"][0]["value"], b["results"][0]["value"],
                                   rtol=1e-10)

    def test_out_file(self, capsys, tmp_path):
        p = tmp_path / "o.json"
        code, out, _ = run(capsys, "eval", "--g0n", "--a", "0", "--x", "1", "--out", str(p))
        assert code == 0 and out == ""
        assert json.loads(p.read_text())["kernel"] == "g0n"


class TestErrors:
    def _error(self, capsys, code, *argv):
        got, _, err = run(capsys, *argv)
        assert got == code
        data = json.loads(err.strip().splitlines()[-1])
        assert data["exit_code"] == code
        return data

    def test_domain(self, capsys):
        assert self._error(capsys, 2, "eval", "--g0n", "--a", "-1", "--x", "1")["error"] == \
            "DomainError"

    def test_pole_domain(self, capsys):
        self._error(capsys, 2, "eval", "--g0n", "--a", "0", "--x", "-1")

    def test_missing_parameter(self, capsys):
        assert self._error(capsys, 2, "eval", "--g0n", "--x", "1")["error"] == "UsageError"

    def test_conflicting_kernels(self, capsys):
        self._error(capsys, 2, "eval", "--g0n", "--gnn", "--a", "0", "--x", "1")

    def test_bad_vector(self, capsys):
        self._error(capsys, 2, "eval", "--g0n", "--a", "zero", "--x", "1")

    def test_no_command(self, capsys):
        self._error(capsys, 2)

    def test_unknown_suite(self, capsys):
        self._error(capsys, 2, "verify", "--suite", "nope")

    def test_mean_mismatch(self, capsys):
        assert self._error(capsys, 2, "density", "--gbias", "--r", "2,3", "--w", "pg",
                           "--x", "1", "--point", "1")["error"] == "UsageError"

    def test_r_on_wrong_suite(self, capsys):
        self._error(capsys, 2, "verify", "--suite", "kernel", "--r", "1")

    def test_nonconvergence(self, capsys, monkeypatch):
        def stalled(*args, **kwargs):
            raise ConvergenceError("refinement stalled")

        monkeypatch.setattr(cli, "eval_g_0n_with_error", stalled)
        assert self._error(capsys, 3, "eval", "--g0n", "--a", "0,0", "--x", "1")["error"] == \
            "ConvergenceError"

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestDensity:
    def test_gamma(self, capsys):
        data = run_json(capsys, "density", "--gamma", "--r", "2", "--x", "1")
        res = data["results"][0]
        np.testing.assert_allclose(res["pdf"], math.exp(-1), rtol=1e-14)
        np.testing.assert_allclose(res["cdf"], 1 - 2 * math.exp(-1), rtol=1e-13)
        assert data["law"] == {"kind": "Gamma", "params": {"r": 2.0}}

    def test_point_has_no_pdf(self, capsys):
        data = run_json(capsys, "density", "--point", "2", "--x", "1,3")
        assert [r["pdf"] for r in data["results"]] == [None, None]
        assert [r["cdf"] for r in data["results"]] == [0.0, 1.0]

    def test_gbias_fixed_point(self, capsys):
        a = run_json(capsys, "density", "--gbias", "--r", "2", "--w", "gamma", "--x", "1.5")
        b = run_json(capsys, "density", "--gamma", "--r", "2", "--x", "1.5")
        np.testing.assert_allclose(a["results"][0]["pdf"], b["results"][0]["pdf"], rtol=1e-9)
        assert a["law"]["kind"] == "GammaBiased"

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "density", "--vn", "--r", "1,2", "--x", "0.5",
                           "--format", "csv")
        lines = out.strip().split("\r\n")
        assert code == 0 and lines[0] == "x,pdf,pdf_error,cdf,cdf_error"
        vals = list(map(float, lines[1].split(",")))
        np.testing.assert_allclose(vals[1], 2 * (1 - 0.5), rtol=1e-13)
        np.testing.assert_allclose(vals[3], 2 * 0.5 - 0.25, rtol=1e-13)

    def test_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"pg": True, "r": [2, 3], "x": [1.0], "format": "json"}))
        data = run_json(capsys, "density", "--config", str(cfg))
        assert data["law"] == {"kind": "ProductGamma", "params": {"r": [2.0, 3.0]}}

    def test_config_overridden_by_flags(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"pg": True, "r": [2, 3], "x": [1.0]}))
        data = run_json(capsys, "density", "--config", str(cfg), "--gamma", "--r", "2",
                        "--grid", "1,2")
        assert data["law"]["kind"] == "Gamma" and len(data["results"]) == 2

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("[1, 2]")
        code, _, _ = run(capsys, "density", "--config", str(cfg))
        assert code == 2


class TestSample:
    def test_stdout(self, capsys):
        code, out, _ = run(capsys, "sample", "--pg", "--r", "2,3", "--N", "5", "--seed", "1")
        lines = out.strip().split("\r\n")
        assert code == 0 and lines[0] == "value" and len(lines) == 6

    def test_file_and_sidecar(self, capsys, tmp_path):
        p = tmp_path / "s.csv"
        data = run_json(capsys, "sample", "--gbias", "--r", "2", "--w", "point", "--N", "100",
                        "--seed", "4", "--out", str(p))
        side = json.loads((tmp_path / "s.csv.json").read_text())
        assert side == {"kind": "GammaBiased",
                        "params": {"base": {"kind": "PointMass", "params": {"c": 2.0}},
                                   "r": [2.0]},
                        "seed": 4, "N": 100}
        assert data["N"] == 100 and data["standard_error"] > 0
        assert p.read_bytes().startswith(b"value\r\n")

    def test_reproducible(self, capsys):
        a = run(capsys, "sample", "--pn", "--n", "2", "--N", "20", "--seed", "8")[1]
        b = run(capsys, "sample", "--pn", "--n", "2", "--N", "20", "--seed", "8")[1]
        assert a == b


class TestVerifyAndReport:
    def test_verify_json(self, capsys, tmp_path):
        out = tmp_path / "v.json"
        code, _, err = run(capsys, "verify", "--suite", "theorem-general", "--a", "0,1",
                           "--grid", "0.5,2", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert data["suite"] == "theorem-general" and data["verdict"] == "pass"
        assert data["reports"][0]["runtime_ms"] is None
        assert err.startswith("PASS theorem-general")

    def test_verify_timing(self, capsys):
        data = run_json(capsys, "verify", "--suite", "pn-relation", "--N", "10000", "--timing")
        assert all(isinstance(r["runtime_ms"], int) for r in data["reports"])

    def test_verify_fail_exit(self, capsys, monkeypatch):
        def failing(*args, **kwargs):
            rep = VerificationReport("demo", tolerance=1e-6)
            rep.add({"x": 1.0}, 1.0, 2.0, 1e-6)
            return [rep]

        monkeypatch.setattr(cli, "run_suite", failing)
        code, out, err = run(capsys, "verify", "--suite", "kernel")
        assert code == 1 and json.loads(out)["verdict"] == "fail"
        assert err.startswith("FAIL demo")

    def test_verify_equal(self, capsys):
        data = run_json(capsys, "verify", "--suite", "theorem-equal", "--a", "0.5", "--n", "2",
                        "--grid", "1")
        assert data["reports"][0]["config"]["n"] == 2

    def test_verify_wgn(self, capsys):
        data = run_json(capsys, "verify", "--suite", "wgn", "--r", "2,3", "--w", "point",
                        "--N", "10000")
        assert data["verdict"] == "pass"

    def test_verify_csv(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "stein", "--r", "2", "--N", "10000",
                           "--format", "csv")
        assert code == 0 and out.startswith("claim_id,point,lhs,rhs")

    def test_report(self, capsys, tmp_path):
        out = tmp_path / "v.json"
        run(capsys, "verify", "--suite", "vn", "--r", "1,2", "--N", "10000", "--out", str(out))
        code, text, _ = run(capsys, "report", str(out), "--summary")
        assert code == 0
        assert text.strip().splitlines()[-1] == "PASS overall: 1/1 reports"
        data = run_json(capsys, "report", str(out))
        assert data["verdict"] == "pass"
        code, text, _ = run(capsys, "report", str(out), "--format", "csv")
        assert text.startswith("claim_id,")

    def test_report_bad_input(self, capsys, tmp_path):
        p = tmp_path / "x.json"
        p.write_text('{"hello": 1}')
        assert run(capsys, "report", str(p))[0] == 2
        assert run(capsys, "report", str(tmp_path / "missing.json"))[0] == 2


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "gbias.cli", "eval", "--gnn", "--r", "1,2",
                          "--x", "0.5", "--format", "csv"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.splitlines()[1].startswith("0.5,0.5")
