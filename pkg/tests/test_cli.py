import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from tgv.cli import main, parse_alphas, parse_kernel, UsageError
from tgv.evaluate import eval_tv
from tgv.pgm import read_pgm

FIX = Path(__file__).resolve().parent / "fixtures"


def run(*argv):
    out = io.StringIO()
    try:
        code = main(list(argv), out=out)
    except SystemExit as exc:
        code = exc.code
    return code, out.getvalue()


def field(text, key):
    for tok in text.split():
        if tok.startswith(key + "="):
            return tok.split("=", 1)[1]
    raise KeyError(key)


class TestParsing:
    def test_alphas(self):
        assert parse_alphas("1,2", 2) == (1.0, 2.0)
        assert parse_alphas("0.5", 3) == (2.0, 1.0, 0.5)
        assert parse_alphas("3", 1) == (3.0,)
        for bad in ("1,x", "1,2,3"):
            with pytest.raises(UsageError):
                parse_alphas(bad, 2)

    def test_kernel(self):
        np.testing.assert_array_equal(parse_kernel("0,1,0;1,4,1;0,1,0"),
                                      [[0, 1, 0], [1, 4, 1], [0, 1, 0]])
        with pytest.raises(UsageError):
            parse_kernel("1,1;1")


class TestExitCodes:
    def test_missing_flags(self):
        assert run("eval", "--order", "2", "--alpha", "1")[0] == 2
        assert run("denoise", "--input", "x.pgm")[0] == 2
        assert run("frobnicate")[0] == 2
        assert run("eval", "--input", "x", "--order", "2", "--alpha", "1", "--bogus", "1")[0] == 2

    def test_bad_values(self):
        c = str(FIX / "constant8.pgm")
        assert run("eval", "--input", c, "--order", "2", "--alpha", "1,-1")[0] == 2
        assert run("eval", "--input", c, "--order", "0", "--alpha", "1")[0] == 2
        assert run("eval", "--input", c, "--order", "2", "--alpha", "1",
                   "--threads", "0")[0] == 2

    def test_missing_file(self, tmp_path):
        assert run("eval", "--input", str(tmp_path / "nope.pgm"), "--order", "1",
                   "--alpha", "1")[0] == 1

    def test_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.pgm"
        bad.write_bytes(b"P5\n2 2\n255\n\x00")
        assert run("denoise", "--input", str(bad), "--output", str(tmp_path / "o.pgm"),
                   "--data-weight", "1")[0] == 1

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "tgv", "eval"], capture_output=True)
        assert proc.returncode == 2


class TestEval:
    def test_constant_both_forms(self):
        code, text = run("eval", "--input", str(FIX / "constant8.pgm"), "--order", "2",
                         "--alpha", "1,1", "--form", "both")
        assert code == 0
        lines = text.splitlines()
        assert float(field(lines[2], "value")) == 0.0
        assert float(field(lines[3], "value")) == 0.0
        assert float(field(text, "relative_difference")) == 0.0

    def test_order_one(self):
        path = FIX / "random16.pgm"
        code, text = run("eval", "--input", str(path), "--order", "1", "--alpha", "1.5",
                         "--form", "both")
        assert code == 0
        lines = text.splitlines()
        compact, direct = field(lines[2], "value"), field(lines[3], "value")
        assert compact == direct
        assert float(compact) == 1.5 * eval_tv(read_pgm(path), 1)

    def test_header_echoes_flags(self):
        code, text = run("eval", "--input", str(FIX / "constant8.pgm"), "--order", "2",
                         "--alpha", "1,1", "--tol", "1e-6")
        assert code == 0
        head = text.splitlines()[0]
        assert "order=2" in head and "alpha=1,1" in head and "tol=1e-06" in head


class TestVerify:
    def test_passes(self):
        code, text = run("verify", "--max-order", "3", "--trials", "3", "--seed", "1")
        assert code == 0 and "FAIL" not in text

    def test_injected_fault_fails(self):
        code, text = run("verify", "--max-order", "3", "--trials", "3", "--inject-fault")
        assert code == 1
        assert "FAILED:" in text


class TestRestoreCommands:
    def test_data_dominated_denoise(self, tmp_path):
        src = FIX / "random16.pgm"
        out = tmp_path / "o.pgm"
        trace = tmp_path / "t.csv"
        code, _ = run("denoise", "--input", str(src), "--output", str(out),
                      "--data-weight", "1e6", "--trace", str(trace))
        assert code == 0
        assert np.max(np.abs(read_pgm(out).data - read_pgm(src).data)) <= 1e-3
        rows = trace.read_text().splitlines()
        assert rows[0] == "iteration,objective"
        it, obj = rows[1].split(",")
        assert it == "0" and float(obj) >= 0

    def test_constant_stays_constant(self, tmp_path):
        out = tmp_path / "o.pgm"
        for verb in ("denoise", "deblur"):
            code, _ = run(verb, "--input", str(FIX / "constant8.pgm"), "--output", str(out),
                          "--data-weight", "5", "--order", "3", "--alpha", "0.1")
            assert code == 0
            assert out.read_bytes() == (FIX / "constant8.pgm").read_bytes()

    @pytest.mark.slow
    def test_regression_mse(self, tmp_path):
        ref = json.loads((FIX / "regression.json").read_text())
        out = tmp_path / "o.pgm"
        code, _ = run("denoise", "--input", str(FIX / "ramp_noisy.pgm"), "--output", str(out),
                      *ref["denoise_args"])
        assert code == 0
        clean = read_pgm(FIX / "ramp_clean.pgm").data
        mse = float(np.mean((read_pgm(out).data - clean) ** 2))
        assert mse == pytest.approx(ref["denoised_mse"], rel=1e-6)
        assert mse < ref["noisy_mse"] / 4
