import json
import subprocess
import sys

import pytest

from stpair.cli import main
from stpair.io import ingest


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSubcommands:
    def test_trace(self, capsys):
        code, out, _ = run(capsys, "trace", "--level", "1", "--weight", "12", "--n", "2")
        assert code == 0 and out == "-24/1 -24.0\n"

    def test_trace_rational(self, capsys):
        code, out, _ = run(capsys, "trace", "--level", "11", "--weight", "2", "--n", "5")
        assert code == 0 and out.split()[0] == "1/1"

    def test_trace_full(self, capsys):
        code, out, _ = run(capsys, "trace", "--level", "2", "--weight", "24", "--n", "1", "--full")
        assert code == 0 and out.startswith("5/1")

    def test_dims(self, capsys):
        code, out, _ = run(capsys, "dims", "--level", "1", "--weights", "10..14")
        assert code == 0
        assert out.splitlines() == ["weight\tnew\tcusp", "10\t0\t0", "12\t1\t1", "14\t0\t0"]

    def test_sieve(self, capsys):
        code, out, _ = run(capsys, "sieve", "--x", "30", "--level", "6", "--list")
        assert code == 0
        assert out.splitlines() == ["pi_6(30) = 8", "5", "7", "11", "13", "17", "19", "23", "29"]

    def test_angles(self, capsys):
        code, out, _ = run(capsys, "angles", "--x", "10", "--level", "1", "--weight", "12")
        rows = out.splitlines()
        assert code == 0 and rows[0] == "p\ta_p\ttheta\tH" and len(rows) == 5
        assert float(rows[1].split("\t")[2]) == pytest.approx(0.585426, abs=1e-6)

    @pytest.mark.parametrize("kind", ["global", "local", "rescaled"])
    def test_paircorr(self, capsys, kind):
        code, out, _ = run(capsys, "paircorr", kind, "--x", "200000", "--source", "synthetic",
                           "--psi", "0.5", "--L", "4", "--s-grid", "0.5:2:4")
        assert code == 0
        rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert rows[0] == "s,value,count,norm_pi,norm_L,norm_A" and len(rows) == 5

    def test_paircorr_naive_agrees(self, capsys):
        args = ("paircorr", "global", "--x", "3000", "--s-grid", "0.5:2:4")
        _, fast, _ = run(capsys, *args)
        _, naive, _ = run(capsys, *args, "--naive")
        assert fast == naive

    def test_smooth(self, capsys):
        code, out, _ = run(capsys, "smooth", "--x", "5000", "--psi", "0.5", "--L", "4")
        assert code == 0 and out.startswith("field,value\nsmoothed_R2,")

    def test_average(self, capsys):
        code, out, _ = run(capsys, "average", "--level", "1", "--weight", "12", "--x", "500",
                           "--psi", "0.5", "--L", "4")
        fields = dict(ln.split(",") for ln in out.splitlines()[1:])
        assert code == 0 and "total" in fields and "predicted_limit" in fields

    def test_calibrate(self, capsys):
        code, out, _ = run(capsys, "calibrate", "--n", "20000", "--seed", "1")
        ks = float(next(ln for ln in out.splitlines() if ln.startswith("# ks_exponential")).split()[-1])
        assert code == 0 and ks < 0.02

    def test_synth_to_file(self, capsys, tmp_path):
        path = tmp_path / "s.jsonl"
        code, _, _ = run(capsys, "synth", "--n", "50", "--seed", "3", "-o", str(path))
        (seq,) = ingest(path)
        assert code == 0 and len(seq) == 50

    def test_input_file(self, capsys, tmp_path):
        path = tmp_path / "s.jsonl"
        run(capsys, "synth", "--n", "400", "--seed", "3", "-o", str(path))
        code, out, _ = run(capsys, "paircorr", "global", "--x", "10000", "--input", str(path))
        assert code == 0 and "synthetic-seed3" in out

    def test_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"x": 2000, "estimator": "global",
                                   "output": str(tmp_path / "r.csv")}))
        code, out, _ = run(capsys, "--config", str(cfg))
        assert code == 0 and (tmp_path / "r.csv").exists() and (tmp_path / "r.tsv").exists()
        assert out.split() == [str(tmp_path / "r.csv"), str(tmp_path / "r.tsv")]


class TestExitCodes:
    def test_no_command(self, capsys):
        assert run(capsys)[0] == 2

    def test_config_error(self, capsys):
        code, _, err = run(capsys, "paircorr", "local", "--psi", "0", "--L", "4")
        assert code == 2 and err.startswith("error:")

    def test_bad_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"psi": 0, "estimator": "local", "L": 4}))
        assert run(capsys, "--config", str(cfg))[0] == 2

    def test_bad_weights(self, capsys):
        assert run(capsys, "dims", "--level", "1", "--weights", "a..b")[0] == 2

    def test_data_error(self, capsys, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"level": 1, "weight": 12, "coefficients": {"2": 3.0}}\n')
        assert run(capsys, "angles", "--input", str(path))[0] == 3
        assert run(capsys, "angles", "--input", str(tmp_path / "missing.jsonl"))[0] == 3

    def test_math_domain(self, capsys):
        assert run(capsys, "trace", "--level", "4", "--weight", "12", "--n", "2")[0] == 4
        assert run(capsys, "trace", "--level", "1", "--weight", "7", "--n", "2")[0] == 4
        assert run(capsys, "average", "--level", "1", "--weight", "10", "--x", "100",
                   "--psi", "0.5", "--L", "4")[0] == 4

    def test_argparse_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["trace", "--level", "1"])
        assert info.value.code == 2


class TestDeterminism:
    def test_output_files_identical(self, capsys, tmp_path):
        outs = []
        for i in range(2):
            path = tmp_path / f"o{i}.csv"
            main(["paircorr", "local", "--x", "50000", "--source", "synthetic", "--seed", "4",
                  "--psi", "0.5", "--L", "4", "-o", str(path)])
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "stpair.cli", "trace", "--level", "1",
                               "--weight", "12", "--n", "3"], capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "252/1 252.0\n"
