import hashlib
import json
import os

from sumprod.cli import main
from sumprod.coloring import extremal_coloring


def run(args):
    return main(args)


def dir_digest(path):
    h = hashlib.sha256()
    for name in sorted(os.listdir(path)):
        h.update(name.encode())
        with open(os.path.join(path, name), "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


class TestSubcommands:
    def test_extremal(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["extremal", "--r", "5", "--all-up-to",
                    "--output", out]) == 0
        obj = json.load(open(os.path.join(out, "extremal.json")))
        assert obj["result"]["all_clean"]
        assert len(obj["result"]["results"]) == 5

    def test_detect(self, tmp_path):
        col = tmp_path / "col.json"
        col.write_text(extremal_coloring(4).to_rle_json())
        out = str(tmp_path / "o")
        assert run(["detect", "--coloring", str(col), "--output", out]) == 0
        obj = json.load(open(os.path.join(out, "detect.json")))
        assert obj["result"]["witness"] is None

    def test_threshold_r1(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["threshold", "--r", "1", "--output", out]) == 0
        obj = json.load(open(os.path.join(out, "threshold.json")))
        assert obj["result"]["n_star"] == 12

    def test_threshold(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["threshold", "--r", "2", "--output", out]) == 0
        obj = json.load(open(os.path.join(out, "threshold.json")))
        assert obj["result"]["n_star"] > 8

    def test_threshold_exhausted_exit_code(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["threshold", "--r", "2", "--nmax", "30",
                    "--output", out]) == 4

    def test_norms(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["norms", "--N", "2000", "--q", "1,2", "--H", "8,16",
                    "--output", out]) == 0
        lines = open(os.path.join(out, "norms.csv")).read().splitlines()
        assert lines[0] == "q,H,u1log,u1,u1log_projected"
        assert len(lines) == 5

    def test_lemma_check(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["lemma-check", "--name", "dilate", "--draws", "30",
                    "--seed", "7", "--output", out]) == 0
        csv_lines = open(os.path.join(out,
                                      "lemma_dilate.csv")).read().splitlines()
        assert csv_lines[0] == "name,N,params,lhs,bound,ratio"
        assert len(csv_lines) == 31

    def test_dioph_verify(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "verify", "--set", "interval",
                    "--D", "100", "--levels", "0.1,0.4",
                    "--grid", str(2 ** 16), "--output", out]) == 0

    def test_dioph_vino(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "vino", "--alpha", "0.2",
                    "--output", out]) == 0

    def test_dioph_weyl(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "weyl", "--X", "10000",
                    "--grid", str(2 ** 16), "--output", out]) == 0

    def test_sieve(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["sieve", "--X", "10000", "--output", out]) == 0
        obj = json.load(open(os.path.join(out, "sieve_report.json")))
        assert obj["result"]["checks"]["nonnegative"]

    def test_richness(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["richness", "--r", "3", "--output", out]) == 0
        lines = open(os.path.join(out, "richness.csv")).read().splitlines()
        assert lines[0].startswith("b,color0")


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_bad_parameter(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "verify", "--levels", "2.0",
                    "--output", out]) == 2

    def test_capacity(self, tmp_path):
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "verify", "--D", "1000",
                    "--grid", str(2 ** 30), "--output", out]) == 3

    def test_bound_failure(self, tmp_path):
        # an absurdly tight exponent makes the structure check fail
        out = str(tmp_path / "o")
        assert run(["dioph", "--mode", "weyl", "--X", "10000",
                    "--exponent", "0.1", "--grid", str(2 ** 16),
                    "--output", out]) == 1


class TestConfigPrecedence:
    def test_file_provides_defaults_cli_wins(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"r": 4}))
        out1 = str(tmp_path / "a")
        assert run(["extremal", "--config", str(cfg), "--output", out1]) == 0
        obj = json.load(open(os.path.join(out1, "extremal.json")))
        assert obj["result"]["results"][0]["r"] == 4
        out2 = str(tmp_path / "b")
        assert run(["extremal", "--config", str(cfg), "--r", "2",
                    "--output", out2]) == 0
        obj = json.load(open(os.path.join(out2, "extremal.json")))
        assert obj["result"]["results"][0]["r"] == 2


class TestDeterminism:
    CASES = [
        ["extremal", "--r", "6"],
        ["threshold", "--r", "2"],
        ["lemma-check", "--name", "shift", "--draws", "25", "--seed", "11"],
        ["lemma-check", "--name", "proj-check", "--draws", "10",
         "--seed", "11"],
        ["norms", "--N", "1500", "--q", "1,3", "--H", "8", "--seed", "3"],
        ["dioph", "--mode", "verify", "--D", "100", "--levels", "0.1",
         "--grid", str(2 ** 14)],
        ["sieve", "--X", "10000", "--export-decomposition"],
        ["richness", "--r", "4"],
    ]

    def test_byte_identical_reruns(self, tmp_path):
        for i, case in enumerate(self.CASES):
            d1 = str(tmp_path / f"run1_{i}")
            d2 = str(tmp_path / f"run2_{i}")
            assert run(case + ["--output", d1]) == 0
            assert run(case + ["--output", d2]) == 0
            assert dir_digest(d1) == dir_digest(d2), case
