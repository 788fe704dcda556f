"""
Command line test cases
Exit codes, report files and the demo command
"""
import json
import shutil
import tempfile
import unittest
from pathlib import Path

from asymptotic_hodge.config import Config
from asymptotic_hodge.main import run

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


class TestCommandLine(unittest.TestCase):
    """run() end to end on the shipped instances"""

    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.config = Config(THREADS=1, LOG_LEVEL="WARNING")

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def invoke(self, *argv):
        """运行一个子命令，返回 (退出码, 报告 JSON)"""
        output = self.tmp / "report.json"
        if output.exists():
            output.unlink()
        code = run([*argv, "--output", str(output)], self.config)
        report = None
        if output.exists():
            report = json.loads(output.read_text(encoding="utf-8"))
        return code, report

    def instance(self, name):
        return str(INSTANCES / f"{name}.json")

    def test_validate(self):
        """In M exits 0, compact dual only exits 1"""
        code, report = self.invoke("validate", "--input", self.instance("biext_static"))
        self.assertEqual(code, 0)
        self.assertEqual(report["status"], "in_M")
        code, report = self.invoke("validate", "--input", self.instance("weight_one"))
        self.assertEqual(code, 1)
        self.assertEqual(report["failed_clause"], "hodge_decomposition")

    def test_missing_input(self):
        """A missing instance file exits 2"""
        code, report = self.invoke("validate", "--input", str(self.tmp / "absent.json"))
        self.assertEqual(code, 2)
        self.assertIsNone(report)

    def test_bigrade_uses_limit_weight_filtration(self):
        """Orbit instances are bigraded with M"""
        code, report = self.invoke("bigrade", "--input", self.instance("non_inv"))
        self.assertEqual(code, 0)
        self.assertEqual(report["types"], [[-2, -2], [-1, -1], [0, 0]])
        self.assertTrue(report["r_split"])

    def test_split_delta(self):
        """The δ-split biextension is R-split"""
        biext = self.instance("biext_static")
        code, report = self.invoke("split-delta", "--input", biext)
        self.assertEqual(code, 0)
        self.assertFalse(report["is_zero"])
        self.assertTrue(report["r_split"])

    def test_biext_metric_with_scale(self):
        """δ/μ = 1/2 and |t·F|/|F| = |t|"""
        biext = self.instance("biext_static")
        code, report = self.invoke("biext-metric", "--input", biext, "--scale", "2")
        self.assertEqual(code, 0)
        self.assertEqual(report["delta_over_mu"], "1/2")
        self.assertAlmostEqual(report["scaled"]["ratio"], 2.0, places=9)

    def test_admissible_check(self):
        """The shipped orbits are admissible"""
        non_conv = self.instance("non_conv")
        code, report = self.invoke("admissible-check", "--input", non_conv)
        self.assertEqual(code, 0)
        self.assertTrue(report["passed"])

    def test_sl2_triple(self):
        """Brackets hold and the orbit converges"""
        code, report = self.invoke("sl2-triple", "--input", self.instance("weight_one"))
        self.assertEqual(code, 0)
        self.assertTrue(all(report["relations"].values()))

    def test_scan_without_grid(self):
        """distance-scan needs --grid"""
        code, _ = self.invoke("distance-scan", "--input", self.instance("weight_one"))
        self.assertEqual(code, 2)

    def test_scan_failure_report(self):
        """A mathematical failure inside a scan still writes a report"""
        non_conv = self.instance("non_conv")
        code, report = self.invoke("p-function-scan", "--input", non_conv)
        self.assertEqual(code, 1)
        self.assertEqual(report["command"], "p-function-scan")
        self.assertEqual(report["mode"], "error")
        self.assertEqual(report["fit"]["clause"], "sl2_unsupported")

    def test_reduced_limit_path(self):
        """--path selects the naive limit"""
        non_conv = self.instance("non_conv")
        code, report = self.invoke(
            "reduced-limit", "--input", non_conv, "--path", "2,1"
        )
        self.assertEqual(code, 0)
        self.assertEqual(report["provenance"], "naive")

    def test_sequence_limit_csv(self):
        """CSV reports put fit parameters in comment lines"""
        output = self.tmp / "limit.csv"
        argv = [
            "sequence-limit",
            "--input",
            self.instance("weight_one"),
            "--format",
            "csv",
            "--output",
            str(output),
        ]
        code = run(argv, self.config)
        self.assertEqual(code, 0)
        lines = output.read_text(encoding="utf-8").splitlines()
        comments = [line for line in lines if line.startswith("#")]
        table = [line for line in lines if not line.startswith("#")]
        self.assertTrue(any(c.startswith("# fit.final_distance=") for c in comments))
        self.assertIn("distance", table[0].split(","))

    def test_demo_writes_instances(self):
        """demo writes every shipped instance plus a random one"""
        code = run(["demo", "--output", str(self.tmp), "--seed", "3"], self.config)
        self.assertEqual(code, 0)
        names = sorted(p.stem for p in self.tmp.glob("*.json"))
        self.assertIn("biext_static", names)
        self.assertIn("random_3", names)
        self.assertEqual(len(names), 8)


if __name__ == '__main__':
    unittest.main()
