# Tests for scenario files, the check runner and the command line.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_harness`
#


import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from sparse_dom import *
from sparse_dom.dom_bot import check_resolution_drift
from sparse_dom.run_checks import main
from sparse_dom.scripts.constants import EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, EXIT_STRUCTURAL, RESOLUTION_DRIFT
from sparse_dom.scripts.functions import Lcg, generate_f, make_grid, parse_call, random_family, read_config
from sparse_dom.scripts.scenario_templates.golden_scenario import GOLDEN_SCENARIO, SMOKE_SCENARIO


class TestHelpers(unittest.TestCase):

    def test_lcg_sequence(self):
        rng = Lcg(0)
        self.assertEqual([rng.next_u32() for _ in range(3)], [1013904223, 1196435762, 3519870697])

    def test_lcg_streams(self):
        a = Lcg.stream(7, "f:0").uniform(5)
        b = Lcg.stream(7, "f:0").uniform(5)
        c = Lcg.stream(7, "f:1").uniform(5)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))
        rng = Lcg(3)
        self.assertTrue(all(2 <= rng.integer(2, 5) < 5 for _ in range(100)))

    def test_parse_call(self):
        self.assertEqual(parse_call("power(0.5)"), ("power", [0.5]))
        self.assertEqual(parse_call(" sign "), ("sign", []))
        self.assertEqual(parse_call("step(1, 2, 4)"), ("step", [1.0, 2.0, 4.0]))
        for text in ("power(a)", "2x", "power(0.5"):
            with self.assertRaises(ParameterError, msg=text):
                parse_call(text)

    def test_generators_are_seeded(self):
        t = make_grid(1, 32)
        self.assertEqual(t.box, Cube((-1.0,), 2.0))
        for text in ("indicator", "steps(4)", "spike", "random"):
            first = generate_f(text, t, Lcg.stream(5, "f:0"))
            again = generate_f(text, t, Lcg.stream(5, "f:0"))
            np.testing.assert_array_equal(first.values, again.values, err_msg=text)
            # supported in [-1/2, 1/2)
            self.assertTrue(np.all(first.values[:8] == 0), msg=text)

    def test_random_family(self):
        t = make_grid(1, 32)
        S = random_family(t, Lcg(11))
        self.assertEqual(S.cubes[-1], t.box)
        self.assertLessEqual(carleson_constant(S), 2.0 + 1e-12)
        with self.assertRaises(ResolutionError):
            random_family(make_grid(1, 12), Lcg(11))
        with self.assertRaises(ParameterError):
            random_family(t, Lcg(11), shrink=1, branching=2)


class TestScenarioFiles(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _write(self, name, text):
        path = self.root / name
        path.write_text(text)
        return path

    def _config_error(self, name, text):
        path = self._write(name, text)
        with self.assertRaises(ConfigError) as ctx:
            Scenario.from_file(path)
        return ctx.exception

    def test_golden_scenario_parses(self):
        sc = Scenario.from_file(self._write("golden.ini", GOLDEN_SCENARIO))
        self.assertEqual(sc.name, "golden")
        self.assertEqual(sc.cells, 32)
        self.assertEqual(sc.lam, "power(-0.5)")
        self.assertEqual(len(sc.run), 15)
        self.assertEqual(sc.run[-1], "domination")
        self.assertEqual(sc.ceiling("fs"), 10.0)
        self.assertEqual(sc.ceiling("t_domination"), float("inf"))

    def test_overrides(self):
        sc = Scenario.from_file(self._write("smoke.ini", SMOKE_SCENARIO), seed=9, cells=None)
        self.assertEqual(sc.seed, 9)
        self.assertEqual(sc.cells, 16)
        self.assertEqual(sc.refined().cells, 32)

    def test_unknown_kernel(self):
        e = self._config_error("k.ini", "[scenario]\nkernel = beurling\n")
        self.assertEqual(e.lineno, 2)
        self.assertTrue(e.message.endswith("expected one of ('hilbert', 'riesz2d_x', 'tabulated')"))

    def test_kernel_dimension(self):
        e = self._config_error("d.ini", "[scenario]\nkernel = riesz2d_x\n\n[grid]\ncells = 8\n")
        self.assertEqual(e.lineno, 2)

    def test_unknown_key_and_section(self):
        self.assertEqual(self._config_error("a.ini", "[grid]\ncells = 16\ncolour = red\n").lineno, 3)
        self.assertEqual(self._config_error("b.ini", "[grid]\ncells = 16\n\n[plots]\nx = 1\n").lineno, 4)

    def test_bad_values(self):
        self.assertEqual(self._config_error("c.ini", "[grid]\ncells = many\n").lineno, 2)
        self.assertEqual(self._config_error("p.ini", "[functions]\nw = constant\np = 1\n").lineno, 3)
        e = self._config_error("r.ini", "[checks]\nrun = fs,\n  nope\n")
        self.assertIn("nope", e.message)
        e = self._config_error("g.ini", "[ceilings]\nfs = -1\n")
        self.assertEqual(e.lineno, 2)
        self.assertEqual(self._config_error("s.ini", "[grid]\ncells = 16\nshells = -1\n").lineno, 3)

    def test_message_carries_the_location(self):
        e = self._config_error("m.ini", "[grid]\ncells = 1\n")
        self.assertEqual(e.path, str(self.root / "m.ini"))
        self.assertTrue(e.message.startswith(f"{e.path}:2: "))

    def test_json_scenarios(self):
        sc = Scenario.from_file(self._write("s.json", json.dumps({"grid": {"cells": 16}, "checks": {"run": ["fs"]}})))
        self.assertEqual(sc.run, ["fs"])
        self.assertEqual(self._config_error("t.json", "{\n  \"grid\": [1]\n}\n").lineno, 1)
        self._config_error("u.json", "{\n")

    def test_read_config_lines(self):
        sections, lines = read_config(self._write("l.ini", SMOKE_SCENARIO))
        self.assertEqual(sections["grid"], {"cells": "16"})
        self.assertEqual(lines[("grid", "cells")], 6)
        self.assertEqual(lines[("checks", None)], 8)


class TestRunScenario(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)
        (self.root / "smoke.ini").write_text(SMOKE_SCENARIO)

    def tearDown(self):
        self._tmp.cleanup()

    def test_empty_check_list(self):
        (self.root / "empty.ini").write_text("[scenario]\nname = empty\njson_out = out/empty.json\n")
        code, reports = run_scenario("empty.ini", root_dir=self.root)
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(reports, [])
        data = json.loads((self.root / "out" / "empty.json").read_text())
        self.assertEqual(data["reports"], [])
        self.assertTrue(data["passed"])

    def test_runs_are_byte_identical(self):
        first = run_scenario("smoke.ini", root_dir=self.root, json_out=Path("a.json"), csv_out=Path("a.csv"))
        second = run_scenario("smoke.ini", root_dir=self.root, json_out=Path("b.json"), csv_out=Path("b.csv"))
        self.assertEqual(first[0], EXIT_PASS)
        self.assertEqual([rep.check_id for rep in first[1]], ["duality", "fs"])
        self.assertEqual((self.root / "a.json").read_bytes(), (self.root / "b.json").read_bytes())
        self.assertEqual((self.root / "a.csv").read_bytes(), (self.root / "b.csv").read_bytes())
        self.assertNotIn("runtime", (self.root / "a.json").read_text())

    def test_golden_runs_are_byte_identical(self):
        (self.root / "golden.ini").write_text(GOLDEN_SCENARIO)
        first = run_scenario("golden.ini", root_dir=self.root, json_out=Path("g1.json"), csv_out=Path("g1.csv"))
        second = run_scenario("golden.ini", root_dir=self.root, json_out=Path("g2.json"), csv_out=Path("g2.csv"))
        self.assertEqual(first[0], second[0])
        self.assertEqual(len(first[1]), 15)
        self.assertEqual([rep.digest for rep in first[1]], [rep.digest for rep in second[1]])
        self.assertEqual((self.root / "g1.json").read_bytes(), (self.root / "g2.json").read_bytes())
        self.assertEqual((self.root / "g1.csv").read_bytes(), (self.root / "g2.csv").read_bytes())

    def test_resolution_drift_of_the_domination(self):
        (self.root / "drift.ini").write_text(
            "[scenario]\nseed = 3\n\n[grid]\ncells = 16\n\n"
            "[functions]\nf = indicator(-0.25, 0.25)\nb = sign\n\n"
            "[checks]\nrun = resolution_drift\ndrift = domination\n"
        )
        sc = Scenario.from_file(self.root / "drift.ini")
        bot = DominationBot(root_dir=self.root)
        rep = check_resolution_drift(bot.measure, sc, "domination")
        self.assertEqual(rep.check_id, "resolution_drift")
        self.assertEqual(rep.labels, ["domination:16->32"])
        self.assertEqual(rep.rhs, [RESOLUTION_DRIFT])
        coarse, fine = rep.notes["coarse"], rep.notes["fine"]
        self.assertTrue(0 < coarse < math.inf and 0 < fine < math.inf)
        self.assertEqual(coarse, bot.measure(sc, "domination").empirical)
        self.assertEqual(fine, bot.measure(sc.refined(), "domination").empirical)
        self.assertAlmostEqual(rep.lhs[0], abs(fine - coarse) / coarse)
        self.assertEqual(rep.passed, rep.lhs[0] <= RESOLUTION_DRIFT)

        code, reports = run_scenario("drift.ini", root_dir=self.root)
        self.assertEqual(reports[0].lhs, rep.lhs)
        self.assertEqual(code, EXIT_PASS if rep.passed else EXIT_FAIL)

    def test_config_error_exit_code(self):
        (self.root / "bad.ini").write_text("[scenario]\nkernel = beurling\n")
        code, reports = run_scenario("bad.ini", root_dir=self.root)
        self.assertEqual(code, EXIT_CONFIG)
        self.assertEqual(reports, [])

    def test_error_becomes_a_failing_report(self):
        # 12 cells cannot carry a random family
        (self.root / "odd.ini").write_text("[grid]\ncells = 12\n\n[checks]\nrun = asp\n\n[ceilings]\nasp = 100\n")
        code, reports = run_scenario("odd.ini", root_dir=self.root)
        self.assertEqual(code, EXIT_FAIL)
        self.assertEqual(reports[0].ceiling, 0.0)
        self.assertIn("ResolutionError", reports[0].notes["error"])

    def test_ceiling_applies(self):
        (self.root / "tight.ini").write_text(
            "[scenario]\nseed = 1\n\n[grid]\ncells = 16\n\n[checks]\nrun = fs\n\n[ceilings]\nfs = 0\n"
        )
        code, reports = run_scenario("tight.ini", root_dir=self.root)
        self.assertEqual(code, EXIT_FAIL)
        self.assertFalse(reports[0].passed)


class TestCommandLine(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_template(self):
        self.assertEqual(main(["--no-color", "template", "scenarios/golden.ini"], root_dir=self.root), EXIT_PASS)
        self.assertEqual((self.root / "scenarios" / "golden.ini").read_text(), GOLDEN_SCENARIO)

    def test_run_with_a_bad_scenario(self):
        (self.root / "bad.ini").write_text("[grid]\ndim = 3\n")
        self.assertEqual(main(["--no-color", "run", "bad.ini"], root_dir=self.root), EXIT_CONFIG)

    def test_verify_family(self):
        D = DyadicLattice(dim=1, unit=1.0, levels=(0, 3))
        chain = SparseFamily(D, [Cube((0.0,), float(s)) for s in (8, 4, 2, 1)])
        tree = SparseFamily(D, [Q for k in range(4) for Q in D.members(k)])
        chain.save(self.root / "chain.txt")
        tree.save(self.root / "tree.txt")
        self.assertEqual(main(["--no-color", "verify-family", "chain.txt", "--eta", "0.5"], root_dir=self.root),
                         EXIT_PASS)
        self.assertEqual(main(["--no-color", "verify-family", "tree.txt", "--eta", "0.5"], root_dir=self.root),
                         EXIT_STRUCTURAL)
        (self.root / "junk.txt").write_text("not a family\n")
        self.assertEqual(main(["--no-color", "verify-family", "junk.txt", "--eta", "0.5"], root_dir=self.root),
                         EXIT_CONFIG)

    def test_dominate(self):
        vals = np.zeros(16)
        vals[4:12] = 1.0
        GridFunction(vals, h=1 / 8, origin=(-1.0,)).save(self.root / "f.txt")
        code = main(["--no-color", "dominate", "--kernel", "hilbert", "--f", "f.txt", "--out", "dom"],
                    root_dir=self.root)
        self.assertEqual(code, EXIT_PASS)
        data = json.loads((self.root / "dom" / "domination.json").read_text())
        self.assertEqual(data["kind"], "T")
        self.assertEqual(data["window"]["cells"], [144])
        self.assertEqual(data["notes"]["shells"], 1)
        self.assertTrue((self.root / "dom" / "family_2.txt").exists())
        code = main(["--no-color", "dominate", "--kernel", "hilbert", "--f", "f.txt", "--out", "dom0", "--shells", "0"],
                    root_dir=self.root)
        self.assertEqual(code, EXIT_PASS)
        self.assertEqual(json.loads((self.root / "dom0" / "domination.json").read_text())["window"]["cells"], [48])

        GridFunction(np.ones(12), h=1 / 6, origin=(-1.0,)).save(self.root / "g.txt")
        code = main(["--no-color", "dominate", "--kernel", "hilbert", "--f", "g.txt"], root_dir=self.root)
        self.assertEqual(code, EXIT_CONFIG)


if __name__ == '__main__':
    unittest.main()
