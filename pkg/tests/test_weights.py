# Tests for weight characteristics, BMO norms and the weight generators.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_weights`
#


import unittest

import numpy as np

from sparse_dom import *


class TestWeight(unittest.TestCase):

    def test_positivity(self):
        with self.assertRaises(DataError):
            Weight([1.0, 0.0, 2.0])

    def test_sigma_and_measure(self):
        w = Weight([1.0, 2.0, 4.0, 8.0], h=0.5)
        np.testing.assert_allclose(w.sigma(2).values, [1.0, 0.5, 0.25, 0.125])
        self.assertEqual(w.measure(), 7.5)
        self.assertEqual(w.measure([True, False, False, True]), 4.5)
        with self.assertRaises(ParameterError):
            w.sigma(1.0)

    def test_generators(self):
        w = power_weight(16, -0.5, h=1 / 8)
        self.assertEqual(w.origin, (-1.0,))
        self.assertAlmostEqual(w.values[8], 16 ** 0.5)
        s = step_weight(8, [1.0, 3.0])
        np.testing.assert_array_equal(s.values, [1.0] * 4 + [3.0] * 4)
        p = product_weight(8, 0.5, -0.5, h=0.25)
        self.assertEqual(p.cells, (8, 8))
        c = constant_weight(4, c=2.0, dim=2)
        np.testing.assert_array_equal(c.values, np.full((4, 4), 2.0))

    def test_singular_power_weight(self):
        # five cells centred at 0 put a midpoint on the singularity
        with self.assertRaises(DataError):
            power_weight(5, -0.5)


class TestCharacteristics(unittest.TestCase):

    def test_constant_weight(self):
        w = constant_weight(16, h=1 / 16, c=3.0)
        self.assertAlmostEqual(ap_constant(w, 2), 1.0, places=12)
        self.assertAlmostEqual(ap_constant(w, 3, cubes="dyadic"), 1.0, places=12)
        self.assertAlmostEqual(a1_constant(w), 1.0, places=12)
        self.assertAlmostEqual(ainf_constant(w, cubes="dyadic"), 1.0, places=12)

    def test_ap_constant_is_the_profile_max(self):
        w = power_weight(16, 0.5, h=1 / 8)
        value, Q = ap_constant(w, 2, return_cube=True)
        profile, _ = ap_profile(w, 2)
        self.assertAlmostEqual(value, profile.max(), places=12)
        self.assertGreater(value, 1.0)
        self.assertTrue(w.box.contains(Q))

    def test_duality_on_power_weights(self):
        for alpha in (-0.8, -0.5, 0.2, 0.5, 0.8):
            for p in (1.5, 2.0, 3.0):
                w = power_weight(16, alpha, h=1 / 8)
                rep = duality_check(w, p)
                self.assertTrue(rep.passed, msg=f"alpha={alpha} p={p}: {rep.lhs}")

    def test_duality_in_two_dimensions(self):
        w = product_weight(8, 0.3, -0.4, h=0.25)
        self.assertTrue(duality_check(w, 2.5).passed)

    def test_explicit_cube_list(self):
        w = step_weight(8, [1.0, 4.0], h=0.25)
        Q = Cube((-0.5,), 1.0)
        # avg w = 2.5, avg 1/w = 0.625
        self.assertAlmostEqual(ap_constant(w, 2, cubes=[Q]), 2.5 * 0.625)

    def test_ainf_is_at_least_one(self):
        w = power_weight(16, -0.5, h=1 / 8)
        self.assertGreaterEqual(ainf_constant(w, cubes="dyadic"), 1.0 - 1e-12)


class TestBMO(unittest.TestCase):

    def setUp(self):
        cells = 16
        self.template = GridFunction(np.zeros(cells), h=2 / cells, origin=(-1.0,))
        self.sign = self.template.with_values(np.sign(self.template.axis_centers()))

    def test_constant_has_no_oscillation(self):
        self.assertEqual(bmo_norm(self.template + 4.0), 0.0)

    def test_sign_function(self):
        value, Q = bmo_norm(self.sign, return_cube=True)
        self.assertAlmostEqual(value, 1.0, places=14)
        self.assertAlmostEqual(Q.center[0], 0.0)
        self.assertAlmostEqual(mean_oscillation(self.sign, Q), 1.0, places=14)

    def test_weighted_bmo_is_homogeneous(self):
        nu = power_weight(16, 0.4, h=1 / 8)
        base = weighted_bmo_norm(self.sign, nu)
        for c in (-2.5, 0.1, 7.0):
            self.assertAlmostEqual(weighted_bmo_norm(c * self.sign, nu) / base, abs(c), delta=1e-13)

    def test_weighted_bmo_needs_one_grid(self):
        with self.assertRaises(ParameterError):
            weighted_bmo_norm(self.sign, constant_weight(8, h=0.25))

    def test_distribution(self):
        f = self.template.with_values(np.linspace(-1, 1, 16))
        self.assertAlmostEqual(distribution(None, f, 0.0), 2.0)
        levels = [distribution(None, f, lam) for lam in (0.1, 0.5, 0.9, 1.0)]
        self.assertEqual(levels, sorted(levels, reverse=True))
        self.assertEqual(levels[-1], 0.0)
        w = constant_weight(16, h=1 / 8, c=2.0)
        self.assertAlmostEqual(distribution(w, f, 0.5), 2 * distribution(None, f, 0.5))

    def test_john_nirenberg(self):
        report = john_nirenberg_profile(self.sign, self.template.box)
        self.assertTrue(report.under_envelope)
        self.assertGreater(report.exp_constant, 0.0)
        self.assertEqual(report.to_dict()["bmo"], report.bmo)

    def test_osc_llogl_with_constant_g(self):
        one = self.template + 1.0
        cubes = [Cube((-1.0,), 2.0), Cube((-0.5,), 1.0), Cube((-0.25,), 0.25)]
        rep = osc_llogl_check(self.sign, [(one, Q) for Q in cubes])
        # avg |b - b_Q| <= ||b||_BMO and ||1||_{L log L} = 1 / Phi^{-1}(1)
        self.assertLessEqual(rep.empirical, phi_llogl().inverse(1.0) * (1 + 1e-9))


if __name__ == '__main__':
    unittest.main()
