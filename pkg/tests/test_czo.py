# Tests for the discretized Calderón-Zygmund operators and commutators.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_czo`
#


import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from sparse_dom import *


class TestKernels(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_hilbert_constants(self):
        K = hilbert_kernel()
        self.assertAlmostEqual(K.c_t, math.pi + 5.0)
        self.assertEqual(K(0.5, 0.25), 4.0)
        self.assertEqual(K(0.5, 0.5), 0.0)

    def test_size_and_smoothness(self):
        for K in (hilbert_kernel(), riesz2d_x_kernel()):
            x = self.rng.uniform(-1, 1, size=(200, K.dim))
            y = self.rng.uniform(-1, 1, size=(200, K.dim))
            r = np.linalg.norm(x - y, axis=1)
            step = self.rng.normal(size=(200, K.dim))
            step *= (0.45 * r * self.rng.uniform(size=200) / np.linalg.norm(step, axis=1))[:, None]
            self.assertTrue(np.all(K.size_ratio(x, y) <= 1 + 1e-12), msg=K.name)
            self.assertTrue(np.all(K.smoothness_ratio(x, x + step, y) <= 1 + 1e-9), msg=K.name)

    def test_smoothness_sampling_region(self):
        K = hilbert_kernel()
        with self.assertRaises(ParameterError):
            K.smoothness_ratio([0.0], [0.4], [0.5])

    def test_kernel_by_name(self):
        self.assertEqual(kernel_by_name("hilbert").name, "hilbert")
        self.assertEqual(kernel_by_name(" riesz2d_x ").dim, 2)
        with self.assertRaises(ParameterError):
            kernel_by_name("beurling")
        with self.assertRaises(ParameterError):
            kernel_by_name("tabulated(k.bin)")

    def test_tabulated_kernel(self):
        f = GridFunction(self.rng.normal(size=8), h=0.25, origin=(-1.0,))
        x = f.axis_centers()
        with np.errstate(divide="ignore"):
            table = np.where(x[:, None] != x[None, :], 1.0 / (x[:, None] - x[None, :]), 0.0)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "hilbert8.bin"
            TabulatedKernel(table, h=0.25).save(path)
            K = kernel_by_name(f"tabulated({path})", h=0.25)
        self.assertEqual(K.name, "hilbert8")
        self.assertTrue(K.describe()["norm_is_estimate"])
        # the discrete Hilbert matrix is bounded by pi
        self.assertGreater(K.l2_norm, 0.0)
        self.assertLess(K.l2_norm, math.pi)
        np.testing.assert_allclose(apply_T(K, f).values, apply_T(hilbert_kernel(), f).values, rtol=1e-12, atol=1e-13)
        with self.assertRaises(ParameterError):
            apply_T(K, GridFunction(np.ones(4), h=0.25))

    def test_bad_table(self):
        with self.assertRaises(DataError):
            TabulatedKernel(np.ones((2, 3)), h=1.0)


class TestOperators(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(9)
        self.K = hilbert_kernel()
        self.f = GridFunction(self.rng.normal(size=32), h=1 / 16, origin=(-1.0,))
        self.g = self.f.with_values(self.rng.normal(size=32))

    def test_single_cell(self):
        vals = np.zeros(32)
        vals[10] = 1.0
        f = self.f.with_values(vals)
        x = f.axis_centers()
        with np.errstate(divide="ignore"):
            expected = np.where(np.arange(32) != 10, f.h / (x - x[10]), 0.0)
        np.testing.assert_allclose(apply_T(self.K, f).values, expected, rtol=1e-14)

    def test_antisymmetry(self):
        left = np.sum(self.g.values * apply_T(self.K, self.f).values)
        right = np.sum(self.f.values * apply_T(self.K, self.g).values)
        self.assertAlmostEqual(left, -right, places=10)

    def test_truncated_maximal_dominates(self):
        Tf = np.abs(apply_T(self.K, self.f).values)
        Ts = maximal_truncated(self.K, self.f).values
        self.assertTrue(np.all(Ts >= Tf - 1e-12 * (1 + Tf)))

    def test_commutator(self):
        const = self.f.with_values(np.full(32, 3.0))
        np.testing.assert_allclose(commutator(self.K, const, self.f).values, 0.0, atol=1e-12)
        b1 = self.f.with_values(np.sign(self.f.axis_centers()))
        b2 = self.f.with_values(self.f.axis_centers())
        np.testing.assert_allclose(
            commutator(self.K, b1 + b2, self.f).values,
            (commutator(self.K, b1, self.f) + commutator(self.K, b2, self.f)).values,
            atol=1e-12,
        )

    def test_commutator_in_the_plane(self):
        K = riesz2d_x_kernel()
        f = GridFunction(self.rng.normal(size=(8, 8)), h=0.25, origin=(-1.0, -1.0))
        b = f.with_values(np.ones((8, 8)))
        np.testing.assert_allclose(commutator(K, b, f).values, 0.0, atol=1e-11)

    def test_dyadic_local_maximal(self):
        vals = np.zeros(32)
        vals[0] = 8.0
        g = self.f.with_values(vals)
        Q = Cube((-1.0,), 0.5)
        out = dyadic_local_maximal(g, Q).values
        np.testing.assert_allclose(out[:8], [8.0, 4.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0])
        self.assertTrue(np.all(out[8:] == 0))
        with self.assertRaises(ParameterError):
            dyadic_local_maximal(g, Cube((-1.0,), 0.375))

    def test_power_maximal(self):
        w = Weight(np.full(32, 2.0), h=1 / 16, origin=(-1.0,))
        np.testing.assert_allclose(power_maximal(w, 3.0).values, 2.0, rtol=1e-12)

    def test_local_grand_maximal_vanishes_outside(self):
        f = GridFunction(self.rng.normal(size=16), h=1 / 16)
        Q0 = Cube((0.25,), 0.25)
        out = local_grand_maximal(self.K, f, Q0).values
        inside = np.zeros(16, dtype=bool)
        inside[4:8] = True
        self.assertTrue(np.all(out[~inside] == 0))
        self.assertTrue(np.all(out[inside] >= 0))
        with self.assertRaises(ParameterError):
            local_grand_maximal(self.K, f, Cube((0.125,), 0.25))

    def test_local_grand_maximal_on_three_blocks(self):
        f = GridFunction(self.rng.normal(size=16), h=1 / 16)
        # six cells: three blocks of two
        out = local_grand_maximal(self.K, f, Cube((0.25,), 0.375)).values
        self.assertTrue(np.all(out[:4] == 0))
        self.assertTrue(np.all(out[10:] == 0))
        self.assertTrue(np.all(out[4:10] > 0))
        with self.assertRaises(ParameterError):
            local_grand_maximal(self.K, f, Cube((0.3125,), 0.375))


class TestChecks(unittest.TestCase):

    def setUp(self):
        self.K = hilbert_kernel()
        vals = np.zeros(32)
        vals[12:20] = 1.0
        self.f = GridFunction(vals, h=1 / 16, origin=(-1.0,))

    def test_weak_type(self):
        for operator in ("T", "T*", "M_T"):
            rep = weak_type_check(self.K, [self.f], operator=operator, ceiling=2 * self.K.c_t)
            self.assertGreater(rep.empirical, 0.0, msg=operator)
            self.assertTrue(rep.passed, msg=operator)
        with self.assertRaises(ParameterError):
            weak_type_check(self.K, [self.f], operator="M")

    def test_pointwise_estimates(self):
        rep = truncation_bounds_check(self.K, [self.f])
        self.assertEqual(rep.labels, ["i:0", "ii:0"])
        self.assertTrue(all(math.isfinite(r) for r in rep.ratios))


if __name__ == '__main__':
    unittest.main()
