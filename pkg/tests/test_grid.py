# Tests for cubes, grid functions and dyadic lattices.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_grid`
#


import unittest

import numpy as np

from sparse_dom import *


class TestCube(unittest.TestCase):

    def test_dilate_keeps_center(self):
        Q = Cube((0.0,), 1.0)
        R = Q.dilate(3)
        self.assertEqual(R.anchor, (-1.0,))
        self.assertEqual(R.side, 3.0)
        self.assertEqual(R.center, Q.center)

    def test_contains(self):
        Q = Cube((0.0, 0.0), 4.0)
        self.assertTrue(Q.contains(Cube((1.0, 2.0), 2.0)))
        self.assertFalse(Q.contains(Cube((3.0, 0.0), 2.0)))

    def test_bad_side(self):
        with self.assertRaises(ParameterError):
            Cube((0.0,), 0.0)


class TestGridFunction(unittest.TestCase):

    def setUp(self):
        self.f = GridFunction([1.0, 2.0, 3.0, 4.0], h=0.25)

    def test_average_and_integral(self):
        self.assertEqual(self.f.average(Cube((0.0,), 1.0)), 2.5)
        self.assertAlmostEqual(self.f.integral(), 2.5)
        self.assertAlmostEqual(self.f.integral(Cube((0.5,), 0.5)), 1.75)

    def test_misaligned_cube(self):
        with self.assertRaises(AlignmentError):
            self.f.average(Cube((0.1,), 0.5))

    def test_cube_outside_box(self):
        with self.assertRaises(DomainError):
            self.f.average(Cube((0.5,), 1.0))

    def test_zero_extension(self):
        # [0.5, 1.5) meets the last two cells only
        self.assertEqual(self.f.zero_extended_sum(Cube((0.5,), 1.0)), 7.0)
        self.assertEqual(self.f.zero_extended_sum(Cube((2.0,), 1.0)), 0.0)

    def test_non_finite_values(self):
        with self.assertRaises(DataError):
            GridFunction([1.0, np.nan])

    def test_arithmetic_needs_same_grid(self):
        g = GridFunction([1.0, 1.0, 1.0, 1.0], h=0.5)
        with self.assertRaises(ParameterError):
            self.f + g
        np.testing.assert_array_equal((2 * self.f - self.f).values, self.f.values)

    def test_text_file(self):
        import tempfile
        from pathlib import Path
        g = GridFunction(np.arange(16.0).reshape(4, 4) / 3, h=0.5, origin=(-1.0, -1.0))
        with tempfile.TemporaryDirectory() as tmp:
            back = GridFunction.load(g.save(Path(tmp) / "g.txt"))
        self.assertTrue(back.same_geometry(g))
        np.testing.assert_array_equal(back.values, g.values)


class TestDyadicLattice(unittest.TestCase):

    def setUp(self):
        self.D = DyadicLattice(dim=1, unit=1.0, levels=(0, 6))

    def test_members_and_family_tree(self):
        self.assertEqual(len(self.D.members(4)), 4)
        Q = Cube((16.0,), 16.0)
        self.assertTrue(self.D.contains(Q))
        self.assertFalse(self.D.contains(Cube((8.0,), 16.0)))
        self.assertEqual(self.D.children(Q), [Cube((16.0,), 8.0), Cube((24.0,), 8.0)])
        self.assertEqual(self.D.parent(Q), Cube((0.0,), 32.0))

    def test_standard_lattice_holds_the_box(self):
        f = GridFunction(np.ones(8), h=0.25)
        L = standard_lattice(f)
        self.assertTrue(L.contains(f.box))
        self.assertEqual(L.atom, 0.25)

    def test_tripled_cubes_in_exactly_one_shift(self):
        shifts = three_lattice_shifts(self.D)
        self.assertEqual(len(shifts), 3)
        for Q in self.D.members(2):
            hits = sum(L.contains(Q.dilate(3)) for L in shifts)
            self.assertEqual(hits, 1, msg=str(Q))

    def test_covering_cube(self):
        shifts = three_lattice_shifts(self.D)
        Q = Cube((20.0,), 2.0)
        j, P = covering_cube(Q, shifts)
        self.assertTrue(P.contains(Q))
        self.assertLessEqual(P.side, 3 * Q.side)
        self.assertTrue(shifts[j].contains(P))

    def test_covering_cube_near_boundary(self):
        shifts = three_lattice_shifts(self.D)
        with self.assertRaises(DomainError):
            covering_cube(Cube((1.0,), 2.0), shifts)

    def test_shifted_lattice_in_2d(self):
        D = DyadicLattice(dim=2, unit=1.0, levels=(0, 5))
        shifts = three_lattice_shifts(D)
        self.assertEqual(len(shifts), 9)
        for Q in D.members(1)[:10]:
            self.assertEqual(sum(L.contains(Q.dilate(3)) for L in shifts), 1)


if __name__ == '__main__':
    unittest.main()
