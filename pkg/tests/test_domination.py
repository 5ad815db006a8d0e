# Tests for the sparse operators, the domination recursion and the
# constructions built on sparse families.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_domination`
#


import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from sparse_dom import *
from sparse_dom.analysis.domination import _partition
from sparse_dom.scripts.functions import Lcg, generate_b, make_grid, random_family


def _grid(values, h=1 / 16):
    return GridFunction(values, h=h)


def _cube(a, side):
    return Cube((float(a),), float(side))


class TestSparseOperators(unittest.TestCase):

    def setUp(self):
        self.f = _grid(np.arange(16.0))
        self.D = standard_lattice(self.f)
        self.S = SparseFamily(self.D, [_cube(0, 1), _cube(0, 0.5)], cell=self.f.h)

    def test_cz_decomposition(self):
        mask = np.zeros(8, dtype=bool)
        mask[:2] = True
        self.assertEqual(cz_decomposition(mask, 0.25), [((0,), 4)])
        self.assertEqual(cz_decomposition(np.zeros(8, dtype=bool), 0.25), [])

    def test_plain(self):
        out = sparse_apply(self.S, self.f).values
        np.testing.assert_allclose(out[:8], 7.5 + 3.5)
        np.testing.assert_allclose(out[8:], 7.5)

    def test_commutator_operators(self):
        b = self.f.with_values(np.full(16, 2.0))
        for variant in ("comm", "comm_star"):
            np.testing.assert_array_equal(sparse_apply(self.S, self.f, variant, b=b).values, 0.0)
            with self.assertRaises(ParameterError):
                sparse_apply(self.S, self.f, variant)

    def test_unknown_variant(self):
        with self.assertRaises(ParameterError):
            sparse_apply(self.S, self.f, "maximal")

    def test_llogl_dominates_plain(self):
        g = abs(self.f)
        plain = sparse_apply(self.S, g).values
        # ||g||_{L log L} >= avg g / Phi^{-1}(1) by Jensen
        llogl = sparse_apply(self.S, g, "llogl").values
        self.assertTrue(np.all(llogl >= plain * (1 - 1e-9)))


class TestDominationRecursion(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(21)
        vals = np.zeros(16)
        vals[3:13] = rng.uniform(0.5, 1.5, size=10)
        self.f = GridFunction(vals, h=1 / 8, origin=(-1.0,))
        self.b = self.f.with_values(np.sign(self.f.axis_centers()))
        self.K = hilbert_kernel()

    def test_T_domination(self):
        result = build_T_domination(self.K, self.f)
        self.assertEqual(result.kind, "T")
        self.assertEqual(len(result.families), 3)
        self.assertTrue(all(c.success for c in result.certificates))
        self.assertTrue(all(c <= 18 + 1e-9 for c in result.carleson))
        self.assertTrue(math.isfinite(result.empirical))
        self.assertGreater(result.empirical, 0.0)
        self.assertEqual(result.lhs.cells, (144,))
        self.assertEqual(result.notes["shells"], 1)
        self.assertEqual(build_T_domination(self.K, self.f, shells=0).lhs.cells, (48,))
        with self.assertRaises(ParameterError):
            build_T_domination(self.K, self.f, shells=-1)

    def test_bound_on_the_outer_ring(self):
        result = build_T_domination(self.K, self.f)
        box = result.lhs.box
        self.assertAlmostEqual(box.anchor[0], -9.0)
        self.assertAlmostEqual(box.side, 18.0)
        l, r = result.lhs.values, result.rhs.values
        outer = np.r_[0:48, 96:144]
        self.assertTrue(np.any(l[outer] > 0))
        self.assertTrue(np.all(r[outer] > 0))
        self.assertLessEqual(float(np.max(l[outer] / r[outer])), result.empirical)
        # the ring cubes of side 3|Q0| are members of the local family
        sides = {round(R.side, 9) for R in result.local_family.cubes}
        self.assertIn(6.0, sides)

    def test_partition_into_rings(self):
        cubes, rings = _partition(self.f, shells=2)
        self.assertEqual(len(cubes), 7)
        self.assertEqual(len(rings), 2)
        Q0 = self.f.box
        self.assertAlmostEqual(sum(Q.side for Q in cubes), 27 * Q0.side)
        ordered = sorted(cubes, key=lambda Q: Q.anchor)
        for P, Q in zip(ordered, ordered[1:]):
            self.assertAlmostEqual(P.anchor[0] + P.side, Q.anchor[0])
        for Q in cubes:
            self.assertTrue(Q.dilate(3).contains(Q0), msg=str(Q))

    def test_commutator_domination(self):
        result = build_commutator_domination(self.K, self.b, self.f)
        self.assertEqual(result.kind, "commutator")
        self.assertTrue(all(c <= 18 + 1e-9 for c in result.carleson))
        self.assertTrue(math.isfinite(result.empirical))
        self.assertIn("osc_f", result.alpha)
        self.assertTrue(all("osc_avg" in row for rows in result.cube_data for row in rows))

    def test_saved_result_is_deterministic(self):
        with tempfile.TemporaryDirectory() as tmp:
            first = build_T_domination(self.K, self.f).save(Path(tmp) / "a.json").read_bytes()
            second = build_T_domination(self.K, self.f).save(Path(tmp) / "b.json").read_bytes()
        self.assertEqual(first, second)

    def test_needs_power_of_two_cells(self):
        f = GridFunction(np.ones(12), h=1 / 6, origin=(-1.0,))
        with self.assertRaises(ResolutionError):
            build_T_domination(self.K, f)


class TestFamilyConstructions(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(4)
        self.b = _grid(rng.normal(size=16))
        self.D = standard_lattice(self.b)
        self.chain = SparseFamily(self.D, [_cube(0, 1), _cube(0, 0.5), _cube(0, 0.25)], cell=self.b.h)

    def test_oscillation_family(self):
        osc = build_oscillation_family(self.b, self.chain, 0.5)
        self.assertTrue(osc.bound.passed)
        self.assertTrue(osc.certificate.success)
        self.assertAlmostEqual(osc.certificate.eta, 0.5 / (2 * 1.5))
        for Q in self.chain.cubes:
            self.assertIn(Q, osc.family)
            self.assertEqual(osc.local[Q][0], Q)

    def test_oscillation_family_on_seeded_instances(self):
        b_texts = ("sign", "log", "steps(8)", "linear", "noise")
        for i in range(50):
            rng = Lcg.stream(20261019, f"oscillation:{i}")
            dim = 1 + i % 2
            t = make_grid(dim, 32 if dim == 1 else 8)
            text = b_texts[i % len(b_texts)]
            if text == "noise":
                b = t.with_values(rng.uniform(t.values.size).reshape(t.cells) * 2.0 - 1.0)
            else:
                b = generate_b(text, t, rng)
            shrink = 1 + i % 3 // 2
            # children fill at most half of each parent
            branching = 2 ** (shrink * dim - 1)
            S = random_family(t, rng, shrink=shrink, branching=branching)
            osc = build_oscillation_family(b, S, 0.5)
            with self.subTest(instance=i, b=text, dim=dim):
                self.assertTrue(osc.bound.passed)
                self.assertTrue(osc.certificate.success)
                for Q in S.cubes:
                    self.assertIn(Q, osc.family)

    def test_tbf_decomposition(self):
        sign = self.b.with_values(np.where(np.arange(16) < 8, -1.0, 1.0))
        f = self.b.with_values(np.full(16, 0.1))
        tbf = tbf_decomposition(sign, self.chain, f)
        self.assertEqual(set(tbf.levels), {1})
        self.assertTrue(tbf.splitting_holds)
        self.assertTrue(tbf.measure.passed)
        self.assertEqual(tbf.measure.check_id, "tbf_measure")

    def test_jn_alpha(self):
        self.assertEqual(jn_alpha(1, 1), 1.0)
        values = [jn_alpha(k, 1) for k in range(5, 12)]
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertLess(values[-1], 1.0)

    def test_pointwise_sparse_checks(self):
        fs = [self.b.with_values(np.abs(self.b.values)), self.b.with_values(np.ones(16))]
        rep = adjoint_sparse_check(self.chain, self.b, fs)
        self.assertEqual(len(rep.lhs), 2)
        self.assertTrue(all(math.isfinite(r) for r in rep.ratios))
        nu = constant_weight(16, h=1 / 16, origin=(0.0,))
        rep = bloom_step_check(self.chain, self.b, nu, fs)
        self.assertTrue(all(math.isfinite(r) for r in rep.ratios))


class TestKeyLemma(unittest.TestCase):

    def setUp(self):
        self.f = GridFunction(np.full(64, 0.2), h=1 / 64)
        self.D = standard_lattice(self.f)
        self.family = SparseFamily(self.D, [_cube(0, 1), _cube(0, 1 / 64)], cell=self.f.h)
        self.w = constant_weight(64, h=1 / 64, origin=(0.0,))
        self.E = np.ones(64, dtype=bool)

    def test_norm_window(self):
        self.assertEqual(len(norm_window_family(self.family, self.f, identity(), 1)), 2)
        self.assertEqual(len(norm_window_family(self.family, self.f, identity(), 1, window=1)), 0)

    def test_layer_estimate_and_conclusion(self):
        rep = key_lemma_check(identity(), 4.0, self.f, self.family, 1, self.w, self.E, power(2))
        self.assertTrue(rep.passed)
        self.assertEqual(rep.labels[-1], "conclusion")
        self.assertAlmostEqual(rep.lhs[-1], 65 / 64)
        self.assertTrue(rep.notes["identity"])

    def test_doubling_hypothesis(self):
        with self.assertRaises(HypothesisError):
            key_lemma_check(identity(), 3.0, self.f, self.family, 1, self.w, self.E, power(2))

    def test_cube_outside_the_window(self):
        f = self.f.with_values(np.full(64, 1.0))
        with self.assertRaises(HypothesisError):
            key_lemma_check(identity(), 4.0, f, self.family, 1, self.w, self.E, power(2))


if __name__ == '__main__':
    unittest.main()
