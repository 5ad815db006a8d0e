# Tests for Young functions, Luxemburg norms, Orlicz maximal operators and
# the integral constants.
#
# Created On: Oct 19, 2026
#
# Test this from the `root_dir` using the following cmd:
#       root_dir = Path(__file__).parent.parent
#       `env/bin/python -m unittest tests.test_orlicz`
#


import math
import unittest

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from sparse_dom import *
from sparse_dom.analysis.orlicz import _log_integral
from sparse_dom.analysis.utils import log_grid


BUILTINS = ["phi_llogl", "phi_eps(0.5)", "phi_loglog(2)", "exp_minus_one", "power(2)", "identity"]


class TestYoungFunctions(unittest.TestCase):

    def test_parse_builtins(self):
        self.assertEqual(young_function("phi_eps(0.5)").key, "phi_eps(0.5)")
        self.assertEqual(young_function("compose_llogl(power(2.0))").key, "compose_llogl(power(2.0))")
        for text in BUILTINS:
            self.assertIsInstance(young_function(text), YoungFunction)

    def test_parse_errors(self):
        for text in ("phi_cubic", "phi_eps", "power(1, 2, 3)", "phi_eps(x)", "compose_llogl"):
            with self.assertRaises(ParameterError, msg=text):
                young_function(text)

    def test_inverse(self):
        t = np.array([0.1, 1.0, 10.0, 1e4])
        for text in BUILTINS:
            phi = young_function(text)
            np.testing.assert_allclose(phi(phi.inverse(t)), t, rtol=1e-10, err_msg=text)

    def test_spot_check(self):
        for text in BUILTINS[:-1]:
            self.assertTrue(young_function(text).is_young(), msg=text)

    def test_composition(self):
        Phi, phi = phi_llogl(), phi_eps(0.5)
        t = np.array([0.5, 2.0, 50.0])
        np.testing.assert_allclose(compose(Phi, phi)(t), Phi(phi(t)), rtol=1e-14)
        np.testing.assert_allclose(compose_llogl(phi)(t), Phi(phi(t)), rtol=1e-14)

    def test_complementary_of_half_square(self):
        bar = complementary(power(2, 0.5))
        t = np.array([0.0, 0.3, 2.0, 7.0])
        np.testing.assert_allclose(bar(t), t ** 2 / 2, rtol=1e-14)

    def test_complementary_sandwich(self):
        t = np.array([0.1, 1.0, 10.0, 100.0])
        for phi in (power(2), exp_minus_one(), phi_llogl()):
            prod = np.asarray(complementary(phi).inverse(t)) * np.asarray(phi.inverse(t))
            self.assertTrue(np.all(prod >= t * (1 - 1e-6)), msg=phi.key)
            self.assertTrue(np.all(prod <= 2 * t * (1 + 1e-6)), msg=phi.key)

    def test_tabulated_complementary_against_stationary_point(self):
        # for t log(e + x) the maximizer solves t = log(e + x) + x / (e + x)
        bar = complementary(phi_llogl())
        for t in (1.5, 3.0, 20.0, 300.0):
            x = brentq(lambda x: math.log(math.e + x) + x / (math.e + x) - t, 1e-12, 1e300, xtol=1e-300, rtol=1e-15)
            exact = x * t - x * math.log(math.e + x)
            self.assertAlmostEqual(float(bar(t)) / exact, 1.0, delta=1e-4, msg=t)

    def test_tabulated_complementary_is_monotone(self):
        bar = complementary(phi_llogl())
        t = log_grid(1e-3, 500.0, 5000)
        vals = np.asarray(bar(t))
        finite = np.isfinite(vals)
        self.assertTrue(np.all(np.diff(vals[finite]) >= 0))
        # phi_llogl has slope 1 at the origin
        np.testing.assert_array_equal(vals[t < 1.0], 0.0)
        self.assertEqual(float(bar(0.5)), 0.0)

    def test_linear_has_no_complementary(self):
        with self.assertRaises(ContractError):
            complementary(identity())


class TestLuxemburgNorm(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(7)
        self.Q = Cube((0.0,), 1.0)

    def test_constant_closed_form(self):
        f = GridFunction(np.full(16, 3.0), h=1 / 16)
        for text in BUILTINS:
            phi = young_function(text)
            self.assertAlmostEqual(
                luxemburg_norm(f, self.Q, phi) / (3.0 / phi.inverse(1.0)), 1.0, delta=1e-8, msg=text
            )

    def test_identity_is_the_average(self):
        f = GridFunction(self.rng.normal(size=16), h=1 / 16)
        self.assertAlmostEqual(luxemburg_norm(f, self.Q, identity()), np.abs(f.values).mean(), places=12)

    def test_half_indicator_against_brentq(self):
        f = GridFunction([1.0] * 8 + [0.0] * 8, h=1 / 16)
        t = brentq(lambda t: t * math.log(math.e + t) - 2.0, 1e-6, 10.0, xtol=1e-15)
        self.assertAlmostEqual(luxemburg_norm(f, self.Q, phi_llogl()) * t, 1.0, delta=1e-8)

    def test_zero_function(self):
        f = GridFunction(np.zeros(16), h=1 / 16)
        self.assertEqual(luxemburg_norm(f, self.Q, phi_llogl()), 0.0)

    def test_homogeneity_and_monotonicity(self):
        f = GridFunction(self.rng.normal(size=16), h=1 / 16)
        base = luxemburg_norm(f, self.Q, phi_llogl())
        self.assertAlmostEqual(luxemburg_norm(5.0 * f, self.Q, phi_llogl()) / (5 * base), 1.0, delta=1e-9)
        # t log(e + t)**0.5 <= t log(e + t) pointwise
        self.assertLessEqual(luxemburg_norm(f, self.Q, phi_eps(0.5)), base * (1 + 1e-9))

    def test_zero_extension_outside_the_box(self):
        f = GridFunction(np.ones(8), h=1 / 8)
        big = Cube((0.0,), 2.0)
        self.assertAlmostEqual(luxemburg_norm(f, big, identity()), 0.5)

    def test_clipped_cube_is_logged(self):
        f = GridFunction(np.ones(8), h=1 / 8)
        with self.assertLogs("sparse_dom.analysis.orlicz", level="DEBUG") as logs:
            luxemburg_norm(f, Cube((-0.5,), 1.0), phi_llogl())
        self.assertTrue(any("clipped" in line for line in logs.output))

    def test_non_finite_rows(self):
        with self.assertRaises(DataError):
            luxemburg_rows([[1.0, np.inf]], phi_llogl())

    def test_fact(self):
        instances = []
        for i in range(200):
            f = GridFunction(self.rng.exponential(size=16) * math.exp(self.rng.uniform(-3, 3)), h=1 / 16)
            side = int(self.rng.integers(1, 17))
            a = int(self.rng.integers(0, 17 - side))
            phi = (phi_llogl(), phi_eps(0.5), exp_minus_one(), power(3))[i % 4]
            instances.append((f, Cube((a / 16,), side / 16), phi))
        rep = luxemburg_fact_check(instances)
        self.assertEqual(rep.empirical, 0.0)
        self.assertTrue(rep.passed)


class TestOrliczMaximal(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_constant(self):
        f = GridFunction(np.full(8, 2.0), h=0.125)
        phi = phi_llogl()
        np.testing.assert_allclose(orlicz_maximal(f, phi).values, 2.0 / phi.inverse(1.0), rtol=1e-9)

    def test_identity_against_brute_force(self):
        vals = self.rng.normal(size=12)
        f = GridFunction(vals, h=1.0)
        expected = np.zeros(12)
        for a in range(12):
            for b in range(a + 1, 13):
                expected[a:b] = np.maximum(expected[a:b], np.abs(vals[a:b]).mean())
        np.testing.assert_allclose(hardy_littlewood_maximal(f).values, expected, rtol=1e-12)

    def test_level_set_matches_maximal(self):
        f = GridFunction(self.rng.exponential(size=16), h=1 / 16)
        phi = phi_llogl()
        M = orlicz_maximal(f, phi).values
        for lam in (0.2, 0.7, 1.5):
            mask = orlicz_level_set(f, phi, lam)
            clear = np.abs(M - lam) > 1e-8 * lam
            np.testing.assert_array_equal(mask[clear], (M > lam)[clear])

    def test_three_lattice_comparison(self):
        Phi = phi_llogl()
        for _ in range(5):
            f = GridFunction(self.rng.exponential(size=16), h=1 / 16)
            shifts = three_lattice_shifts(standard_lattice(f))
            total = sum(orlicz_maximal(f, Phi, L).values for L in shifts)
            M = orlicz_maximal(f, Phi).values
            self.assertTrue(np.all(M <= 3 * total * (1 + 1e-9)))


class TestHolder(unittest.TestCase):

    def setUp(self):
        self.rng = np.random.default_rng(3)
        self.cubes = [Cube((0.0,), 1.0), Cube((0.25,), 0.5), Cube((0.5,), 0.25)]

    def _pair(self):
        f = GridFunction(self.rng.normal(size=16), h=1 / 16)
        g = GridFunction(self.rng.exponential(size=16), h=1 / 16)
        return f, g

    def test_cauchy_schwarz_instance(self):
        for _ in range(50):
            f, g = self._pair()
            rep = generalized_holder(f, g, self.cubes, power(2), power(2), identity())
            self.assertTrue(rep.passed)
            self.assertLessEqual(rep.empirical, 0.5 * (1 + 1e-8))

    def test_constructed_factor(self):
        phi = phi_eps(0.5)
        Phi = phi_llogl()
        f, g = self._pair()
        rep = generalized_holder(f, g, self.cubes[:2], holder_factor(phi), compose(Phi, phi), Phi)
        self.assertTrue(rep.passed)

    def test_hypothesis_failure(self):
        f, g = self._pair()
        with self.assertRaises(HypothesisError):
            generalized_holder(f, g, self.cubes, identity(), identity(), power(2))

    def test_young_holder(self):
        for phi in (power(2), exp_minus_one()):
            f, g = self._pair()
            self.assertTrue(young_holder(f, g, self.cubes, phi).passed, msg=phi.key)

    def test_submultiplicativity(self):
        rep = submultiplicativity_check()
        self.assertTrue(rep.passed)
        self.assertEqual(rep.notes["pairs"], 200 * 200)


class TestIntegralConstants(unittest.TestCase):

    def test_c_phi_eps_scales_like_one_over_eps(self):
        scaled = [eps * c_phi(phi_eps(eps)) for eps in (0.1, 0.25, 0.5, 1.0)]
        for v in scaled:
            self.assertGreater(v, 0.3)
            self.assertLess(v, 3.0)

    def test_c_phi_of_a_square_against_quad(self):
        value = c_phi(power(2))
        ref, _ = quad(lambda t: t ** -1.5 / math.log(math.e + t), 1.0, math.inf, epsabs=1e-13, limit=400)
        self.assertAlmostEqual(value / ref, 1.0, delta=1e-6)
        self.assertAlmostEqual(c_phi(power(2), nodes=16) / value, 1.0, delta=1e-8)

    def test_c_phi_diverges_for_identity(self):
        with self.assertRaises(DivergenceError) as ctx:
            c_phi(identity())
        self.assertGreater(ctx.exception.partial, 0.0)

    def test_c_phi_finite_for_loglog(self):
        phi = phi_loglog(2)
        value = c_phi(phi)
        self.assertTrue(math.isfinite(value))
        self.assertAlmostEqual(c_phi(phi, nodes=48) / value, 1.0, delta=1e-8)
        # the integrand is positive, so any truncation is a lower bound
        head, _ = quad(
            lambda t: float(phi.inverse(t)) / (t * t * math.log(math.e + t)), 1.0, 1e6, limit=400
        )
        self.assertGreater(value, head)

    def test_c_phi_tail_in_log_log(self):
        # 1 up to L = e, then 1 / (L log(L)**2) whose integral from e is exactly 1
        def log_integrand(L):
            L = np.asarray(L, dtype=float)
            safe = np.maximum(L, math.e)
            return np.where(L > math.e, -np.log(safe) - 2 * np.log(np.log(safe)), 0.0)

        value = _log_integral(log_integrand, "test")
        self.assertAlmostEqual(value, math.e + 1.0, delta=1e-8)

    def test_k_phi_diverges_for_loglog(self):
        with self.assertRaises(DivergenceError) as ctx:
            k_phi(phi_loglog(2))
        self.assertGreater(ctx.exception.partial, 0.0)

    def test_k_phi_below_inverse_tail(self):
        phi = power(2)
        self.assertLessEqual(k_phi(phi), inverse_tail_integral(phi))
        self.assertAlmostEqual(inverse_tail_integral(phi), 2.0, delta=1e-8)

    def test_composed_constant(self):
        rep = composed_constant_check(phi_eps(0.5))
        self.assertLess(rep.notes["composition_error"], 1e-12)
        self.assertTrue(math.isfinite(rep.empirical))


if __name__ == '__main__':
    unittest.main()
