"""Unittests for the `harmonicns.analysis.inequalities` module."""
import fractions
import unittest

import numpy as np

from harmonicns.core import constants
from harmonicns.core.errors import ConfigError
from harmonicns.analysis import inequalities


class TestSupersolutionPolynomial(unittest.TestCase):
    """Unit tests for the `inequalities.SupersolutionPolynomial` class."""

    def setUp(self):
        """Setup for the test class."""
        self.polynomial = inequalities.SupersolutionPolynomial()

    def test_top_value(self):
        """SupersolutionPolynomial.top_value: correct output

        Test if p(pi/2) = 0.33449 to four decimals.

        """
        self.assertAlmostEqual(self.polynomial.top_value, 0.33449, delta=1e-4)

    def test_limit_at_zero(self):
        """SupersolutionPolynomial.limit_at_zero: correct output

        Test if the left-hand side tends to -125 at s = 0 and the sampled
        value at 1e-4 agrees within 1%.

        """
        self.assertEqual(self.polynomial.limit_at_zero, -125.)
        self.assertAlmostEqual(float(self.polynomial.lhs(1e-4)), -125., delta=1.25)

    def test_near_top(self):
        """SupersolutionPolynomial.lhs: correct output near pi/2

        Test if the left-hand side diverges to -infinity at pi/2.

        """
        self.assertLess(float(self.polynomial.lhs(constants.HALF_PI - 1e-3)), -1e3)

    def test_lhs_derivative_bound(self):
        """SupersolutionPolynomial.lhs_derivative_bound: correct output

        Test if the interval majorant dominates ``|lhs'|`` at dense points of
        gaps near both ends and in the middle of the interval.

        """
        for a, b in ((1e-4, 2e-3), (0.7, 0.75), (1.5, constants.HALF_PI - 1e-4)):
            with self.subTest(a=a, b=b):
                s = np.linspace(a, b, 2001)
                bound = float(self.polynomial.lhs_derivative_bound(a, b))
                self.assertLessEqual(
                    float(np.max(abs(self.polynomial.lhs_derivative(s)))), bound)

    def test_squared_roots(self):
        """SupersolutionPolynomial.squared_roots: correct output

        Test if the roots of p in s^2 are exactly 5/2 and 15/4, both beyond
        (pi/2)^2.

        """
        roots = self.polynomial.squared_roots()
        self.assertEqual(roots, [fractions.Fraction(5, 2), fractions.Fraction(15, 4)])
        self.assertTrue(all(root > (np.pi/2)**2 for root in roots))

    def test_not_even(self):
        """SupersolutionPolynomial.squared_roots: raises for odd terms

        Test if a polynomial with odd terms raises a `ValueError`.

        """
        with self.assertRaises(ValueError):
            inequalities.SupersolutionPolynomial((1., 1., 0., 0., 1.)).squared_roots()


class TestFunctions(unittest.TestCase):
    """Unit tests for functions in the `harmonicns.analysis.inequalities` module."""

    def test_verify_supersolution(self):
        """inequalities.verify_supersolution: correct output

        Test if the supersolution inequality is certified on samples with a
        negative gap bound and a valid decomposition.

        """
        report = inequalities.verify_supersolution(n=20000)
        self.assertTrue(report.passed)
        self.assertLess(report.worst_value, 0.)
        self.assertLess(report.details["gap_bound"], 0.)
        self.assertTrue(report.details["decomposition_holds"])

    def test_verify_supersolution_samples(self):
        """inequalities.verify_supersolution: raises for too few samples

        Test if fewer than 1000 samples raise a `ConfigError`.

        """
        with self.assertRaises(ConfigError):
            inequalities.verify_supersolution(n=999)

    def test_verify_supersolution_failure(self):
        """inequalities.verify_supersolution: detects a wrong polynomial

        Test if a positive constant polynomial fails the check.

        """
        polynomial = inequalities.SupersolutionPolynomial((1.,))
        self.assertFalse(inequalities.verify_supersolution(2000, polynomial).passed)

    def test_verify_positivity_p(self):
        """inequalities.verify_positivity_p: correct output

        Test if p is decreasing and positive with its minimum at pi/2.

        """
        report = inequalities.verify_positivity_p()
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.worst_value, 0.33449, delta=1e-4)
        self.assertEqual(report.details["squared_roots"], ["5/2", "15/4"])

    def test_verify_lemma_psi(self):
        """inequalities.verify_lemma_psi: correct output

        Test if the fitted growth exponent matches 2 - 2 delta within 10% for
        delta < 1 and is bounded for delta >= 1, and if the label states
        which of the two holds.

        """
        for delta in (0.25, 0.5, 0.75, 0.9):
            with self.subTest(delta=delta):
                report = inequalities.verify_lemma_psi(delta)
                self.assertTrue(report.passed)
                self.assertAlmostEqual(report.fitted_exponent, 2 - 2*delta,
                                       delta=0.1*(2 - 2*delta))
                self.assertFalse(report.details["bounded"])
                self.assertEqual(report.lemma, "corner-growth-unbounded")
        for delta in (1., 1.5):
            with self.subTest(delta=delta):
                report = inequalities.verify_lemma_psi(delta)
                self.assertTrue(report.passed)
                self.assertLessEqual(report.fitted_exponent, 0.05)
                self.assertTrue(report.details["bounded"])
                self.assertEqual(report.lemma, "corner-growth-bounded")

    def test_verify_lemma_psi_invalid(self):
        """inequalities.verify_lemma_psi: raises on invalid input

        Test if delta outside (0, 2] or too few samples raise a `ConfigError`.

        """
        with self.assertRaises(ConfigError):
            inequalities.verify_lemma_psi(0.)
        with self.assertRaises(ConfigError):
            inequalities.verify_lemma_psi(0.5, n=4)

    def test_verify_f1(self):
        """inequalities.verify_f1: correct output

        Test if ``(1 - |z|^2)|psi'| <= 2`` on samples of H.

        """
        report = inequalities.verify_f1(n=20000, seed=7)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.worst_value, 2 + 1e-6)
        self.assertIsNone(report.to_dict().get("fitted_exponent"))

    def test_delta_ceiling(self):
        """inequalities.delta_ceiling: correct output

        Test if the quartic admits a decay rate of at least one and a
        polynomial with a sign change admits none.

        """
        self.assertGreaterEqual(
            inequalities.delta_ceiling(constants.SUPERSOLUTION_COEFFICIENTS), 1.)
        self.assertEqual(inequalities.delta_ceiling((1., 0., -1.)), 0.)

    def test_quadratic_family_ceiling(self):
        """inequalities.quadratic_family_ceiling: correct output

        Test if the sweep stays in 0 < c < 4/pi^2, reports its best member and
        stays below the ceiling of the quartic.

        """
        output = inequalities.quadratic_family_ceiling(count=16, n=2000)
        cs = [entry["c"] for entry in output["sweep"]]
        self.assertEqual(len(cs), 16)
        self.assertGreater(min(cs), 0.)
        self.assertLess(max(cs), 4/np.pi**2)
        self.assertEqual(output["best_delta"],
                         max(entry["delta"] for entry in output["sweep"]))
        self.assertIn(output["best_c"], cs)
        self.assertLess(output["best_delta"], inequalities.delta_ceiling(
            constants.SUPERSOLUTION_COEFFICIENTS, n=2000))

    def test_chebyshev_samples(self):
        """inequalities.chebyshev_samples: correct output

        Test if the samples increase strictly inside the interval.

        """
        s = inequalities.chebyshev_samples(50, 0.1, 1.)
        self.assertTrue(np.all(np.diff(s) > 0.))
        self.assertGreater(s[0], 0.1)
        self.assertLess(s[-1], 1.)


if __name__ == "__main__":
    unittest.main()
