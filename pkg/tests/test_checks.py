"""Unittests for the `harmonicns.geometry.checks` module."""
import dataclasses
import unittest

import numpy as np

from harmonicns.geometry import checks, hyperbolic


def corrupted_jet(z):
    """Geometry jet with a wrong sign in one planar Christoffel symbol."""
    jet = hyperbolic.geometry_jet(z)
    gamma_x = jet.gamma_x.copy()
    gamma_x[3] = -gamma_x[3]
    return dataclasses.replace(jet, gamma_x=gamma_x)


class TestFunctions(unittest.TestCase):
    """Unit tests for functions in the `harmonicns.geometry.checks` module."""

    def test_geometry_checks(self):
        """checks.geometry_checks: correct output

        Test if every closed-form geometry property passes on sampled points.

        """
        results = checks.geometry_checks(n=500, seed=3)
        names = [result["name"] for result in results]
        self.assertEqual(len(names), 10)
        for result in results:
            with self.subTest(check=result["name"]):
                self.assertTrue(result["passed"], result)

    def test_fault_injection(self):
        """checks.geometry_checks: detects a corrupted jet

        Test if a sign error in one Christoffel symbol fails the Christoffel
        check and nothing else.

        """
        with self.assertLogs("harmonicns.geometry.checks", level="WARNING"):
            results = checks.geometry_checks(n=200, seed=3, jet_factory=corrupted_jet)
        failed = [result["name"] for result in results if not result["passed"]]
        self.assertEqual(failed, ["christoffel"])

    def test_strip_warp(self):
        """checks.strip_warp: correct output

        Test if the disk and strip forms of f agree to 1e-10 on the warp
        window, and to 1e-10 in absolute terms where f_strip <= 1.

        """
        rng = np.random.default_rng(5)
        self.assertLessEqual(checks.strip_warp(rng, 2000), 1e-10)
        r = rng.uniform(-checks.STRIP_WARP_R, checks.STRIP_WARP_R, 2000)
        s = rng.uniform(0., 1., 2000)
        strip = hyperbolic.warp_f_strip(s)
        self.assertTrue(np.all(strip <= 1.))
        z = hyperbolic.phi(r + 1j*s)
        z = z.real.clip(0.) + 1j*z.imag
        self.assertLessEqual(float(np.max(abs(hyperbolic.warp_f(z) - strip))), 1e-10)

    def test_g_lower_bound(self):
        """checks.g_lower_bound: correct output

        Test if G stays above ``(1 + 1/(2cos s))/2`` beyond sqrt(2)/2.

        """
        self.assertLessEqual(checks.g_lower_bound(), 0.)


if __name__ == "__main__":
    unittest.main()
