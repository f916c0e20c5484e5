"""Unittests for the `harmonicns.strip.profiles` module."""
import unittest

import numpy as np

from harmonicns.core.errors import ConfigError
from harmonicns.strip import profiles


class TestBoundaryProfile(unittest.TestCase):
    """Unit tests for the `profiles.BoundaryProfile` class."""

    def test_gaussian(self):
        """BoundaryProfile.__call__: correct output

        Test if the Gaussian profile equals ``a exp(-((r - c)/w)^2)``.

        """
        profile = profiles.BoundaryProfile("gaussian", 0.5, center=1., width=2.)
        r = np.array([-1., 1., 3.])
        np.testing.assert_allclose(profile(r), 0.5*np.exp(-((r - 1.)/2.)**2))

    def test_exp_decay(self):
        """BoundaryProfile.__call__: correct output for exp-decay

        Test if the exp-decay profile is ``a/cosh(r/w)``.

        """
        profile = profiles.BoundaryProfile("exp-decay", 2.)
        self.assertAlmostEqual(float(profile(0.)), 2.)
        self.assertAlmostEqual(float(profile(3.)), 2./np.cosh(3.))

    def test_custom(self):
        """BoundaryProfile.__call__: correct output for custom samples

        Test if custom samples are interpolated and extended by zero.

        """
        samples = tuple((r, 1. - r*r/4.) for r in (-2., -1., 0., 1., 2.))
        profile = profiles.BoundaryProfile("custom", samples=samples)
        self.assertAlmostEqual(float(profile(0.5)), 1. - 0.0625)
        self.assertEqual(float(profile(5.)), 0.)

    def test_invalid(self):
        """profiles.BoundaryProfile: raises on invalid input

        Test if an unknown kind, a nonpositive width and too few custom
        samples raise a `ConfigError` naming the field.

        """
        with self.assertRaises(ConfigError) as context:
            profiles.BoundaryProfile("square")
        self.assertEqual(context.exception.field, "profile.kind")
        with self.assertRaises(ConfigError):
            profiles.BoundaryProfile(width=0.)
        with self.assertRaises(ConfigError):
            profiles.BoundaryProfile("custom", samples=((0., 1.),))

    def test_custom_endpoints(self):
        """profiles.BoundaryProfile: raises for nonzero end samples

        Test if custom samples that do not vanish at both ends are refused,
        and a vanishing set is continuous across its ends.

        """
        for samples in (((-1., 0.5), (0., 1.), (1., 0.5), (2., 0.)),
                        ((-1., 0.), (0., 1.), (1., 0.5), (2., 0.1))):
            with self.subTest(samples=samples):
                with self.assertRaises(ConfigError) as context:
                    profiles.BoundaryProfile("custom", samples=samples)
                self.assertEqual(context.exception.field, "profile.samples")
        samples = ((-1., 0.), (0., 1.), (1., 0.5), (2., 0.))
        profile = profiles.BoundaryProfile("custom", samples=samples)
        np.testing.assert_allclose(profile(np.array([-1. + 1e-9, 2. - 1e-9])), 0.,
                                   atol=1e-7)

    def test_trivial(self):
        """BoundaryProfile.is_trivial: correct output

        Test if zero profiles and zero amplitudes are recognized.

        """
        self.assertTrue(profiles.BoundaryProfile("zero").is_trivial)
        self.assertTrue(profiles.BoundaryProfile(amplitude=0.).is_trivial)
        self.assertFalse(profiles.BoundaryProfile().is_trivial)

    def test_scaled(self):
        """BoundaryProfile.scaled: correct output

        Test if scaling multiplies the profile values.

        """
        profile = profiles.BoundaryProfile()
        r = np.linspace(-3., 3., 7)
        np.testing.assert_allclose(profile.scaled(-2.)(r), -2.*profile(r))

    def test_comparison_ratio(self):
        """BoundaryProfile.comparison_ratio: correct output

        Test if the default Gaussian stays below the supersolution trace and
        a unit amplitude does not.

        """
        r = np.linspace(-12., 12., 769)
        p_top = 0.33449
        self.assertLess(profiles.BoundaryProfile().comparison_ratio(r, p_top), 1.)
        self.assertGreater(profiles.BoundaryProfile(amplitude=1.).comparison_ratio(r, p_top),
                           1.)

    def test_from_dict(self):
        """BoundaryProfile.from_dict: correct output

        Test if `BoundaryProfile.from_dict` rebuilds a custom profile and
        rejects unknown keys.

        """
        samples = ((-1., 0.), (0., 1.), (1., 0.5), (2., 0.))
        profile = profiles.BoundaryProfile("custom", samples=samples)
        self.assertEqual(profiles.BoundaryProfile.from_dict(profile.to_dict()), profile)
        with self.assertRaises(ConfigError):
            profiles.BoundaryProfile.from_dict({"kind": "gaussian", "height": 1.})


class TestFunctions(unittest.TestCase):
    """Unit tests for functions in the `harmonicns.strip.profiles` module."""

    def test_shifted_gaussians(self):
        """profiles.shifted_gaussians: correct output

        Test if one Gaussian is returned per shift, centered there.

        """
        output = profiles.shifted_gaussians((-1., 2.), 0.3)
        self.assertEqual([p.center for p in output], [-1., 2.])
        self.assertTrue(all(p.amplitude == 0.3 for p in output))


if __name__ == "__main__":
    unittest.main()
