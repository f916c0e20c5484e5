"""Unittests for the `harmonicns.core.config` module."""
import json
import pathlib
import tempfile
import unittest

from harmonicns.core import constants
from harmonicns.core.config import GridConfig, ProfileConfig, RunConfig
from harmonicns.core.errors import ConfigError


class TestRunConfig(unittest.TestCase):
    """Unit tests for the `config.RunConfig` class."""

    def test_defaults(self):
        """config.RunConfig: correct output

        Test if the defaults validate and come from `constants`.

        """
        config = RunConfig().validate()
        self.assertEqual(config.grid.R, constants.DEFAULT_R)
        self.assertEqual(config.k, constants.DEFAULT_K_MULTIPLIERS)
        self.assertFalse(config.record_timings)

    def test_from_dict(self):
        """RunConfig.from_dict: correct output

        Test if partial nested dictionaries override the defaults.

        """
        config = RunConfig.from_dict({"grid": {"n_r": 97}, "k": [1., 3.], "nu": 0.})
        self.assertEqual(config.grid, GridConfig(n_r=97))
        self.assertEqual(config.k, (1., 3.))
        self.assertEqual(config.nu, 0.)
        self.assertEqual(RunConfig.from_dict(config.to_dict()), config)

    def test_unknown_key(self):
        """RunConfig.from_dict: raises for unknown keys

        Test if unknown top-level and nested keys raise a `ConfigError`
        naming the key.

        """
        with self.assertRaises(ConfigError) as context:
            RunConfig.from_dict({"viscosity": 1.})
        self.assertEqual(context.exception.field, "viscosity")
        with self.assertRaises(ConfigError) as context:
            RunConfig.from_dict({"grid": {"nr": 3}})
        self.assertEqual(context.exception.field, "grid.nr")

    def test_from_json(self):
        """RunConfig.from_json: correct output

        Test if a JSON document is loaded and a broken one raises.

        """
        with tempfile.TemporaryDirectory() as directory:
            path = pathlib.Path(directory)/"config.json"
            path.write_text(json.dumps({"profile": {"kind": "exp-decay"}, "seed": 3}))
            config = RunConfig.from_json(path)
            self.assertEqual(config.profile.kind, "exp-decay")
            self.assertEqual(config.seed, 3)
            path.write_text("{broken")
            with self.assertRaises(ConfigError):
                RunConfig.from_json(path)
            path.write_text("[1, 2]")
            with self.assertRaises(ConfigError):
                RunConfig.from_json(path)

    def test_with_overrides(self):
        """RunConfig.with_overrides: correct output

        Test if dotted names override nested values and ``None`` is ignored.

        """
        config = RunConfig().with_overrides({"grid.R": 6., "nu": None, "seed": 9})
        self.assertEqual(config.grid.R, 6.)
        self.assertEqual(config.nu, constants.DEFAULT_NU)
        self.assertEqual(config.seed, 9)

    def test_validate(self):
        """RunConfig.validate: raises on invalid values

        Test if invalid values raise a `ConfigError` naming the field.

        """
        cases = {
            "grid.n_r": {"grid": {"n_r": 3}},
            "grid.R": {"grid": {"R": -1.}},
            "profile.kind": {"profile": {"kind": "square"}},
            "k": {"k": []},
            "psi_deltas": {"psi_deltas": [2.5]},
            "nu": {"nu": -1.},
            "f0": {"f0": 0.},
            "supersolution_samples": {"supersolution_samples": 10},
            "quadrature_levels": {"quadrature_levels": 1},
        }
        for field, data in cases.items():
            with self.subTest(field=field):
                with self.assertRaises(ConfigError) as context:
                    RunConfig.from_dict(data).validate()
                self.assertEqual(context.exception.field, field)


class TestProfileConfig(unittest.TestCase):
    """Unit tests for the `config.ProfileConfig` class."""

    def test_profiles(self):
        """ProfileConfig.independent_profiles: correct output

        Test if the configured profile and the shifted profiles are built.

        """
        config = ProfileConfig(amplitude=0.1, shifts=(-2., 0., 2.))
        self.assertEqual(config.profile().amplitude, 0.1)
        self.assertEqual(len(config.independent_profiles()), 3)
        with self.assertRaises(ConfigError):
            ProfileConfig(shifts=(1.,)).validate()


if __name__ == "__main__":
    unittest.main()
