"""Unittests for the `harmonicns.core.reports` module."""
import json
import pathlib
import tempfile
import unittest

import numpy as np

from harmonicns.core import reports
from harmonicns.core.config import RunConfig


class TestFunctions(unittest.TestCase):
    """Unit tests for functions in the `harmonicns.core.reports` module."""

    def setUp(self):
        """Setup for the test class."""
        self.directory = tempfile.TemporaryDirectory()
        self.path = pathlib.Path(self.directory.name)

    def tearDown(self):
        """Teardown for the test class."""
        self.directory.cleanup()

    def test_make_json_safe(self):
        """reports.make_json_safe: correct output

        Test if numpy values, arrays, tuples and non-finite floats become
        plain JSON types.

        """
        data = {"a": np.float64(1.5), "b": np.arange(3), "c": (np.bool_(True),),
                "d": float("inf"), 1: pathlib.Path("x")}
        output = reports.make_json_safe(data)
        self.assertEqual(output, {"a": 1.5, "b": [0, 1, 2], "c": [True], "d": "inf",
                                  "1": "x"})
        json.dumps(output)

    def test_write_csv(self):
        """reports.write_csv: correct output

        Test if a header and 17-digit rows with newline endings are written.

        """
        path = reports.write_csv(self.path/"rows.csv", ("a", "b"),
                                 [[0.1, 1/3], [2., 3.]])
        text = path.read_bytes().decode()
        lines = text.split("\n")
        self.assertEqual(lines[0], "a,b")
        self.assertEqual(lines[1], "0.10000000000000001,0.33333333333333331")
        self.assertNotIn("\r", text)
        self.assertTrue(text.endswith("\n"))

    def test_write_json(self):
        """reports.write_json: correct output

        Test if JSON is written with a trailing newline.

        """
        path = reports.write_json(self.path/"out.json", {"x": np.int64(2)})
        text = path.read_text()
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(json.loads(text), {"x": 2})


class TestRunManifest(unittest.TestCase):
    """Unit tests for the `reports.RunManifest` class."""

    def setUp(self):
        """Setup for the test class."""
        self.directory = tempfile.TemporaryDirectory()
        self.path = pathlib.Path(self.directory.name)/"run"

    def tearDown(self):
        """Teardown for the test class."""
        self.directory.cleanup()

    def test_manifest(self):
        """reports.RunManifest: correct output

        Test if files and verdicts are listed and timings are left out by
        default.

        """
        manifest = reports.RunManifest(RunConfig(), self.path)
        manifest.write_json("b.json", {})
        manifest.write_csv("a.csv", ("x",), [[1.]])
        manifest.record("solve", reports.PASS, 1.5)
        path = manifest.write()
        data = json.loads(path.read_text())
        self.assertEqual(data["files"], ["a.csv", "b.json", "manifest.json"])
        self.assertEqual(data["verdicts"], {"solve": "pass"})
        self.assertNotIn("timings", data)
        self.assertIn("numpy", data["versions"])
        self.assertEqual(data["config"]["grid"]["R"], RunConfig().grid.R)
        self.assertTrue(manifest.passed)

    def test_timings(self):
        """reports.RunManifest: correct output with timings

        Test if timings are written when requested and a failing verdict is
        reported.

        """
        manifest = reports.RunManifest(RunConfig(), self.path, record_timings=True)
        with self.assertLogs("harmonicns.core.reports", level="WARNING"):
            manifest.record("norms", reports.FAIL, 2.)
        self.assertEqual(manifest.to_dict()["timings"], {"norms": 2.})
        self.assertFalse(manifest.passed)


if __name__ == "__main__":
    unittest.main()
