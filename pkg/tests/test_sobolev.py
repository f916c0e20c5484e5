"""Unittests for the `harmonicns.analysis.sobolev` module."""
import unittest

import numpy as np

from harmonicns.analysis import harmonic, sobolev
from harmonicns.core import constants
from harmonicns.core.errors import ConfigError
from harmonicns.strip import bvp
from harmonicns.strip.profiles import BoundaryProfile, shifted_gaussians


class TestDiskMesh(unittest.TestCase):
    """Unit tests for the `sobolev.DiskMesh` class."""

    def test_edges(self):
        """sobolev.DiskMesh: correct output

        Test if the rings are uniform up to the inner radius and graded
        geometrically beyond it.

        """
        mesh = sobolev.DiskMesh(0)
        edges = mesh.radial_edges
        self.assertEqual(len(edges), constants.INNER_CELLS + constants.GRADED_DEPTH + 1)
        self.assertEqual(mesh.cells, (len(edges) - 1)*constants.ANGULAR_CELLS)
        gaps = 1 - edges[constants.INNER_CELLS:]
        np.testing.assert_allclose(gaps[1:]/gaps[:-1], constants.GRADING_RATIO)
        self.assertAlmostEqual(mesh.outer_radius,
                               1 - 0.5*constants.GRADING_RATIO**constants.GRADED_DEPTH)

    def test_refined(self):
        """sobolev.DiskMesh: correct output when refined

        Test if a refinement level doubles the angular cells and moves the
        outer radius closer to the arc.

        """
        coarse, fine = sobolev.DiskMesh(0), sobolev.DiskMesh(1)
        self.assertEqual(len(fine.angular_edges) - 1, 2*(len(coarse.angular_edges) - 1))
        self.assertGreater(fine.outer_radius, coarse.outer_radius)

    def test_weights(self):
        """DiskMesh.nodes: correct output

        Test if the weights integrate 1 to the area of the half-disk of the
        outer radius.

        """
        mesh = sobolev.DiskMesh(0)
        z, w = mesh.nodes()
        self.assertEqual(z.shape, w.shape)
        self.assertTrue(np.all(z.real > 0.))
        self.assertAlmostEqual(float(w.sum()), 0.5*np.pi*mesh.outer_radius**2, places=12)

    def test_arc_tail(self):
        """sobolev.arc_tail: correct output

        Test if the arc tail bound is ``2 pi sqrt(1 - rho)``.

        """
        self.assertAlmostEqual(sobolev.arc_tail(0.99), 0.2*np.pi)


class TestQuadratureLadder(unittest.TestCase):
    """Unit tests for the `sobolev.QuadratureLadder` class."""

    def test_properties(self):
        """sobolev.QuadratureLadder: correct output

        Test if relative change, Richardson value and verdict follow from the
        level values.

        """
        ladder = sobolev.QuadratureLadder("l2", [(10, 1.), (40, 1.0016)], 1e-5)
        self.assertAlmostEqual(ladder.relative_change, 0.0016/1.0016)
        self.assertAlmostEqual(ladder.extrapolated, 1.0016 + 0.0016/15)
        self.assertTrue(ladder.converged)
        self.assertFalse(sobolev.QuadratureLadder("l2", [(10, 1.)], 0.).converged)
        self.assertFalse(sobolev.QuadratureLadder("l2", [(10, 1.), (40, 1.)], 1.).converged)

    def test_from_dict(self):
        """QuadratureLadder.from_dict: correct output

        Test if a ladder is rebuilt from its dictionary.

        """
        ladder = sobolev.QuadratureLadder("h1", [(10, 2.), (40, 2.01)], 1e-4, False)
        rebuilt = sobolev.QuadratureLadder.from_dict(ladder.to_dict())
        self.assertEqual(rebuilt.levels, ladder.levels)
        self.assertEqual(rebuilt.theta_factor, False)


class TestIntegrateDisk(unittest.TestCase):
    """Unit tests for `sobolev.integrate_disk`."""

    def test_volume(self):
        """sobolev.integrate_disk: correct output for the volume

        Test if the integral of f over H converges with a small tail.

        """
        ladder = sobolev.integrate_disk("volume", levels=2)
        self.assertGreater(ladder.value, 0.)
        self.assertLess(ladder.relative_change, 1e-2)
        self.assertLess(ladder.tail_budget, 1e-2*ladder.value)

    def test_theta_factor(self):
        """sobolev.integrate_disk: correct output without the fiber factor

        Test if leaving out the fiber divides the value by 2 pi.

        """
        with_factor = sobolev.integrate_disk("volume", levels=2)
        without = sobolev.integrate_disk("volume", levels=2, theta_factor=False)
        self.assertAlmostEqual(with_factor.value/without.value, 2*np.pi)

    def test_invalid(self):
        """sobolev.integrate_disk: raises on invalid input

        Test if an unknown kind, a missing field or a single level raise a
        `ConfigError`.

        """
        with self.assertRaises(ConfigError):
            sobolev.integrate_disk("l3")
        with self.assertRaises(ConfigError):
            sobolev.integrate_disk("l2")
        with self.assertRaises(ConfigError):
            sobolev.integrate_disk("volume", levels=1)

    def test_constant_field(self):
        """sobolev.integrate_disk: correct output for a constant potential

        Test if a constant potential has zero energy.

        """
        handle = harmonic.HarmonicFieldHandle(harmonic.AnalyticStripFunction.constant())
        ladder = sobolev.integrate_disk("l2", handle, levels=2)
        self.assertEqual(ladder.value, 0.)


class TestSolvedField(unittest.TestCase):
    """Unit tests for the Sobolev integrals of a solved field."""

    @classmethod
    def setUpClass(cls):
        """Setup for the test class."""
        cls.grid = bvp.StripGrid(8., 129, 25)
        cls.handle = harmonic.HarmonicFieldHandle(bvp.solve_bvp(cls.grid, BoundaryProfile()))
        cls.report = sobolev.sobolev_report(cls.handle, levels=2)

    def test_report(self):
        """sobolev.sobolev_report: correct output

        Test if all five integrals are positive and the energy ladder settles.

        """
        for name, ladder in self.report.ladders.items():
            with self.subTest(ladder=name):
                self.assertGreater(ladder.value, 0.)
        self.assertLess(self.report.l2_du.relative_change, 0.05)
        self.assertEqual(set(self.report.bound_checks),
                         {"l2_density", "h1_density", "nabla_du4"})

    def test_converged(self):
        """sobolev.sobolev_report: converged on the default ladder

        Test if all five ladders settle on the default number of levels.

        """
        report = sobolev.sobolev_report(self.handle)
        self.assertTrue(report.converged)
        self.assertEqual(report.verdict, "pass")

    def test_homogeneity(self):
        """sobolev.sobolev_report: correct output for a scaled field

        Test if doubling the field multiplies the quadratic integrals by 4,
        the quartic ones by 16 and leaves the volume unchanged.

        """
        scaled = sobolev.sobolev_report(self.handle.scaled(2.), levels=2)
        factors = {"l2_du": 4., "h1_du": 4., "l4_du": 16., "w14_du": 16., "base_volume": 1.}
        for name, factor in factors.items():
            with self.subTest(ladder=name):
                self.assertAlmostEqual(
                    scaled.ladders[name].value/self.report.ladders[name].value, factor,
                    delta=1e-10*factor)

    def test_from_dict(self):
        """SobolevReport.from_dict: correct output

        Test if a report is rebuilt with the same values and verdict.

        """
        rebuilt = sobolev.SobolevReport.from_dict(self.report.to_dict())
        self.assertEqual(rebuilt.h1_du.value, self.report.h1_du.value)
        self.assertEqual(rebuilt.verdict, self.report.verdict)

    def test_gram_diagonal(self):
        """sobolev.gram_matrix: correct output on the diagonal

        Test if the self pairing equals the energy integral on the same mesh.

        """
        gram = sobolev.gram_matrix([self.handle], level=1)
        self.assertAlmostEqual(gram[0, 0]/self.report.l2_du.value, 1., places=10)

    def test_gram_independence(self):
        """sobolev.gram_matrix: correct output for shifted profiles

        Test if shifted Gaussians give independent fields while a field and
        its multiple do not.

        """
        handles = [harmonic.HarmonicFieldHandle(bvp.solve_bvp(self.grid, profile))
                   for profile in shifted_gaussians()]
        gram = sobolev.gram_matrix(handles, level=0)
        np.testing.assert_allclose(gram, gram.T)
        self.assertGreater(np.linalg.det(gram)/np.prod(np.diag(gram)), 1e-6)
        dependent = sobolev.gram_matrix([self.handle, self.handle.scaled(2.)], level=0)
        self.assertLess(abs(np.linalg.det(dependent))/np.prod(np.diag(dependent)), 1e-10)

    def test_cell_rows(self):
        """sobolev.cell_rows: correct output

        Test if the cell contributions add up to the level value.

        """
        rows = sobolev.cell_rows(self.handle, 0)
        self.assertEqual(rows.shape, (sobolev.DiskMesh(0).cells, 5))
        total = 2*np.pi*rows[:, 4].sum()
        self.assertAlmostEqual(total/self.report.l2_du.levels[0][1], 1., places=10)


if __name__ == "__main__":
    unittest.main()
