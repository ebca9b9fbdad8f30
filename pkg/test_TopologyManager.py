import os
import tempfile
import unittest

import numpy as np

from data_layer.DataValidator import DataValidator
from data_layer.RandomStreams import RandomStreams
from data_layer.TopologyManager import TopologyManager
from models import ParseError, Topology, ValidationError


class TestTopologyManager(unittest.TestCase):
    """Unit tests for TopologyManager class"""

    def setUp(self):
        """Setup manager, validator and a seeded generator"""
        self.manager = TopologyManager()
        self.validator = DataValidator()
        self.rng = RandomStreams(42).stream("topology", 0)
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    # --------------------- generate_uniform_topology() ---------------------
    def test_generate_uniform_topology_counts(self):
        """Generated layouts hold exactly M APs at the AP height"""
        for M in (308, 665, 1):
            topo = self.manager.generate_uniform_topology(750.0, M, 10.0, self.rng)
            self.assertEqual(topo.num_aps, M)
            self.assertTrue(np.all(topo.ap_positions[:, 2] == 10.0))
            self.assertEqual(self.validator.check_containment(topo.ap_positions, 750.0)["violation_count"], 0)

    def test_generate_uniform_topology_invalid(self):
        """Non-positive area or count is rejected"""
        with self.assertRaises(ValueError):
            self.manager.generate_uniform_topology(0.0, 10, 10.0, self.rng)
        with self.assertRaises(ValueError):
            self.manager.generate_uniform_topology(750.0, 0, 10.0, self.rng)

    def test_generate_is_seed_deterministic(self):
        """Same substream gives the same layout"""
        a = self.manager.generate_uniform_topology(750.0, 50, 10.0, RandomStreams(3).stream("topology", 1))
        b = self.manager.generate_uniform_topology(750.0, 50, 10.0, RandomStreams(3).stream("topology", 1))
        np.testing.assert_array_equal(a.ap_positions, b.ap_positions)

    # --------------------- assign_square_clusters() ---------------------
    def test_assign_square_clusters_medium_density(self):
        """M=308, Q=20 gives a 4x4 grid with Q_avg 19.25"""
        topo = self.manager.generate_uniform_topology(750.0, 308, 10.0, self.rng)
        clustered = self.manager.assign_square_clusters(topo, 20)
        self.assertEqual(clustered.cluster_grid, (4, 4))
        self.assertEqual(clustered.num_clusters, 16)
        self.assertAlmostEqual(clustered.Q_avg, 19.25)
        self.assertEqual(int(clustered.cluster_sizes().sum()), 308)
        self.assertTrue(self.validator.check_cluster_consistency(clustered)["is_consistent"])

    def test_assign_square_clusters_high_density(self):
        """M=665, Q=27 gives a 5x5 grid with Q_avg 26.6"""
        topo = self.manager.generate_uniform_topology(750.0, 665, 10.0, self.rng)
        clustered = self.manager.assign_square_clusters(topo, 27)
        self.assertEqual(clustered.cluster_grid, (5, 5))
        self.assertAlmostEqual(clustered.Q_avg, 26.6)

    def test_assign_square_clusters_single_cluster(self):
        """Q=M uses a single cluster; Q>M also warns"""
        topo = self.manager.generate_uniform_topology(750.0, 100, 10.0, self.rng)
        clustered = self.manager.assign_square_clusters(topo, 100)
        self.assertEqual(clustered.num_clusters, 1)
        self.assertTrue(np.all(clustered.cluster_of == 0))
        self.assertEqual(clustered.warnings, [])

        oversized = self.manager.assign_square_clusters(topo, 150)
        self.assertEqual(oversized.num_clusters, 1)
        self.assertEqual(len(oversized.warnings), 1)

    def test_assign_square_clusters_grid_rule(self):
        """cluster index = floor(x/cell)*n + floor(y/cell), edges clamp to the last cell"""
        positions = np.array([
            [0.0, 0.0, 10.0],
            [10.0, 60.0, 10.0],
            [60.0, 10.0, 10.0],
            [100.0, 100.0, 10.0],
        ])
        topo = Topology(area_side=100.0, ap_positions=positions)
        clustered = self.manager.assign_square_clusters(topo, 1)
        self.assertEqual(clustered.cluster_grid, (2, 2))
        np.testing.assert_array_equal(clustered.cluster_of, [0, 1, 2, 3])

    def test_assign_square_clusters_idempotent(self):
        """Reapplying with the same target gives the same assignment"""
        topo = self.manager.generate_uniform_topology(750.0, 308, 10.0, self.rng)
        once = self.manager.assign_square_clusters(topo, 20)
        twice = self.manager.assign_square_clusters(once, 20)
        np.testing.assert_array_equal(once.cluster_of, twice.cluster_of)

    # --------------------- load_topology() ---------------------
    def test_load_topology(self):
        """A three-row CSV gives three APs as listed"""
        path = self._write("aps.csv", "x_m,y_m,z_m\n10,20,10\n300,400,10\n700,5,12\n")
        topo = self.manager.load_topology(path, 750.0)
        self.assertEqual(topo.num_aps, 3)
        np.testing.assert_array_equal(topo.ap_positions[2], [700.0, 5.0, 12.0])

    def test_load_topology_outside_area(self):
        """An AP at x=-5 is a validation error"""
        path = self._write("aps.csv", "x_m,y_m,z_m\n-5,20,10\n")
        with self.assertRaises(ValidationError):
            self.manager.load_topology(path, 750.0)

    def test_load_topology_empty_body(self):
        """Header-only CSV reports no APs"""
        path = self._write("aps.csv", "x_m,y_m,z_m\n")
        with self.assertRaisesRegex(ValidationError, "no APs"):
            self.manager.load_topology(path, 750.0)

    def test_load_topology_malformed_row(self):
        """Non-numeric cells carry the line number"""
        path = self._write("aps.csv", "x_m,y_m,z_m\n1,2,3\n4,abc,6\n")
        with self.assertRaises(ParseError) as ctx:
            self.manager.load_topology(path, 750.0)
        self.assertEqual(ctx.exception.line_number, 3)


if __name__ == '__main__':
    unittest.main()
