import json
import os
import tempfile
import unittest

import pandas as pd

from data_layer.ConfigManager import ConfigManager
from data_layer.FileHandler import FileHandler
from models import ConfigError, ParseError, SimConfig


class TestConfigManager(unittest.TestCase):
    """Unit tests for ConfigManager and FileHandler classes"""

    def setUp(self):
        """Setup manager and a temporary directory"""
        self.manager = ConfigManager()
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    # --------------------- from_dict() ---------------------
    def test_defaults(self):
        """An empty dictionary gives the default scenario"""
        cfg = self.manager.from_dict({})
        self.assertEqual(cfg, SimConfig())
        self.assertEqual(cfg.num_blocks, 1500)

    def test_unknown_key_rejected(self):
        """Unknown keys are a configuration error"""
        with self.assertRaises(ConfigError) as ctx:
            self.manager.from_dict({"num_ap": 10})
        self.assertIn("num_ap", str(ctx.exception))

    def test_type_coercion(self):
        """Integral floats become ints; comma lists become scheme lists"""
        cfg = self.manager.from_dict({"num_aps": 64.0, "ue_speed_mps": 10, "schemes": "UPA, nearopt"})
        self.assertIsInstance(cfg.num_aps, int)
        self.assertIsInstance(cfg.ue_speed_mps, float)
        self.assertEqual(cfg.schemes, ["upa", "nearopt"])

    def test_type_errors(self):
        """Non-integral counts, booleans and non-numbers are rejected"""
        for raw in ({"num_aps": 10.5}, {"num_ues": True}, {"ue_speed_mps": "fast"}, {"schemes": 3},
                    {"num_aps": None}):
            with self.assertRaises(ConfigError):
                self.manager.from_dict(raw)

    def test_optional_path_may_be_null(self):
        """Optional paths accept null"""
        self.assertIsNone(self.manager.from_dict({"topology_path": None}).topology_path)

    def test_overrides_win(self):
        """Overrides replace file values; None overrides are ignored"""
        cfg = self.manager.from_dict({"seed": 1, "n_realizations": 5}, {"seed": 9, "n_realizations": None})
        self.assertEqual(cfg.seed, 9)
        self.assertEqual(cfg.n_realizations, 5)

    def test_validation_errors_raise(self):
        """Invalid values fail validation unless validation is off"""
        with self.assertRaises(ConfigError):
            self.manager.from_dict({"tau_p": 200})
        cfg = self.manager.from_dict({"tau_p": 200}, validate=False)
        self.assertEqual(cfg.tau_p, 200)

    # --------------------- load_config() ---------------------
    def test_load_config(self):
        """Configuration files load with overrides"""
        path = self._write("cfg.json", json.dumps({"num_aps": 64, "target_q": 16, "num_best_aps": 4}))
        cfg = self.manager.load_config(path, {"duration_s": 1.0})
        self.assertEqual(cfg.num_aps, 64)
        self.assertEqual(cfg.num_blocks, 50)

    def test_load_config_invalid_json(self):
        """Malformed JSON is a configuration error naming the line"""
        path = self._write("bad.json", '{\n  "num_aps": 64,\n}')
        with self.assertRaises(ConfigError) as ctx:
            self.manager.load_config(path)
        self.assertIn("line 3", str(ctx.exception))

    def test_shipped_configs_are_valid(self):
        """The configurations under configs/ load"""
        root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
        for name in sorted(os.listdir(root)):
            cfg = self.manager.load_config(os.path.join(root, name))
            self.assertGreaterEqual(cfg.num_blocks, 1)

    def test_scenario_configs(self):
        """Medium- and high-density scenarios carry their AP count, speed and {Q, E}"""
        root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")
        expected = {
            "desk_scale.json": (308, 3.6, 20, 7),
            "desk_scale_q34_e1.json": (308, 3.6, 34, 1),
            "high_density_q27_e7.json": (665, 0.8, 27, 7),
            "high_density_q42_e1.json": (665, 0.8, 42, 1),
        }
        for name, (M, v, Q, E) in expected.items():
            cfg = self.manager.load_config(os.path.join(root, name))
            self.assertEqual((cfg.num_aps, cfg.ue_speed_mps, cfg.target_q, cfg.num_best_aps), (M, v, Q, E),
                             msg=name)
            self.assertEqual(cfg.num_blocks, 1500, msg=name)

    # --------------------- FileHandler ---------------------
    def test_load_json_not_object(self):
        """Top-level JSON must be an object"""
        path = self._write("list.json", "[1, 2]")
        with self.assertRaises(ParseError):
            FileHandler().load_json(path)

    def test_read_ap_csv(self):
        """AP CSV rows become an (M, 3) array"""
        path = self._write("aps.csv", "x_m,y_m,z_m\n1,2,10\n3,4,10\n")
        positions = FileHandler().read_ap_csv(path)
        self.assertEqual(positions.shape, (2, 3))
        self.assertEqual(positions[1, 0], 3.0)

    def test_read_ap_csv_bad_header(self):
        """A wrong header is reported at line 1"""
        path = self._write("aps.csv", "x,y,z\n1,2,10\n")
        with self.assertRaises(ParseError) as ctx:
            FileHandler().read_ap_csv(path)
        self.assertEqual(ctx.exception.line_number, 1)

    def test_save_file_rejects_other_formats(self):
        """Only CSV tables are written"""
        result = FileHandler().save_file(pd.DataFrame({"a": [1]}), os.path.join(self.tmp.name, "x.xlsx"))
        self.assertFalse(result["success"])


if __name__ == '__main__':
    unittest.main()
