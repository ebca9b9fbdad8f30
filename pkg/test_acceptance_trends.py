import dataclasses
import os
import unittest

from business_layer.LoggingService import LoggingService
from business_layer.SimulationController import SimulationController
from data_layer.ConfigManager import ConfigManager


SLOW = os.environ.get("CELLFREE_SLOW_TESTS") == "1"
CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def desk_config(**overrides):
    cfg = ConfigManager().load_config(os.path.join(CONFIG_DIR, "desk_scale.json"))
    return dataclasses.replace(cfg, **overrides)


def campaign(cfg):
    return SimulationController(cfg, LoggingService('TrendCampaign')).run_campaign()


class TestCounterScaling(unittest.TestCase):
    """Per-decision work grows linearly in the number of APs"""

    def test_snr_terms_double_with_M(self):
        """Doubling M doubles the SNR terms summed per decision"""
        small = desk_config(num_aps=64, num_ues=6, target_q=16, duration_s=0.2, n_realizations=1,
                            schemes=["fairdiff", "hysteresis", "upa"])
        large = dataclasses.replace(small, num_aps=128)
        per_decision = {}
        for cfg in (small, large):
            report = campaign(cfg)
            per_decision[cfg.num_aps] = {
                scheme: stats["counters_per_decision"]["snr_terms"] for scheme, stats in report.schemes.items()
            }
        for scheme in ("hysteresis", "upa"):
            self.assertAlmostEqual(per_decision[128][scheme] / per_decision[64][scheme], 2.0, places=12)
        ratio = per_decision[128]["fairdiff"] / per_decision[64]["fairdiff"]
        self.assertLess(abs(ratio - 2.0), 0.1)


@unittest.skipUnless(SLOW, "set CELLFREE_SLOW_TESTS=1 to run desk-scale campaigns")
class TestDeskScaleTrends(unittest.TestCase):
    """Seeded trend reproduction at desk scale (several minutes)"""

    @classmethod
    def setUpClass(cls):
        cls.report = campaign(desk_config(workers=os.cpu_count() or 1))

    def test_always_has_highest_cluster_handover_rate(self):
        """always-handover changes clusters most often"""
        rates = {s: stats["h_cluster_mean"] for s, stats in self.report.schemes.items()}
        others = [rate for scheme, rate in rates.items() if scheme != "always"]
        self.assertGreater(rates["always"], max(others))

    def test_nearopt_and_fairdiff_beat_always(self):
        """nearOpt and FairDiff reach at least the mean SE of always-handover"""
        mean = {s: stats["se_mobility"]["mean"] for s, stats in self.report.schemes.items()}
        self.assertGreaterEqual(mean["nearopt"], mean["always"])
        self.assertGreaterEqual(mean["fairdiff"], mean["always"])

    def test_hysteresis_worst_for_worst_served_ues(self):
        """Hysteresis has the lowest SE for the worst-served UEs among the adaptive schemes"""
        # worst-served 95th percentile: the SE that 95% of UEs exceed, the 5th percentile of the CDF
        p05 = {s: stats["se_mobility"]["p05"] for s, stats in self.report.schemes.items()}
        self.assertLess(p05["hysteresis"], min(p05["nearopt"], p05["fairdiff"]))
        # the best-served UEs keep their attach sets under every scheme and may tie
        p95 = {s: stats["se_mobility"]["p95"] for s, stats in self.report.schemes.items()}
        self.assertLessEqual(p95["hysteresis"], min(p95["nearopt"], p95["fairdiff"]))

    def test_larger_clusters_lower_handover_rate(self):
        """target_Q = 34 lowers the cluster handover rate of every scheme that hands over"""
        larger = campaign(desk_config(target_q=34, workers=os.cpu_count() or 1))
        for scheme, stats in self.report.schemes.items():
            rate, larger_rate = stats["h_cluster_mean"], larger.schemes[scheme]["h_cluster_mean"]
            if rate == 0.0:
                # a 4 dB drop within one block never happens at this speed, hysteresis stays put
                self.assertEqual(larger_rate, 0.0, msg=scheme)
            else:
                self.assertLess(larger_rate, rate, msg=scheme)

    def test_fairdiff_update_frequency(self):
        """Refreshing the threshold every block barely moves the median SE"""
        cfg = desk_config(schemes=["fairdiff"], workers=os.cpu_count() or 1)
        every_block = campaign(dataclasses.replace(cfg, f_update=1.0)).schemes["fairdiff"]
        default = self.report.schemes["fairdiff"]
        median, reference = every_block["se_mobility"]["median"], default["se_mobility"]["median"]
        self.assertLess(abs(median - reference) / reference, 0.05)


if __name__ == '__main__':
    unittest.main()
