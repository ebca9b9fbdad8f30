import logging
import math
import time
import unittest

import numpy as np
from scipy import integrate

from data_layer.ChannelModel import ChannelModel
from data_layer.RandomStreams import RandomStreams
from models import AgingProfile, PathLossParams, SimConfig, Topology


def j0_oracle(x):
    """J0(x) = (1/pi) * integral of cos(x sin(theta)) over [0, pi]"""
    value, _ = integrate.quad(lambda theta: math.cos(x * math.sin(theta)), 0.0, math.pi,
                              epsabs=1e-13, epsrel=1e-13, limit=200)
    return value / math.pi


class TestChannelModel(unittest.TestCase):
    """Unit tests for ChannelModel class"""

    def setUp(self):
        """Setup channel model with default path-loss constants"""
        self.channel = ChannelModel(PathLossParams())
        self.streams = RandomStreams(42)

    def test_logger_has_handler(self):
        """Log records go through a configured 'ChannelModel' logger"""
        self.assertEqual(self.channel.logger.name, 'ChannelModel')
        self.assertTrue(self.channel.logger.handlers)
        self.assertEqual(self.channel.logger.level, logging.INFO)

    # --------------------- path loss ---------------------
    def test_path_loss_without_shadowing(self):
        """z = 0 gives the average path loss exactly"""
        ap, ue = (0.0, 0.0, 10.0), (120.0, 50.0, 1.0)
        distance = math.dist(ap, ue)
        expected = 10 ** (float(self.channel.average_path_loss_db(distance)) / 10.0)
        self.assertAlmostEqual(self.channel.path_loss(ap, ue, 0.0) / expected, 1.0, places=12)

    def test_path_loss_shadowing_factor(self):
        """sigma = 8 dB and z = 1 scale the loss by 10^0.8"""
        ap, ue = (0.0, 0.0, 10.0), (300.0, 0.0, 1.0)
        ratio = self.channel.path_loss(ap, ue, 1.0) / self.channel.path_loss(ap, ue, 0.0)
        self.assertAlmostEqual(ratio, 10 ** 0.8, places=9)

    def test_far_slope_doubling(self):
        """Doubling the distance in the far region adds 35*log10(2) dB"""
        delta = self.channel.average_path_loss_db(400.0) - self.channel.average_path_loss_db(200.0)
        self.assertAlmostEqual(float(delta), 35.0 * math.log10(2.0), places=9)

    def test_three_slope_constants(self):
        """Independent scalar evaluation of the three regions"""
        f_mhz = 2000.0
        L = (46.3 + 33.9 * math.log10(f_mhz) - 13.82 * math.log10(10.0)
             - (1.1 * math.log10(f_mhz) - 0.7) * 1.0 + (1.56 * math.log10(f_mhz) - 0.8))
        far = L + 35.0 * math.log10(0.1)
        mid = L + 15.0 * math.log10(0.05) + 20.0 * math.log10(0.03)
        near = L + 15.0 * math.log10(0.05) + 20.0 * math.log10(0.01)
        self.assertAlmostEqual(float(self.channel.average_path_loss_db(100.0)), far, places=9)
        self.assertAlmostEqual(float(self.channel.average_path_loss_db(30.0)), mid, places=9)
        self.assertAlmostEqual(float(self.channel.average_path_loss_db(5.0)), near, places=9)

    def test_path_loss_continuous_at_breakpoints(self):
        """Regions meet at d0 and d1"""
        for d in (10.0, 50.0):
            below = float(self.channel.average_path_loss_db(d * (1 - 1e-9)))
            above = float(self.channel.average_path_loss_db(d * (1 + 1e-9)))
            self.assertAlmostEqual(below, above, places=5)

    def test_zero_distance_clamped(self):
        """Distances below 1 m are clamped and counted"""
        loss = self.channel.average_path_loss_db(np.array([0.0, 1.0]))
        self.assertEqual(loss[0], loss[1])
        self.assertEqual(self.channel.clamped_distances, 1)

    # --------------------- snr ---------------------
    def test_unit_snr_and_linearity(self):
        """p = n0*L gives beta = 1; halving p halves beta"""
        topo = Topology(area_side=750.0, ap_positions=np.array([[0.0, 0.0, 10.0]]))
        ue = np.array([[200.0, 100.0]])
        z = np.zeros((1, 1))
        L = self.channel.large_scale(topo, ue, 1.0, 1.0, z).L[0, 0]
        n0 = 1e-13
        beta = self.channel.snr_matrix(topo, ue, n0 * L, n0, z)
        self.assertAlmostEqual(float(beta[0, 0]), 1.0, places=12)
        half = self.channel.snr_matrix(topo, ue, n0 * L / 2.0, n0, z)
        self.assertAlmostEqual(float(half[0, 0]), 0.5, places=12)

    def test_default_power_budget(self):
        """20 dBm over a 20 MHz, 9 dB noise floor"""
        cfg = SimConfig()
        self.assertAlmostEqual(cfg.tx_power_w, 0.1)
        expected_n0 = 1.380649e-23 * 290.0 * 20e6 * 10 ** 0.9
        self.assertAlmostEqual(cfg.noise_power_w / expected_n0, 1.0, places=12)

    # --------------------- aging ---------------------
    def test_bessel_against_quadrature_oracle(self):
        """|J0(x) - oracle(x)| < 1e-8 on 1000 points in [0, 50]"""
        xs = np.linspace(0.0, 50.0, 1000)
        start = time.perf_counter()
        values = self.channel.bessel_j0(xs)
        elapsed = time.perf_counter() - start
        oracle = np.array([j0_oracle(x) for x in xs])
        self.assertLess(np.max(np.abs(values - oracle)), 1e-8)
        self.assertLess(elapsed, 1.0)

    def test_bessel_special_points(self):
        """J0(0) = 1, first zero, even symmetry"""
        self.assertEqual(float(self.channel.bessel_j0(0.0)), 1.0)
        self.assertLess(abs(float(self.channel.bessel_j0(2.404825557695773))), 1e-8)
        xs = np.linspace(0.1, 40.0, 50)
        np.testing.assert_allclose(self.channel.bessel_j0(-xs), self.channel.bessel_j0(xs), atol=1e-15)

    def test_aging_coefficient(self):
        """rho is 1 at the first data slot and for v = 0"""
        profile = AgingProfile(v=3.6, f_c=2e9, T_sa=1e-4, tau_p=10)
        self.assertEqual(self.channel.aging_coefficient(profile, 11), 1.0)
        static = AgingProfile(v=0.0)
        np.testing.assert_array_equal(self.channel.aging_coefficient(static, np.arange(200)), np.ones(200))

    def test_aging_coefficient_end_of_block(self):
        """Lag 189 at 3.6 m/s matches the oracle J0"""
        profile = AgingProfile(v=3.6, f_c=2e9, T_sa=1e-4, tau_p=10)
        argument = 2.0 * math.pi * (3.6 * 2e9 / 299792458.0) * 1e-4 * 189
        self.assertAlmostEqual(self.channel.aging_coefficient(profile, 200), j0_oracle(argument), places=9)

    def test_evolve_channel_identity(self):
        """rho = 1 returns h0 exactly"""
        h0 = np.array([1 + 2j, -0.5j])
        out = self.channel.evolve_channel(h0, 1.0, 1.0, self.streams.stream("fading", 0, 0))
        np.testing.assert_array_equal(out, h0)

    def test_evolve_channel_correlation(self):
        """Empirical correlation follows rho over 1e5 draws"""
        rng = self.streams.stream("fading", 0, 1)
        n = 100000
        h0 = self.channel.complex_normal(np.ones(n), rng)
        for rho in (0.0, 0.7):
            h = self.channel.evolve_channel(h0, rho, 1.0, rng)
            corr = np.real(np.mean(h * np.conj(h0))) / math.sqrt(np.mean(np.abs(h) ** 2) * np.mean(np.abs(h0) ** 2))
            self.assertLess(abs(corr - rho), 0.02)
            self.assertLess(abs(np.mean(np.abs(h) ** 2) - 1.0), 0.02)

    def test_evolve_channel_invalid_rho(self):
        """|rho| > 1 is rejected"""
        with self.assertRaises(ValueError):
            self.channel.evolve_channel(np.ones(2), 1.5, 1.0, self.streams.stream("fading", 0, 2))

    # --------------------- estimation ---------------------
    def test_estimate_variance(self):
        """Z vanishes at rho 0, scales with rho^2, and matches the dedicated-pilot form"""
        beta, p, n0 = 50.0, 0.1, 1e-12
        self.assertEqual(self.channel.estimate_variance(0.0, beta, p, n0, [beta]), 0.0)
        z1 = self.channel.estimate_variance(0.4, beta, p, n0, [beta])
        z2 = self.channel.estimate_variance(0.8, beta, p, n0, [beta])
        self.assertAlmostEqual(z2 / z1, 4.0, places=12)
        dedicated = self.channel.estimate_model(0.4, beta, p, n0).Z
        self.assertAlmostEqual(z1, dedicated, places=20)
        self.assertAlmostEqual(z1, 0.16 * beta ** 2 * n0 / (p * beta * n0 + p), places=20)
        with self.assertRaises(ValueError):
            self.channel.estimate_variance(1.0, beta, p, n0, [])

    def test_draw_fading_statistics(self):
        """Estimates have variance min(Z, R) and are uncorrelated with their error"""
        R = np.array([[2.0, 1.0]])
        Z = np.array([[0.5, 3.0]])
        fading = self.channel.draw_fading(R, Z, 100000, self.streams.stream("fading", 1, 0))
        self.assertEqual(fading.h0.shape, (100000, 1, 2))
        var_hat = np.mean(np.abs(fading.h_hat) ** 2, axis=0)
        np.testing.assert_allclose(var_hat, [[0.5, 1.0]], rtol=0.03)
        error = fading.h0 - fading.h_hat
        cross = np.abs(np.mean(fading.h_hat * np.conj(error), axis=0))
        self.assertLess(float(cross[0, 0]), 0.02)


if __name__ == '__main__':
    unittest.main()
