# data_layer/ChannelModel.py

import logging

import numpy as np
from scipy import special

from models import PathLossParams, LargeScale, FadingState, EstimateModel


class ChannelModel:
    """
    Data Layer - Large-scale and small-scale channel model
    Three-slope path loss with log-normal shadowing, per-block SNR, Rayleigh
    fading with Bessel channel aging, and MMSE estimate variances
    """

    MIN_DISTANCE_M = 1.0

    def __init__(self, params=None):
        self.params = params or PathLossParams()
        self.clamped_distances = 0
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('ChannelModel')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    # ========== LARGE SCALE ==========

    def average_path_loss_db(self, distance_m):
        """
        Three-slope Hata-COST231 path loss in dB (no shadowing)

        Args:
            distance_m: scalar or array of 3D distances in meters

        Returns:
            path loss in dB, same shape as distance_m
        """
        p = self.params
        d = np.asarray(distance_m, dtype=float)
        too_close = d < self.MIN_DISTANCE_M
        if np.any(too_close):
            count = int(np.sum(too_close))
            self.clamped_distances += count
            self.logger.warning(f"Clamped {count} AP-UE distances below {self.MIN_DISTANCE_M} m")
            d = np.maximum(d, self.MIN_DISTANCE_M)

        d_km = d / 1000.0
        d0_km = p.d0_m / 1000.0
        d1_km = p.d1_m / 1000.0
        far_slope = 10.0 * p.far_exponent
        mid_offset = (far_slope - 20.0) * np.log10(d1_km)

        far = p.constant_db + far_slope * np.log10(d_km)
        mid = p.constant_db + mid_offset + 20.0 * np.log10(d_km)
        near = p.constant_db + mid_offset + 20.0 * np.log10(d0_km)
        return np.where(d_km > d1_km, far, np.where(d_km > d0_km, mid, near))

    def path_loss(self, ap, ue, shadow_z):
        """
        Linear path loss with shadowing, L = L_avg * 10^(sigma*z/10)

        Args:
            ap: (x, y, z) AP position in meters
            ue: (x, y, z) UE position in meters
            shadow_z: standard-normal shadowing draw

        Returns:
            linear path-loss factor
        """
        distance = np.linalg.norm(np.asarray(ap, dtype=float) - np.asarray(ue, dtype=float))
        pl_db = self.average_path_loss_db(distance) + self.params.shadowing_std_db * shadow_z
        return float(10 ** (pl_db / 10.0))

    def draw_shadowing(self, num_aps, num_ues, rng):
        """Standard-normal z_mk, frozen for a realization"""
        return rng.standard_normal((num_aps, num_ues))

    def ue_positions_3d(self, ue_positions):
        """Append the UE antenna height to (K, 2) positions"""
        ue_positions = np.asarray(ue_positions, dtype=float)
        if ue_positions.shape[1] == 3:
            return ue_positions
        z = np.full((ue_positions.shape[0], 1), self.params.ue_height_m)
        return np.hstack([ue_positions, z])

    def large_scale(self, topo, ue_positions, tx_power, noise, shadow_z):
        """
        Path loss and SNR for every AP-UE pair

        Returns:
            LargeScale with (M, K) L, beta and shadow_z
        """
        ues = self.ue_positions_3d(ue_positions)
        diff = topo.ap_positions[:, None, :] - ues[None, :, :]
        distance = np.sqrt(np.sum(diff * diff, axis=2))
        pl_db = self.average_path_loss_db(distance) + self.params.shadowing_std_db * shadow_z
        L = 10 ** (pl_db / 10.0)
        beta = tx_power / (L * noise)
        return LargeScale(L=L, beta=beta, shadow_z=shadow_z)

    def snr_matrix(self, topo, ue_positions, tx_power, noise, shadow_z):
        """beta_mk = p / (L_mk * n0) for every pair"""
        return self.large_scale(topo, ue_positions, tx_power, noise, shadow_z).beta

    # ========== AGING ==========

    def bessel_j0(self, x):
        """Zeroth-order Bessel function of the first kind"""
        return special.j0(x)

    def aging_coefficient(self, profile, t):
        """
        rho[t] = J0(2*pi*(v*f_c/c)*T_sa*(t - tau_p - 1))

        Args:
            profile: AgingProfile
            t: slot index (scalar or array), t >= 0

        Returns:
            correlation in [-1, 1]
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("Slot index must be non-negative")
        if profile.v == 0:
            rho = np.ones_like(t)
        else:
            rho = self.bessel_j0(profile.doppler_scale * (t - profile.tau_p - 1))
        return float(rho) if rho.ndim == 0 else rho

    def evolve_channel(self, h0, rho, R, rng):
        """
        Aged channel h[t] = rho*h0 + sqrt(1 - rho^2)*g, g ~ CN(0, R)

        Args:
            h0: block-start channel (scalar or array)
            rho: aging correlation, |rho| <= 1
            R: large-scale fading variance, broadcastable to h0
            rng: numpy Generator

        Returns:
            aged channel with the shape of h0
        """
        if abs(rho) > 1.0:
            raise ValueError(f"|rho| must not exceed 1, got {rho}")
        h0 = np.asarray(h0, dtype=complex)
        if rho == 1.0:
            return h0.copy() if h0.ndim else complex(h0)
        g = self.complex_normal(np.broadcast_to(R, h0.shape), rng)
        h = rho * h0 + np.sqrt(1.0 - rho * rho) * g
        return h if h.ndim else complex(h)

    def complex_normal(self, variance, rng):
        """Circularly-symmetric complex normal draws with the given variances"""
        variance = np.asarray(variance, dtype=float)
        scale = np.sqrt(variance / 2.0)
        return scale * (rng.standard_normal(variance.shape) + 1j * rng.standard_normal(variance.shape))

    # ========== ESTIMATION ==========

    def estimate_variance(self, rho_pilot, beta, p, n0, pilot_set_betas):
        """
        MMSE estimate variance, evaluated as written:
        Z = rho^2 * beta^2 * n0 / (p * sum(pilot_set_betas) * n0 + p)

        Args:
            rho_pilot: aging correlation at the pilot
            beta: linear SNR of the link
            p: transmit power in W
            n0: noise power in W
            pilot_set_betas: SNRs of the UEs sharing the pilot, own beta included

        Returns:
            Z >= 0
        """
        pilot_set_betas = np.atleast_1d(np.asarray(pilot_set_betas, dtype=float))
        if pilot_set_betas.size == 0:
            raise ValueError("Pilot set must contain at least the UE itself")
        return rho_pilot ** 2 * beta ** 2 * n0 / (p * pilot_set_betas.sum() * n0 + p)

    def estimate_model(self, rho_pilot, beta, p, n0):
        """Z for every link with dedicated pilots (pilot set = the UE itself)"""
        Z = rho_pilot ** 2 * beta ** 2 * n0 / (p * beta * n0 + p)
        return EstimateModel(Z=Z)

    def draw_fading(self, R, Z, n_samples, rng):
        """
        Draw block-start channels and their estimates

        The estimate has variance min(Z, R) and is uncorrelated with its
        error h0 - h_hat.

        Args:
            R: (M, K) large-scale fading variances
            Z: (M, K) estimate variances
            n_samples: number of independent fading samples S
            rng: numpy Generator

        Returns:
            FadingState with (S, M, K) arrays
        """
        shape = (int(n_samples),) + R.shape
        quality = np.clip(Z / R, 0.0, 1.0)
        h0 = self.complex_normal(np.broadcast_to(R, shape), rng)
        w = self.complex_normal(np.broadcast_to(R, shape), rng)
        h_hat = quality * h0 + np.sqrt(quality * (1.0 - quality)) * w
        return FadingState(h0=h0, h_hat=h_hat, R=R)
