# business_layer/PerformanceEvaluator.py

import logging

import numpy as np

from models import CombinerSet


class PerformanceEvaluator:
    """
    Business Logic Service for Performance Evaluation
    SINR and spectral efficiency of a block (full and fast models),
    handover rates, mobility-aware SE and operation counting
    """

    DIRECTIONS = ("uplink", "downlink")

    def __init__(self):
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('PerformanceEvaluator')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    # ========== COMBINING / PRECODING ==========

    def combine_precode(self, h_hat, D, p, n0):
        """
        Partial MMSE combining restricted to each UE's serving APs

        phi_k = (sum_i p * h_i h_i^H + n0 I)^-1 h_k over the rows of k's
        serving set, zero elsewhere; w_k = phi_k / ||phi_k||.

        Args:
            h_hat: (S, M, K) or (M, K) channel estimates
            D: (M, K) boolean cooperation matrix
            p: transmit power in W
            n0: noise power in W

        Returns:
            CombinerSet with arrays shaped like h_hat
        """
        squeeze = np.ndim(h_hat) == 2
        h_hat = np.asarray(h_hat, dtype=complex)
        if squeeze:
            h_hat = h_hat[None]
        D = np.asarray(D, dtype=bool)
        S, M, K = h_hat.shape
        if D.shape != (M, K):
            raise ValueError(f"D has shape {D.shape}, expected {(M, K)}")
        if n0 <= 0:
            raise ValueError("Noise power must be positive")

        phi = np.zeros_like(h_hat)
        for k in range(K):
            rows = np.flatnonzero(D[:, k])
            if rows.size == 0:
                continue
            sub = h_hat[:, rows, :]
            gram = p * (sub @ np.conj(np.swapaxes(sub, 1, 2)))
            gram += n0 * np.eye(rows.size)
            phi[:, rows, k] = np.linalg.solve(gram, sub[:, :, k:k + 1])[:, :, 0]

        norms = np.linalg.norm(phi, axis=1, keepdims=True)
        w = np.divide(phi, norms, out=np.zeros_like(phi), where=norms > 0)
        if squeeze:
            return CombinerSet(phi=phi[0], w=w[0])
        return CombinerSet(phi=phi, w=w)

    # ========== SINR ==========

    def sinr_full(self, fading, combiners, D, rho_t, direction, p, n0, rng=None):
        """
        Per-UE SINR with expectations taken as fading-sample means

        The aged channel is rho*h0 + sqrt(1 - rho^2)*g with g ~ CN(0, R). With
        an rng the innovation g is drawn; without one its contribution is
        averaged out exactly given h0.

        Args:
            fading: FadingState with (S, M, K) arrays
            combiners: CombinerSet computed from fading.h_hat
            D: (M, K) cooperation matrix
            rho_t: aging correlation at the slot, scalar or per UE (K,)
            direction: "uplink" or "downlink"
            p: transmit power in W
            n0: noise power in W
            rng: optional numpy Generator

        Returns:
            (K,) linear SINRs
        """
        if direction not in self.DIRECTIONS:
            raise ValueError(f"Unknown link direction '{direction}'")
        h0 = fading.h0
        S, M, K = h0.shape
        D = np.asarray(D, dtype=bool)
        rho = np.broadcast_to(np.asarray(rho_t, dtype=float), (K,))
        spread = np.sqrt(1.0 - rho * rho)

        if direction == "uplink":
            vec = combiners.phi * D[None]
        else:
            vec = combiners.w * D[None]

        if rng is not None:
            g = np.sqrt(fading.R / 2.0) * (rng.standard_normal(h0.shape) + 1j * rng.standard_normal(h0.shape))
            h_t = rho * h0 + spread * g
            # gains[s, k, i] = vec_k^H h_i
            gains = np.einsum("smk,smi->ski", np.conj(vec), h_t)
            power = np.mean(np.abs(gains) ** 2, axis=0)
        else:
            gains0 = np.einsum("smk,smi->ski", np.conj(vec), h0)
            coherent = np.mean(np.abs(gains0) ** 2, axis=0)
            vec_power = np.mean(np.abs(vec) ** 2, axis=0)
            if direction == "uplink":
                # interferer i ages with its own correlation
                innovation = vec_power.T @ fading.R
                power = rho ** 2 * coherent + (1.0 - rho ** 2) * innovation
            else:
                # receiver k's channel ages; gains taken as h_k^H w_i
                innovation = fading.R.T @ vec_power
                power = (rho ** 2)[:, None] * coherent.T + (1.0 - rho ** 2)[:, None] * innovation
                power = power.T

        desired_amp = np.abs(np.mean(np.einsum("smk,smk->sk", np.conj(vec), h0), axis=0))
        signal = p * rho ** 2 * desired_amp ** 2

        if direction == "uplink":
            received = p * np.sum(power, axis=1)
            noise = n0 * np.mean(np.sum(np.abs(vec) ** 2, axis=1), axis=0)
        else:
            received = p * np.sum(power, axis=0)
            noise = np.full(K, float(n0))
        interference = np.maximum(received - signal, 0.0)

        denominator = interference + noise
        return np.divide(signal, denominator, out=np.zeros(K), where=(signal > 0) & (denominator > 0))

    def sinr_fast(self, beta_col, d_col):
        """Simplified SINR sum(D*beta) / (sum(beta) - sum(D*beta) + 1)"""
        beta_col = np.asarray(beta_col, dtype=float)
        served = np.sum(beta_col * np.asarray(d_col, dtype=bool), axis=0)
        return served / (np.sum(beta_col, axis=0) - served + 1.0)

    # ========== SPECTRAL EFFICIENCY ==========

    def slot_lags(self, tau_c, tau_p, slot_decimation):
        """
        Sampled data-slot lags and the number of slots each one stands for

        Lags run 0, d, 2d, ... after the pilot; the last sample takes the
        remaining slots so the weights sum to tau_c - tau_p.
        """
        data_slots = tau_c - tau_p
        if data_slots < 1:
            raise ValueError("A block needs at least one data slot")
        d = max(1, min(int(slot_decimation), data_slots))
        lags = np.arange(0, data_slots, d)
        weights = np.full(lags.shape[0], d, dtype=float)
        weights[-1] = data_slots - lags[-1]
        return lags, weights

    def baseline_se_block(self, sinr_at_slots, tau_c, tau_p, slot_decimation=None):
        """
        SE' = (1 / tau_c) * sum over data slots of log2(1 + SINR)

        Pilot slots carry no data. Each sample stands for slot_decimation
        slots; without a decimation the samples split the data slots evenly.

        Args:
            sinr_at_slots: list of per-UE SINR arrays (or scalars), one per sampled slot
            tau_c, tau_p: block and pilot length in slots
            slot_decimation: slots represented by each sample

        Returns:
            per-UE SE' in bits/s/Hz
        """
        if len(sinr_at_slots) == 0:
            raise ValueError("At least one SINR sample is needed")
        samples = np.asarray([np.asarray(s, dtype=float) for s in sinr_at_slots])
        if slot_decimation is None:
            weights = np.full(samples.shape[0], (tau_c - tau_p) / samples.shape[0])
        else:
            _, weights = self.slot_lags(tau_c, tau_p, slot_decimation)
            if weights.shape[0] != samples.shape[0]:
                raise ValueError(
                    f"Expected {weights.shape[0]} samples for decimation {slot_decimation}, "
                    f"got {samples.shape[0]}"
                )
        weights = weights.reshape((-1,) + (1,) * (samples.ndim - 1))
        se = np.sum(weights * np.log2(1.0 + samples), axis=0) / tau_c
        return float(se) if np.ndim(se) == 0 else se

    def link_direction(self, block_index):
        """Uplink on odd blocks n = 1, 3, ... counting the attach block as n = 1"""
        return "uplink" if (block_index + 1) % 2 == 1 else "downlink"

    # ========== HANDOVER COST ==========

    def handover_rates(self, n_changed_series, Q_avg, duration_s):
        """
        Cluster and AP handover rates per second

        Args:
            n_changed_series: per-block cluster-change counts, (N,) or (N, K)
            Q_avg: average APs per cluster
            duration_s: observed time in seconds

        Returns:
            (h_cluster, h_ap)
        """
        if duration_s <= 0:
            raise ValueError("duration_s must be positive")
        series = np.asarray(n_changed_series, dtype=float)
        total = np.sum(series, axis=0) if series.size else 0.0
        h_cluster = total / duration_s
        h_ap = Q_avg * h_cluster
        if np.ndim(h_cluster) == 0:
            return float(h_cluster), float(h_ap)
        return h_cluster, h_ap

    def handover_loss(self, h_cluster, h_ap, d_C, d_AP):
        """Fraction of time lost to handovers, d_C*h_cluster + d_AP*h_ap"""
        return d_C * np.asarray(h_cluster, dtype=float) + d_AP * np.asarray(h_ap, dtype=float)

    def mobility_aware_se(self, se_baseline_avg, h_cluster, h_ap, d_C, d_AP):
        """
        SE = SE' * (1 - d_C*h_cluster - d_AP*h_ap), clamped at 0

        UEs whose loss fraction reaches 1 are in outage; their count is logged.
        """
        loss = self.handover_loss(h_cluster, h_ap, d_C, d_AP)
        se = np.asarray(se_baseline_avg, dtype=float) * (1.0 - loss)
        outage = se < 0.0
        if np.any(outage):
            self.logger.info(f"{int(np.sum(outage))} UEs clamped to zero mobility-aware SE")
            se = np.maximum(se, 0.0)
        return float(se) if np.ndim(se) == 0 else se

    # ========== COUNTERS ==========

    def count_op(self, counter, counter_id, amount=1):
        """Add to a monotone operation counter"""
        return counter.add(counter_id, amount)
