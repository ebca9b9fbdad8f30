# business_layer/SimulationController.py

import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from models import (
    AggregateReport, AgingProfile, BlockMetrics, FairDiffState, OperationCounter, RealizationResult,
    RunMetrics, SimConfig, SimulationError
)
from data_layer.ChannelModel import ChannelModel
from data_layer.MobilityGenerator import MobilityGenerator
from data_layer.RandomStreams import RandomStreams
from data_layer.TopologyManager import TopologyManager
from .HandoverController import HandoverController
from .LoggingService import LoggingService
from .PerformanceEvaluator import PerformanceEvaluator
from .ServingSetController import ServingSetController


PER_UE_COLUMNS = ["realization", "ue", "scheme", "se_mobility", "se_baseline", "h_cluster", "h_ap"]
TIMESERIES_COLUMNS = ["scheme", "block", "t_s", "link_direction", "se_mean", "cluster_changes", "alpha_db"]


def _realization_worker(cfg, realization_index):
    """Entry point of worker processes"""
    return SimulationController(cfg).run_realization(realization_index)


class SimulationController:
    """
    Business Logic Controller for Monte Carlo Campaigns
    Runs the block loop of every realization for all configured schemes on
    shared random draws and aggregates the per-UE results
    """

    def __init__(self, cfg: SimConfig, logging_service=None):
        """
        Initialize with a validated configuration

        Args:
            cfg: SimConfig
            logging_service: optional LoggingService receiving campaign records
        """
        self.cfg = cfg
        self.logging_service = logging_service or LoggingService()
        self.logger = self._setup_logger()
        self.streams = RandomStreams(cfg.seed)
        self.topology_manager = TopologyManager()
        self.mobility = MobilityGenerator()
        self.channel = ChannelModel(cfg.pathloss_params())
        self.serving = ServingSetController()
        self.handover = HandoverController(
            dc_penalty=cfg.dc_penalty, newton_eps=cfg.newton_eps,
            tau_p=cfg.tau_p, tau_c=cfg.tau_c,
            delta1_db=cfg.delta1_db, delta2_db=cfg.delta2_db, theta_db=cfg.theta_db,
        )
        self.evaluator = PerformanceEvaluator()

    def _setup_logger(self):
        logger = logging.getLogger('SimulationController')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    # ========== REALIZATION INPUTS ==========

    def build_topology(self, realization_index):
        """Loaded or freshly drawn AP layout with square clusters"""
        cfg = self.cfg
        if cfg.topology_path:
            topo = self.topology_manager.load_topology(cfg.topology_path, cfg.area_side_m)
        else:
            topo = self.topology_manager.generate_uniform_topology(
                cfg.area_side_m, cfg.num_aps, cfg.ap_height_m,
                self.streams.stream("topology", realization_index)
            )
        return self.topology_manager.assign_square_clusters(topo, cfg.target_q)

    def build_traces(self, realization_index):
        """Loaded traces, or one random-waypoint walk per UE"""
        cfg = self.cfg
        if cfg.trace_path:
            return self.mobility.load_traces(cfg.trace_path, cfg.block_duration_s, cfg.area_side_m)
        return [
            self.mobility.generate_rwp_trace(
                cfg.area_side_m, cfg.ue_speed_mps, cfg.num_blocks, cfg.block_duration_s,
                cfg.transition_scale_m, self.streams.stream("trace", realization_index, k)
            )
            for k in range(cfg.num_ues)
        ]

    def aging_table(self, traces):
        """(samples, K) aging correlations at the sampled data-slot lags of a block"""
        cfg = self.cfg
        lags, _ = self.evaluator.slot_lags(cfg.tau_c, cfg.tau_p, cfg.slot_decimation)
        slots = cfg.tau_p + 1 + lags
        columns = [
            self.channel.aging_coefficient(
                AgingProfile(v=trace.speed, f_c=cfg.carrier_freq_hz,
                             T_sa=cfg.slot_duration_s, tau_p=cfg.tau_p),
                slots
            )
            for trace in traces
        ]
        return np.column_stack(columns)

    # ========== REALIZATION ==========

    def run_realization(self, realization_index):
        """
        Run every configured scheme over one realization

        All schemes see the same topology, traces, shadowing and fading
        draws; the result is a pure function of (config, seed, index).

        Args:
            realization_index: non-negative realization index

        Returns:
            RealizationResult
        """
        try:
            return self._run_realization(realization_index)
        except SimulationError:
            raise
        except Exception as e:
            raise SimulationError(f"Realization {realization_index} failed: {e}") from e

    def _run_realization(self, realization_index):
        cfg = self.cfg
        p = cfg.tx_power_w
        n0 = cfg.noise_power_w
        full_model = cfg.se_model == "full"
        self.channel.clamped_distances = 0

        topo = self.build_topology(realization_index)
        traces = self.build_traces(realization_index)
        K = len(traces)
        M = topo.num_aps
        num_blocks = cfg.num_blocks
        duration_s = num_blocks * cfg.block_duration_s
        shadow_z = self.channel.draw_shadowing(M, K, self.streams.stream("shadowing", realization_index))
        rho_table = self.aging_table(traces) if full_model else None

        states = {
            scheme: {
                "D": None,
                "counter": OperationCounter(),
                "fairdiff": FairDiffState(gamma1=cfg.gamma1_db, gamma2=cfg.gamma2_db,
                                          f_update=cfg.f_update),
                "se_sum": np.zeros(K),
                "changes": np.zeros(K),
                "fairness_sum": 0.0,
                "set_size_sum": 0.0,
                "se_series": np.zeros(num_blocks),
                "change_series": np.zeros(num_blocks),
                "alpha_series": np.full(num_blocks, np.nan),
            }
            for scheme in cfg.schemes
        }

        beta_prev = None
        for n in range(num_blocks):
            positions = np.array([trace.position_at_block(n) for trace in traces])
            large_scale = self.channel.large_scale(topo, positions, p, n0, shadow_z)
            beta = large_scale.beta
            D_cand = self.serving.candidate_matrix(beta, topo, cfg.num_best_aps)

            direction = self.evaluator.link_direction(n)
            fading = None
            if full_model:
                Z = self.channel.estimate_model(1.0, beta, p, n0).Z
                fading = self.channel.draw_fading(
                    large_scale.R, Z, cfg.n_fading_samples,
                    self.streams.stream("fading", realization_index, n)
                )

            for scheme, state in states.items():
                block_changes = np.zeros(K)
                if n == 0 and scheme == "fullcf":
                    state["D"] = self.serving.full_cooperation(M, K)
                elif n == 0:
                    state["D"] = self.serving.initial_attach(D_cand)
                else:
                    inputs = self.handover.block_inputs(beta_prev, beta, state["D"].D, D_cand)
                    decision = self.handover.decide_block(
                        scheme, inputs, state["fairdiff"], state["counter"]
                    )
                    updated = self.serving.apply_decision(state["D"], D_cand, decision.handover)
                    block_changes = self.serving.count_cluster_changes(state["D"].D, updated.D, topo)
                    state["changes"] += block_changes
                    state["D"] = updated

                D = state["D"].D
                state["fairness_sum"] += self.handover.jain_index(np.sum(beta * D, axis=0))
                state["set_size_sum"] += state["D"].average_set_size

                if full_model:
                    combiners = self.evaluator.combine_precode(fading.h_hat, D, p, n0)
                    sinrs = [
                        self.evaluator.sinr_full(fading, combiners, D, rho, direction, p, n0)
                        for rho in rho_table
                    ]
                    se_block = self.evaluator.baseline_se_block(
                        sinrs, cfg.tau_c, cfg.tau_p, cfg.slot_decimation
                    )
                else:
                    se_block = self.evaluator.baseline_se_block(
                        [self.evaluator.sinr_fast(beta, D)], cfg.tau_c, cfg.tau_p
                    )
                state["se_sum"] += se_block

                block = BlockMetrics(se_baseline=se_block, n_clusters_changed=block_changes,
                                     link_direction=direction)
                state["se_series"][n] = block.mean_se
                state["change_series"][n] = block.total_changes
                if scheme == "fairdiff":
                    state["alpha_series"][n] = self.threshold_db(state["fairdiff"].alpha)
            beta_prev = beta

        metrics = {}
        for scheme, state in states.items():
            if scheme == "fairdiff":
                state["counter"].add("threshold_refreshes", state["fairdiff"].refreshes)
            se_baseline_avg = state["se_sum"] / num_blocks
            h_cluster, h_ap = self.evaluator.handover_rates(state["changes"][None, :], topo.Q_avg, duration_s)
            loss = self.evaluator.handover_loss(h_cluster, h_ap, cfg.d_c_s, cfg.d_ap_s)
            metrics[scheme] = RunMetrics(
                se_baseline_avg=se_baseline_avg,
                h_cluster=h_cluster,
                h_ap=h_ap,
                se_mobility=self.evaluator.mobility_aware_se(
                    se_baseline_avg, h_cluster, h_ap, cfg.d_c_s, cfg.d_ap_s
                ),
                op_counters=state["counter"],
                fairness_mean=state["fairness_sum"] / num_blocks,
                serving_set_size=state["set_size_sum"] / num_blocks,
                clamped_ues=int(np.sum((loss > 1.0) & (se_baseline_avg > 0))),
                se_per_block=state["se_series"],
                changes_per_block=state["change_series"],
                alpha_db_per_block=state["alpha_series"],
            )

        info = {
            "num_aps": M,
            "num_ues": K,
            "Q_avg": topo.Q_avg,
            "cluster_grid": list(topo.cluster_grid),
            "num_blocks": num_blocks,
            "duration_s": duration_s,
            "ap_density_per_km2": topo.ap_density_per_km2,
            "ue_density_per_km2": K / (topo.area_side / 1000.0) ** 2,
            "clamped_distances": self.channel.clamped_distances,
            "warnings": list(topo.warnings),
        }
        return RealizationResult(realization_index=realization_index, metrics=metrics, info=info)

    # ========== CAMPAIGN ==========

    def run_campaign(self):
        """
        Run all realizations and aggregate them

        Realizations run in worker processes when workers > 1; results are
        merged in realization order so the report does not depend on
        scheduling. Failed realizations are logged and skipped.

        Returns:
            AggregateReport
        """
        cfg = self.cfg
        indices = list(range(cfg.n_realizations))
        self.logging_service.log_operation(
            None, "campaign",
            f"{len(indices)} realizations, schemes {','.join(cfg.schemes) or '-'}, "
            f"se_model={cfg.se_model}, seed={cfg.seed}, workers={cfg.workers}"
        )

        outcomes = []
        if cfg.workers > 1 and len(indices) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
                futures = [executor.submit(_realization_worker, cfg, i) for i in indices]
                for i, future in zip(indices, futures):
                    try:
                        outcomes.append((i, future.result(), None))
                    except Exception as e:
                        outcomes.append((i, None, e))
        else:
            for i in indices:
                try:
                    outcomes.append((i, self.run_realization(i), None))
                except Exception as e:
                    outcomes.append((i, None, e))

        results = []
        for i, result, error in outcomes:
            if error is not None:
                self.logging_service.log_operation(i, "realization_failed", str(error), logging.ERROR)
                continue
            self.logging_service.log_operation(
                i, "realization",
                f"M={result.info['num_aps']}, K={result.info['num_ues']}, Q_avg={result.info['Q_avg']:.2f}"
            )
            results.append(result)

        if not results:
            raise SimulationError("No realization completed successfully")
        return self.aggregate(results)

    # ========== AGGREGATION ==========

    @staticmethod
    def nearest_rank(values, q):
        """Nearest-rank percentile: the ceil(q/100 * n)-th smallest value"""
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise ValueError("Percentile of an empty sample")
        return float(np.percentile(values, q, method="inverted_cdf"))

    @staticmethod
    def threshold_db(alpha):
        """FairDiff threshold in dB, NaN while it sits at -inf"""
        return 10.0 * math.log10(alpha) if alpha > 0 else math.nan

    def per_ue_frame(self, results):
        """Per-UE rows ordered by realization, scheme and UE"""
        frames = []
        for result in sorted(results, key=lambda r: r.realization_index):
            for scheme in self.cfg.schemes:
                run = result.metrics[scheme]
                K = run.se_mobility.shape[0]
                frames.append(pd.DataFrame({
                    "realization": np.full(K, result.realization_index),
                    "ue": np.arange(K),
                    "scheme": scheme,
                    "se_mobility": run.se_mobility,
                    "se_baseline": run.se_baseline_avg,
                    "h_cluster": run.h_cluster,
                    "h_ap": run.h_ap,
                }))
        if not frames:
            return pd.DataFrame(columns=PER_UE_COLUMNS)
        return pd.concat(frames, ignore_index=True)[PER_UE_COLUMNS]

    def timeseries_frame(self, results):
        """
        Per-block network averages of every scheme, averaged over realizations

        se_mean is the mean baseline SE of the block, cluster_changes the
        clusters joined or left by all UEs in it and alpha_db the FairDiff
        threshold in force (NaN for other schemes).
        """
        frames = []
        for result in sorted(results, key=lambda r: r.realization_index):
            for scheme in self.cfg.schemes:
                run = result.metrics[scheme]
                frames.append(pd.DataFrame({
                    "scheme": scheme,
                    "block": np.arange(run.se_per_block.shape[0]),
                    "se_mean": run.se_per_block,
                    "cluster_changes": run.changes_per_block,
                    "alpha_db": run.alpha_db_per_block,
                }))
        if not frames:
            return pd.DataFrame(columns=TIMESERIES_COLUMNS)
        series = (pd.concat(frames, ignore_index=True)
                  .groupby(["scheme", "block"], sort=False)[["se_mean", "cluster_changes", "alpha_db"]]
                  .mean()
                  .reset_index())
        series["t_s"] = series["block"] * self.cfg.block_duration_s
        series["link_direction"] = series["block"].map(self.evaluator.link_direction)
        return series[TIMESERIES_COLUMNS]

    def aggregate(self, results):
        """
        Pool per-UE samples across realizations into per-scheme statistics

        Returns:
            AggregateReport
        """
        cfg = self.cfg
        results = sorted(results, key=lambda r: r.realization_index)
        per_ue = self.per_ue_frame(results)

        schemes = {}
        cdf_points = {}
        for scheme in cfg.schemes:
            runs = [r.metrics[scheme] for r in results]
            se = np.concatenate([run.se_mobility for run in runs])
            baseline = np.concatenate([run.se_baseline_avg for run in runs])
            counters = OperationCounter()
            for run in runs:
                counters = counters.merge(run.op_counters)
            totals = counters.to_dict()
            decisions = counters.get("decisions")

            schemes[scheme] = {
                "samples": int(se.shape[0]),
                "se_mobility": {
                    "mean": float(np.mean(se)),
                    "p05": self.nearest_rank(se, 5),
                    "median": self.nearest_rank(se, 50),
                    "p95": self.nearest_rank(se, 95),
                },
                "se_baseline": {
                    "mean": float(np.mean(baseline)),
                    "median": self.nearest_rank(baseline, 50),
                },
                "h_cluster_mean": float(np.mean(np.concatenate([run.h_cluster for run in runs]))),
                "h_ap_mean": float(np.mean(np.concatenate([run.h_ap for run in runs]))),
                "fairness_mean": float(np.mean([run.fairness_mean for run in runs])),
                "serving_set_size_mean": float(np.mean([run.serving_set_size for run in runs])),
                "clamped_ues": int(sum(run.clamped_ues for run in runs)),
                "counters": totals,
                "counters_per_decision": {
                    key: value / decisions for key, value in totals.items() if key != "decisions"
                } if decisions else {},
            }

            ordered = np.sort(se)
            cdf_points[scheme] = {
                "se": ordered,
                "cdf": np.arange(1, ordered.shape[0] + 1) / ordered.shape[0],
            }

        network = {
            "ap_density_per_km2": float(np.mean([r.info["ap_density_per_km2"] for r in results])),
            "ue_density_per_km2": float(np.mean([r.info["ue_density_per_km2"] for r in results])),
            "Q_avg": float(np.mean([r.info["Q_avg"] for r in results])),
            "num_blocks": results[0].info["num_blocks"],
            "realizations": len(results),
        }

        notes = ["CDFs and percentiles pool per-UE samples across realizations (nearest-rank)"]
        if cfg.se_model == "fast":
            notes.append("se_model=fast: SE scored with the simplified SINR at block start")
        clamped = sum(s["clamped_ues"] for s in schemes.values())
        if clamped:
            notes.append(f"{clamped} per-UE results clamped to zero mobility-aware SE")
        failed = cfg.n_realizations - len(results)
        if failed:
            notes.append(f"{failed} realizations failed and were skipped")

        return AggregateReport(
            config=cfg.to_dict(),
            schemes=schemes,
            cdf_points=cdf_points,
            per_ue=per_ue,
            network=network,
            notes=notes,
            timeseries=self.timeseries_frame(results),
        )
