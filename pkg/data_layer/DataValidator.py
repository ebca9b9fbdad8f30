# data_layer/DataValidator.py

import math

import numpy as np

from models import ALL_SCHEMES, SE_MODELS


class DataValidator:
    """
    Data Layer - Validates configurations, topologies and traces
    Performs validation checks and reports errors and warnings
    """

    def __init__(self, tolerance=1e-9):
        self.tolerance = tolerance

    def validate_config(self, cfg):
        """Comprehensive SimConfig validation"""
        validation_results = {
            "is_valid": True,
            "errors": [],
            "warnings": [],
            "info": {}
        }
        errors = validation_results["errors"]
        warnings = validation_results["warnings"]

        if cfg.area_side_m <= 0:
            errors.append("area_side_m must be positive")
        if cfg.topology_path is None and cfg.num_aps < 1:
            errors.append("num_aps must be at least 1")
        if cfg.trace_path is None and cfg.num_ues < 1:
            errors.append("num_ues must be at least 1")
        if cfg.ue_speed_mps < 0:
            errors.append("ue_speed_mps must be non-negative")
        if not 0 <= cfg.tau_p < cfg.tau_c:
            errors.append(f"tau_p ({cfg.tau_p}) must be smaller than tau_c ({cfg.tau_c})")
        if cfg.slot_duration_s <= 0:
            errors.append("slot_duration_s must be positive")
        if cfg.duration_s <= 0:
            errors.append("duration_s must be positive")
        elif cfg.slot_duration_s > 0 and cfg.tau_c > 0:
            blocks = cfg.duration_s / cfg.block_duration_s
            if abs(blocks - round(blocks)) > 1e-6 or round(blocks) < 1:
                errors.append(
                    f"duration_s ({cfg.duration_s}) must be an integer multiple of the "
                    f"block duration ({cfg.block_duration_s} s)"
                )
        if cfg.num_best_aps < 1:
            errors.append("num_best_aps (E) must be at least 1")
        if cfg.topology_path is None and cfg.num_best_aps > cfg.num_aps:
            errors.append("num_best_aps (E) cannot exceed num_aps")
        if cfg.target_q < 1:
            errors.append("target_q must be at least 1")
        elif cfg.topology_path is None and cfg.target_q > cfg.num_aps:
            warnings.append("target_q exceeds num_aps, a single cluster will be used")

        unknown = [s for s in cfg.schemes if s not in ALL_SCHEMES]
        if unknown:
            errors.append(f"Unknown scheme ids: {', '.join(unknown)} (valid: {', '.join(ALL_SCHEMES)})")
        if len(set(cfg.schemes)) != len(cfg.schemes):
            errors.append("Duplicate scheme ids")
        if cfg.se_model not in SE_MODELS:
            errors.append(f"se_model must be one of {', '.join(SE_MODELS)}")

        for key in ("gamma1_db", "gamma2_db", "delta1_db", "delta2_db", "theta_db"):
            if getattr(cfg, key) < 0:
                errors.append(f"{key} must be non-negative")
        if not 0 <= cfg.dc_penalty < 1:
            errors.append("dc_penalty must lie in [0, 1)")
        if cfg.newton_eps <= 0:
            errors.append("newton_eps must be positive")
        if not 0 < cfg.f_update <= 1:
            errors.append("f_update must lie in (0, 1]")
        if cfg.d_c_s < 0 or cfg.d_ap_s < 0:
            errors.append("Handover delays must be non-negative")
        if cfg.n_fading_samples < 1:
            errors.append("n_fading_samples must be at least 1")
        if cfg.slot_decimation < 1:
            errors.append("slot_decimation must be at least 1")
        if cfg.n_realizations < 1:
            errors.append("n_realizations must be at least 1")
        if cfg.transition_scale_m <= 0:
            errors.append("transition_scale_m must be positive")
        if cfg.seed < 0:
            errors.append("seed must be non-negative")
        if cfg.workers < 1:
            errors.append("workers must be at least 1")
        if cfg.bandwidth_hz <= 0 or cfg.noise_temperature_k <= 0:
            errors.append("bandwidth_hz and noise_temperature_k must be positive")
        if not 0 < cfg.pathloss_d0_m < cfg.pathloss_d1_m:
            errors.append("pathloss breakpoints must satisfy 0 < d0 < d1")

        if cfg.se_model == "fast":
            warnings.append("se_model=fast scores SE with the simplified SINR")

        validation_results["is_valid"] = not errors
        validation_results["info"]["num_blocks"] = (
            cfg.num_blocks if cfg.slot_duration_s > 0 and cfg.tau_c > 0 else 0
        )
        validation_results["info"]["block_duration_s"] = cfg.block_duration_s
        validation_results["info"]["schemes"] = list(cfg.schemes)
        return validation_results

    def check_containment(self, points, area_side):
        """Check that every (x, y) lies in [0, area_side]^2"""
        xy = np.asarray(points, dtype=float).reshape(-1, np.shape(points)[-1])[:, :2]
        outside = np.any((xy < 0.0) | (xy > area_side), axis=1)
        return {
            "violation_count": int(outside.sum()),
            "violation_indices": np.flatnonzero(outside).tolist()
        }

    def check_cluster_consistency(self, topo):
        """Check cluster_of against the square grid rule and full coverage"""
        rows, cols = topo.cluster_grid
        result = {"is_consistent": True, "errors": []}
        if topo.cluster_of.shape[0] != topo.num_aps:
            result["is_consistent"] = False
            result["errors"].append("cluster_of does not cover every AP")
            return result
        cell = topo.area_side / rows
        ix = np.minimum(np.floor(topo.ap_positions[:, 0] / cell), rows - 1).astype(int)
        iy = np.minimum(np.floor(topo.ap_positions[:, 1] / cell), cols - 1).astype(int)
        expected = ix * cols + iy
        mismatches = int(np.sum(expected != topo.cluster_of))
        if mismatches:
            result["is_consistent"] = False
            result["errors"].append(f"{mismatches} APs violate the grid rule")
        if int(topo.cluster_sizes().sum()) != topo.num_aps:
            result["is_consistent"] = False
            result["errors"].append("cluster sizes do not sum to M")
        return result

    def check_trace_displacement(self, trace):
        """Check that consecutive positions differ by at most speed * block_duration"""
        if trace.num_blocks < 2:
            return {"violation_count": 0, "max_step": 0.0}
        steps = np.linalg.norm(np.diff(trace.positions, axis=0), axis=1)
        bound = trace.speed * trace.block_duration + self.tolerance
        return {
            "violation_count": int(np.sum(steps > bound)),
            "max_step": float(steps.max())
        }

    def check_column_is_cluster_union(self, column, topo):
        """True when every cluster is either fully in or fully out of the column"""
        column = np.asarray(column, dtype=bool)
        served = np.bincount(topo.cluster_of, weights=column, minlength=topo.num_clusters)
        sizes = topo.cluster_sizes()
        return bool(np.all((served == 0) | (served == sizes)))

    def is_finite_number(self, value):
        return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
