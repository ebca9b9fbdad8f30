# models.py
"""
Core data models for the cell-free handover simulator
"""

import math
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


SCHEMES = ("always", "nearopt", "fairdiff", "hysteresis", "upa")
# fixed-relation reference cases: full cooperation and never leaving the attach set
REFERENCE_SCHEMES = ("fullcf", "nohandover")
ALL_SCHEMES = SCHEMES + REFERENCE_SCHEMES
SE_MODELS = ("full", "fast")
SPEED_OF_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23


# ========== EXCEPTIONS ==========

class SimulationError(Exception):
    """Base class for every simulator failure"""


class ConfigError(SimulationError, ValueError):
    """Invalid or unknown configuration value"""


class ParseError(SimulationError, ValueError):
    """Malformed input file row"""

    def __init__(self, message, line_number=None, path=None):
        self.line_number = line_number
        self.path = path
        location = ""
        if path is not None:
            location += f"{path}"
        if line_number is not None:
            location += f" (line {line_number})"
        super().__init__(f"{location}: {message}" if location else message)


class ValidationError(SimulationError, ValueError):
    """Input parsed but violates a domain constraint"""


class InvariantViolation(SimulationError, AssertionError):
    """Internal invariant broken"""


# ========== TOPOLOGY ==========

@dataclass
class Topology:
    """
    AP placement and square CPU-cluster division

    Positions are an (M, 3) array of x, y, z in meters. cluster_of is
    empty until assign_square_clusters has run.
    """
    area_side: float
    ap_positions: np.ndarray
    cluster_grid: Tuple[int, int] = (0, 0)
    cluster_of: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    Q_avg: float = 0.0
    warnings: List[str] = field(default_factory=list)

    @property
    def num_aps(self):
        return int(self.ap_positions.shape[0])

    @property
    def num_clusters(self):
        return int(self.cluster_grid[0] * self.cluster_grid[1])

    @property
    def ap_density_per_km2(self):
        """AP density lambda = M / S"""
        return self.num_aps / (self.area_side / 1000.0) ** 2

    def cluster_sizes(self):
        """Number of APs per cluster index"""
        return np.bincount(self.cluster_of, minlength=self.num_clusters)

    def __repr__(self):
        return (f"Topology(M={self.num_aps}, area={self.area_side} m, "
                f"grid={self.cluster_grid}, Q_avg={self.Q_avg:.2f})")


# ========== MOBILITY ==========

@dataclass
class UETrace:
    """Per-block positions of one UE"""
    speed: float
    positions: np.ndarray
    block_duration: float

    @property
    def num_blocks(self):
        return int(self.positions.shape[0])

    @property
    def duration_s(self):
        return self.num_blocks * self.block_duration

    def position_at_block(self, n):
        """Position at block n; traces shorter than the run hold their last position"""
        return self.positions[min(n, self.num_blocks - 1)]


# ========== CHANNEL ==========

@dataclass
class PathLossParams:
    """Three-slope Hata-COST231 constants"""
    carrier_freq_hz: float = 2.0e9
    ap_height_m: float = 10.0
    ue_height_m: float = 1.0
    d0_m: float = 10.0
    d1_m: float = 50.0
    far_exponent: float = 3.5
    shadowing_std_db: float = 8.0

    @property
    def constant_db(self):
        """Frequency/height dependent offset of the Hata-COST231 model"""
        f_mhz = self.carrier_freq_hz / 1e6
        log_f = math.log10(f_mhz)
        return (46.3 + 33.9 * log_f - 13.82 * math.log10(self.ap_height_m)
                - (1.1 * log_f - 0.7) * self.ue_height_m + (1.56 * log_f - 0.8))


@dataclass
class LargeScale:
    """Path loss, SNR and frozen shadowing draws, all (M, K)"""
    L: np.ndarray
    beta: np.ndarray
    shadow_z: np.ndarray

    @property
    def R(self):
        return 1.0 / self.L


@dataclass
class AgingProfile:
    """Parameters of the Bessel aging correlation"""
    v: float
    f_c: float = 2.0e9
    T_sa: float = 1e-4
    tau_p: int = 10

    @property
    def doppler_scale(self):
        """2*pi*(v*f_c/c)*T_sa, the per-slot argument step of J0"""
        return 2.0 * math.pi * (self.v * self.f_c / SPEED_OF_LIGHT) * self.T_sa


@dataclass
class FadingState:
    """
    Block-start channels and their estimates

    Arrays carry a leading fading-sample axis: (S, M, K).
    """
    h0: np.ndarray
    h_hat: np.ndarray
    R: np.ndarray


@dataclass
class EstimateModel:
    """
    Per-link MMSE estimate statistics

    Args:
        Z: (M, K) estimate variances, capped at the channel variance R when fading is drawn
    """
    Z: np.ndarray


# ========== SERVING ==========

@dataclass
class CooperationMatrix:
    """Boolean (M, K) serving relation D[t]"""
    D: np.ndarray
    block_index: int = 0

    @property
    def average_set_size(self):
        """G = sum(D) / K"""
        return float(self.D.sum()) / self.D.shape[1]


# ========== HANDOVER ==========

@dataclass
class SnrSnapshot:
    """Per-UE total serving SNRs (linear)"""
    s_bef: np.ndarray
    s_cur: np.ndarray
    s_new: np.ndarray


@dataclass
class OptimizerInputs:
    """
    One UE's relaxed handover problem

    Args:
        A: simplified SINR with the previous serving set
        B: simplified SINR with the candidate serving set
        d_C: fraction of a block lost to a handover
        tau_p: pilot slots per block
        tau_c: slots per block
    """
    A: float
    B: float
    d_C: float = 0.1
    tau_p: int = 10
    tau_c: int = 200

    @property
    def prefactor(self):
        return (self.tau_c - self.tau_p) / self.tau_c


@dataclass
class Decision:
    """Handover decision vector for one block"""
    handover: np.ndarray
    relaxed_x: Optional[np.ndarray] = None
    newton_iters: int = 0
    liberal: Optional[np.ndarray] = None


@dataclass
class FairDiffState:
    """
    Running threshold of the fairness-differentiated scheme

    Args:
        alpha: linear SNR below which a UE gets the liberal policy
        F: fairness index behind the current alpha
        gamma1: candidate improvement margin in dB
        gamma2: degradation margin of the strict policy in dB
        f_update: threshold refreshes per block
        blocks_since_update: None until the first refresh
        refreshes: number of refreshes so far
    """
    alpha: float = -math.inf
    F: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    f_update: float = 1.0 / 200
    blocks_since_update: Optional[int] = None
    refreshes: int = 0

    @property
    def update_period(self):
        """Blocks between threshold refreshes (1 / f_update)"""
        return max(1, int(round(1.0 / self.f_update)))


# ========== PERFORMANCE ==========

@dataclass
class OperationCounter:
    """
    Monotone per-scheme counters

    Counters merge by addition so realizations can be combined in any order.
    """
    counts: Dict[str, int] = field(default_factory=dict)

    def add(self, counter_id, amount=1):
        if amount < 0:
            raise ValueError("Counters are monotone")
        self.counts[counter_id] = self.counts.get(counter_id, 0) + int(amount)
        return self

    def get(self, counter_id):
        return self.counts.get(counter_id, 0)

    def merge(self, other):
        merged = OperationCounter(dict(self.counts))
        for key, value in other.counts.items():
            merged.add(key, value)
        return merged

    def to_dict(self):
        return dict(sorted(self.counts.items()))


@dataclass
class CombinerSet:
    """
    Partial MMSE combiners and precoders

    Args:
        phi: (..., M, K) combining vectors, zero outside each serving set
        w: (..., M, K) phi normalised to unit norm per UE
    """
    phi: np.ndarray
    w: np.ndarray


@dataclass
class BlockMetrics:
    """Per-UE outcome of one scheme in one block"""
    se_baseline: np.ndarray
    n_clusters_changed: np.ndarray
    link_direction: str

    @property
    def mean_se(self):
        return float(np.mean(self.se_baseline))

    @property
    def total_changes(self):
        """Clusters joined or left across all UEs"""
        return float(np.sum(self.n_clusters_changed))


@dataclass
class RunMetrics:
    """Per-UE results of one scheme over one realization"""
    se_baseline_avg: np.ndarray
    h_cluster: np.ndarray
    h_ap: np.ndarray
    se_mobility: np.ndarray
    op_counters: OperationCounter = field(default_factory=OperationCounter)
    fairness_mean: float = 1.0
    serving_set_size: float = 0.0
    clamped_ues: int = 0
    se_per_block: np.ndarray = field(default_factory=lambda: np.zeros(0))
    changes_per_block: np.ndarray = field(default_factory=lambda: np.zeros(0))
    alpha_db_per_block: np.ndarray = field(default_factory=lambda: np.zeros(0))


# ========== HARNESS ==========

@dataclass
class SimConfig:
    """
    Campaign configuration

    Defaults follow the medium-density scenario (M=308, v=3.6 m/s, Q=20, E=7)
    at desk scale (20 realizations of 30 s).
    """
    area_side_m: float = 750.0
    num_aps: int = 308
    topology_path: Optional[str] = None
    num_ues: int = 50
    ue_speed_mps: float = 3.6
    trace_path: Optional[str] = None
    carrier_freq_hz: float = 2.0e9
    slot_duration_s: float = 1e-4
    tau_p: int = 10
    tau_c: int = 200
    tx_power_dbm: float = 20.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    noise_temperature_k: float = 290.0
    ap_height_m: float = 10.0
    ue_height_m: float = 1.0
    shadowing_std_db: float = 8.0
    pathloss_d0_m: float = 10.0
    pathloss_d1_m: float = 50.0
    transition_scale_m: float = 50.0
    num_best_aps: int = 7
    target_q: int = 20
    schemes: List[str] = field(default_factory=lambda: list(SCHEMES))
    gamma1_db: float = 1.0
    gamma2_db: float = 1.0
    delta1_db: float = 4.0
    delta2_db: float = 4.0
    theta_db: float = 4.0
    dc_penalty: float = 0.1
    newton_eps: float = 1e-6
    f_update: float = 1.0 / 200
    d_c_s: float = 0.1
    d_ap_s: float = 0.02
    se_model: str = "fast"
    n_fading_samples: int = 50
    slot_decimation: int = 10
    n_realizations: int = 20
    duration_s: float = 30.0
    seed: int = 42
    workers: int = 1

    @property
    def block_duration_s(self):
        return self.tau_c * self.slot_duration_s

    @property
    def num_blocks(self):
        return int(round(self.duration_s / self.block_duration_s))

    @property
    def tx_power_w(self):
        return 10 ** ((self.tx_power_dbm - 30.0) / 10.0)

    @property
    def noise_power_w(self):
        """n0 = k_B * T0 * B * NF"""
        return (BOLTZMANN * self.noise_temperature_k * self.bandwidth_hz
                * 10 ** (self.noise_figure_db / 10.0))

    def pathloss_params(self):
        return PathLossParams(
            carrier_freq_hz=self.carrier_freq_hz,
            ap_height_m=self.ap_height_m,
            ue_height_m=self.ue_height_m,
            d0_m=self.pathloss_d0_m,
            d1_m=self.pathloss_d1_m,
            shadowing_std_db=self.shadowing_std_db,
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def field_names(cls):
        return list(cls.__dataclass_fields__.keys())


@dataclass
class RealizationResult:
    """Per-scheme metrics from one realization; all schemes share every random draw"""
    realization_index: int
    metrics: Dict[str, RunMetrics]
    info: Dict[str, Any] = field(default_factory=dict)


@dataclass
class AggregateReport:
    """Campaign-level aggregation, pooled per-UE samples across realizations"""
    config: Dict[str, Any]
    schemes: Dict[str, Dict[str, Any]]
    cdf_points: Dict[str, Dict[str, np.ndarray]]
    per_ue: Any
    network: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    timeseries: Any = None


@dataclass
class BlockInputs:
    """
    Everything a handover scheme sees for one block

    beta_total is the per-UE sum of current SNRs over all APs, used to form
    the simplified SINRs A (previous set) and B (candidate set).
    """
    snapshot: SnrSnapshot
    beta_total: np.ndarray
    num_aps: int

    @property
    def num_ues(self):
        return int(self.beta_total.shape[0])

    @property
    def sinr_before(self):
        s = self.snapshot.s_cur
        return s / (self.beta_total - s + 1.0)

    @property
    def sinr_after(self):
        s = self.snapshot.s_new
        return s / (self.beta_total - s + 1.0)
