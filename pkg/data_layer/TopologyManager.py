# data_layer/TopologyManager.py

import logging
import math

import numpy as np

from models import Topology, ValidationError
from .FileHandler import FileHandler
from .DataValidator import DataValidator


class TopologyManager:
    """
    Data Layer - Manages AP placements
    Generates or loads AP positions and divides them into square CPU clusters
    """

    def __init__(self, file_handler=None, validator=None):
        self.file_handler = file_handler or FileHandler()
        self.validator = validator or DataValidator()
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('TopologyManager')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    def generate_uniform_topology(self, area_side, num_aps, ap_height, rng):
        """
        Place a fixed number of APs uniformly in the square area

        Args:
            area_side: side of the square area in meters
            num_aps: number of APs M
            ap_height: AP antenna height in meters
            rng: numpy Generator

        Returns:
            Topology without clusters
        """
        if area_side <= 0:
            raise ValueError(f"Area side must be positive, got {area_side}")
        if num_aps < 1:
            raise ValueError(f"Number of APs must be at least 1, got {num_aps}")

        xy = rng.uniform(0.0, area_side, size=(int(num_aps), 2))
        z = np.full((int(num_aps), 1), float(ap_height))
        return Topology(area_side=float(area_side), ap_positions=np.hstack([xy, z]))

    def assign_square_clusters(self, topo, target_Q):
        """
        Divide the area into an n x n grid of CPU clusters

        n = round(sqrt(M / target_Q)), at least 1. The cluster of an AP is
        floor(x / cell) * n + floor(y / cell).

        Args:
            topo: Topology with at least one AP
            target_Q: desired number of APs per cluster

        Returns:
            new Topology with cluster_grid, cluster_of and Q_avg set
        """
        M = topo.num_aps
        if M < 1:
            raise ValueError("Topology has no APs")
        if target_Q < 1:
            raise ValueError(f"target_Q must be at least 1, got {target_Q}")

        warnings = list(topo.warnings)
        if target_Q > M:
            message = f"target_Q={target_Q} exceeds M={M}; using a single cluster"
            self.logger.warning(message)
            warnings.append(message)
            n = 1
        else:
            n = max(1, int(math.floor(math.sqrt(M / target_Q) + 0.5)))

        cell = topo.area_side / n
        ix = np.minimum(np.floor(topo.ap_positions[:, 0] / cell), n - 1).astype(int)
        iy = np.minimum(np.floor(topo.ap_positions[:, 1] / cell), n - 1).astype(int)
        cluster_of = ix * n + iy

        return Topology(
            area_side=topo.area_side,
            ap_positions=topo.ap_positions,
            cluster_grid=(n, n),
            cluster_of=cluster_of,
            Q_avg=M / (n * n),
            warnings=warnings,
        )

    def load_topology(self, file_path, area_side):
        """
        Load AP positions from an AP-CSV file

        Args:
            file_path: CSV with header x_m,y_m,z_m
            area_side: side of the declared area in meters

        Returns:
            Topology without clusters
        """
        positions = self.file_handler.read_ap_csv(file_path)
        if positions.shape[0] == 0:
            raise ValidationError(f"{file_path}: no APs")

        containment = self.validator.check_containment(positions, area_side)
        if containment["violation_count"]:
            first = containment["violation_indices"][0]
            raise ValidationError(
                f"{file_path}: {containment['violation_count']} APs outside the "
                f"{area_side} m area (first at line {first + 2})"
            )

        self.logger.info(f"Loaded {positions.shape[0]} APs from {file_path}")
        return Topology(area_side=float(area_side), ap_positions=positions)
