# data_layer/MobilityGenerator.py

import logging
import math

import numpy as np

from models import UETrace, ParseError, ValidationError
from .FileHandler import FileHandler
from .DataValidator import DataValidator


class MobilityGenerator:
    """
    Data Layer - Produces per-block UE positions
    Random-waypoint walks or ingested time-stamped walk traces
    """

    MAX_DIRECTION_DRAWS = 100
    TIME_TOLERANCE = 1e-9

    def __init__(self, file_handler=None, validator=None):
        self.file_handler = file_handler or FileHandler()
        self.validator = validator or DataValidator()
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('MobilityGenerator')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    def _draw_leg(self, position, area_side, transition_scale, rng):
        """Draw a leg end point that stays inside the area"""
        while True:
            length = rng.rayleigh(transition_scale)
            for _ in range(self.MAX_DIRECTION_DRAWS):
                theta = rng.uniform(0.0, 2.0 * math.pi)
                end = position + length * np.array([math.cos(theta), math.sin(theta)])
                if np.all(end >= 0.0) and np.all(end <= area_side):
                    return end, length
            # no direction fits this length, draw a new one

    def generate_rwp_trace(self, area_side, speed, num_blocks, block_duration,
                           transition_scale, rng, start=None):
        """
        Random-waypoint walk sampled at block boundaries

        Legs have a uniform direction and a Rayleigh length, are walked at
        constant speed without pauses, and are redrawn when they would leave
        the area.

        Args:
            area_side: side of the square area in meters
            speed: UE speed in m/s
            num_blocks: number of sampled positions
            block_duration: seconds between samples
            transition_scale: Rayleigh scale of leg lengths in meters
            rng: numpy Generator
            start: optional (x, y) start; uniform in the area otherwise

        Returns:
            UETrace
        """
        if transition_scale <= 0:
            raise ValueError(f"transition_scale must be positive, got {transition_scale}")
        if speed < 0:
            raise ValueError(f"speed must be non-negative, got {speed}")
        if num_blocks < 1:
            raise ValueError(f"num_blocks must be at least 1, got {num_blocks}")

        if start is None:
            start = rng.uniform(0.0, area_side, size=2)
        start = np.asarray(start, dtype=float)

        if speed == 0:
            positions = np.tile(start, (int(num_blocks), 1))
            return UETrace(speed=0.0, positions=positions, block_duration=block_duration)

        total_distance = speed * (num_blocks - 1) * block_duration
        waypoints = [start]
        walked = [0.0]
        position = start
        while walked[-1] < total_distance:
            end, length = self._draw_leg(position, area_side, transition_scale, rng)
            if length <= 0.0:
                continue
            waypoints.append(end)
            walked.append(walked[-1] + length)
            position = end

        waypoints = np.array(waypoints)
        walked = np.array(walked)
        distances = speed * block_duration * np.arange(num_blocks)
        positions = np.column_stack([
            np.interp(distances, walked, waypoints[:, 0]),
            np.interp(distances, walked, waypoints[:, 1]),
        ])
        return UETrace(speed=float(speed), positions=positions, block_duration=block_duration)

    def resample_waypoints(self, times, xy, block_duration, t0=None):
        """
        Linear interpolation of time-stamped waypoints onto block boundaries

        Blocks are counted from t0. Before its first timestamp the UE is held
        at its first waypoint.

        Args:
            times: strictly increasing timestamps in seconds
            xy: (N, 2) waypoint positions
            block_duration: sampling period in seconds
            t0: time of block 0, defaults to the first timestamp

        Returns:
            (positions, speed) where speed is the largest leg speed
        """
        times = np.asarray(times, dtype=float)
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        t0 = float(times[0]) if t0 is None else float(t0)
        if t0 > times[0] + self.TIME_TOLERANCE:
            raise ValueError(f"t0={t0} is after the first timestamp {times[0]}")

        span = times[-1] - t0
        n = int(math.floor(span / block_duration + self.TIME_TOLERANCE)) + 1
        if times.shape[0] == 1:
            return np.tile(xy[0], (n, 1)), 0.0

        grid = t0 + block_duration * np.arange(n)
        positions = np.column_stack([
            np.interp(grid, times, xy[:, 0]),
            np.interp(grid, times, xy[:, 1]),
        ])

        # grid points that coincide with waypoints take them verbatim
        idx = np.clip(np.searchsorted(times, grid), 0, times.shape[0] - 1)
        for candidate in (idx, np.maximum(idx - 1, 0)):
            hit = np.abs(times[candidate] - grid) <= self.TIME_TOLERANCE * np.maximum(1.0, np.abs(grid))
            positions[hit] = xy[candidate[hit]]

        leg_speeds = np.linalg.norm(np.diff(xy, axis=0), axis=1) / np.diff(times)
        return positions, float(leg_speeds.max())

    def load_traces(self, file_path, block_duration, area_side=None):
        """
        Load walk traces from a trace-CSV file

        Args:
            file_path: CSV with header ue_id,t_s,x_m,y_m sorted by (ue_id, t_s)
            block_duration: sampling period in seconds
            area_side: optional area side for containment validation

        Returns:
            list of UETrace ordered by ue_id
        """
        if block_duration <= 0:
            raise ValueError("block_duration must be positive")
        df = self.file_handler.read_trace_csv(file_path)
        if df.empty:
            raise ValidationError(f"{file_path}: no trace rows")

        if area_side is not None:
            containment = self.validator.check_containment(df[["x_m", "y_m"]].to_numpy(), area_side)
            if containment["violation_count"]:
                first = containment["violation_indices"][0]
                raise ValidationError(
                    f"{file_path}: position outside the {area_side} m area at line {first + 2}"
                )

        # one campaign clock for every UE
        t0 = float(df["t_s"].min())
        traces = []
        for ue_id, group in df.groupby("ue_id", sort=True):
            times = group["t_s"].to_numpy()
            steps = np.diff(times)
            if np.any(steps <= 0):
                bad = int(np.flatnonzero(steps <= 0)[0]) + 1
                raise ParseError(
                    f"timestamps of ue_id {ue_id} are not increasing",
                    line_number=int(group.index[bad]) + 2, path=file_path
                )
            positions, speed = self.resample_waypoints(
                times, group[["x_m", "y_m"]].to_numpy(), block_duration, t0=t0
            )
            traces.append(UETrace(speed=speed, positions=positions, block_duration=block_duration))

        self.logger.info(f"Loaded {len(traces)} traces from {file_path}")
        return traces
