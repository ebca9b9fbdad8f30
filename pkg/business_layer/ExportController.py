# business_layer/ExportController.py

import os
from typing import Dict, Any

import numpy as np
import pandas as pd


class ExportController:
    """
    Business Logic Controller for Export Operations
    Writes the CDF files, the per-UE table, the per-block time series and
    the campaign summary
    """

    def __init__(self, file_handler, logging_service):
        """
        Initialize with dependencies

        Args:
            file_handler: FileHandler instance for file I/O
            logging_service: LoggingService instance for logging
        """
        self.file_handler = file_handler
        self.logging_service = logging_service

    def _to_builtin(self, value):
        """Convert numpy scalars/arrays inside nested containers to JSON types"""
        if isinstance(value, dict):
            return {str(k): self._to_builtin(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._to_builtin(v) for v in value]
        if isinstance(value, np.ndarray):
            return [self._to_builtin(v) for v in value.tolist()]
        if isinstance(value, np.generic):
            return value.item()
        if isinstance(value, float) and not np.isfinite(value):
            return None
        return value

    def build_summary(self, report) -> Dict[str, Any]:
        """Summary document: per-scheme statistics, network descriptors, config echo"""
        return self._to_builtin({
            "config": report.config,
            "seed": report.config.get("seed"),
            "schemes": report.schemes,
            "network": report.network,
            "notes": report.notes,
        })

    def cdf_frame(self, points) -> pd.DataFrame:
        return pd.DataFrame({
            "se_bits_s_hz": np.asarray(points["se"], dtype=float),
            "cdf": np.asarray(points["cdf"], dtype=float),
        })

    def emit_outputs(self, report, out_dir: str) -> Dict[str, Any]:
        """
        Write cdf_<scheme>.csv, per_ue.csv, timeseries.csv and summary.json

        timeseries.csv is skipped when the report carries no time series.

        Args:
            report: AggregateReport
            out_dir: output directory, created when missing

        Returns:
            Dictionary with success status, message and written files
        """
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as e:
            return {
                "success": False,
                "message": f"Cannot create output directory {out_dir}: {str(e)}",
                "files": []
            }

        files = []
        for scheme, points in report.cdf_points.items():
            path = os.path.join(out_dir, f"cdf_{scheme}.csv")
            result = self.file_handler.save_file(self.cdf_frame(points), path)
            if not result["success"]:
                return {**result, "files": files}
            files.append(path)

        if report.schemes:
            path = os.path.join(out_dir, "per_ue.csv")
            result = self.file_handler.save_file(report.per_ue, path)
            if not result["success"]:
                return {**result, "files": files}
            files.append(path)

        if report.schemes and report.timeseries is not None:
            path = os.path.join(out_dir, "timeseries.csv")
            result = self.file_handler.save_file(report.timeseries, path)
            if not result["success"]:
                return {**result, "files": files}
            files.append(path)

        path = os.path.join(out_dir, "summary.json")
        result = self.file_handler.save_json(self.build_summary(report), path)
        if not result["success"]:
            return {**result, "files": files}
        files.append(path)

        self.logging_service.log_operation(None, "export", f"Wrote {len(files)} files to {out_dir}")
        return {
            "success": True,
            "message": f"Results exported to {out_dir}",
            "files": files
        }
