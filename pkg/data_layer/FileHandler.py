# data_layer/FileHandler.py

import json
import os
import re

import numpy as np
import pandas as pd

from models import ParseError


class FileHandler:
    """
    Data Layer - Handles file I/O operations
    Reads AP and trace CSV files, writes result CSV and JSON files
    """

    AP_COLUMNS = ["x_m", "y_m", "z_m"]
    TRACE_COLUMNS = ["ue_id", "t_s", "x_m", "y_m"]

    def _read_numeric_csv(self, file_path, columns):
        """Read a CSV with an exact header and numeric cells"""
        if not os.path.exists(file_path):
            raise ParseError("file not found", path=file_path)
        try:
            df = pd.read_csv(file_path, dtype=str, skipinitialspace=True)
        except pd.errors.EmptyDataError:
            raise ParseError("empty file, expected header " + ",".join(columns), path=file_path)
        except pd.errors.ParserError as e:
            match = re.search(r"line (\d+)", str(e))
            line = int(match.group(1)) if match else None
            raise ParseError(f"malformed row: {e}", line_number=line, path=file_path)

        if [c.strip() for c in df.columns] != columns:
            raise ParseError(
                f"expected header {','.join(columns)}, got {','.join(df.columns)}",
                line_number=1, path=file_path
            )
        df.columns = columns

        numeric = df.apply(pd.to_numeric, errors="coerce")
        bad_rows = numeric.isnull().any(axis=1)
        if bad_rows.any():
            first = int(np.flatnonzero(bad_rows.to_numpy())[0])
            # header is line 1
            raise ParseError(
                f"non-numeric or missing value in row {df.iloc[first].tolist()}",
                line_number=first + 2, path=file_path
            )
        return numeric

    def read_ap_csv(self, file_path):
        """
        Load AP positions

        Args:
            file_path: CSV with header x_m,y_m,z_m

        Returns:
            (M, 3) float array, possibly empty
        """
        df = self._read_numeric_csv(file_path, self.AP_COLUMNS)
        return df[self.AP_COLUMNS].to_numpy(dtype=float).reshape(-1, 3)

    def read_trace_csv(self, file_path):
        """
        Load time-stamped UE waypoints

        Args:
            file_path: CSV with header ue_id,t_s,x_m,y_m

        Returns:
            DataFrame with an integer ue_id column
        """
        df = self._read_numeric_csv(file_path, self.TRACE_COLUMNS)
        if not np.all(np.mod(df["ue_id"], 1) == 0):
            raise ParseError("ue_id must be an integer", path=file_path)
        df["ue_id"] = df["ue_id"].astype(int)
        return df

    def load_json(self, file_path):
        """Load a JSON object from file"""
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ParseError("file not found", path=file_path)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line_number=e.lineno, path=file_path)
        if not isinstance(data, dict):
            raise ParseError("expected a JSON object", path=file_path)
        return data

    def save_file(self, dataframe, file_path):
        """Save dataframe to CSV"""
        try:
            if not file_path.endswith('.csv'):
                return {"success": False, "message": f"Unsupported file format: {file_path}"}
            dataframe.to_csv(file_path, index=False, lineterminator="\n")
            return {"success": True, "message": f"File saved to {file_path}"}
        except Exception as e:
            return {"success": False, "message": f"Error saving file {file_path}: {str(e)}"}

    def save_json(self, data, file_path):
        """Save a JSON-serialisable object with sorted keys"""
        try:
            with open(file_path, "w", encoding="utf-8") as f:
                json.dump(data, f, indent=2, sort_keys=True)
                f.write("\n")
            return {"success": True, "message": f"File saved to {file_path}"}
        except Exception as e:
            return {"success": False, "message": f"Error saving file {file_path}: {str(e)}"}
