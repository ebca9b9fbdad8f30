# business_layer/LoggingService.py

import logging
from datetime import datetime
from typing import Dict, Any, Optional


class LoggingService:
    """
    Business Logic Service for Logging Operations
    Keeps the operation records of a campaign in memory, mirrors them to
    the standard logger and exports them next to the outputs
    """

    def __init__(self, logger_name: str = 'Campaign'):
        """
        Initialize the record store

        Args:
            logger_name: name of the standard logger the records are mirrored to
        """
        self.logger = self._setup_logger(logger_name)
        self.local_logs = []  # records of the current campaign

    def _setup_logger(self, name):
        logger = logging.getLogger(name)
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    def log_operation(self, realization: Optional[int], operation_type: str,
                      description: str, level: int = logging.INFO) -> Dict[str, Any]:
        """
        Record an operation

        Args:
            realization: realization index, None for campaign-wide records
            operation_type: type of operation (config, realization, realization_failed, export, ...)
            description: description of the operation
            level: standard logging level of the mirrored message

        Returns:
            Dictionary with success status
        """
        log_entry = {
            "id": len(self.local_logs) + 1,
            "realization": realization,
            "operation_type": operation_type,
            "description": description,
            "timestamp": datetime.now()
        }
        self.local_logs.append(log_entry)
        prefix = f"[realization {realization}] " if realization is not None else ""
        self.logger.log(level, f"{prefix}{operation_type}: {description}")
        return {
            "success": True,
            "message": "Operation logged successfully"
        }

    def get_logs(self, realization: Optional[int] = None) -> Dict[str, Any]:
        """
        Retrieve records of one realization or all records, oldest first

        Args:
            realization: optional realization index to filter by

        Returns:
            Dictionary with logs and count
        """
        if realization is None:
            logs = list(self.local_logs)
        else:
            logs = [log for log in self.local_logs if log["realization"] == realization]
        return {
            "success": True,
            "logs": logs,
            "count": len(logs)
        }

    def get_logs_by_operation_type(self, operation_type: str,
                                   realization: Optional[int] = None) -> Dict[str, Any]:
        """Records whose type equals or starts with operation_type"""
        logs = [
            log for log in self.get_logs(realization)["logs"]
            if log["operation_type"].startswith(operation_type)
        ]
        return {
            "success": True,
            "logs": logs,
            "count": len(logs)
        }

    def get_log_statistics(self) -> Dict[str, Any]:
        """
        Get statistics about the records

        Returns:
            Dictionary with total count, counts per operation type and the
            first and last timestamps
        """
        logs = self.local_logs
        if not logs:
            return {
                "success": True,
                "statistics": {
                    "total_logs": 0,
                    "operation_types": {},
                    "first_log": None,
                    "last_log": None
                }
            }

        operation_counts = {}
        for log in logs:
            op_type = log["operation_type"]
            operation_counts[op_type] = operation_counts.get(op_type, 0) + 1

        return {
            "success": True,
            "statistics": {
                "total_logs": len(logs),
                "operation_types": operation_counts,
                "first_log": logs[0]["timestamp"],
                "last_log": logs[-1]["timestamp"]
            }
        }

    def export_logs(self, file_path: str) -> Dict[str, Any]:
        """
        Export the records to a text file

        Args:
            file_path: destination file path

        Returns:
            Dictionary with success status
        """
        logs = self.local_logs
        if not logs:
            return {
                "success": False,
                "message": "No logs to export"
            }

        try:
            with open(file_path, "w", encoding="utf-8") as f:
                f.write("=" * 80 + "\n")
                f.write("CELL-FREE HANDOVER SIMULATOR - RUN LOG\n")
                f.write("=" * 80 + "\n\n")
                f.write(f"Total Logs: {len(logs)}\n\n")
                f.write("=" * 80 + "\n\n")

                for log in logs:
                    f.write(f"Log Entry #{log['id']}\n")
                    f.write("-" * 40 + "\n")
                    f.write(f"Timestamp: {log['timestamp']}\n")
                    if log["realization"] is not None:
                        f.write(f"Realization: {log['realization']}\n")
                    f.write(f"Operation: {log['operation_type']}\n")
                    f.write(f"Description: {log['description']}\n")
                    f.write("\n")

            return {
                "success": True,
                "message": f"Exported {len(logs)} logs to {file_path}"
            }
        except Exception as e:
            return {
                "success": False,
                "message": f"Failed to export logs to {file_path}: {str(e)}"
            }

    def clear_local_logs(self) -> Dict[str, Any]:
        """Clear the in-memory records"""
        log_count = len(self.local_logs)
        self.local_logs.clear()
        return {
            "success": True,
            "message": f"Cleared {log_count} local logs"
        }
