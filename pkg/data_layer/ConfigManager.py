# data_layer/ConfigManager.py

import dataclasses
import logging
import typing

from models import SimConfig, ConfigError, ParseError
from .FileHandler import FileHandler
from .DataValidator import DataValidator


class ConfigManager:
    """
    Data Layer - Loads and validates campaign configurations
    Flat JSON key/value files; unknown keys are rejected
    """

    def __init__(self, file_handler=None, validator=None):
        self.file_handler = file_handler or FileHandler()
        self.validator = validator or DataValidator()
        self.logger = self._setup_logger()

    def _setup_logger(self):
        logger = logging.getLogger('ConfigManager')
        if not logger.handlers:
            handler = logging.StreamHandler()
            formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            handler.setFormatter(formatter)
            logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        return logger

    def _coerce(self, key, value):
        """Convert a raw JSON value to the SimConfig field type"""
        field_type = typing.get_type_hints(SimConfig)[key]
        if value is None:
            if typing.get_origin(field_type) is typing.Union and type(None) in typing.get_args(field_type):
                return None
            raise ConfigError(f"'{key}' cannot be null")

        if field_type in (int,):
            if isinstance(value, bool) or not self.validator.is_finite_number(value) or int(value) != value:
                raise ConfigError(f"'{key}' must be an integer, got {value!r}")
            return int(value)
        if field_type in (float,):
            if not self.validator.is_finite_number(value):
                raise ConfigError(f"'{key}' must be a number, got {value!r}")
            return float(value)
        if key == "schemes":
            if isinstance(value, str):
                value = [s.strip() for s in value.split(",") if s.strip()]
            if not isinstance(value, list) or not all(isinstance(s, str) for s in value):
                raise ConfigError("'schemes' must be a list of scheme ids")
            return [s.strip().lower() for s in value]
        # optional paths and plain strings
        if not isinstance(value, str):
            raise ConfigError(f"'{key}' must be a string, got {value!r}")
        return value

    def from_dict(self, raw, overrides=None, validate=True):
        """
        Build a SimConfig from a flat dictionary

        Args:
            raw: key/value pairs, unknown keys rejected
            overrides: optional key/value pairs applied after raw (CLI flags)
            validate: run DataValidator and raise ConfigError on errors

        Returns:
            SimConfig
        """
        merged = dict(raw)
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

        known = set(SimConfig.field_names())
        unknown = sorted(set(merged) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")

        values = {key: self._coerce(key, value) for key, value in merged.items()}
        cfg = dataclasses.replace(SimConfig(), **values)

        if validate:
            result = self.validator.validate_config(cfg)
            for warning in result["warnings"]:
                self.logger.warning(warning)
            if not result["is_valid"]:
                raise ConfigError("; ".join(result["errors"]))
        return cfg

    def load_config(self, file_path, overrides=None, validate=True):
        """Load a SimConfig from a JSON file"""
        try:
            raw = self.file_handler.load_json(file_path)
        except ParseError as e:
            raise ConfigError(str(e))
        cfg = self.from_dict(raw, overrides, validate)
        self.logger.info(f"Loaded configuration from {file_path}")
        return cfg
