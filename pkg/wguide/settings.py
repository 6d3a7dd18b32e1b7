"""
    Module for accessing the experiment settings from a yaml file
"""
import os
import time

import yaml
from dotenv import find_dotenv, load_dotenv

from .errors import ConfigError

ENV_CONFIG = "WGUIDE_CONFIG"

# Every accepted key per section; anything else is a ConfigError.
SCHEMA = {
    "cross_section": {"n", "interval", "rectangle"},
    "potential": {"name", "params"},
    "experiment": {"alpha", "h", "h_range", "regime"},
    "solver": {
        "mode", "series_order", "j_max", "nodes_per_panel", "fine_nodes",
        "longitudinal_rule", "tol_k", "max_iter",
    },
    "quadrature": {"nodes_per_panel"},
    "oracle": {"enabled", "half_length", "spacing", "modes", "margin_floor", "max_iter"},
    "output": {"folder", "formats", "profile_csv"},
}


def resolve_config_path(default="config.yaml"):
    """Config path from WGUIDE_CONFIG (environment or .env), else `default`."""
    load_dotenv(find_dotenv(usecwd=True))
    return os.environ.get(ENV_CONFIG, default)


def validate(config):
    """Raise `ConfigError` for unknown sections or keys."""
    if not isinstance(config, dict):
        raise ConfigError("config root must be a mapping of sections")
    for section, values in config.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section '{section}'")
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"config section '{section}' must be a mapping")
        unknown = set(values) - SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    return config


class Settings:
    """
        Class to access the yaml config file, allows us to pass just the
        instance around and not care about the paths and file searching.
    """
    def __init__(self, config_path=None, cache_ttl=5):
        """
        Initializes the config loader.

        :param config_path: Path to the YAML config file (default: WGUIDE_CONFIG
            or config.yaml).
        :param cache_ttl: Time in seconds before reloading the config (default: 5s).
        """
        self.config_path = config_path or resolve_config_path()
        self.cache_ttl = cache_ttl
        self.config = {}
        self.last_loaded = 0  # Timestamp of last load

    @classmethod
    def from_dict(cls, config):
        """Settings over an in-memory mapping (no file)."""
        settings = cls(config_path="<memory>", cache_ttl=float("inf"))
        settings.config = validate(config)
        settings.last_loaded = time.time()
        return settings

    def load_config(self):
        """Reads the YAML file only if CACHE_TTL has passed."""
        current_time = time.time()

        if current_time - self.last_loaded > self.cache_ttl:
            if not os.path.exists(self.config_path):
                raise ConfigError(f"config file '{self.config_path}' not found")
            try:
                with open(self.config_path, "r", encoding="utf-8") as file:
                    config = yaml.safe_load(file) or {}
            except (yaml.YAMLError, OSError) as e:
                raise ConfigError(f"cannot read config file '{self.config_path}': {e}") from e
            self.config = validate(config)
            self.last_loaded = current_time

    def section(self, name):
        """A whole section as a dict (empty when absent)."""
        self.load_config()
        return dict(self.config.get(name) or {})

    def get(self, key, default=None):
        """Fetches 'section.key' from the config file, auto-reloading if necessary."""
        section, _, name = key.partition(".")
        return self.section(section).get(name, default)
