"""
Run configuration: defaults, the sqlite settings store, environment
overrides and the validated RunConfig handed to library code.
"""

import logging
import os
import sqlite3
from dataclasses import dataclass, replace
from typing import Any, Dict, Mapping, Optional

import sympy

from .diagrams import HermiteError

logger = logging.getLogger(__name__)

"""--- Locations ---"""

ENV_PREFIX = "HERMITE_STAIRCASE_"
FORMATS = ("text", "json", "csv")


class ConfigError(HermiteError, ValueError):
    """A setting has an unusable value."""


def app_home() -> str:
    """Directory holding the settings database and the error log."""
    return os.environ.get(ENV_PREFIX + "HOME") or os.path.expanduser("~/.hermite-staircase")


def database_file() -> str:
    return os.path.join(app_home(), "settings.db")


def error_log_file() -> str:
    return os.path.join(app_home(), "error.log")


"""--- Settings store ---"""


def get_default_settings() -> dict:
    """Every tunable with its default value."""
    return {
        # Randomised certification
        "seed": 20240601, "prime": 2 ** 61 - 1, "trials": 8,
        # Exact fallback and exhaustive checks
        "exact_threshold": 8, "exact_variables": 4, "budget": 10 ** 7,
        # Runs
        "jobs": 1, "format": "text", "cache": "", "full": 0,
    }


def initialize_database():
    os.makedirs(app_home(), exist_ok=True)
    with sqlite3.connect(database_file()) as conn:
        conn.execute("CREATE TABLE IF NOT EXISTS settings (key TEXT PRIMARY KEY, value TEXT NOT NULL)")


def save_settings(settings: Mapping[str, Any]):
    """Write the given settings, leaving other stored keys untouched."""
    initialize_database()
    with sqlite3.connect(database_file()) as conn:
        for key, value in settings.items():
            conn.execute("INSERT OR REPLACE INTO settings (key, value) VALUES (?, ?)", (key, str(value)))


def coerce(value: Optional[str], default: Any) -> Any:
    """Turn stored text back into the type of `default`; fall back to it on failure."""
    if value is None:
        return default
    try:
        if isinstance(default, int):
            return int(value)
        return value
    except (ValueError, TypeError):
        logger.warning("ignoring unusable setting value %r", value)
        return default


def load_settings(use_env: bool = True) -> dict:
    """Stored settings over defaults, then HERMITE_STAIRCASE_<NAME> overrides."""
    defaults = get_default_settings()
    stored: Dict[str, str] = {}
    if os.path.exists(database_file()):
        with sqlite3.connect(database_file()) as conn:
            conn.execute("CREATE TABLE IF NOT EXISTS settings (key TEXT PRIMARY KEY, value TEXT NOT NULL)")
            stored = dict(conn.execute("SELECT key, value FROM settings").fetchall())
    settings = {key: coerce(stored.get(key), default) for key, default in defaults.items()}
    if use_env:
        for key, default in defaults.items():
            override = os.environ.get(ENV_PREFIX + key.upper())
            if override is not None:
                settings[key] = coerce(override, default)
    return settings


def reset_settings():
    """Forget every stored value."""
    if os.path.exists(database_file()):
        with sqlite3.connect(database_file()) as conn:
            conn.execute("DELETE FROM settings")


"""--- RunConfig ---"""


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240601
    prime: int = 2 ** 61 - 1
    trials: int = 8
    exact_threshold: int = 8
    exact_variables: int = 4
    budget: int = 10 ** 7
    jobs: int = 1
    output_format: str = "text"
    cache_path: str = ""
    full: bool = False

    def __post_init__(self):
        if self.prime <= 2 ** 31 or not sympy.isprime(self.prime):
            raise ConfigError(f"prime must be a prime above 2**31, got {self.prime}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")

    @classmethod
    def from_settings(cls, settings: Mapping[str, Any]) -> "RunConfig":
        return cls(
            seed=int(settings["seed"]),
            prime=int(settings["prime"]),
            trials=int(settings["trials"]),
            exact_threshold=int(settings["exact_threshold"]),
            exact_variables=int(settings["exact_variables"]),
            budget=int(settings["budget"]),
            jobs=int(settings["jobs"]),
            output_format=str(settings["format"]),
            cache_path=str(settings["cache"]),
            full=bool(int(settings["full"])),
        )

    def probe(self) -> "RunConfig":
        """A cheap copy for sub-problem probes: two trials, no exact fallback."""
        return replace(self, trials=2, exact_threshold=0)
