import os
from dataclasses import dataclass

from dotenv import load_dotenv

from src.utils.errors import ConfigError

load_dotenv()

DEFAULTS = {
    "PADIC_HEIGHTS_ENUMERATION_BUDGET": "1000000",
    "PADIC_HEIGHTS_TRIAL_DIVISION_LIMIT": "1000000",
    "PADIC_HEIGHTS_KEDLAYA_RETRIES": "3",
    "PADIC_HEIGHTS_LOG_LEVEL": "WARNING",
    "PADIC_HEIGHTS_FIXTURES": "data/fixtures.jsonl",
    "PADIC_HEIGHTS_OUTPUT_DIR": "data/bench",
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    enumeration_budget: int
    trial_division_limit: int
    kedlaya_retries: int
    log_level: str
    fixtures_path: str
    output_dir: str


def _read(name):
    return os.environ.get(name, DEFAULTS[name])


def _read_int(name, minimum):
    raw = _read(name)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def _read_log_level():
    name = "PADIC_HEIGHTS_LOG_LEVEL"
    level = _read(name).strip().upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"{name} must be one of {', '.join(LOG_LEVELS)}, got {_read(name)!r}")
    return level


def get_settings():
    """Read the current settings from the environment (and .env)"""
    return Settings(
        enumeration_budget=_read_int("PADIC_HEIGHTS_ENUMERATION_BUDGET", 5),
        trial_division_limit=_read_int("PADIC_HEIGHTS_TRIAL_DIVISION_LIMIT", 2),
        kedlaya_retries=_read_int("PADIC_HEIGHTS_KEDLAYA_RETRIES", 0),
        log_level=_read_log_level(),
        fixtures_path=_read("PADIC_HEIGHTS_FIXTURES"),
        output_dir=_read("PADIC_HEIGHTS_OUTPUT_DIR"),
    )
