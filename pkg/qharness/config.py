import copy
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from dotenv import load_dotenv
from loguru import logger
from pydantic import BaseModel, Field

# Default configuration
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "quadrature": {
        "nodes": 80,
        "max_nodes": 200,
        "k_terms": 200,
    },
    "verification": {
        "nodes": 12,
        "sweep": 50,
        "seed": 20240601,
    },
    "sampling": {
        "threads": 1,
    },
    "logging": {
        "level": "WARNING",
        "json": False,
    },
    "output": {
        "format": "csv",
    },
}

CONFIG_ENV = "QHARNESS_CONFIG"
THREADS_ENV = "QHARNESS_THREADS"
DEFAULT_CONFIG_FILE = "qharness.yaml"


class QuadratureSettings(BaseModel):
    nodes: int = Field(80, ge=1)
    max_nodes: int = Field(200, ge=1)
    k_terms: int = Field(200, ge=1)


class VerificationSettings(BaseModel):
    nodes: int = Field(12, ge=2)
    sweep: int = Field(50, ge=1)
    seed: int = 20240601


class SamplingSettings(BaseModel):
    threads: int = Field(1, ge=1)


class LoggingSettings(BaseModel):
    level: str = "WARNING"
    json_records: bool = Field(False, alias="json")

    model_config = {"populate_by_name": True}


class OutputSettings(BaseModel):
    format: Literal["csv", "json"] = "csv"


class Settings(BaseModel):
    """Resolved configuration for a qharness run."""
    quadrature: QuadratureSettings = QuadratureSettings()
    verification: VerificationSettings = VerificationSettings()
    sampling: SamplingSettings = SamplingSettings()
    logging: LoggingSettings = LoggingSettings()
    output: OutputSettings = OutputSettings()


def _read_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML config file, returning an empty mapping on failure."""
    try:
        with open(path, "r") as f:
            file_config = yaml.safe_load(f)
        if file_config is None:
            return {}
        if not isinstance(file_config, dict):
            raise ValueError("top level of the config file must be a mapping")
        return file_config
    except Exception as e:
        logger.error(f"Error loading config from {path}: {str(e)}")
        return {}


def _env_overrides(config: Dict[str, Dict[str, Any]]) -> None:
    # QHARNESS_<SECTION>_<KEY> beats the file
    for section, values in config.items():
        for key in list(values):
            raw = os.environ.get(f"QHARNESS_{section.upper()}_{key.upper()}")
            if raw is not None:
                values[key] = yaml.safe_load(raw)
    threads = os.environ.get(THREADS_ENV)
    if threads is not None:
        config["sampling"]["threads"] = threads


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """Load settings from defaults, an optional YAML file and the environment.

    Args:
        path: Explicit config file. Defaults to $QHARNESS_CONFIG, then
            qharness.yaml in the working directory when it exists.

    Returns:
        Validated Settings
    """
    load_dotenv()
    config = copy.deepcopy(DEFAULT_CONFIG)

    config_path = Path(path) if path else Path(os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_FILE))
    if path or config_path.exists():
        file_config = _read_config_file(config_path)
        for section, values in file_config.items():
            if not isinstance(values, dict):
                logger.warning(f"Ignoring config section '{section}': expected a mapping")
                continue
            config.setdefault(section, {}).update(values)

    _env_overrides(config)
    return Settings.model_validate(config)


def thread_count(settings: Settings) -> int:
    """Effective worker cap for ensemble sampling."""
    return max(1, settings.sampling.threads)
