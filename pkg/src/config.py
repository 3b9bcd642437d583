"""
Coprime Toolkit Settings

- One dataclass per module with the documented defaults
- Loaded from coprime.yaml at the repository root (missing keys keep defaults)
- COPRIME_THREADS overrides the empirical worker count
"""

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .output import log_warning

ROOT_DIR = Path(__file__).parent.parent
CONFIG_DIR = ROOT_DIR / "config"
SETTINGS_FILE = ROOT_DIR / "coprime.yaml"
CATALOG_FILE = CONFIG_DIR / "catalog.json"
OBSTRUCTIONS_FILE = CONFIG_DIR / "obstructions.yaml"

THREADS_ENV = "COPRIME_THREADS"


@dataclass(frozen=True)
class ArithConfig:
    trial_bound: int = 10**6
    segment_size: int = 2**20


@dataclass(frozen=True)
class CurvesConfig:
    naive_threshold: int = 1024
    lagrange_checks: int = 20
    max_bsgs_points: int = 64


@dataclass(frozen=True)
class MatgroupsConfig:
    enumeration_guard: int = 10**10


@dataclass(frozen=True)
class ConstantsConfig:
    cutoff: int = 10**6
    precision_digits: int = 40
    render_digits: int = 12


@dataclass(frozen=True)
class EmpiricalConfig:
    workers: int = 1
    chunk_size: int = 10**6
    seed: int = 0


@dataclass(frozen=True)
class AverageConfig:
    a_bound: int = 100
    b_bound: int = 1000
    draws: int = 10**4
    t: int = 1
    seed: int = 0
    cutoff: int = 10**5


@dataclass(frozen=True)
class Settings:
    arith: ArithConfig = field(default_factory=ArithConfig)
    curves: CurvesConfig = field(default_factory=CurvesConfig)
    matgroups: MatgroupsConfig = field(default_factory=MatgroupsConfig)
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)
    empirical: EmpiricalConfig = field(default_factory=EmpiricalConfig)
    average: AverageConfig = field(default_factory=AverageConfig)


def _section(cls, data: Optional[Dict[str, Any]]):
    """Build one section, ignoring keys the dataclass does not know."""
    if not isinstance(data, dict):
        return cls()
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        log_warning(f"{cls.__name__}: ignoring unknown keys {sorted(unknown)}")
    return cls(**{k: int(v) for k, v in data.items() if k in known})


def load_settings(path: Optional[Path] = None) -> Settings:
    """
    Load settings from YAML.

    A missing file yields defaults; a malformed file logs a warning
    and also yields defaults. The thread override is applied last.
    """
    settings_path = Path(path) if path else SETTINGS_FILE
    settings = Settings()

    if settings_path.exists():
        try:
            with open(settings_path, "r") as f:
                data = yaml.safe_load(f) or {}
            settings = Settings(
                arith=_section(ArithConfig, data.get("arith")),
                curves=_section(CurvesConfig, data.get("curves")),
                matgroups=_section(MatgroupsConfig, data.get("matgroups")),
                constants=_section(ConstantsConfig, data.get("constants")),
                empirical=_section(EmpiricalConfig, data.get("empirical")),
                average=_section(AverageConfig, data.get("average")),
            )
        except Exception as e:
            log_warning(f"Failed to load settings from {settings_path}: {e}")
            settings = Settings()

    return apply_env_overrides(settings)


def apply_env_overrides(settings: Settings) -> Settings:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return settings
    try:
        workers = int(raw)
    except ValueError:
        log_warning(f"{THREADS_ENV}={raw!r} is not an integer, ignored")
        return settings
    if workers < 1:
        log_warning(f"{THREADS_ENV}={workers} must be positive, ignored")
        return settings
    return replace(settings, empirical=replace(settings.empirical, workers=workers))


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, loaded once."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings(settings: Optional[Settings] = None):
    """Replace the cached settings (tests and CLI --config)."""
    global _settings
    _settings = settings
