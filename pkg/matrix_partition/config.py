"""Runtime settings: built-in defaults, YAML file, .env file and environment.

Precedence, lowest first: ``DEFAULT_SETTINGS`` < YAML config < ``.env`` <
``MPART_*`` environment variables < explicit overrides (CLI flags).
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, MutableMapping, Optional

import yaml

from .errors import ValidationError

logger = logging.getLogger(__name__)

ENV_PREFIX = "MPART_"
DEFAULT_CONFIG_PATH = Path(__file__).parent / "configs" / "defaults.yaml"

# Used when no YAML file is found.
DEFAULT_SETTINGS: Dict[str, Any] = {
    "max_maps": 10_000_000,
    "timeout_secs": 60.0,
    "jobs": 1,
    "canonical_max_size": 8,
    "enumeration_cap": 100_000_000,
    "sylvester_max_k": 20,
    "sat_max_vars": 20,
    "lookahead": True,
}


@dataclass(frozen=True)
class Settings:
    max_maps: int = 10_000_000
    timeout_secs: Optional[float] = 60.0
    jobs: int = 1
    canonical_max_size: int = 8
    enumeration_cap: int = 100_000_000
    sylvester_max_k: int = 20
    sat_max_vars: int = 20
    lookahead: bool = True

    def with_overrides(self, **overrides: Any) -> "Settings":
        """Return a copy with every non-None override applied."""
        given = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **_coerce(given, source="overrides"))


_FIELD_TYPES = {f.name: f.type for f in fields(Settings)}


def _coerce_value(key: str, value: Any, source: str) -> Any:
    kind = _FIELD_TYPES[key]
    try:
        if kind == "bool" or kind is bool:
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if "float" in str(kind):
            if value is None or str(value).strip().lower() in ("none", "null", ""):
                return None
            result = float(value)
            if result <= 0:
                raise ValueError(value)
            return result
        result = int(value)
        if result < 1:
            raise ValueError(value)
        return result
    except (TypeError, ValueError):
        raise ValidationError(f"invalid value for '{key}' in {source}: {value!r}")


def _coerce(raw: Mapping[str, Any], source: str) -> Dict[str, Any]:
    result = {}
    for key, value in raw.items():
        if key not in _FIELD_TYPES:
            raise ValidationError(f"unknown setting '{key}' in {source}")
        result[key] = _coerce_value(key, value, source)
    return result


def load_env(env_file: Optional[Path] = None, environ: Optional[MutableMapping[str, str]] = None) -> None:
    """Load KEY=VALUE lines from a .env file without overriding set variables."""
    env_file = env_file or Path.cwd() / ".env"
    environ = os.environ if environ is None else environ
    if not env_file.exists():
        return
    with open(env_file, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#") and "=" in line:
                key, _, value = line.partition("=")
                key = key.strip()
                value = value.strip().strip('"').strip("'")
                if key and value and key not in environ:
                    environ[key] = value


def load_yaml_config(path: Path) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValidationError(f"cannot parse config {path}: {e}")
    if not isinstance(data, dict):
        raise ValidationError(f"config {path} must be a mapping")
    return data


def load_settings(
    path: Optional[Path] = None,
    environ: Optional[MutableMapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    env_file: Optional[Path] = None,
) -> Settings:
    """Resolve the effective settings.

    Args:
        path: YAML config file; defaults to the packaged ``configs/defaults.yaml``.
        environ: Environment mapping (``os.environ`` when omitted).
        overrides: Highest-precedence values, typically parsed CLI flags.
        env_file: ``.env`` file to merge into ``environ`` first.

    Returns:
        A validated, frozen ``Settings``.
    """
    environ = os.environ if environ is None else environ
    load_env(env_file, environ)

    values = _coerce(DEFAULT_SETTINGS, source="built-in defaults")
    config_path = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if config_path.exists():
        values.update(_coerce(load_yaml_config(config_path), source=str(config_path)))
        logger.debug("[config] loaded %s", config_path)
    elif path is not None:
        raise ValidationError(f"config file not found: {config_path}")

    from_env = {
        key[len(ENV_PREFIX):].lower(): value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX)
    }
    values.update(_coerce(from_env, source="environment"))

    settings = Settings(**values)
    if overrides:
        settings = settings.with_overrides(**overrides)
    logger.debug("[config] effective settings %s", settings)
    return settings
