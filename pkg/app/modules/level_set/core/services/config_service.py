"""TOML experiment configuration: parsing, overrides and the resolved dump"""

from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union
import logging
import tomllib

import tomli_w
from pydantic import ValidationError

from app.core.exceptions import ConfigError
from app.modules.level_set.core.schemas.experiment_schemas import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_override(item: str) -> Tuple[str, Any]:
    """Split key=value; the value is read as a TOML literal, else kept as a string"""
    if "=" not in item:
        raise ConfigError(f"override '{item}' is not of the form key=value")
    key, raw = item.split("=", 1)
    key = key.strip()
    raw = raw.strip()
    if not key:
        raise ConfigError(f"override '{item}' has an empty key")
    try:
        value = tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        value = raw
    return key, value


def _set_path(data: Dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    node = data
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set '{key}': '{part}' is not a table", key=key)
    node[parts[-1]] = value


def _error_from_validation(error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or None
    if first["type"] == "extra_forbidden":
        return ConfigError("unknown key", key=key)
    message = first["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    expected = first["type"]
    if first["type"] not in ("value_error", "missing"):
        message = f"{message} (expected {expected}, got {first.get('input')!r})"
    return ConfigError(message, key=key)


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise _error_from_validation(e) from e


def parse_config(path: Optional[Union[str, Path]],
                 overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Read a TOML config (or start empty), apply key=value overrides, validate"""
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        try:
            with path.open("rb") as handle:
                data = tomllib.load(handle)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e

    for item in overrides:
        key, value = parse_override(item)
        _set_path(data, key, value)
        logger.debug(f"Override {key} = {value!r}")

    config = build_config(data)
    # a relative dataset path is taken relative to the config file
    if config.is_tabular and path is not None and not Path(config.problem).is_absolute():
        candidate = path.parent / config.problem
        if candidate.is_file():
            config = config.model_copy(update={"problem": str(candidate.resolve())})
    return config


def config_to_dict(config: ExperimentConfig) -> Dict[str, Any]:
    return config.model_dump(mode="json", exclude_none=True)


def dump_config(config: ExperimentConfig) -> str:
    """TOML text that parses back to the same config"""
    return tomli_w.dumps(config_to_dict(config))
