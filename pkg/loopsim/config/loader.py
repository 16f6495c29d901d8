import copy
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from ..errors import ConfigError, Violation
from ..settings import DEFAULTS_FILE
from .models import LoopsimConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_json(path: PathLike) -> Dict[str, Any]:
    """Read a JSON document, reporting syntax errors with file and line"""
    path = Path(path)
    if not path.exists():
        raise ConfigError("configuration file not found", source=str(path))
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON ({e.msg}, column {e.colno})", source=str(path), line=e.lineno)


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Apply key.path=value overrides; list items are addressed by index"""
    data = copy.deepcopy(data)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node: Any = data
        for part in parts[:-1]:
            if isinstance(node, list):
                node = node[int(part)]
            else:
                node = node.setdefault(part, {})
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = parse_value(raw)
        else:
            node[last] = parse_value(raw)
    return data


def _violations_from(error: ValidationError) -> List[Violation]:
    found = []
    for item in error.errors():
        path = ".".join(str(p) for p in item["loc"]) or "<root>"
        found.append(Violation(path, item["msg"]))
    return found


def build_config(data: Dict[str, Any], source: Optional[str] = None) -> LoopsimConfig:
    try:
        return LoopsimConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError("configuration does not match the parameter schema",
                          violations=_violations_from(e), source=source)


def load_raw(path: Optional[PathLike] = None, overrides: Iterable[str] = (),
             defaults_file: PathLike = DEFAULTS_FILE) -> Dict[str, Any]:
    """Layer defaults, user file and overrides into one document"""
    data = read_json(defaults_file)
    if path is not None:
        data = deep_merge(data, read_json(path))
    return apply_overrides(data, overrides)


def load_config(path: Optional[PathLike] = None, overrides: Iterable[str] = (),
                defaults_file: PathLike = DEFAULTS_FILE) -> LoopsimConfig:
    data = load_raw(path, overrides, defaults_file)
    config = build_config(data, source=str(path) if path else str(defaults_file))
    logger.debug("Loaded configuration (hash %s)", config_hash(config))
    return config


def validate_config(path: Optional[PathLike] = None, overrides: Iterable[str] = (),
                    defaults_file: PathLike = DEFAULTS_FILE) -> List[Violation]:
    """Collect every violated invariant without running a simulation"""
    try:
        config = load_config(path, overrides, defaults_file)
    except ConfigError as e:
        if e.violations:
            return e.violations
        return [Violation(e.source or "<config>", str(e))]
    return config.violations()


def config_hash(config: LoopsimConfig) -> str:
    payload = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
