import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from ..config.loader import validate_config
from ..errors import ConfigError, Violation
from ..settings import DEFAULTS_FILE

logger = logging.getLogger(__name__)


def validate(path: Optional[Path] = None, overrides: Iterable[str] = (),
             defaults_file: Path = DEFAULTS_FILE) -> List[Violation]:
    """Check every parameter invariant of a configuration file before any simulation.

    Raises ConfigError when the file does not exist; returns the violations
    (empty for a valid configuration) otherwise.
    """
    if path is not None and not Path(path).exists():
        raise ConfigError("configuration file not found", source=str(path))
    found = validate_config(path, overrides, defaults_file)
    for v in found:
        logger.warning("Violation: %s", v)
    if not found:
        logger.info("Configuration %s is valid", path or defaults_file)
    return found


def report(violations: List[Violation], path: Optional[Path] = None) -> Dict[str, Any]:
    return {
        "config": str(path) if path else None,
        "valid": not violations,
        "violations": [{"path": v.path, "message": v.message} for v in violations],
    }
