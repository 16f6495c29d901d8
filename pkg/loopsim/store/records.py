import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
MANIFEST_NAME = "manifest.json"
CONFIG_NAME = "config.json"


def write_table(path: Path, header: Sequence[str], rows) -> Path:
    """Write a CSV table: header row, comma separated, SI units, full float precision"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.asarray(rows, dtype=float).reshape(-1, len(header))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        if len(data):
            np.savetxt(fh, data, delimiter=",", fmt=FLOAT_FORMAT)
    logger.debug("Wrote %d rows to %s", len(data), path)
    return path


def _plain(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_plain) + "\n")
    return path


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """What is needed to reproduce every output of a run"""
    preset: str
    config_hash: str
    seed: int
    version: str
    t_end: Optional[float] = None
    mode: str = "behavioral"
    wall_time: float = 0.0
    overrides: List[str] = field(default_factory=list)
    outputs: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "preset": self.preset,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "t_end": self.t_end,
            "mode": self.mode,
            "wall_time": self.wall_time,
            "overrides": list(self.overrides),
            "outputs": list(self.outputs),
        }


class RunStore:
    """Output directory of one preset run; tracks every file written"""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: List[Path] = []

    def table(self, name: str, header: Sequence[str], rows) -> Path:
        """Save a CSV table"""
        return self._track(write_table(self.out_dir / name, header, rows))

    def json(self, name: str, data: Dict[str, Any]) -> Path:
        """Save a JSON document"""
        return self._track(write_json(self.out_dir / name, data))

    def adopt(self, paths: Sequence[Path]) -> List[Path]:
        """Track files written elsewhere into this directory"""
        return [self._track(Path(p)) for p in paths]

    def _track(self, path: Path) -> Path:
        if path not in self.outputs:
            self.outputs.append(path)
        return path

    def manifest(self, manifest: RunManifest) -> Path:
        """Save manifest.json listing every tracked output with its SHA-256"""
        manifest.outputs = [
            {"file": str(p.relative_to(self.out_dir)), "bytes": p.stat().st_size, "sha256": file_digest(p)}
            for p in self.outputs
        ]
        path = write_json(self.out_dir / MANIFEST_NAME, manifest.to_dict())
        logger.info("Wrote %d outputs and %s", len(self.outputs), path)
        return path

    def read_manifest(self) -> Optional[Dict[str, Any]]:
        path = self.out_dir / MANIFEST_NAME
        return json.loads(path.read_text()) if path.exists() else None
