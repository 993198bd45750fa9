"""Reproducibility manifest written at the end of every run."""

import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from ..core.persistence import write_json
from .config import RunConfig

VERSION = "1.0.0"
MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    """What ran, with which config, how long each phase took and what came out.

    Args:
        command: Subcommand
        config_digest: SHA-256 of the canonical config JSON
        workers: Resolved worker count
        config: The full config
    """

    command: str
    config_digest: str
    workers: int
    config: Dict[str, Any] = field(default_factory=dict)
    version: str = VERSION
    timings: Dict[str, float] = field(default_factory=dict)
    results: List[Dict[str, Any]] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)

    @classmethod
    def start(cls, config: RunConfig, workers: int) -> "RunManifest":
        return cls(config.command, config.digest(), workers, config.to_dict())

    @contextmanager
    def phase(self, name: str):
        """Time a block and record the wall-clock seconds under name."""
        began = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - began

    def add_result(self, **values):
        self.results.append(values)

    def add_output(self, path: Path):
        self.outputs.append(Path(path).name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "version": self.version,
            "config_digest": self.config_digest,
            "config": self.config,
            "timings": self.timings,
            "results": self.results,
            "outputs": self.outputs,
            "environment": {"workers": self.workers, "python": platform.python_version()},
        }

    def write(self, out_dir: Path) -> Path:
        return write_json(Path(out_dir) / MANIFEST_NAME, self.to_dict())
