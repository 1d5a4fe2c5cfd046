"""Runtime configuration: JSON file plus flag overrides, flags winning."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import DataError


@dataclass
class Config:
    corpus: Optional[Path] = None
    questions: Optional[Path] = None
    data_dir: Path = Path("data")
    k1: float = 1.2
    b: float = 0.75
    top_k: int = 10
    bind: str = "127.0.0.1:8000"
    seed: int = 0
    stopwords: bool = False
    stemming: bool = False
    text_search_hits: int = 3  # BM25 hits summed per option by the text-search solver
    overlap_hits: int = 5      # stem hits pooled by the overlap solver
    ui_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.k1 <= 0:
            raise DataError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise DataError(f"b must be in [0, 1], got {self.b}")
        if self.top_k < 1:
            raise DataError(f"top_k must be >= 1, got {self.top_k}")
        for name in ("corpus", "questions", "data_dir", "ui_dir"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, Path(value))

    def require_paths(self, *names: str) -> None:
        """Check the named paths are configured and exist on disk."""
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise DataError(f"config is missing required path: {name}")
            if name != "data_dir" and not Path(value).exists():
                raise DataError(f"configured {name} path does not exist: {value}")

    def host_port(self) -> tuple[str, int]:
        host, _, port = self.bind.rpartition(":")
        if not host or not port.isdigit():
            raise DataError(f"bind must look like HOST:PORT, got {self.bind!r}")
        return host, int(port)


def load_config(path: Optional[Path] = None, **overrides) -> Config:
    """Build a Config from an optional JSON file; non-None overrides win."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {path}: invalid JSON ({exc.msg})") from exc
        known = {f.name for f in fields(Config)}
        unknown = set(data) - known
        if unknown:
            raise DataError(f"config file {path}: unknown keys {sorted(unknown)}")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return Config(**data)
