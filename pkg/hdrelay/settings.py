from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, Mapping, Optional

from .errors import ConfigError


# Output formats for tables. Transcripts are JSON lines under "json".
OutputFormat = Literal["csv", "json"]

COMMANDS = ("capacity", "region", "tree", "butterfly", "simulate", "counting", "single-relay", "appendix")
CODES = ("table1", "table2", "single_relay")


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a CLI run needs.

    Plain data; the same field names are used as keys in a JSON config file.
    """

    command: str = "capacity"

    # ----- Capacity sweeps (capacity, counting) -----
    m_list: tuple[int, ...] = (2, 3, 4, 5, 11, 21, 41, 101)
    q_list: tuple[int, ...] = (1, 2)
    tol: float = 1e-9

    # ----- Two-source region -----
    step: float = 0.01
    png: Optional[Path] = None

    # ----- Code simulation -----
    code: str = "table1"
    blocks: int = 4
    seed: int = 0
    messages: Optional[tuple[int, ...]] = None
    exhaustive: bool = False
    sequence_cap: int = 100_000
    codebooks: bool = False

    # Block length and relay budget for single_relay codes and counting
    n: Optional[int] = None
    n1: Optional[int] = None
    # None: the command picks (2 for single_relay codes, the tree's own q or 1 for tree and butterfly)
    q: Optional[int] = None

    # ----- Misc commands -----
    q_max: int = 100
    tree_path: Optional[Path] = None
    no_silence_detection: bool = False

    # ----- Output -----
    out: Optional[Path] = None
    output_format: OutputFormat = "csv"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if self.code not in CODES:
            raise ConfigError(f"unknown code {self.code!r}; expected one of {', '.join(CODES)}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be > 0, got {self.tol}")
        if not 0 < self.step <= 0.1:
            raise ConfigError(f"step must lie in (0, 0.1], got {self.step}")
        if self.blocks < 1:
            raise ConfigError(f"blocks must be >= 1, got {self.blocks}")
        if (self.q is not None and self.q < 1) or any(q < 1 for q in self.q_list):
            raise ConfigError("q must be >= 1")
        if any(m < 1 for m in self.m_list):
            raise ConfigError("m must be >= 1")
        if self.q_max < 1:
            raise ConfigError(f"q_max must be >= 1, got {self.q_max}")
        if self.sequence_cap < 1:
            raise ConfigError(f"sequence_cap must be >= 1, got {self.sequence_cap}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        return self

    def updated(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Copy with `overrides` applied; keys must be field names."""
        names = {f.name for f in dataclasses.fields(self)}
        unknown = sorted(set(overrides) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return dataclasses.replace(self, **{k: _coerce(k, v) for k, v in overrides.items()})


_TUPLES = ("m_list", "q_list", "messages")
_PATHS = ("png", "tree_path", "out")


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key in _TUPLES:
        try:
            return tuple(int(v) for v in value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a list of integers, got {value!r}") from None
    if key in _PATHS:
        return Path(value)
    return value


def load_run_config(path: Path, base: Optional[RunConfig] = None) -> RunConfig:
    """Read a JSON object whose keys mirror RunConfig fields and apply it over `base`."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return (base or RunConfig()).updated(data)
