"""Experiment configuration: one dataclass, JSON-loadable, hard caps.

Oversized requests are refused outright rather than silently truncated;
the caps protect against accidental table blowups, not against users who
edit the source.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

KINDS = ("predictor", "optimizer", "threshold", "gprops", "decoder", "condenser")

_CAPS = {
    "n": 32,
    "m": 8,
    "instances": 500,
    "trials": 5000,
    "mc_trials": 2_000_000,
    "runs": 20_000,
    "samples": 1_000_000,
    "iterations": 64,
}


@dataclass
class ExperimentConfig:
    """Knobs for one suite run; unused fields are ignored by other suites."""

    kind: str
    seed: int
    out: str = "reports"
    plots: bool = False
    n: int = 8
    m: int = 2
    k: float | None = None
    instances: int = 20
    trials: int = 200
    mc_trials: int = 100_000
    runs: int = 1000
    samples: int = 10_000
    delta: float = 0.05
    gap: int = 3
    iterations: int = 2
    list_size_mode: str = "declared"
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown suite kind {self.kind!r}; expected one of {KINDS}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        for name, cap in _CAPS.items():
            value = getattr(self, name)
            if value is not None and value > cap:
                raise ValueError(f"{name}={value} exceeds the configured cap {cap}")
        if not (0 < self.delta <= 0.25):
            raise ValueError("delta must lie in (0, 0.25]")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> list["ExperimentConfig"]:
        """Load one config object or a list of them from a JSON file."""
        data = json.loads(Path(path).read_text())
        items = data if isinstance(data, list) else [data]
        return [cls.from_dict(item) for item in items]
