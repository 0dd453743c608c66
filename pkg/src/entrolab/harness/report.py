"""Deterministic CSV report rows and optional plot emission.

Rows are written in a fixed column order with shortest round-trip float
formatting, so a rerun with the same master seed produces byte-identical
files. Anything time- or host-dependent goes to the .meta.json sidecar,
never into the CSV.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

COLUMNS = (
    "experiment_id",
    "seed",
    "n",
    "m",
    "k",
    "epsilon",
    "ell_or_l",
    "metric",
    "measured",
    "bound",
    "pass",
)


@dataclass(frozen=True)
class ReportRow:
    """One measurement: a metric value against its reference bound."""

    experiment_id: str
    seed: int
    metric: str
    measured: float | None
    bound: float | None
    passed: bool
    n: int | None = None
    m: int | None = None
    k: float | None = None
    epsilon: float | None = None
    ell_or_l: int | None = None

    def cells(self) -> list[str]:
        return [
            self.experiment_id,
            str(self.seed),
            _fmt_int(self.n),
            _fmt_int(self.m),
            _fmt_float(self.k),
            _fmt_float(self.epsilon),
            _fmt_int(self.ell_or_l),
            self.metric,
            _fmt_float(self.measured),
            _fmt_float(self.bound),
            "1" if self.passed else "0",
        ]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = [f"[{status}] {self.experiment_id} {self.metric}"]
        if self.measured is not None:
            parts.append(f"measured={_fmt_float(self.measured)}")
        if self.bound is not None:
            parts.append(f"bound={_fmt_float(self.bound)}")
        return " ".join(parts)


def _fmt_int(v: int | None) -> str:
    return "" if v is None else str(int(v))


def _fmt_float(v: float | None) -> str:
    if v is None:
        return ""
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def write_csv(rows: list[ReportRow], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(COLUMNS)]
    lines.extend(",".join(row.cells()) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def write_meta(csv_path: str | Path, meta: dict) -> Path:
    """Sidecar for values that may vary between reruns (timestamps etc)."""
    csv_path = Path(csv_path)
    payload = dict(meta)
    payload.setdefault("written_at", time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    side = csv_path.with_suffix(".meta.json")
    side.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return side


def plot_decoder_rates(points: list[tuple[float, float]], path: str | Path) -> Path:
    """Recovery rate as a function of the correct-minus-error margin."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, ys, "o-")
    ax.axhline(0.75, color="gray", ls="--", lw=1)
    ax.set_xlabel("margin c - e")
    ax.set_ylabel("recovery rate")
    ax.set_ylim(0, 1.05)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_success_vs_rounds(points: list[tuple[int, float]], floor: float, path: str | Path) -> Path:
    """Exact predictor success against the round budget, with its floor."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, ys, "o-", label="exact success")
    ax.axhline(floor, color="gray", ls="--", lw=1, label="floor")
    ax.set_xlabel("round budget")
    ax.set_ylabel("success probability")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
