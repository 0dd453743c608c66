"""Command-line front end: one subcommand per suite plus batch configs.

Each invocation runs a suite, prints one PASS/FAIL line per report row,
writes `<out>/<kind>-<seed>.csv` with a JSON meta sidecar, and exits
nonzero if any row failed. All randomness comes from --seed.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import KINDS, ExperimentConfig
from .report import plot_decoder_rates, plot_success_vs_rounds, write_csv, write_meta
from .suites import run_suite


def _execute(cfg: ExperimentConfig) -> bool:
    rows, meta = run_suite(cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{cfg.kind}-{cfg.seed}.csv"
    write_csv(rows, csv_path)
    write_meta(csv_path, meta)
    for row in rows:
        click.echo(row.line())
    if cfg.plots:
        if cfg.kind == "decoder" and "plot_points" in meta:
            plot_decoder_rates(meta["plot_points"], out_dir / f"decoder-{cfg.seed}.png")
        if cfg.kind == "predictor" and "plot_points" in meta:
            pts = meta["plot_points"]
            plot_success_vs_rounds(
                pts["points"], pts["floor"], out_dir / f"predictor-{cfg.seed}.png"
            )
    ok = all(r.passed for r in rows)
    click.echo(f"{'all rows pass' if ok else 'FAILURES present'} -> {csv_path}")
    return ok


def _common(fn):
    fn = click.option("--seed", type=int, required=True, help="master seed")(fn)
    fn = click.option("--out", default="reports", show_default=True, help="output directory")(fn)
    fn = click.option("--plots", is_flag=True, help="also write diagnostic plots")(fn)
    return fn


@click.group()
def main() -> None:
    """Numerical validation suites over explicit small distributions."""


@main.command()
@_common
@click.option("--instances", default=20, show_default=True)
@click.option("--mc-trials", default=100_000, show_default=True)
def predict(seed, out, plots, instances, mc_trials) -> None:
    """Rejection-predictor law and planted success floors."""
    cfg = ExperimentConfig(
        kind="predictor", seed=seed, out=out, plots=plots, instances=instances, mc_trials=mc_trials
    )
    sys.exit(0 if _execute(cfg) else 1)


@main.command()
@_common
@click.option("--instances", default=50, show_default=True)
@click.option("--identities", default=100, show_default=True, help="instances for the identity checks")
def optimize(seed, out, plots, instances, identities) -> None:
    """Threshold optimizer vs brute force, KKT residuals, identities."""
    cfg = ExperimentConfig(
        kind="optimizer", seed=seed, out=out, plots=plots, instances=instances,
        extra={"identities": identities},
    )
    sys.exit(0 if _execute(cfg) else 1)


@main.command()
@_common
@click.option("--runs", default=1000, show_default=True)
@click.option("--samples", default=10_000, show_default=True)
@click.option("--delta", default=0.05, show_default=True)
def threshold(seed, out, plots, runs, samples, delta) -> None:
    """Sampled threshold search: window rate and low-side safety."""
    cfg = ExperimentConfig(
        kind="threshold", seed=seed, out=out, plots=plots, runs=runs, samples=samples, delta=delta
    )
    sys.exit(0 if _execute(cfg) else 1)


@main.command()
@_common
def gprops(seed, out, plots) -> None:
    """Grid checks of the success-law helper functions."""
    sys.exit(0 if _execute(ExperimentConfig(kind="gprops", seed=seed, out=out, plots=plots)) else 1)


@main.command()
@_common
@click.option("--trials", default=200, show_default=True)
def decode(seed, out, plots, trials) -> None:
    """Hadamard list decoding rates in three noise regimes."""
    cfg = ExperimentConfig(kind="decoder", seed=seed, out=out, plots=plots, trials=trials)
    sys.exit(0 if _execute(cfg) else 1)


@main.command()
@_common
@click.option("--n", default=10, show_default=True)
@click.option("--k", default=5, show_default=True)
@click.option("--gap", default=3, show_default=True)
@click.option("--trials", default=2000, show_default=True)
@click.option("--iterations", default=2, show_default=True)
@click.option(
    "--list-size-mode",
    type=click.Choice(["declared", "conservative"]),
    default="declared",
    show_default=True,
)
def condense(seed, out, plots, n, k, gap, trials, iterations, list_size_mode) -> None:
    """Planted key recovery through the full inner-product reduction."""
    cfg = ExperimentConfig(
        kind="condenser", seed=seed, out=out, plots=plots, n=n, k=float(k), gap=gap,
        trials=trials, iterations=iterations, list_size_mode=list_size_mode,
    )
    sys.exit(0 if _execute(cfg) else 1)


@main.group()
def experiment() -> None:
    """Batch experiments from JSON config files."""


@experiment.command(name="run")
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
def experiment_run(config_file) -> None:
    """Run every experiment described in CONFIG_FILE (one object or a list)."""
    ok = True
    for cfg in ExperimentConfig.from_file(config_file):
        click.echo(f"== {cfg.kind} (seed={cfg.seed}) ==")
        ok = _execute(cfg) and ok
    sys.exit(0 if ok else 1)


@main.command(name="kinds")
def kinds() -> None:
    """List the available suite kinds."""
    for kind in KINDS:
        click.echo(kind)


if __name__ == "__main__":
    main()
