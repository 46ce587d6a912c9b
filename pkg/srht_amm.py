#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Randomized matrix multiplication: rotate with a signed Hadamard, sample columns.

Subcommands sketch a product, evaluate the error bounds, and run seeded Monte
Carlo checks of them. Exit codes: 0 success, 1 criteria violated, 2 usage or
configuration error, 3 I/O or parse error.
"""

import functools
import logging
import math
import sys
import typing

import click
import rich.progress
import yaml
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

import experiments
import generators
from errors import ConvergenceError, DomainError, MatrixParseError
from experiments import ExperimentConfig

EXIT_VIOLATED = 1
EXIT_IO = 3
# config file keys spelled like the flags
FLAG_ALIASES = {"a": "a_path", "b": "b_path", "gen": "generator", "da": "d_a", "db": "d_b"}

console = Console()
error_console = Console(stderr=True)


def load_config_file(path: str) -> typing.Dict[str, typing.Any]:
    """Reads option defaults from a YAML mapping or from key=value lines.

    Keys are flag names without the leading dashes (a, gen, t-grid, ...);
    dashes and underscores are interchangeable.
    """
    with open(path, "r", encoding="utf-8") as stream:
        lines = stream.read().splitlines()
    # key=value lines become YAML "key: value" lines
    text = "\n".join(
        line.replace("=", ": ", 1)
        if "=" in line.split(":", 1)[0] and not line.lstrip().startswith("#")
        else line
        for line in lines
    )
    loaded = yaml.safe_load(text) or {}
    if not isinstance(loaded, dict):
        raise click.BadParameter(f"{path} must hold a mapping of option names to values")
    values = {}
    for key, value in loaded.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(item) for item in value)
        name = str(key).replace("-", "_")
        values[FLAG_ALIASES.get(name, name)] = value
    return values


def install_config(ctx: click.Context, _param: click.Parameter, path: typing.Optional[str]):
    """Eager callback: config file values become defaults, so flags still win."""
    if path:
        try:
            ctx.default_map = {**(ctx.default_map or {}), **load_config_file(path)}
        except (OSError, yaml.YAMLError) as err:
            raise click.BadParameter(str(err)) from err
    return path


def parse_t_grid(_ctx: click.Context, _param: click.Parameter, value: typing.Any):
    """Comma-separated positive reals; "ln:X" stands for ln(X)."""
    if value is None or isinstance(value, tuple):
        return value
    grid = []
    for item in str(value).split(","):
        item = item.strip()
        try:
            grid.append(math.log(float(item[3:])) if item.startswith("ln:") else float(item))
        except ValueError as err:
            raise click.BadParameter(f"bad t value {item!r}") from err
    return tuple(grid)


OPTIONS = [
    click.option("--config", "config_path", type=click.Path(dir_okay=False), is_eager=True,
                 expose_value=False, callback=install_config,
                 help="YAML or key=value file of option defaults."),
    click.option("--a", "a_path", type=click.Path(dir_okay=False), help="Matrix file for A."),
    click.option("--b", "b_path", type=click.Path(dir_okay=False), help="Matrix file for B."),
    click.option("--gen", "generator", type=click.Choice(sorted(generators.GENERATORS)),
                 default="gaussian", show_default=True, help="Generator for missing matrices."),
    click.option("--da", "d_a", type=click.IntRange(min=1), default=16, show_default=True),
    click.option("--db", "d_b", type=click.IntRange(min=1), default=16, show_default=True),
    click.option("--m", type=click.IntRange(min=1), default=256, show_default=True,
                 help="Shared column count of generated matrices."),
    click.option("--rank", type=click.IntRange(min=1), default=4, show_default=True,
                 help="Inner dimension (low-rank) or spike count (spiky)."),
    click.option("--n", type=click.IntRange(min=1), default=None, help="Sampled column pairs."),
    click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True),
    click.option("--delta", type=float, default=0.1, show_default=True),
    click.option("--eps", type=float, default=None, help="Target relative error."),
    click.option("--seed", type=click.IntRange(min=0, max=2**64 - 1), default=0,
                 show_default=True, help="Base seed; trial i uses seed + i."),
    click.option("--gen-seed", type=click.IntRange(min=0, max=2**64 - 1), default=None,
                 help="Generator seed (defaults to --seed)."),
    click.option("--out", type=click.Path(dir_okay=False), default=None,
                 help="CSV or matrix output path."),
    click.option("--t-grid", callback=parse_t_grid, default="ln:20,ln:100", show_default=True,
                 help="Comma-separated t values for verify-lemma2."),
    click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True),
    click.option("--k", type=float, default=None, help="Stable rank k (bound only)."),
    click.option("--identity", is_flag=True, help="Replace the rotation by the identity."),
]


def experiment_options(func):
    for option in reversed(OPTIONS):
        func = option(func)
    return func


def guarded(func):
    """Maps library errors onto exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (MatrixParseError, OSError) as err:
            error_console.print(f"[red]error:[/red] {err}")
            sys.exit(EXIT_IO)
        except ConvergenceError as err:
            error_console.print(f"[red]error:[/red] {err}")
            sys.exit(EXIT_VIOLATED)
        except DomainError as err:
            raise click.UsageError(str(err)) from err

    return wrapper


def tracker(trials: int) -> experiments.Tracker:
    def track(items, description):
        return rich.progress.track(
            items, description=description, total=trials, console=error_console, transient=True
        )

    return track


def finish(passed: bool) -> None:
    if not passed:
        sys.exit(EXIT_VIOLATED)


def key_value_table(title: str, rows: typing.Iterable[typing.Tuple[str, typing.Any]]) -> Table:
    table = Table(title=title, show_header=False)
    table.add_column(justify="left")
    table.add_column(justify="right")
    for key, value in rows:
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    return table


@click.group()
@click.option("--verbose", is_flag=True, help="Log debug output.")
def main(verbose: bool):
    """Sketch AB^T and check its error bounds."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=error_console)],
    )


@main.command()
@experiment_options
@guarded
def sketch(**options):
    """Write one sketched product to --out and time its two phases."""
    summary = experiments.run_sketch(ExperimentConfig(mode="sketch", **options))
    console.print(key_value_table("sketch", [
        ("n", summary.n),
        ("m (padded)", summary.m_padded),
        ("rotation seconds", summary.rotation_seconds),
        ("accumulation seconds", summary.accumulation_seconds),
        ("relative spectral error", summary.rel_spectral_error),
        ("relative Frobenius error", summary.rel_frobenius_error),
    ]))


@main.command()
@experiment_options
@guarded
def bound(**options):
    """Print the (1 - delta) error bound and the sample size needed for --eps."""
    summary = experiments.run_bound(ExperimentConfig(mode="bound", **options))
    rows: typing.List[typing.Tuple[str, typing.Any]] = [
        ("k", summary.inputs.k),
        ("m (padded)", summary.inputs.m),
        ("delta", summary.inputs.delta),
    ]
    if summary.result is not None:
        rows += [("n", summary.inputs.n), ("bound", summary.result.relative_error_bound)]
    if summary.required is not None:
        rows += [("eps", summary.eps), ("required n", summary.required)]
    console.print(key_value_table("bound", rows))


@main.command(name="verify-theorem1")
@experiment_options
@guarded
def verify_theorem1(**options):
    """Monte Carlo check that errors exceed the bound in at most a delta fraction."""
    config = ExperimentConfig(mode="verify-theorem1", **options)
    summary = experiments.run_verify_theorem1(config, track=tracker(config.trials))
    if config.out:
        experiments.write_records(config.out, summary.records)
    console.print(key_value_table("verify-theorem1", [
        ("k", summary.k),
        ("m (padded)", summary.m_padded),
        ("n", summary.n),
        ("delta", summary.delta),
        ("bound", summary.bound),
        ("trials", len(summary.records)),
        ("exceedance fraction", summary.exceedance_fraction),
        ("conditional-bound exceedances", summary.conditional_exceedances),
        ("mean error", summary.mean_error),
        *((f"error {level}", value) for level, value in summary.quantiles.items()),
        ("mean Frobenius error", summary.mean_frobenius_error),
        ("result", "PASS" if summary.passed else "FAIL"),
    ]))
    finish(summary.passed)


@main.command(name="verify-lemma2")
@experiment_options
@guarded
def verify_lemma2(**options):
    """Monte Carlo check of the per-column mass bound for each t in --t-grid."""
    config = ExperimentConfig(mode="verify-lemma2", **options)
    summary = experiments.run_verify_lemma2(config, track=tracker(config.trials))
    if config.out:
        experiments.write_records(config.out, summary.records)
    console.print(key_value_table("verify-lemma2", [
        ("k_Z", summary.k_z),
        ("m (padded)", summary.m_padded),
        ("unrotated max column mass", summary.baseline_max_col_sqnorm),
    ]))
    table = Table(title="exceedance by t")
    for column in ("t", "threshold", "exceeded", "fraction", "e^-t", "allowed", "result"):
        table.add_column(column, justify="right")
    for row in summary.rows:
        table.add_row(
            f"{row.t:.4f}", f"{row.threshold:.6g}", str(row.exceedances),
            f"{row.exceedance_fraction:.4f}", f"{row.tail_probability:.4f}",
            f"{row.allowed_fraction:.4f}", "PASS" if row.passed else "FAIL",
        )
    console.print(table)
    finish(summary.passed)


@main.command()
@experiment_options
@guarded
def coherence(**options):
    """mu of the raw pair and across rotated draws, against the high-probability threshold."""
    config = ExperimentConfig(mode="coherence", **options)
    summary = experiments.run_coherence(config, track=tracker(config.trials))
    if config.out:
        experiments.write_records(config.out, summary.records)
    console.print(key_value_table("coherence", [
        ("k", summary.k),
        ("m (padded)", summary.m_padded),
        ("baseline mu", summary.baseline.mu),
        ("baseline k_A", summary.baseline.k_a),
        ("baseline k_B", summary.baseline.k_b),
        ("rotated mu min", summary.mu_min),
        ("rotated mu median", summary.mu_median),
        ("rotated mu max", summary.mu_max),
        ("threshold", summary.threshold),
        ("draws above threshold", summary.above_threshold),
        ("result", "PASS" if summary.passed else "FAIL"),
    ]))
    finish(summary.passed)


@main.command()
@experiment_options
@guarded
def moments(**options):
    """Exact moment inequalities on a small instance (m <= 64)."""
    summary = experiments.run_moments(ExperimentConfig(mode="moments", **options))
    report = summary.report
    console.print(key_value_table("moments", [
        ("mu", report.mu),
        ("k_A", report.k_a),
        ("k_B", report.k_b),
        ("||M||", report.m_norm),
        ("max |E[X] - M|", summary.mean_gap),
        *(
            [("max |E[estimate] - QR^T|", summary.unbiasedness_gap)]
            if summary.unbiasedness_gap is not None
            else []
        ),
    ]))
    table = Table(title="inequalities")
    for column in ("inequality", "lhs", "rhs", "result"):
        table.add_column(column, justify="right")
    for check in summary.checks:
        table.add_row(check.name, f"{check.lhs:.9g}", f"{check.rhs:.9g}",
                      "PASS" if check.holds else "FAIL")
    console.print(table)
    finish(summary.passed)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
