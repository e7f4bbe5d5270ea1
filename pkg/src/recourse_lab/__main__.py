#!/usr/bin/env python
"""Command-line interface for Recourse Lab."""

import sys

import click
from rich.console import Console

from recourse_lab.cli.commands import (
    gen_command,
    run_command,
    sweep_command,
    verify_command,
)
from recourse_lab.config.schema import FAMILIES
from recourse_lab.utils.logger import configure_logging

console = Console()

ALGORITHMS = ("tas", "lgreedy", "dh", "greedy")
PROBLEMS = ("is", "vc", "matching", "fractional-matching")


def algorithm_options(func):
    """Options that choose and parametrise the algorithm."""
    options = [
        click.option(
            "--algo", type=click.Choice(ALGORITHMS), help="Algorithm to run"
        ),
        click.option(
            "--problem", type=click.Choice(PROBLEMS), help="Problem the algorithm solves"
        ),
        click.option("--t", "t", help="Target ratio, exact (e.g. 2.598 or 3/2)"),
        click.option("--L", "L", type=int, help="L-Greedy augmenting path parameter"),
        click.option(
            "--yardstick",
            type=click.Choice(["exact", "greedy"]),
            help="Reference solution of target-and-switch",
        ),
        click.option(
            "--order",
            type=click.Choice(["me1-first", "recourse-first"]),
            help="Duo-Halve tie-break order",
        ),
        click.option(
            "--monitor",
            type=click.Choice(["on", "off"]),
            help="Enable or disable every runtime monitor",
        ),
        click.option(
            "--config", "-c", type=click.Path(exists=True), help="Path to configuration file"
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def instance_options(func):
    """Options that describe a generated instance."""
    options = [
        click.option("--family", type=click.Choice(FAMILIES), help="Generator family"),
        click.option("--n", "n", type=int, help="Vertices (random) or path size (path)"),
        click.option("--p", "p", type=float, help="Edge probability (random)"),
        click.option("--k", "k", type=int, help="Edges of the triangle fan"),
        click.option("--rounds", type=int, help="Repeated pairs of the vertex cover gadget"),
        click.option("--switches", type=int, help="Switch budget of the bipartite adversary"),
        click.option("--budget", type=int, help="Event budget of adaptive adversaries"),
        click.option("--seed", type=int, help="Random seed"),
        click.option(
            "--arrival",
            type=click.Choice(["vertex", "edge"]),
            help="Arrival model of random streams",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _split(kwargs):
    algorithm = {
        key: kwargs.pop(key) for key in ("algo", "problem", "t", "L", "yardstick", "order")
    }
    instance = {
        key: kwargs.pop(key)
        for key in ("family", "n", "p", "k", "rounds", "switches", "budget", "seed")
    }
    instance["model"] = kwargs.pop("arrival")
    return algorithm, instance


@click.group()
@click.version_option()
@click.option("--verbose", "-v", is_flag=True, help="Log algorithm decisions")
def cli(verbose):
    """Recourse Lab.

    Run online graph algorithms that may revise earlier decisions, and check
    their competitive ratio and recourse against the known bounds.
    """
    configure_logging("DEBUG" if verbose else None)


@cli.command()
@click.option(
    "--family",
    type=click.Choice([f for f in FAMILIES if f != "bipartite-is"]),
    required=True,
    help="Generator family",
)
@click.option("--n", "n", type=int, default=10, help="Vertices (random) or path size (path)")
@click.option("--p", "p", type=float, default=0.3, help="Edge probability (random)")
@click.option("--k", "k", type=int, default=3, help="Edges of the triangle fan")
@click.option("--rounds", type=int, default=0, help="Repeated pairs of the vertex cover gadget")
@click.option(
    "--model",
    type=click.Choice(["vertex", "edge"]),
    default="vertex",
    help="Arrival model of random streams",
)
@click.option("--seed", type=int, default=0, help="Random seed")
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True, help="JSONL output")
def gen(family, n, p, k, rounds, model, seed, out):
    """Generate an instance as a JSONL event stream."""
    gen_command(family, out, n=n, p=p, k=k, rounds=rounds, model=model, seed=seed)


@cli.command()
@click.option(
    "--instance",
    type=click.Path(exists=True, dir_okay=False),
    help="JSONL event stream to replay",
)
@instance_options
@algorithm_options
@click.option("--label", help="Report label")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="JSON report output")
def run(instance, monitor, config, label, out, **kwargs):
    """Run an algorithm on an instance and report ratio and recourse."""
    algorithm, instance_flags = _split(kwargs)
    instance_flags["path"] = instance
    run_command(algorithm, instance_flags, monitor, config, out, label)


@cli.command()
@click.argument("report", type=click.Path(exists=True, dir_okay=False))
def verify(report):
    """Check REPORT against the bounds of its algorithm."""
    verify_command(report)


@cli.command()
@click.option(
    "--grid",
    "-g",
    multiple=True,
    required=True,
    help="KEY=v1,v2,...; a value @KEY copies another key of the same row",
)
@instance_options
@algorithm_options
@click.option("--workers", "-w", type=int, default=1, help="Worker processes")
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True, help="CSV output")
def sweep(grid, monitor, config, workers, out, **kwargs):
    """Run a parameter grid and write one CSV row per point."""
    algorithm, instance_flags = _split(kwargs)
    sweep_command(grid, out, algorithm, instance_flags, monitor, config, workers)


def main():
    """Run the CLI application."""
    try:
        cli()
    except Exception as e:
        console.print(f"[bold red]Error:[/bold red] {str(e)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
