from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, Optional, Tuple

import click

from . import catalog
from .errors import FracSubspaceError, NotInvariantError
from .examples import problem_spec
from .operators import format_system
from .problem_reader import read_problem
from .problem_writer import write_problem, write_samples
from .series import to_fraction
from .spec import DEFAULT_FRONTIER, PRIMARY_SUBSPACE, RESIDUAL_TOL, SAMPLE_FORMATS, SAMPLE_FRONTIER
from .tools import parse_grid, parse_settings
from .types import ProblemSpec, VerificationReport


class ConfigError(click.ClickException):
    """Bad options, unknown ids or invalid parameters."""
    exit_code = 2


class VerificationFailed(click.ClickException):
    exit_code = 1


@click.group()
@click.option("--verbose", "-v", count=True, help="Log progress (-v for INFO, -vv for DEBUG)")
def main(verbose: int):
    if verbose:
        logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s")


def _problem_options(fn):
    fn = click.option("--example", "example_id", help="Catalog id, see `fracsubspace list`")(fn)
    fn = click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
                      help="Problem JSON file (as written by `export`)")(fn)
    fn = click.option("--set", "settings", multiple=True, metavar="NAME=VALUE",
                      help="Parameter or free-constant override, repeatable")(fn)
    fn = click.option("--subspace", default=PRIMARY_SUBSPACE, show_default=True,
                      help="Which subspace of the problem to use")(fn)
    fn = click.option("--frontier", default=None, help="Series truncation frontier (rational)")(fn)
    return fn


def _frontier(text: Optional[str], default: Fraction) -> Fraction:
    if text is None:
        return default
    try:
        value = to_fraction(text)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"--frontier: {e}") from None
    if value <= 0:
        raise ConfigError(f"--frontier must be positive, got {value}")
    return value


def _load(example_id: Optional[str], spec_path: Optional[str], settings: Tuple[str, ...]
          ) -> Tuple[object, Dict, Dict]:
    """Problem (id or ProblemSpec), parameter overrides and free-constant bindings."""
    if (example_id is None) == (spec_path is None):
        raise ConfigError("give exactly one of --example or --spec")
    if spec_path is not None:
        problem, warnings_list = read_problem(spec_path)
        for w in warnings_list:
            click.echo(f"Warning: {w}", err=True)
        template: ProblemSpec = problem
    else:
        problem = example_id
        template = problem_spec(example_id)
    params, bindings = catalog.split_settings(template, parse_settings(settings))
    return problem, params, bindings


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except NotInvariantError as e:
        raise VerificationFailed(str(e))
    except FracSubspaceError as e:
        raise ConfigError(str(e))


def _echo_report(report: VerificationReport) -> None:
    click.echo(f"{report.example_id} [{report.subspace}]")
    for stage in report.stages:
        mark = "ok  " if stage.passed else "FAIL"
        click.echo(f"  {mark} {stage.name:<11} {stage.detail}")
    for w in report.warnings:
        click.echo(f"  Warning: {w}")
    click.echo(f"  => {'PASS' if report.passed else 'FAIL'}")


@click.command(name="list")
def list_entry():
    """List the catalog: id, provenance and title."""
    for eid, title, provenance in catalog.list_examples():
        click.echo(f"{eid:<18} {provenance:<28} {title}")


@click.command(name="verify")
@_problem_options
@click.option("--all", "verify_all", is_flag=True, default=False, help="Verify every catalog entry")
@click.option("--grid", "grid_items", multiple=True, metavar="VAR=MIN:MAX:COUNT", help="Sampling grid, repeatable")
@click.option("--tol", type=float, default=RESIDUAL_TOL, show_default=True, help="Residual tolerance")
@click.option("--workers", type=int, default=1, show_default=True, help="Processes for --all")
def verify_entry(example_id: Optional[str], spec_path: Optional[str], settings: Tuple[str, ...], subspace: str,
                 frontier: Optional[str], verify_all: bool, grid_items: Tuple[str, ...], tol: float, workers: int):
    """Replay invariance, reduction, residual and solver checks; exit 1 if any stage fails."""
    if tol <= 0:
        raise ConfigError(f"--tol must be positive, got {tol}")
    front = _frontier(frontier, DEFAULT_FRONTIER)
    grid = _guard(parse_grid, grid_items)
    if verify_all:
        if example_id or spec_path or settings or grid_items:
            raise ConfigError("--all takes no problem, --set or --grid options")
        reports = _guard(catalog.verify_many, workers=max(1, workers), frontier=front, tol=tol)
        reports = list(reports.values())
    else:
        problem, params, bindings = _guard(_load, example_id, spec_path, settings)
        reports = [_guard(catalog.verify, problem, params, bindings, subspace=subspace, grid=grid,
                          frontier=front, tol=tol)]
    for report in reports:
        _echo_report(report)
    failed = [r.example_id for r in reports if not r.passed]
    if failed:
        raise VerificationFailed(f"verification failed: {', '.join(failed)}")


@click.command(name="reduce")
@_problem_options
def reduce_entry(example_id: Optional[str], spec_path: Optional[str], settings: Tuple[str, ...], subspace: str,
                 frontier: Optional[str]):
    """Print the reduced FODE system, one equation per line."""
    problem, params, bindings = _guard(_load, example_id, spec_path, settings)
    system = _guard(catalog.reduce_problem, problem, params, bindings, subspace=subspace,
                    frontier=_frontier(frontier, DEFAULT_FRONTIER))
    for line in format_system(system):
        click.echo(line)


@click.command(name="solve")
@_problem_options
@click.option("--terms", type=int, default=8, show_default=True, help="Series terms to print per unknown")
def solve_entry(example_id: Optional[str], spec_path: Optional[str], settings: Tuple[str, ...], subspace: str,
                frontier: Optional[str], terms: int):
    """Solve the reduced system and print each K as a series in t."""
    problem, params, bindings = _guard(_load, example_id, spec_path, settings)
    system, solutions = _guard(catalog.solve, problem, params, bindings, subspace=subspace,
                               frontier=_frontier(frontier, DEFAULT_FRONTIER))
    for line in format_system(system):
        click.echo(line)
    if not solutions:
        raise VerificationFailed("no solution found")
    for i, sol in enumerate(solutions, start=1):
        click.echo(f"solution {i}" + (f" (free constants {', '.join(sol.free_constants)})"
                                      if sol.free_constants else ""))
        for u in system.unknowns:
            tag = sol.tags.get(u, "")
            click.echo(f"  {u} = {sol.series[u].to_text(max_terms=terms)}" + (f"  [{tag}]" if tag else ""))


@click.command(name="sample")
@_problem_options
@click.option("--grid", "grid_items", multiple=True, metavar="VAR=MIN:MAX:COUNT", help="Sampling grid, repeatable")
@click.option("--out", "out_path", default="-", show_default=True, help="Output file, '-' for stdout")
@click.option("--format", "fmt", type=click.Choice(SAMPLE_FORMATS), default="csv", show_default=True)
@click.option("--force", is_flag=True, default=False, help="Skip the invariance and residual pre-check")
def sample_entry(example_id: Optional[str], spec_path: Optional[str], settings: Tuple[str, ...], subspace: str,
                 frontier: Optional[str], grid_items: Tuple[str, ...], out_path: str, fmt: str, force: bool):
    """Evaluate the known solution on a grid and write it as CSV or XLSX."""
    problem, params, bindings = _guard(_load, example_id, spec_path, settings)
    frame = _guard(catalog.sample, problem, params, bindings, subspace=subspace, grid=_guard(parse_grid, grid_items),
                   frontier=_frontier(frontier, SAMPLE_FRONTIER), force=force)
    _guard(write_samples, frame, out_path, fmt)
    if out_path != "-":
        click.echo(f"Wrote {len(frame)} rows to {out_path}", err=True)


@click.command(name="export")
@click.option("--example", "example_id", required=True, help="Catalog id")
@click.option("--set", "settings", multiple=True, metavar="NAME=VALUE", help="Override, repeatable")
@click.option("--out", "out_path", default="-", show_default=True, help="Output JSON file, '-' for stdout")
def export_entry(example_id: str, settings: Tuple[str, ...], out_path: str):
    """Write a catalog problem, bound to the given values, as JSON for --spec."""
    problem, params, bindings = _guard(_load, example_id, None, settings)
    spec = _guard(catalog.bound_spec, problem, params, bindings)
    write_problem(spec, out_path)
    if out_path != "-":
        click.echo(f"Wrote problem to {out_path}", err=True)


main.add_command(list_entry)
main.add_command(verify_entry)
main.add_command(reduce_entry)
main.add_command(solve_entry)
main.add_command(sample_entry)
main.add_command(export_entry)


if __name__ == "__main__":
    main()
