"""Command-line surface: validate, run, plan, and serve."""

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from dptab.accountant import BudgetExceededError, BudgetLedger, NeighborModel
from dptab.config import load_run_config
from dptab.engine import run_pipeline
from dptab.errors import EXIT_BUDGET_EXCEEDED, ValidationFailure, exit_code_for
from dptab import io, planner
from dptab.validation import validate_inputs


@click.group()
def main():
    """Differentially private household type and tenure tabulations."""


def _fail_validation(error: ValidationFailure):
    # Failure details go to the operator's console only; nothing is released.
    click.echo(f"validation failed: {error}", err=True)
    sys.exit(exit_code_for(error))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def validate(config_path):
    """Validates the configuration and all declared input files."""
    try:
        config = load_run_config(config_path)
        bundle = validate_inputs(config)
    except ValidationFailure as error:
        _fail_validation(error)
    click.echo(
        f"ok: {len(bundle.records)} household records, "
        f"{len(bundle.t01001)} population groups with counts, "
        f"{len(bundle.levels)} levels"
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--output-dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="Override the config master seed.")
@click.option(
    "--workers",
    type=int,
    default=0,
    help="Thread count for parallel noise generation; 0 runs serially.",
)
@click.option(
    "--unsafe-noiseless",
    is_flag=True,
    help="Test-only oracle mode: exact counts, watermarked output, no privacy.",
)
def run(config_path, output_dir, seed, workers, unsafe_noiseless):
    """Runs the full pipeline for the configured region."""
    try:
        config = load_run_config(config_path)
        bundle = validate_inputs(config)
    except ValidationFailure as error:
        _fail_validation(error)

    ledger = BudgetLedger(float(config.total_budget), NeighborModel.UNBOUNDED)
    master_seed = config.master_seed if seed is None else seed
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 0 else None
    try:
        result = run_pipeline(
            records=bundle.records,
            levels=bundle.levels,
            geo_entities=bundle.geo_entities,
            iteration_spec=bundle.iteration_spec,
            t01001=bundle.t01001,
            ledger=ledger,
            seed=master_seed,
            region=config.region,
            race_multiplicity=config.race_multiplicity,
            noiseless=unsafe_noiseless,
            executor=executor,
        )
    except BudgetExceededError as error:
        click.echo(f"aborted, no output written: {error}", err=True)
        sys.exit(EXIT_BUDGET_EXCEEDED)
    finally:
        if executor is not None:
            executor.shutdown()

    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tab_path = out / "tabulations.csv"
    acct_path = out / "accounting.json"
    tmp = tab_path.with_suffix(".csv.tmp")
    io.write_tabulations(tmp, result)
    os.replace(tmp, tab_path)
    io.write_accounting(acct_path, result, master_seed)
    if unsafe_noiseless:
        click.echo("WARNING: noiseless oracle mode; output is watermarked", err=True)
    click.echo(f"wrote {len(result.rows)} rows to {tab_path}")
    click.echo(
        f"privacy loss: {result.accounting['total_loss_unbounded']:.6g} unbounded / "
        f"{result.accounting['total_loss_bounded']:.6g} bounded zCDP"
    )


@main.command()
@click.option(
    "--request",
    "request_path",
    required=True,
    type=click.Path(exists=True, allow_dash=True),
    help="Plan request JSON ('-' reads stdin).",
)
@click.option("--output", type=click.Path(), default=None)
def plan(request_path, output):
    """Evaluates a budget/error what-if request."""
    if request_path == "-":
        raw = json.load(sys.stdin)
    else:
        raw = json.loads(Path(request_path).read_text())
    try:
        request = planner.plan_request_from_dict(raw)
        result = planner.evaluate_plan(request)
    except planner.PlanError as error:
        click.echo(json.dumps({"errors": error.errors}, indent=2), err=True)
        sys.exit(2)
    text = json.dumps(planner.plan_result_to_dict(result), indent=2)
    if output:
        Path(output).write_text(text + "\n")
    else:
        click.echo(text)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8008)
def serve(host, port):
    """Hosts the JSON planning service consumed by the tuning UI."""
    import uvicorn

    from dptab.service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
