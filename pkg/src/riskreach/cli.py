"""Command line: simulate sessions, fit logs, run the HTTP service.

Exit codes: 0 success, 2 usage errors (bad flags or agent specs),
1 runtime failures (unreadable logs, malformed lines, fit errors).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from .agents import agent_from_spec
from .analysis import summarize_participant
from .io import read_session_jsonl, write_session_jsonl
from .models import BlrParams, CptParams
from .protocol import ORDERS, ProtocolConfig, simulate_session

AGENT_NAMES = ("always-ha1", "always-ha2", "threshold", "cpt", "blr")


@click.group()
def main():
    """Toolkit for the risk-sensitive reaching experiment."""


def _parse_floats(value: str, n: int, label: str) -> tuple[float, ...]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != n:
        raise click.BadParameter(f"{label} needs {n} comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise click.BadParameter(f"{label} needs numeric values")


@main.command()
@click.option("--agent", "agent_name", required=True, type=click.Choice(AGENT_NAMES),
              help="synthetic agent driving the session")
@click.option("--theta", default=None,
              help="cpt agent params: alpha,beta,effortCost,determinism")
@click.option("--blr", "blr_values", default=None, help="blr agent params: intercept,slope")
@click.option("--threshold", type=float, default=None, help="threshold agent cutoff")
@click.option("--order", type=click.Choice(ORDERS), default="ascending", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--participant", default="sim", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True))
def simulate(agent_name, theta, blr_values, threshold, order, seed, participant, out):
    """Simulate one full session and write its JSONL log."""
    kwargs = {}
    if theta is not None:
        values = _parse_floats(theta, 4, "--theta")
        try:
            kwargs["theta"] = CptParams(*values)
        except ValueError as exc:
            raise click.BadParameter(f"--theta: {exc}")
    if blr_values is not None:
        values = _parse_floats(blr_values, 2, "--blr")
        try:
            kwargs["blr"] = BlrParams(*values)
        except ValueError as exc:
            raise click.BadParameter(f"--blr: {exc}")
    if threshold is not None:
        kwargs["threshold"] = threshold
    try:
        agent = agent_from_spec(agent_name, **kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    config = ProtocolConfig(order=order)
    try:
        log = simulate_session(agent, config, seed=seed, participant_id=participant)
        path, sidecar = write_session_jsonl(log, out)
    except Exception as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {log.n_trials} trials to {path} (config sidecar: {sidecar})")


@main.command()
@click.option("--in", "inputs", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="session JSONL log; repeat for several participants")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="write the JSON report here instead of stdout")
@click.option("--starts", type=int, default=16, show_default=True,
              help="multi-start count for the likelihood fit")
@click.option("--chains", type=int, default=4, show_default=True)
@click.option("--warmup", type=int, default=500, show_default=True)
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--posterior/--no-posterior", default=True, show_default=True,
              help="sample the logistic posterior in addition to the MAP fit")
def fit(inputs, out, starts, chains, warmup, samples, seed, posterior):
    """Fit both choice models to one or more session logs."""
    docs = []
    for path in inputs:
        try:
            log = read_session_jsonl(path)
            summary = summarize_participant(
                log, n_starts=starts, seed=seed, chains=chains,
                warmup=warmup, samples=samples, posterior=posterior)
        except ValueError as exc:
            raise click.ClickException(f"{path}: {exc}")
        docs.append(summary.to_dict())
    payload = json.dumps({"participants": docs}, indent=2)
    if out is not None:
        Path(out).write_text(payload + "\n")
        click.echo(f"wrote {out}")
    else:
        click.echo(payload)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="session log directory; defaults to $RISKREACH_DATA_DIR "
                   "or ./riskreach-data")
def serve(host, port, data_dir):
    """Run the interactive session service over HTTP."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir or os.environ.get("RISKREACH_DATA_DIR"))
    uvicorn.run(app, host=host, port=port)
