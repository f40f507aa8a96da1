"""Command-line entry points: check, explain, simulate, serve, audit."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .alpha import AlphaConfig
from .contest import parse_ballot_file
from .engine import (AuditConfig, Decision, WeightScheme, audit_new,
                     audit_observe, tune_from_cvrs)
from .requirements import assorter_mean, build_pool
from .simulate import (permute_labels, run_replications, write_results_csv,
                       write_summary_json)
from .tabulation import enumerate_alt_orders, tabulate


def _load_contest(path: str, reported_winner: str | None = None):
    data = Path(path).read_bytes()
    fmt = "aggregated_csv" if path.endswith((".agg", ".agg.csv")) else "csv_ranks"
    try:
        return parse_ballot_file(data, fmt, reported_winner)
    except ValueError:
        if fmt == "csv_ranks":
            return parse_ballot_file(data, "aggregated_csv", reported_winner)
        raise


@click.group()
def main():
    """Risk-limiting audits for IRV contests."""


@main.command()
@click.argument("ballots", type=click.Path(exists=True))
def check(ballots):
    """Print the elimination order, per-round tallies, and tie events."""
    contest = _load_contest(ballots)
    result = tabulate(contest)
    names = contest.candidate_names()
    click.echo("candidates: " + ",".join(names))
    click.echo(f"ballots: {contest.num_ballots}")
    for rnd, counts in enumerate(result.round_tallies):
        row = "  ".join(f"{names[c]}={counts[c]}" for c in sorted(counts))
        click.echo(f"round {rnd}: {row}  -> eliminate {names[result.order[rnd]]}")
    for rnd, tied, eliminated in result.tie_events:
        tied_names = ",".join(names[c] for c in tied)
        click.echo(f"tie in round {rnd}: {{{tied_names}}} -> {names[eliminated]}")
    click.echo("elimination order: " + " ".join(names[c] for c in result.order))
    click.echo("winner: " + names[result.winner])


@main.command()
@click.argument("ballots", type=click.Path(exists=True))
@click.option("--reported-winner", default=None,
              help="Candidate name; defaults to the tabulated winner.")
def explain(ballots, reported_winner):
    """Dump the pooled requirement set with true assorter means."""
    contest = _load_contest(ballots, reported_winner)
    names = contest.candidate_names()
    alt_orders = enumerate_alt_orders(contest.num_candidates,
                                      contest.reported_winner)
    pool = build_pool(alt_orders)
    click.echo(f"reported winner: {names[contest.reported_winner]}")
    click.echo(f"alt-orders: {alt_orders.m}   pooled requirements: {pool.size}")
    for req in pool.requirements:
        standing = ",".join(names[c] for c in sorted(req.standing))
        mean = assorter_mean(req, contest.ballots)
        click.echo(f"DB {names[req.i]}>{names[req.j]} | S={{{standing}}} "
                   f"| true_mean={mean:.6f}")


@main.command()
@click.option("--ballots", required=True, type=click.Path(exists=True))
@click.option("--reported-winner", required=True)
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--scheme", default="largest", show_default=True,
              type=click.Choice(["linear", "quadratic", "largest", "fixed"]))
@click.option("--d", "d", default=50, show_default=True)
@click.option("--eta0", default=0.52, show_default=True)
@click.option("--update-every", default=25, show_default=True)
@click.option("--reps", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--cvrs", default=None, type=click.Path(exists=True),
              help="Ballot file of reported CVRs used to tune weights and eta0.")
@click.option("--fixed-weights", is_flag=True,
              help="Keep the CVR-derived starting weights fixed (Fixed scheme).")
@click.option("--permute-labels", "permutation", default=None,
              help="Comma-separated candidate-id permutation applied to the CVRs.")
@click.option("--out", required=True, type=click.Path())
def simulate(ballots, reported_winner, alpha, scheme, d, eta0, update_every,
             reps, seed, cvrs, fixed_weights, permutation, out):
    """Monte-Carlo audit replications; writes results.csv and summary.json."""
    contest = _load_contest(ballots, reported_winner)
    if fixed_weights:
        scheme = "fixed"
    config = AuditConfig(alpha=alpha, scheme=WeightScheme(scheme),
                         update_every=update_every,
                         alpha_config=AlphaConfig(eta0=eta0, d=d))
    tuning = None
    if cvrs:
        cvr_contest = _load_contest(cvrs)
        if cvr_contest.candidate_names() != contest.candidate_names():
            raise click.ClickException("CVR roster does not match ballot roster")
        cvr_ballots = list(cvr_contest.ballots)
        if permutation:
            perm = [int(x) for x in permutation.split(",")]
            cvr_ballots = permute_labels(cvr_ballots, perm)
        alt_orders = enumerate_alt_orders(contest.num_candidates,
                                          contest.reported_winner)
        pool = build_pool(alt_orders)
        tuning = tune_from_cvrs(cvr_ballots, pool, alt_orders, config)
    elif fixed_weights:
        raise click.ClickException("--fixed-weights requires --cvrs")

    summary = run_replications(contest, contest.reported_winner, reps, seed,
                               config, tuning)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(out_dir / "results.csv", summary)
    write_summary_json(out_dir / "summary.json", summary)
    click.echo(f"reps: {summary.n_reps}")
    click.echo(f"mean sample size: {summary.mean_sample_size:.1f}")
    click.echo(f"certification rate: {summary.certification_rate:.4f}")
    click.echo(f"wrote {out_dir / 'results.csv'} and {out_dir / 'summary.json'}")


@main.command()
@click.option("--port", default=8787, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", required=True, type=click.Path())
@click.option("--ui", default=None, type=click.Path(exists=True),
              help="Directory of built UI assets to serve at /.")
def serve(port, host, data, ui):
    """Run the live audit session service (loopback by default)."""
    import uvicorn
    from .service import create_app
    uvicorn.run(create_app(data, static_dir=ui), host=host, port=port)


@main.command()
@click.option("--roster", required=True, help="Comma-separated candidate names.")
@click.option("--total-ballots", "total", required=True, type=int)
@click.option("--reported-winner", required=True)
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--scheme", default="largest", show_default=True,
              type=click.Choice(["linear", "quadratic", "largest", "fixed"]))
@click.option("--d", "d", default=50, show_default=True)
@click.option("--eta0", default=0.52, show_default=True)
@click.option("--update-every", default=25, show_default=True)
def audit(roster, total, reported_winner, alpha, scheme, d, eta0, update_every):
    """Interactive terminal audit: enter one sampled ballot per line
    (e.g. A>B>C, blank for an empty ballot), EOF to stop early."""
    names = [n.strip() for n in roster.split(",")]
    if reported_winner not in names:
        raise click.ClickException(f"reported winner {reported_winner!r} not in roster")
    config = AuditConfig(alpha=alpha, scheme=WeightScheme(scheme),
                         update_every=update_every,
                         alpha_config=AlphaConfig(eta0=eta0, d=d))
    alt_orders = enumerate_alt_orders(len(names), names.index(reported_winner),
                                      config.max_candidates)
    pool = build_pool(alt_orders)
    state = audit_new(pool, alt_orders, total, config)
    click.echo(f"tracking {alt_orders.m} alt-orders over {pool.size} requirements; "
               f"threshold log E = {config.threshold_log:.4f}")
    while state.decision is Decision.ONGOING:
        try:
            line = input(f"ballot {state.t + 1}/{total}> ")
        except EOFError:
            click.echo("\nstopped before a decision; audit remains open")
            return
        try:
            ranking = tuple(names.index(tok.strip())
                            for tok in line.split(">") if tok.strip())
            state, status = audit_observe(state, ranking)
        except ValueError as exc:
            click.echo(f"rejected: {exc}")
            continue
        click.echo(f"  t={status.t}  remaining alt-orders: {status.remaining}"
                   f"/{alt_orders.m}  decision: {status.decision.value}")
    if state.decision is Decision.CERTIFIED:
        click.echo("outcome certified: every alt-order rejected at the risk limit")
    else:
        click.echo("full count needed; tabulated order: "
                   + " ".join(names[c] for c in state.true_order))


if __name__ == "__main__":
    main()
