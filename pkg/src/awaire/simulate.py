"""Monte-Carlo audit harness: permutation replications, aggregate metrics,
CVR error models, and results export.

Permutations are generated by numpy's PCG64 seeded through
SeedSequence(master_seed, spawn_key=(trial,)), so every method variant run
with the same master seed consumes identical sampling orders, and results
are reproducible across platforms.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .contest import Ballot, Contest
from .engine import (AuditConfig, Decision, TuningPlan, audit_new,
                     audit_observe, tune_from_cvrs)
from .fastsim import (SCHEME_IDS, ballot_types, build_assorter_matrix,
                      pool_arrays, run_audit_kernel)
from .requirements import build_pool
from .tabulation import enumerate_alt_orders, tabulate

__all__ = [
    "TrialResult",
    "SimSummary",
    "run_once",
    "run_replications",
    "permute_labels",
    "pick_runner_up",
    "write_results_csv",
    "write_summary_json",
]


@dataclass(frozen=True)
class TrialResult:
    sample_size: int
    decision: Decision
    permutation_seed: int


@dataclass(frozen=True)
class SimSummary:
    n_reps: int
    mean_sample_size: float
    certification_rate: float
    per_trial: tuple[TrialResult, ...]
    config_echo: dict


class _Prepared:
    """Contest-and-config state shared across replications."""

    def __init__(self, contest: Contest, reported_winner: int,
                 config: AuditConfig, tuning: TuningPlan | None):
        self.contest = contest
        self.B = contest.num_ballots
        self.config = config
        self.alt_orders = enumerate_alt_orders(
            contest.num_candidates, reported_winner, config.max_candidates)
        self.pool = build_pool(self.alt_orders)
        self.tuning = tuning
        self.types, uniques = ballot_types(contest.ballots)
        self.A = build_assorter_matrix(uniques, self.pool)
        self.refs, self.nref = pool_arrays(self.pool)
        m, rmax = self.refs.shape
        self.W0 = np.zeros((m, rmax))
        for i in range(m):
            if tuning is not None:
                self.W0[i, : self.nref[i]] = tuning.starting_weights[i]
            else:
                self.W0[i, : self.nref[i]] = 1.0
        acfg = config.alpha_config
        self.eta0 = np.full(self.pool.size, acfg.eta0)
        if tuning is not None:
            for r, v in tuning.per_requirement_eta0.items():
                self.eta0[r] = v

    def run(self, permutation: np.ndarray, seed: int) -> TrialResult:
        cfg = self.config
        sample_size, certified, _, _, _ = run_audit_kernel(
            self.types[permutation], self.A, self.refs, self.nref, self.W0,
            SCHEME_IDS[cfg.scheme], cfg.update_every, cfg.threshold_log,
            self.eta0, float(cfg.alpha_config.d), cfg.alpha_config.mu0,
            self.B, True, np.empty(0, dtype=np.int64))
        decision = Decision.CERTIFIED if certified else Decision.FULL_COUNT_NEEDED
        return TrialResult(int(sample_size), decision, seed)


def run_once(contest: Contest, reported_winner: int, permutation,
             config: AuditConfig, tuning: TuningPlan | None = None,
             engine: str = "fast") -> TrialResult:
    """Audit one sampling order to the first certification or to exhaustion.

    engine="reference" replays the pure-python streaming engine instead of
    the compiled kernel; both produce the same result and the reference path
    is what the equivalence tests compare against.
    """
    permutation = np.asarray(permutation)
    B = contest.num_ballots
    if sorted(permutation.tolist()) != list(range(B)):
        raise ValueError("not a permutation of 0..B-1")
    if engine == "fast":
        return _Prepared(contest, reported_winner, config, tuning).run(permutation, 0)
    alt_orders = enumerate_alt_orders(
        contest.num_candidates, reported_winner, config.max_candidates)
    pool = build_pool(alt_orders)
    state = audit_new(pool, alt_orders, B, config, tuning)
    for idx in permutation:
        state, status = audit_observe(state, contest.ballots[idx])
        if state.decision is Decision.CERTIFIED:
            break
    decision = (Decision.CERTIFIED if state.decision is Decision.CERTIFIED
                else Decision.FULL_COUNT_NEEDED)
    return TrialResult(state.t, decision, 0)


def run_replications(contest: Contest, reported_winner: int, n_reps: int,
                     master_seed: int, config: AuditConfig,
                     tuning: TuningPlan | None = None) -> SimSummary:
    """Audit n_reps independent sampling permutations of the same contest.

    Permutation k is a pure function of (master_seed, k), so different
    schemes and tunings run against identical sampling orders.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    prep = _Prepared(contest, reported_winner, config, tuning)
    trials = []
    for k in range(n_reps):
        ss = np.random.SeedSequence(master_seed, spawn_key=(k,))
        seed = int(ss.generate_state(1)[0])
        rng = np.random.Generator(np.random.PCG64(ss))
        perm = rng.permutation(prep.B)
        trials.append(prep.run(perm, seed))
    n_cert = sum(1 for t in trials if t.decision is Decision.CERTIFIED)
    return SimSummary(
        n_reps=n_reps,
        mean_sample_size=float(np.mean([t.sample_size for t in trials])),
        certification_rate=n_cert / n_reps,
        per_trial=tuple(trials),
        config_echo=_config_echo(config, master_seed, tuning is not None),
    )


def _config_echo(config: AuditConfig, master_seed: int, tuned: bool) -> dict:
    acfg = config.alpha_config
    return {
        "alpha": config.alpha,
        "scheme": config.scheme.value,
        "update_every": config.update_every,
        "eta0": acfg.eta0,
        "d": acfg.d,
        "mu0": acfg.mu0,
        "master_seed": master_seed,
        "cvr_tuned": tuned,
        "prng": "numpy PCG64, SeedSequence(master_seed, spawn_key=(trial,)), Generator.permutation",
    }


def permute_labels(ballots, perm) -> list[Ballot]:
    """Relabel candidates on each ballot (the CVR error model)."""
    perm = list(perm)
    C = len(perm)
    if sorted(perm) != list(range(C)):
        raise ValueError("not a permutation of candidate ids")
    return [tuple(perm[c] for c in b) for b in ballots]


def pick_runner_up(contest: Contest) -> int:
    """Closest challenger absent an exact margin tool: the second-to-last
    candidate in the true elimination order."""
    return tabulate(contest).order[-2]


def write_results_csv(path, summary: SimSummary) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["trial", "seed", "sample_size", "decision"])
        for k, t in enumerate(summary.per_trial):
            w.writerow([k, t.permutation_seed, t.sample_size,
                        "certified" if t.decision is Decision.CERTIFIED
                        else "full_count_needed"])


def write_summary_json(path, summary: SimSummary) -> None:
    payload = {
        "n_reps": summary.n_reps,
        "mean_sample_size": summary.mean_sample_size,
        "certification_rate": summary.certification_rate,
        "config": summary.config_echo,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
