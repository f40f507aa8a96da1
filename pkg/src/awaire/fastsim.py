"""Fast replication paths for the simulation harness.

Two accelerated implementations of the same math as `alpha` and `engine`:

* `run_audit_kernel`: a numba-compiled full-audit pass over one sampling
  permutation.  It mirrors the streaming engine's arithmetic step for step
  (same expressions, same iteration order) and additionally stops updating
  pooled requirements that no surviving alt-order references, which is what
  makes 1,000 full-population replications tractable.
* `alpha_log_trajectories`: a vectorised evaluator of the single-requirement
  supermartingale over many sampling orders at once, used by the Monte-Carlo
  property checks.

Both are equivalence-tested against the reference implementations.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .alpha import AlphaConfig
from .engine import WeightScheme
from .requirements import RequirementPool, assorter

__all__ = [
    "SCHEME_IDS",
    "build_assorter_matrix",
    "ballot_types",
    "run_audit_kernel",
    "alpha_log_trajectories",
]

INF = math.inf

SCHEME_IDS = {
    WeightScheme.FIXED: 0,
    WeightScheme.LINEAR: 1,
    WeightScheme.QUADRATIC: 2,
    WeightScheme.LARGEST: 3,
}


def ballot_types(ballots) -> tuple[np.ndarray, list]:
    """Map ballots to indices over their distinct ranking types."""
    index: dict = {}
    uniques: list = []
    out = np.empty(len(ballots), dtype=np.int64)
    for k, b in enumerate(ballots):
        t = index.get(b)
        if t is None:
            t = index[b] = len(uniques)
            uniques.append(b)
        out[k] = t
    return out, uniques


def build_assorter_matrix(uniques, pool: RequirementPool) -> np.ndarray:
    """Assorter value of every pooled requirement for every ballot type."""
    A = np.empty((len(uniques), pool.size), dtype=np.float64)
    for t, b in enumerate(uniques):
        for r, req in enumerate(pool.requirements):
            A[t, r] = assorter(req, b)
    return A


def pool_arrays(pool: RequirementPool) -> tuple[np.ndarray, np.ndarray]:
    """per_order refs as a padded (m, rmax) matrix plus per-order lengths."""
    m = len(pool.per_order)
    rmax = max(len(refs) for refs in pool.per_order)
    refs = np.zeros((m, rmax), dtype=np.int64)
    nref = np.empty(m, dtype=np.int64)
    for i, rr in enumerate(pool.per_order):
        nref[i] = len(rr)
        refs[i, : len(rr)] = rr
    return refs, nref


@njit(cache=True)
def _step_log_e(B, eta0, d, mu0, j, S, x):
    # keep expression-for-expression identical to alpha.step_term
    mu = (B * mu0 - S) / (B - j + 1.0)
    if mu < 0.0:
        return np.inf
    if mu == 0.0:
        return np.inf if x > 0.0 else 0.0
    if mu >= 1.0:
        return 0.0
    eps = (eta0 - mu0) / (2.0 * math.sqrt(d + j - 1.0))
    est = (d * eta0 + S) / (d + j - 1.0)
    eta = min(max(est, mu + eps), 1.0)
    e = (x / mu) * ((eta - mu) / (1.0 - mu)) + (1.0 - eta) / (1.0 - mu)
    if e <= 0.0:
        return -np.inf
    return math.log(e)


@njit(cache=True)
def run_audit_kernel(types, A, refs, nref, W0, scheme_id, cadence,
                     log_threshold, eta0, d, mu0, B_pop,
                     stop_early, checkpoints):
    """One full audit pass over a sampling permutation.

    types[t] is the ballot-type index of draw t+1; A[type, r] the assorter
    value for pooled requirement r.  Returns (sample_size, certified,
    final per-order log E, rejected flags, per-checkpoint log E matrix).
    """
    npool = A.shape[1]
    m, rmax = refs.shape

    S = np.zeros(npool)
    logm = np.zeros(npool)
    log_es = np.zeros(npool)
    refcount = np.zeros(npool, dtype=np.int64)
    for i in range(m):
        for k in range(nref[i]):
            refcount[refs[i, k]] += 1

    W = W0.copy()
    logE = np.zeros(m)
    rej = np.zeros(m, dtype=np.bool_)
    unrej = np.zeros(m, dtype=np.bool_)
    ncheck = checkpoints.shape[0]
    out_check = np.zeros((ncheck, m))
    next_check = 0

    sample_size = B_pop
    certified = False
    B = types.shape[0]

    for t in range(1, B + 1):
        typ = types[t - 1]
        for r in range(npool):
            if refcount[r] == 0:
                continue
            x = A[typ, r]
            if logm[r] == np.inf:
                log_es[r] = np.inf
            else:
                le = _step_log_e(B_pop, eta0[r], d, mu0, t, S[r], x)
                log_es[r] = le
                if le == np.inf:
                    logm[r] = np.inf
                else:
                    logm[r] = logm[r] + le
            S[r] += x

        for i in range(m):
            if rej[i] or unrej[i]:
                continue
            # a saturated requirement logically refutes every order that can
            # carry weight on it (all refs for adaptive schemes, positive
            # weights for fixed)
            saturated_hit = False
            for k in range(nref[i]):
                if logm[refs[i, k]] == np.inf:
                    if scheme_id != 0 or W[i, k] > 0.0:
                        saturated_hit = True
                        break
            if saturated_hit:
                logE[i] = np.inf
                rej[i] = True
                for k in range(nref[i]):
                    refcount[refs[i, k]] -= 1
                continue
            npos = 0
            last_pos = -1
            for k in range(nref[i]):
                if W[i, k] > 0.0:
                    npos += 1
                    last_pos = k
            if npos == 1:
                term = log_es[refs[i, last_pos]]
            else:
                num = 0.0
                den = 0.0
                for k in range(nref[i]):
                    w = W[i, k]
                    if w > 0.0:
                        num += w * math.exp(log_es[refs[i, k]])
                        den += w
                if num == 0.0:
                    term = -np.inf
                else:
                    term = math.log(num / den)
            logE[i] += term
            if logE[i] >= log_threshold:
                rej[i] = True
                for k in range(nref[i]):
                    refcount[refs[i, k]] -= 1

        all_rejected = True
        for i in range(m):
            if not rej[i]:
                all_rejected = False
                break
        if all_rejected and not certified:
            certified = True
            sample_size = t
            if stop_early:
                if next_check < ncheck:
                    for c in range(next_check, ncheck):
                        for i in range(m):
                            out_check[c, i] = logE[i]
                return sample_size, certified, logE, rej, out_check

        if next_check < ncheck and t == checkpoints[next_check]:
            for i in range(m):
                out_check[next_check, i] = logE[i]
            next_check += 1

        if not certified and t % cadence == 0 and scheme_id != 0:
            for i in range(m):
                if rej[i] or unrej[i]:
                    continue
                mx = -np.inf
                for k in range(nref[i]):
                    lv = logm[refs[i, k]]
                    if lv > mx:
                        mx = lv
                if mx == -np.inf:
                    unrej[i] = True
                    logE[i] = -np.inf
                    for k in range(nref[i]):
                        refcount[refs[i, k]] -= 1
                    continue
                for k in range(nref[i]):
                    lv = logm[refs[i, k]]
                    if scheme_id == 3:
                        W[i, k] = 1.0 if lv == mx else 0.0
                    elif mx == np.inf:
                        W[i, k] = 1.0 if lv == np.inf else 0.0
                    elif scheme_id == 1:
                        W[i, k] = math.exp(lv - mx)
                    else:
                        W[i, k] = math.exp(2.0 * (lv - mx))

    return sample_size, certified, logE, rej, out_check


def alpha_log_trajectories(X: np.ndarray, B_pop: int,
                           config: AlphaConfig) -> np.ndarray:
    """Log supermartingale trajectories for many sampling orders at once.

    X has one row per sampling order and one column per draw (the first T
    draws of a size-B_pop population).  Returns log M_t with the same shape;
    saturation (a logically impossible null) shows up as +inf from the
    offending draw onwards.
    """
    n, T = X.shape
    if T > B_pop:
        raise ValueError("more draws than population")
    eta0, d, mu0 = config.eta0, float(config.d), config.mu0
    j = np.arange(1, T + 1, dtype=np.float64)
    S = np.concatenate([np.zeros((n, 1)), np.cumsum(X, axis=1)[:, :-1]], axis=1)
    mu = (B_pop * mu0 - S) / (B_pop - j + 1.0)
    eps = (eta0 - mu0) / (2.0 * np.sqrt(d + j - 1.0))
    est = (d * eta0 + S) / (d + j - 1.0)
    eta = np.minimum(np.maximum(est, mu + eps), 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        e = (X / mu) * ((eta - mu) / (1.0 - mu)) + (1.0 - eta) / (1.0 - mu)
        log_e = np.where(e > 0.0, np.log(e), -np.inf)
    interior = (mu > 0.0) & (mu < 1.0)
    sat_step = (mu < 0.0) | ((mu == 0.0) & (X > 0.0))
    log_e = np.where(interior, log_e, 0.0)
    sat = np.maximum.accumulate(sat_step, axis=1)
    logm = np.cumsum(np.where(sat, 0.0, log_e), axis=1)
    logm[sat] = np.inf
    return logm
