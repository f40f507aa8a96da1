"""ALPHA test supermartingale for one requirement, in log domain.

Tests the null that the mean of B bounded values is at most mu0, sampling
without replacement.  Each draw multiplies in the term

    e_j = (x/mu_j) * (eta_j - mu_j)/(1 - mu_j) + (1 - eta_j)/(1 - mu_j),

where mu_j is the conditional null mean of the j-th draw and eta_j is the
truncated-shrinkage estimate of the mean of the remaining population.
Accumulation is in natural logs; a term of 0 (possible when eta_j = 1 and
x = 0) pins the martingale at 0 permanently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["AlphaConfig", "AlphaState", "alpha_new", "shrinkage_eta", "alpha_step"]

INF = math.inf


@dataclass(frozen=True)
class AlphaConfig:
    eta0: float = 0.52
    d: int = 50
    mu0: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.mu0 < 1.0):
            raise ValueError(f"mu0 must be in (0, 1), got {self.mu0}")
        if not (self.mu0 < self.eta0 <= 1.0):
            raise ValueError(f"eta0 must be in (mu0, 1], got {self.eta0}")
        if not (isinstance(self.d, int) and self.d >= 1):
            raise ValueError(f"d must be a positive integer, got {self.d}")


@dataclass
class AlphaState:
    """Running state; log_m is ln M_{j-1}, +inf once saturated.

    Saturation means the observed sum already contradicts the null (the mean
    cannot be <= mu0 given the remaining population), so the requirement is
    rejected outright.
    """

    B: int
    config: AlphaConfig
    j: int = 1
    running_sum: float = 0.0
    log_m: float = 0.0

    @property
    def saturated(self) -> bool:
        return self.log_m == INF

    @property
    def mu_j(self) -> float:
        """Conditional null mean just before draw j; only defined for j <= B."""
        cfg = self.config
        return (self.B * cfg.mu0 - self.running_sum) / (self.B - self.j + 1)


def alpha_new(B: int, config: AlphaConfig | None = None) -> AlphaState:
    if B < 1:
        raise ValueError("population size must be at least 1")
    return AlphaState(B=B, config=config or AlphaConfig())


def shrinkage_eta(state: AlphaState) -> float:
    """Truncated-shrinkage estimate eta_j, guaranteed in (mu_j, 1].

    The floor term's epsilon uses the null bound mu0, giving a nonnegative
    decreasing sequence (eta0 - mu0) / (2 sqrt(d + j - 1)).
    """
    cfg = state.config
    mu = state.mu_j
    if state.saturated or not (0.0 < mu < 1.0):
        raise ValueError("eta_j undefined: state saturated or mu_j degenerate")
    return _eta(cfg.eta0, cfg.d, cfg.mu0, mu, state.j, state.running_sum)


def _eta(eta0: float, d: int, mu0: float, mu: float, j: int, running_sum: float) -> float:
    eps = (eta0 - mu0) / (2.0 * math.sqrt(d + j - 1.0))
    est = (d * eta0 + running_sum) / (d + j - 1.0)
    return min(max(est, mu + eps), 1.0)


def step_term(B: int, eta0: float, d: int, mu0: float, j: int,
              running_sum: float, x: float) -> float:
    """log of the multiplicative term for draw j; +inf signals saturation.

    Degenerate null means are handled explicitly: mu_j <= 0 means the null
    requires the remaining values to average <= 0, so any x > 0 refutes it
    (and x = 0 contributes nothing, e = 1).  mu_j >= 1 makes the null bound
    vacuous (bounded values always average <= 1), so no observation can
    count against it and the martingale freezes at e = 1.

    Shared, order-of-operations-stable scalar core; the vectorised paths
    mirror it exactly.
    """
    mu = (B * mu0 - running_sum) / (B - j + 1.0)
    if mu < 0.0:
        return INF
    if mu == 0.0:
        return INF if x > 0.0 else 0.0
    if mu >= 1.0:
        return 0.0
    eta = _eta(eta0, d, mu0, mu, j, running_sum)
    e = (x / mu) * ((eta - mu) / (1.0 - mu)) + (1.0 - eta) / (1.0 - mu)
    if e <= 0.0:
        return -INF
    return math.log(e)


def alpha_step(state: AlphaState, x: float) -> tuple[AlphaState, float]:
    """Consume one assorter value; mutates state in place and returns
    (state, log_e).  Stepping past the population is an error."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"assorter value out of [0, 1]: {x}")
    if state.j > state.B:
        raise ValueError("population exhausted: no further draws")
    cfg = state.config
    if state.saturated:
        log_e = INF
    else:
        log_e = step_term(state.B, cfg.eta0, cfg.d, cfg.mu0,
                          state.j, state.running_sum, x)
        state.log_m = state.log_m + log_e if log_e != INF else INF
    state.running_sum += x
    state.j += 1
    return state, log_e
