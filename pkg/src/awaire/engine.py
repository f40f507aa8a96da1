"""The audit state machine: per-alt-order intersection test supermartingales
over pooled base trackers, predictable adaptive weights, and stopping logic.

Each alt-order i is tested by the product over draws of a convex combination
of its requirements' per-draw terms,

    E_t = prod_k  sum_r w_{r,k} e_{r,k} / sum_r w_{r,k},

with weights recomputed from the base supermartingale values at a fixed
cadence (so they depend only on strictly earlier data).  An alt-order is
rejected once E_t >= 1/alpha; the audit certifies when all are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .alpha import AlphaConfig, AlphaState, alpha_new, alpha_step
from .contest import Ballot
from .requirements import RequirementPool, assorter, assorter_mean
from .tabulation import AltOrderSet, tabulate
from . import contest as _contest

__all__ = [
    "WeightScheme",
    "AuditConfig",
    "Decision",
    "IntersectionTracker",
    "AuditState",
    "AuditStatus",
    "TuningPlan",
    "audit_new",
    "audit_observe",
    "reweigh",
    "tune_from_cvrs",
    "audit_status",
]

INF = math.inf


class WeightScheme(Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    LARGEST = "largest"
    FIXED = "fixed"


class Decision(Enum):
    ONGOING = "ongoing"
    CERTIFIED = "certified"
    FULL_COUNT_NEEDED = "full_count_needed"


@dataclass(frozen=True)
class AuditConfig:
    alpha: float = 0.05
    scheme: WeightScheme = WeightScheme.LARGEST
    update_every: int = 25
    alpha_config: AlphaConfig = field(default_factory=AlphaConfig)
    max_candidates: int = 6

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"risk limit must be in (0, 1), got {self.alpha}")
        if self.update_every < 1:
            raise ValueError("update_every must be >= 1")

    @property
    def threshold_log(self) -> float:
        return math.log(1.0 / self.alpha)


@dataclass(frozen=True)
class TuningPlan:
    """CVR-derived starting weights (per order, aligned with its requirement
    slots) and per-pool-index eta0 overrides."""

    starting_weights: tuple[tuple[float, ...], ...]
    per_requirement_eta0: dict[int, float]


@dataclass
class IntersectionTracker:
    order_index: int
    refs: tuple[int, ...]
    weights: list[float]
    log_E: float = 0.0
    rejected: bool = False
    unrejectable: bool = False


@dataclass
class AuditState:
    pool: RequirementPool
    alt_orders: AltOrderSet
    B: int
    config: AuditConfig
    base: list[AlphaState]
    trackers: list[IntersectionTracker]
    t: int = 0
    decision: Decision = Decision.ONGOING
    observed: list[Ballot] = field(default_factory=list)
    true_order: tuple[int, ...] | None = None


@dataclass
class AuditStatus:
    t: int
    decision: Decision
    alpha: float
    threshold_log: float
    orders: list[dict]
    remaining: int
    requirements: list[dict]
    true_order: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "decision": self.decision.value,
            "alpha": self.alpha,
            "threshold_log": self.threshold_log,
            "remaining": self.remaining,
            "orders": self.orders,
            "requirements": self.requirements,
            "true_order": list(self.true_order) if self.true_order else None,
        }


def audit_new(pool: RequirementPool, alt_orders: AltOrderSet, B: int,
              config: AuditConfig, tuning: TuningPlan | None = None) -> AuditState:
    """Fresh audit: one base tracker per pooled requirement, one intersection
    tracker per alt-order with equal weights (or the tuning plan's)."""
    if len(pool.per_order) != alt_orders.m:
        raise ValueError("pool was not built for this alt-order set")
    if B < 1:
        raise ValueError("population size must be at least 1")
    eta_overrides = tuning.per_requirement_eta0 if tuning else {}
    base = []
    for r in range(pool.size):
        cfg = config.alpha_config
        if r in eta_overrides:
            cfg = AlphaConfig(eta0=eta_overrides[r], d=cfg.d, mu0=cfg.mu0)
        base.append(alpha_new(B, cfg))

    trackers = []
    for i, refs in enumerate(pool.per_order):
        if tuning is not None:
            w = list(tuning.starting_weights[i])
            if len(w) != len(refs) or any(v < 0 for v in w) or sum(w) <= 0:
                raise ValueError(f"invalid starting weights for alt-order {i}")
        else:
            w = [1.0] * len(refs)
        trackers.append(IntersectionTracker(i, refs, w))
    return AuditState(pool, alt_orders, B, config, base, trackers)


def _tracker_term(tracker: IntersectionTracker, log_es: list[float],
                  base: list[AlphaState], scheme: WeightScheme) -> float:
    """Log of the weighted convex combination of this draw's base terms.

    A single positive weight reuses the base log term directly, so a
    degenerate combination tracks its base supermartingale bit-for-bit.
    A saturated base term (log inf) with positive weight dominates.
    """
    pos = [k for k, w in enumerate(tracker.weights) if w > 0.0]
    if len(pos) == 1:
        return log_es[tracker.refs[pos[0]]]
    num = 0.0
    den = 0.0
    for k in pos:
        le = log_es[tracker.refs[k]]
        if le == INF:
            return INF
        num += tracker.weights[k] * math.exp(le)
        den += tracker.weights[k]
    if num == 0.0:
        return -INF
    return math.log(num / den)


def audit_observe(state: AuditState, ballot: Ballot) -> tuple[AuditState, AuditStatus]:
    """Feed one sampled ballot: evaluate every pooled assorter once, step every
    base tracker, multiply the weighted term into each live intersection
    tracker, then apply the stopping rule and (at cadence) the reweighting."""
    if state.decision is not Decision.ONGOING:
        raise ValueError(f"audit is closed ({state.decision.value})")
    if state.t >= state.B:
        raise ValueError("all ballots already observed")
    if len(set(ballot)) != len(ballot):
        raise ValueError("duplicate candidate in ballot")
    C = state.alt_orders.num_candidates
    if any(not (0 <= c < C) for c in ballot):
        raise ValueError("ballot references unknown candidate")

    cfg = state.config
    log_es = []
    for r, req in enumerate(state.pool.requirements):
        x = assorter(req, ballot)
        _, log_e = alpha_step(state.base[r], x)
        log_es.append(log_e)

    for tr in state.trackers:
        if tr.rejected or tr.unrejectable:
            continue
        # saturation is a logical refutation: any order that can put weight on
        # a saturated requirement is rejected outright
        if cfg.scheme is WeightScheme.FIXED:
            saturated_hit = any(
                state.base[tr.refs[k]].saturated
                for k, w in enumerate(tr.weights) if w > 0.0)
        else:
            saturated_hit = any(state.base[r].saturated for r in tr.refs)
        if saturated_hit:
            tr.log_E = INF
            tr.rejected = True
            continue
        tr.log_E += _tracker_term(tr, log_es, state.base, cfg.scheme)
        if tr.log_E >= cfg.threshold_log:
            tr.rejected = True

    state.t += 1
    state.observed.append(tuple(ballot))

    if all(tr.rejected for tr in state.trackers):
        state.decision = Decision.CERTIFIED
    elif state.t == state.B:
        state.decision = Decision.FULL_COUNT_NEEDED
        state.true_order = _full_count_order(state)
    elif state.t % cfg.update_every == 0:
        reweigh(state)
    return state, audit_status(state)


def _full_count_order(state: AuditState) -> tuple[int, ...]:
    """At exhaustion every ballot has been inspected: the true outcome is the
    IRV tabulation of the observed population."""
    C = state.alt_orders.num_candidates
    ballots = tuple(state.observed)
    dummy = _contest.Contest(
        tuple(_contest.Candidate(i, f"_{i}") for i in range(C)), ballots, 0)
    return tabulate(dummy).order


def reweigh(state: AuditState) -> AuditState:
    """Recompute weights from the current base supermartingale values.

    Linear and Quadratic exponentiate log values after subtracting the
    per-order maximum (only relative weights matter and E overflows doubles
    quickly).  Largest puts weight 1 on every argmax.  Fixed never changes.
    If every base for an order sits at zero, the order can never be rejected
    and is flagged as a guaranteed full-count survivor.
    """
    scheme = state.config.scheme
    if scheme is WeightScheme.FIXED:
        return state
    for tr in state.trackers:
        if tr.rejected or tr.unrejectable:
            continue
        logs = [state.base[r].log_m for r in tr.refs]
        mx = max(logs)
        if mx == -INF:
            tr.unrejectable = True
            tr.log_E = -INF
            continue
        if scheme is WeightScheme.LARGEST:
            tr.weights = [1.0 if lv == mx else 0.0 for lv in logs]
        elif mx == INF:
            tr.weights = [1.0 if lv == INF else 0.0 for lv in logs]
        elif scheme is WeightScheme.LINEAR:
            tr.weights = [math.exp(lv - mx) for lv in logs]
        else:  # quadratic
            tr.weights = [math.exp(2.0 * (lv - mx)) for lv in logs]
    return state


def tune_from_cvrs(cvrs, pool: RequirementPool, alt_orders: AltOrderSet,
                   config: AuditConfig) -> TuningPlan:
    """Derive starting weights and eta0 values from reported (CVR) ballots.

    Per alt-order, weight 1 goes to the requirement(s) with the largest
    reported assorter mean (the easiest to reject if the CVRs are accurate),
    0 elsewhere.  eta0 is the reported mean when it exceeds 1/2, else the
    configured default.
    """
    if not cvrs:
        raise ValueError("need at least one CVR")
    C = alt_orders.num_candidates
    for b in cvrs:
        if any(not (0 <= c < C) for c in b):
            raise ValueError(f"CVR references unknown candidate: {b}")
    means = [assorter_mean(req, cvrs) for req in pool.requirements]
    weights = []
    for refs in pool.per_order:
        best = max(means[r] for r in refs)
        weights.append(tuple(1.0 if means[r] == best else 0.0 for r in refs))
    eta0 = {
        r: (means[r] if means[r] > 0.5 else config.alpha_config.eta0)
        for r in range(pool.size)
    }
    return TuningPlan(tuple(weights), eta0)


def audit_status(state: AuditState) -> AuditStatus:
    orders = [
        {
            "order": list(state.alt_orders.orders[tr.order_index]),
            "log_e": tr.log_E,
            "rejected": tr.rejected,
            "unrejectable": tr.unrejectable,
        }
        for tr in state.trackers
    ]
    reqs = [
        {
            "i": req.i,
            "j": req.j,
            "standing": sorted(req.standing),
            "log_m": state.base[r].log_m,
        }
        for r, req in enumerate(state.pool.requirements)
    ]
    return AuditStatus(
        t=state.t,
        decision=state.decision,
        alpha=state.config.alpha,
        threshold_log=state.config.threshold_log,
        orders=orders,
        remaining=sum(1 for tr in state.trackers if not tr.rejected),
        requirements=reqs,
        true_order=state.true_order,
    )
