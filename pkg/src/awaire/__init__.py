"""Risk-limiting audits for IRV contests via adaptively weighted
intersection test supermartingales."""

from .alpha import AlphaConfig, AlphaState, alpha_new, alpha_step, shrinkage_eta
from .contest import (Ballot, Candidate, Contest, EXHAUSTED, first_preference,
                      generate_pathological, parse_ballot_file,
                      serialize_ballot_file)
from .engine import (AuditConfig, AuditState, Decision, TuningPlan,
                     WeightScheme, audit_new, audit_observe, audit_status,
                     reweigh, tune_from_cvrs)
from .requirements import (DBRequirement, RequirementPool, assorter,
                           assorter_mean, build_pool, requirement_holds,
                           requirements_for_order)
from .simulate import (SimSummary, TrialResult, permute_labels,
                       pick_runner_up, run_once, run_replications)
from .tabulation import (AltOrderSet, EliminationResult, enumerate_alt_orders,
                         tabulate, tally)

__version__ = "0.1.0"
