"""Audit the adversarial 6-candidate contest from both sides.

The contest is built so that candidate a wins the IRV tabulation while b
holds a large first-preference pile: 16,000+2m ballots [a], 8,000-2m ballots
[b], and four piles of 8,000 ballots [c_i, b, a].  Auditing the true winner
should certify from a modest sample; auditing b as the (false) reported
winner should essentially never certify.

Run:  python3 demos/01_pathological_audit.py
"""

from awaire import AuditConfig, generate_pathological, run_replications, tabulate

contest = generate_pathological(250)
result = tabulate(contest)
names = contest.candidate_names()
print(f"population: {contest.num_ballots} ballots over {names}")
print("true elimination order:", " ".join(names[c] for c in result.order))

config = AuditConfig(alpha=0.05)  # Largest scheme, eta0=0.52, d=50
for winner, label in [(0, "true winner a"), (1, "false reported winner b")]:
    summary = run_replications(contest, winner, n_reps=50,
                               master_seed=7, config=config)
    print(f"\nauditing {label} (50 sampling permutations):")
    print(f"  certification rate: {summary.certification_rate:.2f}")
    print(f"  mean ballots inspected: {summary.mean_sample_size:.0f}"
          f" of {contest.num_ballots}")
