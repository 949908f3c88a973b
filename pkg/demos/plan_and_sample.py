"""Certify a plan, draw a random forbidden family and resample a string that avoids it.

    python demos/plan_and_sample.py [alpha] [seed]
"""

import sys
import warnings

from forbidden_ap import analysis
from forbidden_ap.avoider import SamplerConfig, resample_run, sft_feasible
from forbidden_ap.family import gen_random_family
from forbidden_ap.lll import make_plan, plan_text

alpha = sys.argv[1] if len(sys.argv) > 1 else "1/2"
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

plan = make_plan(alpha)
print(plan_text(plan))

# Lengths below L are outside the certificate; the sampler still copes
# with most of them in practice, so ask it for more than the plan promises.
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    family = gen_random_family(alpha, range(8, 13), seed)
print(f"family: {sum(len(w) for w in family.entries.values())} words, lengths 8..12")

for min_len in (plan.L, 10, 9):
    print(f"min_len={min_len}: shift space nonempty = {sft_feasible(family, min_len)}")
    tr = resample_run(family, SamplerConfig(1024, seed, min_len=min_len, selection="random"))
    ok = analysis.verify_avoidance(tr.result, family, min_len).ok
    print(f"  converged={tr.converged} rounds={tr.rounds} verified={ok}")
    print("  " + tr.result[:64] + "...")
