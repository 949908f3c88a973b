"""Sample a source that avoids low-complexity words, then wrap it in a period ladder.

The result repeats every prefix block periodically, yet short windows keep
a high LZ78 phrase count. This is an illustration, not a certificate.

    python demos/almost_periodic.py [seed]
"""

import sys
import warnings

from forbidden_ap import analysis
from forbidden_ap.avoider import SamplerConfig, resample_run
from forbidden_ap.family import gen_lz_family
from forbidden_ap.scaffold import PeriodLadder, build_sequence, decompose_window, fresh_count

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    family = gen_lz_family("9/16", [16])
ladder = PeriodLadder((2, 8, 32))
N = 2 * ladder.periods[-1]

trace = resample_run(family, SamplerConfig(fresh_count(ladder, N), seed, min_len=16))
omega = build_sequence(trace.result, ladder, N)
print(f"source ({len(trace.result)} bits, {trace.rounds} resampling rounds): {trace.result}")
print(f"omega  ({N} bits): {omega}")

for s in range(ladder.depth - 1):
    print(f"level {s}: first {ladder.periods[s]} bits repeat every {ladder.periods[s + 1]}:",
          analysis.verify_ladder_periodicity(omega, ladder, s))

print()
print(analysis.profile_csv(analysis.complexity_profile(omega, [16, 32, 64])), end="")
print("all-zeros:", {n: analysis.lz78_phrase_estimate("0" * n) for n in (16, 32, 64)})

d = decompose_window(5, 20, ladder)
print()
print(f"window [5, 25): {d.small_rank_count} small-rank positions, source runs {list(d.intervals)}")
