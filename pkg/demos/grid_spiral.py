"""Two-dimensional scaffold: print a patch of the grid and decompose one cube.

    python demos/grid_spiral.py
"""

import numpy as np

from forbidden_ap.grid import GridLadder, build_grid, decompose_cube, required_source_length

ladder = GridLadder((2, 8, 32))
region = ((-16, 16), (-16, 16))

rng = np.random.default_rng(1)
bits = "".join(map(str, rng.integers(0, 2, required_source_length(ladder, region))))
g = build_grid(bits, ladder, region)
for row in g:
    print("".join(".#"[b] for b in row))

# the centred cell [-2, 2)^2 sits at array rows/cols 14..18 and repeats
# with period 8 along each axis
cell = g[14:18, 14:18]
print("period 8 copies agree:",
      all((g[14 + a:18 + a, 14 + b:18 + b] == cell).all() for a in (-8, 0, 8) for b in (-8, 0, 8)))

d = decompose_cube((3, -5), 12, ladder)
print(f"cube side 12 at (3, -5): s={d.s} (bound {d.s_bound}), "
      f"{d.small_rank_count} small-rank points, {d.total_length} from the source")
