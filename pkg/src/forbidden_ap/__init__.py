"""Binary sequences that avoid budgeted forbidden words, and almost periodic
scaffolds that carry such sequences while keeping every window complex."""

from .analysis import (
    complexity_profile,
    lz78_phrase_estimate,
    recurrence_gap,
    verify_avoidance,
    verify_ladder_periodicity,
)
from .avoider import (
    SampleTrace,
    SamplerConfig,
    resample_grid,
    resample_run,
    scan_violations,
    sft_feasible,
)
from .family import (
    ForbiddenFamily,
    gen_lz_family,
    gen_random_family,
    parse_family,
    read_family,
    write_family,
)
from .grid import GridLadder, build_grid, classify_point, decompose_cube, spiral_index, spiral_point
from .lll import LllPlan, check_condition, make_grid_plan, make_plan
from .scaffold import (
    PeriodLadder,
    build_sequence,
    classify_position,
    decompose_window,
    density_D,
    fresh_count,
    recover_a,
)

__version__ = "0.1.0"
