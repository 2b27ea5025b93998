"""Exact kidney-exchange clearing toolkit.

Data model and verifier, color-coding FPT solver (randomized and
derandomized), exhaustive oracle, and hardness-gadget instance
generators, all sharing one JSON instance format.
"""

from .coloring import (
    BudgetExceededError,
    Coloring,
    HashFamily,
    PaletteTooLargeError,
    deterministic_family,
    random_coloring,
    read_family_cache,
    trial_count,
    verify_family,
    write_family_cache,
)
from .detect import (
    ColorSetTooLargeError,
    ColorSetTooSmallError,
    DetectStats,
    bulk_color_sets,
    colorful_chain,
    colorful_cycle,
)
from .instance import (
    Chain,
    Cycle,
    Instance,
    InvalidParameterError,
    Issue,
    KexError,
    Solution,
    SolutionError,
    canonical_cycle,
    instance_from_dict,
    instance_to_dict,
    planted_instance,
    random_instance,
    solution_from_dict,
    solution_to_dict,
    validate_instance,
    verify_solution,
)
from .oracle import (
    SizeCapExceededError,
    enumerate_chains,
    enumerate_cycles,
    oracle_max_coverage,
)
from .reductions import (
    ReductionOutput,
    binpacking_to_cycles,
    binpacking_to_paths,
    fixed3_to_dag,
    from_directed_kpath,
    three_partition_shift,
)
from .solver import (
    PaletteMismatchError,
    SolverConfig,
    SolverTimeoutError,
    SolveStats,
    decide_at_least,
    decide_exact,
    maximize,
    solve_colorful_corrected,
    solve_colorful_paper,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
