"""Solvers for the discrete min-max violation problem.

Given a matrix ``A``, a target ``b``, and a finite sorted value set, pick
one value per variable minimizing ``max_k |(Ax - b)_k|``.  The package
provides an adaptive destroy/repair heuristic built on incremental residual
algebra and filtered value swaps, an exact enumeration oracle, and instance
builders for FIR filter design, discrete tomography, weight quantization,
and subset-sum feasibility.
"""

__version__ = "0.1.0"

from .builders import (
    FirSpec,
    QuantSpec,
    SubsetSumSpec,
    TomoSpec,
    apply_fir,
    build_fir,
    build_phantom,
    build_quant,
    build_subsetsum,
    build_tomo,
    fixed_point_levels,
    mae,
    parallel_beam_matrix,
    ripple,
    sirt,
    symmetric_taps,
)
from .controller import (
    OperatorBank,
    SolveReport,
    SolverConfig,
    TraceEntry,
    accept,
    initial_solution,
    select_operators,
    solve,
    update_weights,
)
from .core import (
    Instance,
    RowScreen,
    Solution,
    ValueSet,
    apply_shift,
    apply_swap,
    compute_residual,
    round_to_nearest,
    row_screen,
    two_nearest,
)
from .io import (
    InstanceParseError,
    export_lp,
    instance_to_text,
    read_instance,
    write_instance,
    write_solution,
)
from .localsearch import (
    FilterConfig,
    SwapCandidate,
    best_swap,
    find_candidates,
    is_improving,
    local_search,
    one_opt,
)
from .operators import (
    DestroySet,
    ImpactScores,
    greedy_repair,
    impact_scores,
    random_destroy,
    random_repair,
    worst_remove_destroy,
)
from .oracle import (
    BudgetExceededError,
    OracleResult,
    SwapCheckReport,
    brute_force,
    exhaustive_swap_check,
)

__all__ = [
    "__version__",
    "Instance",
    "RowScreen",
    "Solution",
    "ValueSet",
    "apply_shift",
    "apply_swap",
    "compute_residual",
    "round_to_nearest",
    "row_screen",
    "two_nearest",
    "DestroySet",
    "ImpactScores",
    "greedy_repair",
    "impact_scores",
    "random_destroy",
    "random_repair",
    "worst_remove_destroy",
    "FilterConfig",
    "SwapCandidate",
    "best_swap",
    "find_candidates",
    "is_improving",
    "local_search",
    "one_opt",
    "OperatorBank",
    "SolveReport",
    "SolverConfig",
    "TraceEntry",
    "accept",
    "initial_solution",
    "select_operators",
    "solve",
    "update_weights",
    "BudgetExceededError",
    "OracleResult",
    "SwapCheckReport",
    "brute_force",
    "exhaustive_swap_check",
    "FirSpec",
    "QuantSpec",
    "SubsetSumSpec",
    "TomoSpec",
    "apply_fir",
    "build_fir",
    "build_phantom",
    "build_quant",
    "build_subsetsum",
    "build_tomo",
    "fixed_point_levels",
    "mae",
    "parallel_beam_matrix",
    "ripple",
    "sirt",
    "symmetric_taps",
    "InstanceParseError",
    "export_lp",
    "instance_to_text",
    "read_instance",
    "write_instance",
    "write_solution",
]
