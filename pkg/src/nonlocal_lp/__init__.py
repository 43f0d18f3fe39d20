"""Exact classical and no-signaling values of nonlocal games."""

from .errors import BudgetExceeded, GameError
from .games import (
    DeterministicStrategy,
    Game,
    classical_value,
    extend,
    make_chsh,
    make_chsh_triangle,
    make_odd_cycle,
)
from .lp import (
    LinearProgram,
    LpBuilder,
    LpSolution,
    LpStatus,
    LpStructureError,
    check_dual_feasible,
    solve,
)
from .nspolytope import (
    Behavior,
    FrontierPoint,
    build_ns_lp,
    chsh_expectation,
    chsh_tradeoff_max,
    ns_value,
    validate_behavior,
)
from .oddcycle import (
    DualCertificate,
    build_reduced_lp,
    closed_form_certificate,
    reduced_cost,
    reduced_ns_value,
    verify_certificate,
)

__version__ = "0.1.0"
