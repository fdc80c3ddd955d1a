"""Referral-tree reward allocation with exact rational arithmetic.

Models multi-level referral programs as cooperative games on rooted trees
and computes fair payouts: the equal-shares (Shapley) mechanism alongside
refer-a-friend and geometric baselines, with brute-force oracles and
exhaustive stability checks for verification.
"""

from .allocation import Allocation, as_fraction, round_half_away_from_zero
from .analysis import (
    ComplexityRow,
    ConvexityResult,
    CoreCheckResult,
    VerificationReport,
    binary_tree_count,
    complexity_table,
    count_trimmed_containing,
    is_complete_binary_tree,
    is_convex,
    is_in_core,
    run_verification,
)
from .games import (
    MissingCoalitionValueError,
    TreeGame,
    ValueFunction,
    basic_game,
    coalition_value,
    coalition_values_by_mask,
    marginal_contribution,
    scale_game,
)
from .io import (
    InputFormatError,
    JoinEvent,
    RunConfig,
    TreeDocument,
    parse_event_log,
    parse_rational,
    parse_tree_file,
    render_report,
    render_tree_file,
    replay_events,
)
from .mechanisms import (
    MechanismSpec,
    RewardReport,
    allocate,
    allocate_geometric,
    allocate_refer_a_friend,
    allocate_shapley_mechanism,
    compare,
    geometric_raw_shares,
)
from .shapley import (
    IncrementalState,
    SizeLimitError,
    root_adjust,
    shapley_basic,
    shapley_bruteforce,
    shapley_general,
    shapley_value,
)
from .tree import (
    Coalition,
    RootedTree,
    TreeError,
    UnknownNodeError,
    build_tree,
    chain,
    complete_binary_tree,
    star,
)

__all__ = [
    "Allocation",
    "Coalition",
    "ComplexityRow",
    "ConvexityResult",
    "CoreCheckResult",
    "IncrementalState",
    "InputFormatError",
    "JoinEvent",
    "MechanismSpec",
    "MissingCoalitionValueError",
    "RewardReport",
    "RootedTree",
    "RunConfig",
    "SizeLimitError",
    "TreeDocument",
    "TreeError",
    "TreeGame",
    "UnknownNodeError",
    "ValueFunction",
    "VerificationReport",
    "allocate",
    "allocate_geometric",
    "allocate_refer_a_friend",
    "allocate_shapley_mechanism",
    "as_fraction",
    "basic_game",
    "binary_tree_count",
    "build_tree",
    "chain",
    "coalition_value",
    "coalition_values_by_mask",
    "compare",
    "complete_binary_tree",
    "complexity_table",
    "count_trimmed_containing",
    "geometric_raw_shares",
    "is_complete_binary_tree",
    "is_convex",
    "is_in_core",
    "marginal_contribution",
    "parse_event_log",
    "parse_rational",
    "parse_tree_file",
    "render_report",
    "render_tree_file",
    "replay_events",
    "root_adjust",
    "round_half_away_from_zero",
    "run_verification",
    "scale_game",
    "shapley_basic",
    "shapley_bruteforce",
    "shapley_general",
    "shapley_value",
    "star",
]
