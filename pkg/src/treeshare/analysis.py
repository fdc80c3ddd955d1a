"""Stability checks and counting instrumentation for tree games.

Core membership and convexity are verified exhaustively on small trees; the
counting functions report, per node, how many coalitions each Shapley route
has to look at, which is what makes the dedicated routes worthwhile.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .allocation import Allocation
from .games import TreeGame, basic_game, coalition_values_by_mask
from .shapley import SizeLimitError, shapley_basic, shapley_bruteforce, shapley_general
from .tree import Coalition, RootedTree


@dataclass(frozen=True)
class CoreCheckResult:
    """Outcome of an exhaustive core membership check."""

    in_core: bool
    violator: Coalition | None = None
    deficit: Fraction | None = None


def is_in_core(
    game: TreeGame, allocation: Allocation, limit: int = 16
) -> CoreCheckResult:
    """Check that no coalition is owed more than the allocation pays it.

    Exhaustive over all ``2**n`` coalitions. The reported violator, if any,
    is the lexicographically smallest one (by sorted member list), with the
    amount by which it is short-changed.
    """
    tree = game.tree
    n = tree.n
    if n > limit:
        raise SizeLimitError(f"core check over {n} agents exceeds limit {limit}")
    grand = game.f.of(tree.trim(tree.node_ids))
    if allocation.total != grand:
        raise ValueError(
            f"allocation total {allocation.total} does not distribute the "
            f"grand coalition value {grand}"
        )
    values = coalition_values_by_mask(game)
    ids = tree._ids
    payoff = [allocation[ids[r]] for r in range(n)]

    paysum: list[Fraction] = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        paysum[mask] = paysum[mask ^ low] + payoff[low.bit_length() - 1]

    best_key: tuple[int, ...] | None = None
    best_mask = 0
    for mask in range(1, 1 << n):
        if paysum[mask] >= values[mask]:
            continue
        key = tuple(sorted(ids[r] for r in range(n) if mask & (1 << r)))
        if best_key is None or key < best_key:
            best_key, best_mask = key, mask
    if best_key is None:
        return CoreCheckResult(in_core=True)
    return CoreCheckResult(
        in_core=False,
        violator=frozenset(best_key),
        deficit=values[best_mask] - paysum[best_mask],
    )


@dataclass(frozen=True)
class ConvexityResult:
    """Outcome of a convexity check, with a counterexample when it fails."""

    convex: bool
    agent: int | None = None
    smaller: Coalition | None = None
    larger: Coalition | None = None


def is_convex(game: TreeGame, limit: int = 12) -> ConvexityResult:
    """Check that marginal contributions never shrink as coalitions grow.

    It suffices to compare each coalition against its one-element extensions;
    monotonicity along chains then covers every nested pair. The first
    violation found (coalitions in ascending mask order, then agents in
    canonical order) is returned as a witness.
    """
    tree = game.tree
    n = tree.n
    if n > limit:
        raise SizeLimitError(f"convexity check over {n} agents exceeds limit {limit}")
    values = coalition_values_by_mask(game)
    ids = tree._ids
    for mask in range(1 << n):
        for j in range(n):
            jbit = 1 << j
            if mask & jbit:
                continue
            bigger = mask | jbit
            for i in range(n):
                ibit = 1 << i
                if i == j or (mask & ibit):
                    continue
                mc_small = values[mask | ibit] - values[mask]
                mc_big = values[bigger | ibit] - values[bigger]
                if mc_small > mc_big:
                    members = [ids[r] for r in range(n) if mask & (1 << r)]
                    return ConvexityResult(
                        convex=False,
                        agent=ids[i],
                        smaller=frozenset(members),
                        larger=frozenset(members) | {ids[j]},
                    )
    return ConvexityResult(convex=True)


def count_trimmed_containing(tree: RootedTree, i: int) -> int:
    """How many trimmed coalitions contain node ``i``.

    Dynamic programming: a node's subtree admits ``prod(1 + t(child))``
    parent-closed sets through it. Forcing ``i`` and its ancestors in leaves
    a free choice exactly at the children hanging off the forced path.
    """
    n = tree.n
    children = tree._children
    t = [1] * n
    for r in range(n - 1, -1, -1):
        product = 1
        for c in children[r]:
            product *= 1 + t[c]
        t[r] = product

    forced = set()
    r = tree._rank_of(i)
    while r >= 0:
        forced.add(r)
        r = tree._parents[r]
    result = 1
    for v in forced:
        for c in children[v]:
            if c not in forced:
                result *= 1 + t[c]
    return result


def binary_tree_count(h: int, d: int) -> int:
    """Trimmed coalitions containing a depth-``d`` node of a perfect binary
    tree of height ``h``, by the closed-form recurrence.

    Uses the sequence ``y_0 = 0`` and ``y_j = (y_{j-1} + 1)**2``; ``y_j``
    counts the root-containing parent-closed sets of a perfect subtree of
    height ``j - 1``.
    """
    if h < 0 or d < 0 or d > h:
        raise ValueError(f"need 0 <= d <= h, got h={h}, d={d}")
    y = [0] * (h + 1)
    for j in range(1, h + 1):
        y[j] = (y[j - 1] + 1) ** 2
    result = (y[h - d] + 1) ** 2
    for j in range(h - d + 1, h + 1):
        result *= y[j] + 1
    return result


def is_complete_binary_tree(tree: RootedTree) -> bool:
    """True for a perfect binary tree: every internal node has two children
    and every leaf sits at the bottom level."""
    h = tree.height
    if tree.n != 2 ** (h + 1) - 1:
        return False
    for i in tree.node_ids:
        kids = tree.children(i)
        if kids:
            if len(kids) != 2:
                return False
        elif tree.depth(i) != h:
            return False
    return True


@dataclass(frozen=True)
class ComplexityRow:
    """Per-node coalition counts for the three Shapley routes."""

    node: int
    cfg_count: int
    tree_game_count: int
    basic_count: int


def complexity_table(tree: RootedTree) -> list[ComplexityRow]:
    """Counts per node: all coalitions without the node (generic route),
    trimmed coalitions containing it (tree-game route), and subtree levels
    (basic route)."""
    cfg = 2 ** (tree.n - 1)
    return [
        ComplexityRow(
            node=i,
            cfg_count=cfg,
            tree_game_count=count_trimmed_containing(tree, i),
            basic_count=tree.height_of_subtree(i) + 1,
        )
        for i in tree.node_ids
    ]


# -- verification driver -------------------------------------------------

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

# enumerate_trimmed_containing work allowed for the closed-form cross-check
# before it is skipped; keeps verify responsive on bushy trees.
GENERAL_CHECK_BUDGET = 200_000


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    status: str
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckOutcome, ...]

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)


def run_verification(
    tree: RootedTree,
    limit_bruteforce: int = 10,
    limit_core: int = 16,
    limit_convex: int = 12,
    allocation_override: Allocation | None = None,
) -> VerificationReport:
    """Cross-check every computation route on the basic game of one tree.

    ``allocation_override`` substitutes the allocation used for the core
    check, which lets a corrupted allocation be injected under test.
    """
    game = basic_game(tree)
    checks: list[CheckOutcome] = []
    closed_form = shapley_basic(tree)
    allocation = allocation_override if allocation_override is not None else closed_form

    if tree.n <= limit_bruteforce:
        oracle = shapley_bruteforce(game, limit=limit_bruteforce)
        status = PASS if oracle.rewards == closed_form.rewards else FAIL
        checks.append(CheckOutcome("closed form vs brute force", status))
    else:
        checks.append(
            CheckOutcome(
                "closed form vs brute force",
                SKIPPED,
                f"n={tree.n} exceeds brute-force limit {limit_bruteforce}",
            )
        )

    general_work = sum(count_trimmed_containing(tree, i) for i in tree.node_ids)
    if general_work <= GENERAL_CHECK_BUDGET:
        general = shapley_general(game)
        status = PASS if general.rewards == closed_form.rewards else FAIL
        checks.append(CheckOutcome("closed form vs trimmed-coalition sum", status))
    else:
        checks.append(
            CheckOutcome(
                "closed form vs trimmed-coalition sum",
                SKIPPED,
                f"{general_work} trimmed coalitions exceed budget "
                f"{GENERAL_CHECK_BUDGET}",
            )
        )

    status = PASS if closed_form.total == tree.n else FAIL
    checks.append(
        CheckOutcome("efficiency (rewards sum to n)", status, f"total={closed_form.total}")
    )

    if tree.n <= limit_core:
        result = is_in_core(game, allocation, limit=limit_core)
        if result.in_core:
            checks.append(CheckOutcome("core membership", PASS))
        else:
            checks.append(
                CheckOutcome(
                    "core membership",
                    FAIL,
                    f"coalition {sorted(result.violator)} short by {result.deficit}",
                )
            )
    else:
        checks.append(
            CheckOutcome(
                "core membership", SKIPPED, f"n={tree.n} exceeds core limit {limit_core}"
            )
        )

    if tree.n <= limit_convex:
        result = is_convex(game, limit=limit_convex)
        if result.convex:
            checks.append(CheckOutcome("convexity", PASS))
        else:
            checks.append(
                CheckOutcome(
                    "convexity",
                    FAIL,
                    f"agent {result.agent} loses by joining "
                    f"{sorted(result.larger)} vs {sorted(result.smaller)}",
                )
            )
    else:
        checks.append(
            CheckOutcome(
                "convexity", SKIPPED, f"n={tree.n} exceeds convexity limit {limit_convex}"
            )
        )

    return VerificationReport(tuple(checks))
