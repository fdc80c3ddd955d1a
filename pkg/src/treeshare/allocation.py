"""Exact per-node reward vectors and the display rounding rule."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational


def as_fraction(value: Rational | int | str) -> Fraction:
    """Coerce to an exact rational.

    Accepts integers, Fractions, and strings like "7/6" or "0.25". Floats are
    rejected: binary floats silently misrepresent most decimal inputs, and
    everything in this package is exact end-to-end.
    """
    if isinstance(value, float):
        raise TypeError(
            f"refusing to convert float {value!r}; pass an int, Fraction, or string"
        )
    return Fraction(value)


def round_half_away_from_zero(value: Fraction) -> int:
    """Round to the nearest integer, breaking ties away from zero.

    This is the rule consistent with printed reward tables where 1166.66...
    shows as 1167 and 333.33... as 333.
    """
    value = Fraction(value)
    n, d = abs(value).numerator, abs(value).denominator
    magnitude = (2 * n + d) // (2 * d)
    return magnitude if value >= 0 else -magnitude


@dataclass(frozen=True)
class Allocation:
    """An exact reward per node id.

    The total is cached and always equals the sum of the rewards; for Shapley
    allocations it equals the grand-coalition value.
    """

    rewards: dict[int, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rewards", dict(self.rewards))

    @cached_property
    def total(self) -> Fraction:
        return sum(self.rewards.values(), Fraction(0))

    def __getitem__(self, node: int) -> Fraction:
        return self.rewards[node]

    def __contains__(self, node: int) -> bool:
        return node in self.rewards

    def __len__(self) -> int:
        return len(self.rewards)

    def get(self, node: int, default: Fraction = Fraction(0)) -> Fraction:
        return self.rewards.get(node, default)

    def items(self) -> list[tuple[int, Fraction]]:
        """(node, reward) pairs in ascending node order."""
        return sorted(self.rewards.items())

    def __add__(self, other: "Allocation") -> "Allocation":
        merged = dict(self.rewards)
        for node, value in other.rewards.items():
            merged[node] = merged.get(node, Fraction(0)) + value
        return Allocation(merged)

    def scaled(self, k: Rational | int | str) -> "Allocation":
        k = as_fraction(k)
        return Allocation({node: k * value for node, value in self.rewards.items()})

    def display(self) -> dict[int, int]:
        """Rewards rounded half-away-from-zero, keyed by node id."""
        return {node: round_half_away_from_zero(v) for node, v in self.items()}


def adopt_rewards(rewards: dict[int, Fraction]) -> Allocation:
    """Wrap an already-private dict without copying.

    For hot paths that build a fresh dict per call; the caller must not touch
    the mapping afterwards.
    """
    allocation = object.__new__(Allocation)
    object.__setattr__(allocation, "rewards", rewards)
    return allocation
