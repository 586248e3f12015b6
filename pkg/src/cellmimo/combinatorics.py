"""Partition enumeration for the derivative expansions in the coverage laws.

The higher-order terms of the coverage expressions are sums over derivatives
of an exponential of a smooth exponent function.  Expanding those with the
composite-derivative (Faa di Bruno) rule turns them into sums over set
partitions of {1..k}; only the multiset of block sizes matters, so we
enumerate *signatures* (block-size multiplicity vectors) with an exact
multiplicity weight instead of the much larger set of partitions themselves.
The matrix-determinant expansions of the MMSE law need plain integer
partitions, enumerated here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import SizeGuardError

__all__ = [
    "SetPartitionSignature",
    "IntegerPartition",
    "set_partition_signatures",
    "integer_partitions",
    "bell_number",
]

# Enumeration guards.  p(32) = 8349 integer partitions and Bell(20) ~ 5.2e13
# set partitions (collapsed to p(20) = 627 signatures) keep everything small;
# beyond these sizes the analytic sums are the wrong tool anyway.
_MAX_SET_PARTITION_ORDER = 20
_MAX_INTEGER_PARTITION_ORDER = 32


@dataclass(frozen=True)
class SetPartitionSignature:
    """Block-size profile of a family of set partitions of {1..k}.

    Attributes
    ----------
    size_multiplicity : tuple of (block_size, count) pairs, sizes increasing.
    block_count : total number of blocks (sum of counts).
    weight : how many set partitions of {1..k} share this profile,
        k! / prod_j (j!)^{m_j} m_j!  (an exact integer).
    """

    size_multiplicity: tuple[tuple[int, int], ...]
    block_count: int
    weight: int

    @property
    def order(self) -> int:
        """k, the size of the underlying ground set."""
        return sum(size * count for size, count in self.size_multiplicity)


@dataclass(frozen=True)
class IntegerPartition:
    """A partition of an integer into nonincreasing positive parts."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(p <= 0 for p in self.parts):
            raise ValueError(f"partition parts must be positive: {self.parts}")
        if any(self.parts[i] < self.parts[i + 1] for i in range(len(self.parts) - 1)):
            raise ValueError(f"partition parts must be nonincreasing: {self.parts}")

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def distinct_multiplicity(self) -> tuple[tuple[int, int], ...]:
        """(value, multiplicity) pairs for the distinct part values, descending."""
        out: list[tuple[int, int]] = []
        for p in self.parts:
            if out and out[-1][0] == p:
                out[-1] = (p, out[-1][1] + 1)
            else:
                out.append((p, 1))
        return tuple(out)

    def multiplicity_factorial(self) -> int:
        """prod over distinct part values of (multiplicity!)."""
        out = 1
        for _, mult in self.distinct_multiplicity:
            out *= math.factorial(mult)
        return out


def _partition_tuples(n: int, max_part: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    out: list[tuple[int, ...]] = []
    for first in range(min(max_part, n), 0, -1):
        for rest in _partition_tuples(n - first, first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def integer_partitions(total: int) -> tuple[IntegerPartition, ...]:
    """All partitions of ``total`` into nonincreasing positive parts.

    ``total = 0`` yields the single empty partition.  Results are cached;
    callers must treat them as immutable.
    """
    if not isinstance(total, int) or total < 0:
        raise ValueError(f"partition total must be a nonnegative integer, got {total!r}")
    if total > _MAX_INTEGER_PARTITION_ORDER:
        raise SizeGuardError(
            f"integer_partitions({total}) exceeds the supported order "
            f"{_MAX_INTEGER_PARTITION_ORDER}"
        )
    return tuple(IntegerPartition(parts) for parts in _partition_tuples(total, total))


@lru_cache(maxsize=None)
def set_partition_signatures(order: int) -> tuple[SetPartitionSignature, ...]:
    """Block-size signatures of all set partitions of a k-element set.

    Each signature carries the exact count of set partitions realizing it,
    so weighted sums over signatures equal sums over set partitions.  The
    total weight over all signatures is the Bell number B_k (tested).
    """
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"set partition order must be a nonnegative integer, got {order!r}")
    if order > _MAX_SET_PARTITION_ORDER:
        raise SizeGuardError(
            f"set_partition_signatures({order}) exceeds the supported order "
            f"{_MAX_SET_PARTITION_ORDER}"
        )
    signatures = []
    for parts in _partition_tuples(order, order):
        mult: dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        denom = 1
        for size, count in mult.items():
            denom *= math.factorial(size) ** count * math.factorial(count)
        weight, rem = divmod(math.factorial(order), denom)
        assert rem == 0
        signatures.append(
            SetPartitionSignature(
                size_multiplicity=tuple(sorted(mult.items())),
                block_count=len(parts),
                weight=weight,
            )
        )
    return tuple(signatures)


def bell_number(order: int) -> int:
    """Number of set partitions of a k-element set (exact integer)."""
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"order must be a nonnegative integer, got {order!r}")
    # Bell triangle; exact integer arithmetic.
    row = [1]
    for _ in range(order):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]
