"""Partition enumeration: signatures versus brute-force set partitions."""

import math
from itertools import combinations

import pytest

from cellmimo.combinatorics import (
    IntegerPartition,
    SetPartitionSignature,
    bell_number,
    integer_partitions,
    set_partition_signatures,
)
from cellmimo.errors import SizeGuardError

# OEIS A000110 and A000041.
_BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]
_PARTITION_COUNTS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def _all_set_partitions(items):
    """Every set partition of ``items``, by recursion on the first element."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest) + 1):
        for companions in combinations(rest, k):
            block = [first, *companions]
            remaining = [x for x in rest if x not in companions]
            for sub in _all_set_partitions(remaining):
                yield [block] + sub


def test_signature_weights_match_brute_force():
    for order in range(0, 9):
        histogram: dict[tuple[tuple[int, int], ...], int] = {}
        for partition in _all_set_partitions(range(order)):
            sizes: dict[int, int] = {}
            for block in partition:
                sizes[len(block)] = sizes.get(len(block), 0) + 1
            key = tuple(sorted(sizes.items()))
            histogram[key] = histogram.get(key, 0) + 1
        signatures = set_partition_signatures(order)
        assert {s.size_multiplicity: s.weight for s in signatures} == histogram


def test_signature_fields_consistent():
    for order in range(0, 12):
        signatures = set_partition_signatures(order)
        for sig in signatures:
            assert sig.order == order
            assert sig.block_count == sum(c for _, c in sig.size_multiplicity)
        assert sum(s.weight for s in signatures) == bell_number(order)


def test_bell_numbers():
    assert [bell_number(n) for n in range(len(_BELL))] == _BELL


def test_integer_partition_counts():
    for n, count in enumerate(_PARTITION_COUNTS):
        parts = integer_partitions(n)
        assert len(parts) == count
        assert len(set(parts)) == count  # no duplicates
        for p in parts:
            assert p.total == n


def test_integer_partition_zero_is_empty():
    (empty,) = integer_partitions(0)
    assert empty.parts == ()
    assert empty.length == 0 and empty.total == 0


def test_integer_partition_accessors():
    p = IntegerPartition((3, 2, 2, 1))
    assert p.total == 8
    assert p.length == 4
    assert p.distinct_multiplicity == ((3, 1), (2, 2), (1, 1))
    assert p.multiplicity_factorial() == 2


def test_integer_partition_validation():
    with pytest.raises(ValueError):
        IntegerPartition((2, 3))  # increasing
    with pytest.raises(ValueError):
        IntegerPartition((2, 0))  # nonpositive part


def test_signature_weight_formula():
    # Spot check k!/prod (j!)^m_j m_j! against a hand computation: order 4,
    # signature {2: 2} -> 4!/(2!^2 * 2!) = 3 set partitions.
    sig = next(
        s for s in set_partition_signatures(4) if s.size_multiplicity == ((2, 2),)
    )
    assert sig.weight == 3 and sig.block_count == 2


def test_size_guards():
    with pytest.raises(SizeGuardError):
        set_partition_signatures(21)
    with pytest.raises(SizeGuardError):
        integer_partitions(33)
    with pytest.raises(ValueError):
        set_partition_signatures(-1)
    with pytest.raises(ValueError):
        integer_partitions(-2)


def test_partition_count_matches_signature_count():
    # Signatures of order k are in bijection with integer partitions of k.
    for order in range(0, 11):
        assert len(set_partition_signatures(order)) == len(integer_partitions(order))


def test_largest_guarded_orders_enumerate():
    assert sum(s.weight for s in set_partition_signatures(20)) == bell_number(20)
    assert len(integer_partitions(32)) == 8349
    assert math.isclose(bell_number(20), 5.17242e13, rel_tol=1e-5)
