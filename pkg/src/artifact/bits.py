"""Small helpers for Python-int bitsets."""

from __future__ import annotations

from typing import Iterable, Iterator


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bit_list(x: int) -> list[int]:
    return list(iter_bits(x))


def mask_of(positions: Iterable[int]) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


def popcount(x: int) -> int:
    return x.bit_count()
