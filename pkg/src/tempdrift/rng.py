"""Deterministic seeding and shuffling primitives.

Every random choice in the toolkit flows through this module so that a run is
a pure function of (inputs, master seed) and so that an implementation in any
language can reproduce the same byte-for-byte decisions:

- context strings (e.g. "split/T2") are hashed with 64-bit FNV-1a,
- per-call seeds are SplitMix64(master_seed XOR context_hash),
- shuffles are Fisher-Yates driven by a SplitMix64 stream.

Integer draws reduce a 64-bit output modulo n. The modulo bias is at most
n / 2**64, irrelevant for reproducibility and far below statistical concern
at the corpus sizes involved; it keeps the reduction trivially portable.
"""

from __future__ import annotations

from typing import Iterable, Sequence, TypeVar

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_SM_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of `text`."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & MASK64
    return h


def splitmix64(x: int) -> int:
    """One SplitMix64 step: advance state by the golden gamma and mix."""
    z = (x + _SM_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, context: str) -> int:
    """Per-call seed for a named operation: SplitMix64(master XOR FNV-1a(context))."""
    return splitmix64((master_seed ^ fnv1a64(context)) & MASK64)


class SplitMix64:
    """SplitMix64 pseudo-random stream (Steele, Lea & Flood 2014)."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _SM_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n


def fisher_yates(items: Iterable[T], rng: SplitMix64) -> list[T]:
    """Return a new list holding `items` shuffled by the classic FY sweep."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sample_without_replacement(items: Sequence[T], count: int, rng: SplitMix64) -> list[T]:
    """First `count` entries of a Fisher-Yates shuffle of `items`."""
    if not 0 < count <= len(items):
        raise ValueError(f"count {count} out of range for {len(items)} items")
    return fisher_yates(items, rng)[:count]
