"""Deterministic random streams shared by the pure and compiled engines.

Every source of randomness in the simulator is a splitmix64 stream.  The
compiled engine re-implements `SplitMix64` with the same bit-level behaviour,
so a trial replays identically on either engine; any change here must be
mirrored in ``_kernels.pyx``.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """The splitmix64 finalizer: a strong 64-bit mixing function."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *tags: int) -> int:
    """Derive a stream seed from a master seed and integer tags.

    Stable by construction: adding trials or streams never perturbs seeds
    derived with other tags.
    """
    h = master & _MASK64
    for tag in tags:
        h = mix64((h + _GAMMA) & _MASK64)
        h = mix64(h ^ (tag & _MASK64))
    return h


class SplitMix64:
    """Minimal deterministic generator: 64-bit state, one add + mix per draw."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) by masked rejection (exact)."""
        if bound <= 1:
            return 0
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            v = self.next64() & mask
            if v < bound:
                return v

    def unif01(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next64() >> 11) * 1.1102230246251565e-16  # 2**-53


# Stream tags (shared vocabulary for seed derivation).
TAG_WORLD = 1
TAG_ALGO = 2
TAG_INIT = 11
TAG_EVOLUTION = 12
