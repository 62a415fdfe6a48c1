"""SplitMix64 generator and seed derivation.

The generator follows Steele, Lea & Flood (2014):

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)

all arithmetic modulo 2**64. Floats in [0, 1) use the top 53 bits.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()


def derive_seed(master: int, *keys) -> int:
    """Derive an independent 64-bit seed from ``master`` and a key path.

    Each key (int or str) is folded in by xor-ing its hash into the state
    and drawing one SplitMix64 output, so ``derive_seed(s, "flock", 3)``
    is stable across runs and platforms.
    """
    state = int(master) & MASK64
    for key in keys:
        if isinstance(key, str):
            h = 0xCBF29CE484222325  # FNV-1a, 64 bit
            for byte in key.encode("utf-8"):
                h = ((h ^ byte) * 0x100000001B3) & MASK64
            key = h
        state = (state ^ (int(key) & MASK64)) & MASK64
        state = (state + GOLDEN_GAMMA) & MASK64
        state = _mix(state)
    return state
