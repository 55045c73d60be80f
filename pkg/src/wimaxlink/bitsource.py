"""Payload bit generation and the data randomizer/derandomizer.

The randomizer XORs the payload with the output of a 15-bit linear
feedback shift register with polynomial 1 + x^14 + x^15 (the standard
downlink data-scrambling LFSR).  The same operation undoes itself, so
:func:`derandomize` is an alias kept for chain readability.  The LFSR is
reseeded at every FEC block boundary so blocks stay independently
decodable.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["generate", "prbs_sequence", "randomize", "derandomize", "PRBS_PERIOD"]

LFSR_BITS = 15
PRBS_PERIOD = (1 << LFSR_BITS) - 1  # 32767
DEFAULT_LFSR_SEED = PRBS_PERIOD  # all ones


def generate(seed: int, n: int) -> np.ndarray:
    """Draw ``n`` i.i.d. uniform payload bits, deterministic in ``seed``.

    Returns a uint8 array of zeros and ones.
    """
    if n <= 0:
        raise ValueError(f"payload length must be positive, got {n}")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=n, dtype=np.uint8)


@lru_cache(maxsize=16)
def _prbs_period(seed: int) -> bytes:
    """One full 32767-bit period of the LFSR output for a given seed.

    State convention: bit i of ``state`` (i = 0 .. 14) holds delay
    element x^(i+1).  Output = x^14 XOR x^15, fed back into x^1.
    """
    out = bytearray(PRBS_PERIOD)
    state = seed
    for k in range(PRBS_PERIOD):
        bit = ((state >> 13) ^ (state >> 14)) & 1
        out[k] = bit
        state = ((state << 1) | bit) & PRBS_PERIOD
    return bytes(out)


def prbs_sequence(lfsr_seed: int, n: int) -> np.ndarray:
    """First ``n`` output bits of the randomizer LFSR started at ``lfsr_seed``."""
    if not 0 < lfsr_seed <= PRBS_PERIOD:
        raise ValueError(
            f"lfsr_seed must be a nonzero 15-bit state, got {lfsr_seed}"
        )
    period = np.frombuffer(_prbs_period(lfsr_seed), dtype=np.uint8)
    if n <= PRBS_PERIOD:
        return period[:n].copy()
    reps = -(-n // PRBS_PERIOD)
    return np.tile(period, reps)[:n]


def randomize(block: np.ndarray, lfsr_seed: int = DEFAULT_LFSR_SEED) -> np.ndarray:
    """XOR a bit block with the LFSR output sequence.

    Self-inverse for a fixed seed.  A zero seed stalls the LFSR and is
    rejected.
    """
    block = np.asarray(block, dtype=np.uint8)
    if block.size == 0:
        raise ValueError("cannot randomize an empty block")
    return block ^ prbs_sequence(lfsr_seed, block.size)


def derandomize(block: np.ndarray, lfsr_seed: int = DEFAULT_LFSR_SEED) -> np.ndarray:
    """Inverse of :func:`randomize` (the identical XOR operation)."""
    return randomize(block, lfsr_seed)
