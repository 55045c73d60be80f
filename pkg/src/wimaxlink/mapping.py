"""Gray-coded QPSK/16-QAM/64-QAM mapping and soft/hard demapping.

Constellation convention
------------------------
Square constellations built per axis: the first half of a symbol's bits
selects the I coordinate, the second half the Q coordinate, MSB first.
Each axis uses a binary-reflected Gray labelling over the amplitude
levels ordered high to low, so label 0...0 sits on the positive
half-axis and QPSK bits (0, 0) map to (+1+j)/sqrt(2).  Normalisation is
1/sqrt(2), 1/sqrt(10), 1/sqrt(42) so average symbol energy is exactly 1
under uniform bits.

Soft demapping uses per-bit max-log LLRs with the convention that a
positive LLR favours bit 0.  Because the labelling is separable per
axis, the per-axis max-log LLR equals the full two-dimensional one.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .params import BurstProfile

__all__ = [
    "map_bits",
    "demap_soft",
    "demap_hard",
    "constellation",
    "axis_levels",
]

_NORM = {2: 1.0 / np.sqrt(2.0), 4: 1.0 / np.sqrt(10.0), 6: 1.0 / np.sqrt(42.0)}


@lru_cache(maxsize=8)
def axis_levels(bits_per_axis: int) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude level and Gray label tables for one I/Q axis.

    Returns ``(level_for_label, label_for_index)`` where
    ``level_for_label[g]`` is the unnormalised amplitude carried by axis
    label ``g`` and ``label_for_index[i]`` is the Gray label of the i-th
    level counted from the positive end.
    """
    m = 1 << bits_per_axis
    idx = np.arange(m)
    levels = (m - 1) - 2 * idx  # +(m-1), ..., -(m-1) in steps of 2
    gray = idx ^ (idx >> 1)
    level_for_label = np.empty(m, dtype=np.float64)
    level_for_label[gray] = levels
    return level_for_label, gray


@lru_cache(maxsize=8)
def constellation(modulation: str) -> tuple[np.ndarray, int]:
    """Complex constellation table indexed by the symbol label integer.

    Label bits are MSB first; the upper half addresses the I axis, the
    lower half the Q axis.  Returns ``(points, bits_per_symbol)``.
    """
    n_b = {"qpsk": 2, "16qam": 4, "64qam": 6}.get(modulation)
    if n_b is None:
        raise ValueError(f"unsupported modulation {modulation!r}")
    half = n_b // 2
    level_for_label, _ = axis_levels(half)
    labels = np.arange(1 << n_b)
    i_label = labels >> half
    q_label = labels & ((1 << half) - 1)
    points = (level_for_label[i_label] + 1j * level_for_label[q_label]) * _NORM[n_b]
    return points, n_b


def _pack_bits(bits: np.ndarray, width: int) -> np.ndarray:
    weights = 1 << np.arange(width - 1, -1, -1)
    return bits.reshape(-1, width) @ weights


def map_bits(bits: np.ndarray, profile: BurstProfile) -> np.ndarray:
    """Map a bit block onto unit-average-energy constellation symbols."""
    bits = np.asarray(bits, dtype=np.uint8)
    points, n_b = constellation(profile.modulation)
    if bits.size == 0 or bits.size % n_b:
        raise ValueError(
            f"bit count {bits.size} is not a positive multiple of {n_b} "
            f"for {profile.modulation}"
        )
    return points[_pack_bits(bits, n_b)]


def _axis_coords(symbols: np.ndarray, n_b: int) -> tuple[np.ndarray, np.ndarray]:
    scale = 1.0 / _NORM[n_b]
    return symbols.real * scale, symbols.imag * scale


def demap_hard(symbols: np.ndarray, profile: BurstProfile) -> np.ndarray:
    """Nearest-point hard decisions, returned as a flat bit array."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    _, n_b = constellation(profile.modulation)
    half = n_b // 2
    m = 1 << half
    _, label_for_index = axis_levels(half)
    out = np.empty((symbols.size, n_b), dtype=np.uint8)
    for col, coord in enumerate(_axis_coords(symbols.ravel(), n_b)):
        # level index from the positive end; exact nearest for square QAM
        idx = np.clip(np.round(((m - 1) - coord) / 2.0), 0, m - 1).astype(np.int64)
        labels = label_for_index[idx]
        for b in range(half):
            out[:, col * half + b] = (labels >> (half - 1 - b)) & 1
    return out.reshape(-1)


def demap_soft(
    symbols: np.ndarray,
    noise_var: float | np.ndarray,
    profile: BurstProfile,
) -> np.ndarray:
    """Per-bit max-log LLRs for equalized, unit-energy symbols.

    ``noise_var`` is the post-equalization noise variance, scalar or one
    value per symbol.  LLR(b) = (min distance^2 over points with b=1
    minus min over points with b=0) / noise_var, so the LLR sign equals
    the hard decision and scaling noise_var by c scales all LLRs by 1/c.
    """
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    _, n_b = constellation(profile.modulation)
    half = n_b // 2
    nv = np.broadcast_to(np.asarray(noise_var, dtype=np.float64), symbols.shape)
    if np.any(nv <= 0):
        raise ValueError("noise_var must be positive")
    level_for_label, _ = axis_levels(half)
    levels = level_for_label * _NORM[n_b]  # amplitude per axis label
    labels = np.arange(1 << half)
    llrs = np.empty((symbols.size, n_b), dtype=np.float64)
    for col, coord in enumerate((symbols.real, symbols.imag)):
        d2 = (coord[:, None] - levels[None, :]) ** 2  # (n, 2^half)
        for b in range(half):
            bit_of_label = (labels >> (half - 1 - b)) & 1
            d_one = d2[:, bit_of_label == 1].min(axis=1)
            d_zero = d2[:, bit_of_label == 0].min(axis=1)
            llrs[:, col * half + b] = (d_one - d_zero) / nv
    return llrs.reshape(-1)
