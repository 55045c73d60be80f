"""Tail-biting convolutional coding, puncturing, interleaving, Viterbi decoding.

Encoder
-------
Constraint length 7, native rate 1/2, generators 171/133 (octal, MSB =
coefficient of the current bit).  Tail-biting: the encoder starts in the
state formed by the last six information bits, so the codeword is the
circular convolution of the info block with each generator and carries no
termination overhead.  One FEC block is the coded payload of one OFDM
symbol on one spatial stream.

Puncturing
----------
Per pair of native output bits (X_i, Y_i):

* rate 1/2 : X1 Y1            (identity)
* rate 2/3 : X1 Y1 Y2         (drop X2, period 4)
* rate 3/4 : X1 Y1 Y2 X3      (drop X2 and Y3, period 6)

Decoder
-------
Soft-decision Viterbi on the 64-state trellis.  LLR sign convention:
positive means bit 0 is more likely.  Tail-biting is handled by the
wrap-around method: the trellis is run ``n_passes`` times (default 2)
over the circularly repeated block with uniform initial metrics, and the
traceback of the final pass is kept.  The end state is chosen among
those whose final-pass survivor starts and ends in the same state (a
genuine circular codeword), ranked by the metric of that final pass;
only if no survivor closes the circle does the decoder fall back to the
best open path.  This is the standard near-ML circular decode; exact
maximum-likelihood search over all tail-biting codewords is retained in
the test suite as an oracle for tiny blocks.

Interleaving
------------
Two-step block permutation with 12 columns.  With ``n`` coded bits per
symbol and ``c`` bits per constellation symbol, bit index ``k`` moves to

    m = (n / 12) * (k mod 12) + floor(k / 12)
    j = s * floor(m / s) + (m + n - floor(12 m / n)) mod s,   s = max(c/2, 1)

The first step separates adjacent coded bits by at least 12 subcarrier
positions; the second alternates adjacent coded bits between high- and
low-reliability constellation bit positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit

__all__ = [
    "CodeConfig",
    "SoftBits",
    "cc_encode",
    "puncture",
    "depuncture",
    "viterbi_decode",
    "interleave",
    "deinterleave",
    "PUNCTURE_KEEP",
]

CONSTRAINT_LENGTH = 7
GENERATORS = (0o171, 0o133)

PUNCTURE_KEEP = {
    Fraction(1, 2): np.array([1, 1], dtype=bool),
    Fraction(2, 3): np.array([1, 1, 0, 1], dtype=bool),
    Fraction(3, 4): np.array([1, 1, 0, 1, 1, 0], dtype=bool),
}


@dataclass(frozen=True)
class CodeConfig:
    """Convolutional code configuration for one burst profile."""

    puncture_rate: Fraction = Fraction(1, 2)
    constraint_length: int = CONSTRAINT_LENGTH
    native_rate: Fraction = Fraction(1, 2)
    generators: tuple[int, int] = GENERATORS

    def __post_init__(self):
        if self.constraint_length != 7 or self.native_rate != Fraction(1, 2):
            raise ValueError("only the K=7, rate-1/2 mother code is supported")
        if self.puncture_rate not in PUNCTURE_KEEP:
            raise ValueError(
                f"puncture rate {self.puncture_rate} not in {{1/2, 2/3, 3/4}}"
            )


@dataclass
class SoftBits:
    """Native-rate LLR block with per-position erasure bookkeeping.

    Erased positions (removed by the puncturer) carry LLR exactly 0.
    """

    llrs: np.ndarray
    erased: np.ndarray


def _tap_offsets(generator: int, k: int = CONSTRAINT_LENGTH) -> tuple[int, ...]:
    """Delay offsets with a set coefficient, MSB = delay 0 (current bit)."""
    return tuple(i for i in range(k) if (generator >> (k - 1 - i)) & 1)


def cc_encode(info: np.ndarray, cfg: CodeConfig = CodeConfig()) -> np.ndarray:
    """Tail-biting encode at the native rate 1/2.

    Output bits are interleaved per input bit: X1 Y1 X2 Y2 ...  The
    codeword is the circular binary convolution of ``info`` with each
    generator, so the map is linear over GF(2) and the encoder end state
    equals its start state.
    """
    info = np.asarray(info, dtype=np.uint8)
    if info.ndim != 1:
        raise ValueError("info block must be one-dimensional")
    if info.size < CONSTRAINT_LENGTH - 1:
        raise ValueError(
            f"tail-biting needs at least {CONSTRAINT_LENGTH - 1} info bits, "
            f"got {info.size}"
        )
    out = np.empty((info.size, 2), dtype=np.uint8)
    for col, gen in enumerate(cfg.generators):
        acc = np.zeros(info.size, dtype=np.uint8)
        for off in _tap_offsets(gen):
            acc ^= np.roll(info, off)
        out[:, col] = acc
    return out.reshape(-1)


def puncture(coded: np.ndarray, rate: Fraction) -> np.ndarray:
    """Delete native coded bits per the fixed pattern for ``rate``."""
    coded = np.asarray(coded)
    keep = PUNCTURE_KEEP.get(rate)
    if keep is None:
        raise ValueError(f"puncture rate {rate} not in {{1/2, 2/3, 3/4}}")
    period = keep.size
    if coded.size % period:
        raise ValueError(
            f"coded length {coded.size} is not a multiple of the puncture "
            f"period {period} for rate {rate}"
        )
    return coded.reshape(-1, period)[:, keep].reshape(-1)


def depuncture(soft: np.ndarray, rate: Fraction) -> SoftBits:
    """Restore punctured positions as zero-LLR erasures.

    Inverse index bookkeeping of :func:`puncture`: surviving LLRs return
    to their native positions and deleted positions are flagged erased.
    """
    soft = np.asarray(soft, dtype=np.float64)
    keep = PUNCTURE_KEEP.get(rate)
    if keep is None:
        raise ValueError(f"puncture rate {rate} not in {{1/2, 2/3, 3/4}}")
    period = keep.size
    n_kept = int(keep.sum())
    if soft.size % n_kept:
        raise ValueError(
            f"soft length {soft.size} is not a multiple of {n_kept} "
            f"(kept bits per period) for rate {rate}"
        )
    n_periods = soft.size // n_kept
    llrs = np.zeros((n_periods, period), dtype=np.float64)
    llrs[:, keep] = soft.reshape(n_periods, n_kept)
    erased = np.tile(~keep, n_periods)
    return SoftBits(llrs=llrs.reshape(-1), erased=erased)


# --- trellis tables -------------------------------------------------------
#
# State = (u[k-1], ..., u[k-6]) packed with the most recent bit in bit 5.
# next_state[s, u] and the ±1 branch signs (+1 encodes bit 0) are built
# once per generator pair.


@lru_cache(maxsize=4)
def _trellis(generators: tuple[int, int]):
    n_states = 1 << (CONSTRAINT_LENGTH - 1)
    next_state = np.empty((n_states, 2), dtype=np.int64)
    sgn = np.empty((2, n_states, 2), dtype=np.float64)  # [output, state, input]
    offs = [_tap_offsets(g) for g in generators]
    for s in range(n_states):
        for u in (0, 1):
            next_state[s, u] = (s >> 1) | (u << 5)
            for col in (0, 1):
                bit = 0
                for i in offs[col]:
                    # delay i: i == 0 is the current bit, else state bit 6-i
                    bit ^= u if i == 0 else (s >> (6 - i)) & 1
                sgn[col, s, u] = 1.0 - 2.0 * bit
    return next_state, sgn[0], sgn[1]


@njit(cache=True)
def _viterbi_wrap(l0, l1, sgn_x, sgn_y, next_state, n_info):  # pragma: no cover
    total = l0.shape[0]
    n_states = next_state.shape[0]
    pm = np.zeros(n_states, dtype=np.float64)
    new_pm = np.empty(n_states, dtype=np.float64)
    mid_pm = np.zeros(n_states, dtype=np.float64)
    bp = np.empty((total, n_states), dtype=np.uint8)
    mid = total - n_info
    for t in range(total):
        if t == mid:
            for s in range(n_states):
                mid_pm[s] = pm[s]
        for ns in range(n_states):
            new_pm[ns] = -np.inf
        a = l0[t]
        b = l1[t]
        for s in range(n_states):
            base = pm[s]
            for u in range(2):
                ns = next_state[s, u]
                cand = base + sgn_x[s, u] * a + sgn_y[s, u] * b
                if cand > new_pm[ns]:
                    new_pm[ns] = cand
                    bp[t, ns] = np.uint8((s << 1) | u)
        for ns in range(n_states):
            pm[ns] = new_pm[ns]
    # Prefer an end state whose final-pass survivor closes the circle
    # (segment start state == end state): only such paths correspond to
    # actual tail-biting codewords.  Rank them by the metric accumulated
    # over the final pass alone.  An open-path argmax would pick a
    # non-codeword whenever the wrap transition is corrupted just enough
    # to tie the end metrics.
    best = -1
    best_metric = -np.inf
    for e in range(n_states):
        cur = np.int64(e)
        for t in range(total - 1, mid - 1, -1):
            cur = np.int64(bp[t, cur]) >> np.int64(1)
        if cur == np.int64(e):
            seg = pm[e] - mid_pm[e]
            if seg > best_metric:
                best_metric = seg
                best = e
    if best < 0:
        best = 0
        for s in range(1, n_states):
            if pm[s] > pm[best]:
                best = s
    bits = np.empty(total, dtype=np.uint8)
    cur = np.int64(best)
    for t in range(total - 1, -1, -1):
        code = np.int64(bp[t, cur])
        bits[t] = code & 1
        cur = code >> np.int64(1)
    return bits[total - n_info :]


def viterbi_decode(
    soft: SoftBits | np.ndarray,
    cfg: CodeConfig = CodeConfig(),
    n_passes: int = 2,
) -> np.ndarray:
    """Wrap-around soft Viterbi decode of one tail-biting block.

    ``soft`` must hold the native-rate LLR block (length 2 x info bits,
    erasures already zero-filled).  Hard-decision decoding is available
    by feeding ±1 LLRs.  Returns the decoded info bits as uint8.
    """
    llrs = soft.llrs if isinstance(soft, SoftBits) else np.asarray(soft)
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.size % 2:
        raise ValueError("native LLR block must be 1-D with even length")
    n_info = llrs.size // 2
    if n_info < CONSTRAINT_LENGTH - 1:
        raise ValueError(
            f"block too short for the trellis: {n_info} info bits"
        )
    if n_passes < 1:
        raise ValueError("n_passes must be >= 1")
    next_state, sgn_x, sgn_y = _trellis(cfg.generators)
    pairs = llrs.reshape(n_info, 2)
    tiled = np.tile(pairs, (n_passes, 1))
    return _viterbi_wrap(
        np.ascontiguousarray(tiled[:, 0]),
        np.ascontiguousarray(tiled[:, 1]),
        sgn_x,
        sgn_y,
        next_state,
        n_info,
    )


# --- interleaver ----------------------------------------------------------

N_COLUMNS = 12


@lru_cache(maxsize=8)
def _interleave_perm(n_cbps: int, n_cpc: int) -> np.ndarray:
    if n_cbps % N_COLUMNS:
        raise ValueError(f"n_cbps {n_cbps} is not divisible by {N_COLUMNS}")
    if n_cpc not in (2, 4, 6):
        raise ValueError(f"n_cpc must be 2, 4 or 6, got {n_cpc}")
    k = np.arange(n_cbps)
    m = (n_cbps // N_COLUMNS) * (k % N_COLUMNS) + k // N_COLUMNS
    s = max(n_cpc // 2, 1)
    j = s * (m // s) + (m + n_cbps - (N_COLUMNS * m) // n_cbps) % s
    perm = j  # bit k lands at position perm[k]
    if np.unique(perm).size != n_cbps:
        raise AssertionError("interleaver permutation is not a bijection")
    return perm


def interleave(coded: np.ndarray, n_cbps: int, n_cpc: int) -> np.ndarray:
    """Apply the two-step permutation to one coded block."""
    coded = np.asarray(coded)
    if coded.size != n_cbps:
        raise ValueError(f"block length {coded.size} != n_cbps {n_cbps}")
    perm = _interleave_perm(n_cbps, n_cpc)
    out = np.empty_like(coded)
    out[perm] = coded
    return out


def deinterleave(block: np.ndarray, n_cbps: int, n_cpc: int) -> np.ndarray:
    """Exact inverse of :func:`interleave`; element-type generic."""
    block = np.asarray(block)
    if block.size != n_cbps:
        raise ValueError(f"block length {block.size} != n_cbps {n_cbps}")
    perm = _interleave_perm(n_cbps, n_cpc)
    return block[perm]
