"""OFDM grid layout, (de)modulation, channel estimation and equalization.

One OFDM symbol occupies 512 frequency bins.  The bin roles are fixed
once here and shared by every transmitter and receiver component:

* centred bins -256..-212 (45 bins) and 210..255 (46 bins) are guards,
* the DC bin (centred 0) is null,
* the remaining 420 bins form the used band; every 7th of them,
  starting at the 4th lowest, is a pilot (60 total),
* the other 360 used bins carry data.

Data symbols always fill the data bins in ascending centred-frequency
order, which makes the mapping reproducible across implementations.
Centred bin ``c`` lives at FFT index ``c mod 512``.

The inverse transform carries the 1/N factor (numpy's default ``ifft``)
and the forward transform is its exact inverse, so modulate →
demodulate is an identity to machine precision.  In MIMO modes each
transmit antenna gets a disjoint subset of the pilot bins (30 + 30 for
two antennas) and stays silent on the other antenna's pilots, keeping
per-antenna channel estimation a simple least-squares problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .params import ADMISSIBLE_CP_RATIOS, OfdmaParams

__all__ = [
    "PILOT_VALUE",
    "GridLayout",
    "grid_layout",
    "pilot_sets",
    "subcarrier_map",
    "subcarrier_demap",
    "ofdm_modulate",
    "ofdm_demodulate",
    "estimate_channel",
    "equalize_siso",
    "role_table",
]

PILOT_VALUE = 1.0 + 0.0j
_PILOT_STRIDE = 7
_PILOT_OFFSET = 3


@dataclass(frozen=True)
class GridLayout:
    """Frozen role assignment for the 512 bins of one OFDM symbol.

    ``*_bins`` are FFT indices (row order of the grid arrays);
    ``*_centred`` are the corresponding centred frequencies, kept for
    interpolation in channel estimation.  ``data_bins`` and
    ``pilot_bins`` are listed in ascending centred order.
    """

    n_fft: int
    data_bins: np.ndarray
    pilot_bins: np.ndarray
    guard_bins: np.ndarray
    dc_bin: int
    data_centred: np.ndarray
    pilot_centred: np.ndarray

    @property
    def n_data(self) -> int:
        return self.data_bins.size

    @property
    def n_pilot(self) -> int:
        return self.pilot_bins.size

    def roles(self) -> np.ndarray:
        """Per-FFT-bin role labels: 'data', 'pilot', 'guard' or 'dc'."""
        table = np.full(self.n_fft, "guard", dtype="<U5")
        table[self.data_bins] = "data"
        table[self.pilot_bins] = "pilot"
        table[self.dc_bin] = "dc"
        return table


@lru_cache(maxsize=None)
def grid_layout(params: OfdmaParams = OfdmaParams()) -> GridLayout:
    """Build the bin-role layout for the given numerology.

    The guard split generalizes the 512-bin case: of the ``n_guard``
    guard+DC bins, the DC bin is the centre, ``(n_guard - 1) // 2`` sit
    at the bottom edge and the rest at the top edge.
    """
    n = params.fft_size
    n_low = (params.n_guard - 1) // 2
    n_high = params.n_guard - 1 - n_low
    lo = -(n // 2) + n_low          # first used centred bin
    hi = n // 2 - n_high            # one past the last used centred bin
    used = np.concatenate([np.arange(lo, 0), np.arange(1, hi)])
    if used.size != params.n_data + params.n_pilot:
        raise ValueError(
            f"layout mismatch: {used.size} used bins for "
            f"{params.n_data} data + {params.n_pilot} pilots"
        )
    pilot_pos = _PILOT_OFFSET + _PILOT_STRIDE * np.arange(params.n_pilot)
    if pilot_pos[-1] >= used.size:
        raise ValueError("pilot spacing runs past the used band")
    pilot_centred = used[pilot_pos]
    data_centred = np.delete(used, pilot_pos)
    guard_centred = np.concatenate(
        [np.arange(-(n // 2), lo), np.arange(hi, n // 2)]
    )
    as_fft = lambda c: np.mod(c, n)
    layout = GridLayout(
        n_fft=n,
        data_bins=as_fft(data_centred),
        pilot_bins=as_fft(pilot_centred),
        guard_bins=as_fft(guard_centred),
        dc_bin=0,
        data_centred=data_centred,
        pilot_centred=pilot_centred,
    )
    for arr in (
        layout.data_bins,
        layout.pilot_bins,
        layout.guard_bins,
        layout.data_centred,
        layout.pilot_centred,
    ):
        arr.setflags(write=False)
    return layout


def pilot_sets(layout: GridLayout, n_tx: int) -> list[np.ndarray]:
    """Split the pilot bins into disjoint per-antenna subsets.

    Antenna ``t`` takes every ``n_tx``-th pilot starting at the
    ``t``-th, so the subsets stay evenly spread over the band.  Returns
    FFT-index arrays.
    """
    if n_tx < 1 or n_tx > layout.n_pilot:
        raise ValueError("n_tx must be in [1, number of pilots]")
    return [layout.pilot_bins[t::n_tx] for t in range(n_tx)]


def subcarrier_map(
    data: np.ndarray,
    layout: GridLayout,
    pilot_bins: np.ndarray | None = None,
    pilot_value: complex = PILOT_VALUE,
) -> np.ndarray:
    """Place data and pilot symbols into a full frequency grid.

    ``data`` has shape (..., n_data); the result has shape
    (..., n_fft) with guards and DC zeroed.  ``pilot_bins`` restricts
    pilots to a subset (a MIMO antenna's share); bins outside the
    subset stay zero.
    """
    data = np.asarray(data, dtype=np.complex128)
    if data.shape[-1] != layout.n_data:
        raise ValueError(
            f"expected {layout.n_data} data symbols per OFDM symbol, "
            f"got {data.shape[-1]}"
        )
    grid = np.zeros(data.shape[:-1] + (layout.n_fft,), dtype=np.complex128)
    grid[..., layout.data_bins] = data
    grid[..., layout.pilot_bins if pilot_bins is None else pilot_bins] = pilot_value
    return grid


def subcarrier_demap(grid: np.ndarray, layout: GridLayout) -> np.ndarray:
    """Extract the data-bin symbols of a grid, in canonical data order."""
    grid = np.asarray(grid)
    if grid.shape[-1] != layout.n_fft:
        raise ValueError(f"expected {layout.n_fft} bins, got {grid.shape[-1]}")
    return grid[..., layout.data_bins]


def _cp_samples(n_fft: int, cp_ratio: Fraction) -> int:
    cp_ratio = Fraction(cp_ratio)
    if cp_ratio not in ADMISSIBLE_CP_RATIOS:
        raise ValueError(f"cyclic-prefix ratio {cp_ratio} not in {ADMISSIBLE_CP_RATIOS}")
    n_cp = n_fft * cp_ratio
    if n_cp.denominator != 1:
        raise ValueError(f"cyclic prefix {cp_ratio} of {n_fft} is not a whole sample")
    return int(n_cp)


def ofdm_modulate(grid: np.ndarray, cp_ratio: Fraction = Fraction(1, 8)) -> np.ndarray:
    """IDFT (with the 1/N factor) plus cyclic prefix.

    ``grid`` has shape (..., n_fft); output (..., n_fft·(1 + G)) where
    the first G·n_fft samples repeat the tail of the useful part.
    """
    grid = np.asarray(grid, dtype=np.complex128)
    n_cp = _cp_samples(grid.shape[-1], cp_ratio)
    useful = np.fft.ifft(grid, axis=-1)
    return np.concatenate([useful[..., -n_cp:], useful], axis=-1)


def ofdm_demodulate(signal: np.ndarray, cp_ratio: Fraction = Fraction(1, 8)) -> np.ndarray:
    """Strip the cyclic prefix and invert :func:`ofdm_modulate` exactly."""
    signal = np.asarray(signal, dtype=np.complex128)
    cp_ratio = Fraction(cp_ratio)
    denom = 1 + cp_ratio
    n_fft_frac = Fraction(signal.shape[-1]) / denom
    if n_fft_frac.denominator != 1:
        raise ValueError(
            f"signal length {signal.shape[-1]} is not n_fft·(1 + {cp_ratio})"
        )
    n_cp = _cp_samples(int(n_fft_frac), cp_ratio)
    return np.fft.fft(signal[..., n_cp:], axis=-1)


def estimate_channel(
    rx_grid: np.ndarray,
    layout: GridLayout,
    mode: str = "perfect",
    true_response: np.ndarray | None = None,
    pilot_bins: np.ndarray | None = None,
    pilot_value: complex = PILOT_VALUE,
) -> np.ndarray:
    """Estimate the channel on the data bins of one receive antenna.

    Parameters
    ----------
    rx_grid : array (..., n_fft)
        Received frequency grid (ignored in ``perfect`` mode).
    mode : {'perfect', 'pilot_ls'}
        ``perfect`` passes through ``true_response`` (the simulator's
        own channel, the baseline for headline curves).  ``pilot_ls``
        divides the received pilots by their known value and linearly
        interpolates real and imaginary parts across the band, holding
        the edge values flat beyond the outermost pilots.
    true_response : array (..., n_fft), required for ``perfect``
    pilot_bins : FFT indices of the pilots to use (default: all).
        Pass one antenna's subset to estimate that antenna's channel
        in a MIMO grid.

    Returns
    -------
    array (..., n_data): channel estimate per data bin, canonical order.
    """
    if mode == "perfect":
        if true_response is None:
            raise ValueError("perfect CSI needs the true channel response")
        return np.asarray(true_response)[..., layout.data_bins]
    if mode != "pilot_ls":
        raise ValueError(f"unknown estimator {mode!r}")
    if abs(pilot_value) == 0:
        raise ValueError("pilot value must be nonzero for least squares")
    rx_grid = np.asarray(rx_grid, dtype=np.complex128)
    if pilot_bins is None:
        pilot_bins = layout.pilot_bins
    pilot_bins = np.asarray(pilot_bins)
    # centred frequency gives a monotone interpolation axis
    half = layout.n_fft // 2
    pos = (pilot_bins + half) % layout.n_fft - half
    order = np.argsort(pos)
    pos = pos[order]
    ls = rx_grid[..., pilot_bins[order]] / pilot_value
    flat_ls = ls.reshape(-1, pos.size)
    est = np.empty(flat_ls.shape[:-1] + (layout.n_data,), dtype=np.complex128)
    for i, row in enumerate(flat_ls):
        est[i] = np.interp(layout.data_centred, pos, row.real) + 1j * np.interp(
            layout.data_centred, pos, row.imag
        )
    return est.reshape(rx_grid.shape[:-1] + (layout.n_data,))


def equalize_siso(
    data_symbols: np.ndarray, estimates: np.ndarray, noise_var: float
) -> tuple[np.ndarray, np.ndarray]:
    """One-tap equalization with per-bin noise bookkeeping.

    Divides each data-bin symbol by its channel estimate and returns
    ``(equalized, per-bin noise variance)`` where the noise variance is
    ``noise_var / |estimate|^2``.  A zero estimate (deep fade) yields a
    zero symbol with infinite variance — the soft demapper then treats
    those bins as erasures instead of this function raising.
    """
    data_symbols = np.asarray(data_symbols, dtype=np.complex128)
    estimates = np.asarray(estimates, dtype=np.complex128)
    if data_symbols.shape != estimates.shape:
        raise ValueError("symbols and estimates must have matching shapes")
    power = np.abs(estimates) ** 2
    dead = power == 0
    safe = np.where(dead, 1.0, estimates)
    equalized = np.where(dead, 0.0, data_symbols / safe)
    with np.errstate(divide="ignore"):
        nv = np.where(dead, np.inf, noise_var / np.where(dead, 1.0, power))
    return equalized, nv


def role_table(layout: GridLayout) -> str:
    """Render the bin-role map as text, one ``index<TAB>role`` line per bin."""
    roles = layout.roles()
    lines = [f"{k}\t{roles[k]}" for k in range(layout.n_fft)]
    return "\n".join(lines) + "\n"
