"""OFDMA numerology, burst profiles, and MIMO mode definitions.

Everything downstream (frame sizing, throughput formulas, interleaver
dimensions) derives from the three value types in this module.  All types
are immutable after construction and safe to share freely.

The default numerology is the 512-FFT column of the fixed-WiMAX OFDMA
parameter set: 360 data subcarriers, 60 pilots, 92 guard/DC bins, 5 MHz
channel, 91.4 us useful symbol time and 102.9 us total symbol duration at
a 1/8 cyclic prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "OfdmaParams",
    "BurstProfile",
    "MimoMode",
    "BURST_PROFILES",
    "MIMO_MODES",
    "SISO",
    "STBC_2X2",
    "SM_2X2",
    "burst_profile",
    "mimo_mode",
    "info_bits_per_ofdm_symbol",
    "coded_bits_per_stream",
    "validate",
]

ADMISSIBLE_CP_RATIOS = (
    Fraction(1, 4),
    Fraction(1, 8),
    Fraction(1, 16),
    Fraction(1, 32),
)

# Timing entries in the parameter table are rounded to 0.1 us, so the
# consistency checks between stored and derived timings use that slack.
TIMING_TOL_S = 0.1e-6


@dataclass(frozen=True)
class OfdmaParams:
    """OFDMA numerology for one FFT profile.

    Defaults are the 512-FFT / 5 MHz downlink column.  ``guard_time_s``
    and ``symbol_duration_s`` hold the tabulated (rounded) values; the
    exact derived values are available via :meth:`derived_guard_time_s`
    and :meth:`derived_symbol_duration_s`.  ``carrier_freq_hz`` is
    recorded for documentation only; the quasi-static channel model does
    not use it.
    """

    fft_size: int = 512
    n_data: int = 360
    n_pilot: int = 60
    n_guard: int = 92  # includes the DC null
    cp_ratio: Fraction = Fraction(1, 8)
    bandwidth_hz: float = 5e6
    subcarrier_spacing_hz: float = 10.94e3
    useful_symbol_time_s: float = 91.4e-6
    guard_time_s: float = 11.4e-6
    symbol_duration_s: float = 102.9e-6
    carrier_freq_hz: float = 2e9

    def derived_guard_time_s(self) -> float:
        """Guard time implied by the CP ratio: G * T_b."""
        return float(self.cp_ratio) * self.useful_symbol_time_s

    def derived_symbol_duration_s(self) -> float:
        """Symbol duration implied by the CP ratio: T_b * (1 + G)."""
        return self.useful_symbol_time_s * (1.0 + float(self.cp_ratio))

    @property
    def cp_samples(self) -> int:
        n = Fraction(self.fft_size) * self.cp_ratio
        if n.denominator != 1:
            raise ValueError(
                f"CP length {n} is not an integer number of samples "
                f"(fft_size={self.fft_size}, cp_ratio={self.cp_ratio})"
            )
        return int(n)

    @property
    def samples_per_symbol(self) -> int:
        return self.fft_size + self.cp_samples


def validate(params: OfdmaParams) -> list[str]:
    """Check the numerology invariants; return a list of violations.

    An empty list means the parameter set is consistent.  Violations are
    data, not exceptions: callers decide whether to abort.
    """
    violations = []
    total = params.n_data + params.n_pilot + params.n_guard
    if total != params.fft_size:
        violations.append(
            f"subcarrier sum {total} != fft_size {params.fft_size} "
            f"(data {params.n_data} + pilot {params.n_pilot} + guard {params.n_guard})"
        )
    if params.cp_ratio not in ADMISSIBLE_CP_RATIOS:
        violations.append(
            f"cp_ratio {params.cp_ratio} not in "
            f"{{{', '.join(str(g) for g in ADMISSIBLE_CP_RATIOS)}}}"
        )
    else:
        dg = params.derived_guard_time_s()
        if abs(params.guard_time_s - dg) > TIMING_TOL_S:
            violations.append(
                f"guard_time_s {params.guard_time_s:.4e} inconsistent with "
                f"G*T_b = {dg:.4e} (tol {TIMING_TOL_S:.1e})"
            )
        ds = params.derived_symbol_duration_s()
        if abs(params.symbol_duration_s - ds) > TIMING_TOL_S:
            violations.append(
                f"symbol_duration_s {params.symbol_duration_s:.4e} inconsistent "
                f"with T_b*(1+G) = {ds:.4e} (tol {TIMING_TOL_S:.1e})"
            )
    if params.fft_size <= 0 or params.n_data <= 0:
        violations.append("fft_size and n_data must be positive")
    if params.symbol_duration_s <= 0:
        violations.append("symbol_duration_s must be positive")
    return violations


_PROFILE_TABLE = {
    # name: (modulation, bits/symbol, constellation size, FEC rate)
    "qpsk-1/2": ("qpsk", 2, 4, Fraction(1, 2)),
    "qpsk-3/4": ("qpsk", 2, 4, Fraction(3, 4)),
    "16qam-1/2": ("16qam", 4, 16, Fraction(1, 2)),
    "16qam-3/4": ("16qam", 4, 16, Fraction(3, 4)),
    "64qam-2/3": ("64qam", 6, 64, Fraction(2, 3)),
    "64qam-3/4": ("64qam", 6, 64, Fraction(3, 4)),
}


@dataclass(frozen=True)
class BurstProfile:
    """One admissible (modulation, FEC rate) downlink burst profile.

    The set is closed: construction is only possible through
    :func:`burst_profile` / :data:`BURST_PROFILES`, and any pair outside
    the six-profile downlink set is rejected.
    """

    name: str
    modulation: str
    bits_per_symbol: int
    constellation_points: int
    fec_rate: Fraction

    def __post_init__(self):
        entry = _PROFILE_TABLE.get(self.name)
        if entry is None or entry != (
            self.modulation,
            self.bits_per_symbol,
            self.constellation_points,
            self.fec_rate,
        ):
            raise ValueError(
                f"({self.modulation}, {self.fec_rate}) is not one of the six "
                f"admissible burst profiles: {', '.join(_PROFILE_TABLE)}"
            )
        if 2**self.bits_per_symbol != self.constellation_points:
            raise ValueError("bits_per_symbol must equal log2(constellation_points)")


BURST_PROFILES: tuple[BurstProfile, ...] = tuple(
    BurstProfile(name, mod, nb, m, rate)
    for name, (mod, nb, m, rate) in _PROFILE_TABLE.items()
)


def burst_profile(name: str) -> BurstProfile:
    """Look up a burst profile by name, e.g. ``'qpsk-1/2'`` or ``'64qam-3/4'``."""
    for p in BURST_PROFILES:
        if p.name == name:
            return p
    raise KeyError(
        f"unknown burst profile {name!r}; choose from "
        f"{', '.join(p.name for p in BURST_PROFILES)}"
    )


@dataclass(frozen=True)
class MimoMode:
    """Antenna configuration and space-time coding rate of one link mode."""

    name: str
    n_tx: int
    n_rx: int
    stc_rate: Fraction

    def __post_init__(self):
        allowed = {
            "siso": (1, 1, Fraction(1)),
            "stbc": (2, 2, Fraction(1)),
            "sm": (2, 2, Fraction(2)),
        }
        expect = allowed.get(self.name)
        if expect is None or expect != (self.n_tx, self.n_rx, self.stc_rate):
            raise ValueError(
                f"invalid MIMO mode {self.name!r} with "
                f"(n_tx, n_rx, stc_rate) = ({self.n_tx}, {self.n_rx}, {self.stc_rate})"
            )


SISO = MimoMode("siso", 1, 1, Fraction(1))
STBC_2X2 = MimoMode("stbc", 2, 2, Fraction(1))
SM_2X2 = MimoMode("sm", 2, 2, Fraction(2))

MIMO_MODES: tuple[MimoMode, ...] = (SISO, STBC_2X2, SM_2X2)


def mimo_mode(name: str) -> MimoMode:
    """Look up a MIMO mode by name: ``'siso'``, ``'stbc'`` or ``'sm'``."""
    for m in MIMO_MODES:
        if m.name == name:
            return m
    raise KeyError(f"unknown MIMO mode {name!r}; choose from siso, stbc, sm")


def coded_bits_per_stream(params: OfdmaParams, profile: BurstProfile) -> int:
    """Coded bits carried by one OFDM symbol on one spatial stream (N_D * N_b)."""
    return params.n_data * profile.bits_per_symbol


def info_bits_per_ofdm_symbol(
    params: OfdmaParams, profile: BurstProfile, mode: MimoMode
) -> int:
    """Information bits carried per OFDM symbol: N_D * N_b * R_FEC * R_STC.

    The product is an exact integer for every admissible profile/mode
    combination; non-integer products are rejected rather than rounded.
    """
    n = (
        Fraction(params.n_data * profile.bits_per_symbol)
        * profile.fec_rate
        * mode.stc_rate
    )
    if n.denominator != 1:
        raise ValueError(
            f"info bits per OFDM symbol is not an integer: {n} "
            f"(n_data={params.n_data}, profile={profile.name}, mode={mode.name})"
        )
    if n <= 0:
        raise ValueError("info bits per OFDM symbol must be positive")
    return int(n)
