"""Error-rate accounting, throughput formulas, AMC selection and switching.

Two throughput measures are reported for every operating point:

* an absolute link rate in bits per second,
  ``N_D * N_b * R_FEC * R_STC / T_s * (1 - BLER)``, where ``N_D`` is
  the number of data subcarriers, ``N_b`` the bits per constellation
  symbol and ``T_s`` the full OFDM symbol duration; and
* a normalized spectral efficiency in bps/Hz,
  ``(1 - BLER) * R_FEC * N_b * R_STC``.

Both share the same ``(1 - BLER)`` factor, and since ``N_D / T_s`` is
profile-independent the two rank the burst profiles identically.  The
``R_STC`` factor makes spatial multiplexing report its doubled
efficiency; for single antennas it drops out.

Adaptive modulation and coding (AMC) picks, per SNR, the profile with
the highest expected throughput; the resulting per-mode envelope is the
upper hull of the six fixed-profile curves.  Adaptive MIMO switching
compares the diversity (Alamouti) envelope with the multiplexing
envelope and reports the SNR above which multiplexing wins for good.
Monte-Carlo jitter can make raw envelopes locally non-monotone, so a
smoothed (isotonic) copy is kept alongside the raw values for crossover
detection; raw numbers are never overwritten.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import isotonic_regression

from .params import (
    BURST_PROFILES,
    BurstProfile,
    MimoMode,
    OfdmaParams,
    burst_profile,
)

__all__ = [
    "LinkMetrics",
    "SweepResult",
    "AmcEnvelope",
    "compute_ber",
    "link_throughput",
    "normalized_throughput",
    "amc_select",
    "amc_envelope",
    "ams_switching_point",
]


@dataclass(frozen=True)
class LinkMetrics:
    """Measured outcome of one (SNR, antenna mode, burst profile) point."""

    snr_db: float
    mode: MimoMode
    profile: BurstProfile
    bits_tested: int
    bit_errors: int
    blocks_tested: int
    block_errors: int
    ber: float
    bler: float
    throughput_bps: float
    normalized_bpshz: float
    point_seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber {self.ber} outside [0, 1]")
        if not 0.0 <= self.bler <= 1.0:
            raise ValueError(f"bler {self.bler} outside [0, 1]")


@dataclass
class SweepResult:
    """Ordered collection of :class:`LinkMetrics` over a sweep grid.

    Entries are kept sorted by (mode, profile, snr); duplicate
    (snr, mode, profile) keys are rejected.  ``config_fingerprint``
    identifies the generating configuration for provenance.
    """

    entries: list[LinkMetrics] = field(default_factory=list)
    config_fingerprint: str = ""
    master_seed: int = 0

    def __post_init__(self) -> None:
        self.entries = sorted(
            self.entries,
            key=lambda m: (m.mode.name, m.profile.name, m.snr_db),
        )
        keys = {(m.snr_db, m.mode.name, m.profile.name) for m in self.entries}
        if len(keys) != len(self.entries):
            raise ValueError("duplicate (snr, mode, profile) entries in sweep")

    def modes(self) -> list[str]:
        return sorted({m.mode.name for m in self.entries})

    def profiles(self, mode: str) -> list[str]:
        return sorted({m.profile.name for m in self.entries if m.mode.name == mode})

    def curve(self, mode: str, profile: str) -> list[LinkMetrics]:
        """The SNR-ascending metrics for one (mode, profile) curve."""
        pts = [
            m
            for m in self.entries
            if m.mode.name == mode and m.profile.name == profile
        ]
        return sorted(pts, key=lambda m: m.snr_db)


def compute_ber(tx: np.ndarray, rx: np.ndarray) -> float:
    """Fraction of differing bits between two equal-length bit blocks."""
    tx = np.asarray(tx)
    rx = np.asarray(rx)
    if tx.shape != rx.shape:
        raise ValueError(f"length mismatch: {tx.shape} vs {rx.shape}")
    if tx.size == 0:
        raise ValueError("empty blocks have no error rate")
    return float(np.count_nonzero(tx != rx) / tx.size)


def link_throughput(
    params: OfdmaParams, profile: BurstProfile, mode: MimoMode, per: float
) -> float:
    """Link throughput in bits/second at a given packet error rate.

    Evaluates ``N_D * N_b * R_FEC * R_STC / T_s * (1 - per)`` with the
    full OFDM symbol duration ``T_s`` (useful part plus cyclic prefix).
    """
    if not 0.0 <= per <= 1.0:
        raise ValueError(f"per {per} outside [0, 1]")
    # the rate product is exact (an integer for every admissible profile),
    # so the only rounding comes from the division and the PER factor
    bits = float(
        params.n_data * profile.bits_per_symbol * profile.fec_rate * mode.stc_rate
    )
    return bits / params.symbol_duration_s * (1.0 - per)


def normalized_throughput(
    profile: BurstProfile, mode: MimoMode, bler: float
) -> float:
    """Spectral efficiency in bps/Hz at a given block error rate.

    ``(1 - bler) * R_FEC * log2(M) * R_STC``; the space-time rate
    factor reports multiplexing's doubled efficiency and is 1 for the
    single-antenna and Alamouti modes.
    """
    if not 0.0 <= bler <= 1.0:
        raise ValueError(f"bler {bler} outside [0, 1]")
    # keep the rate product in exact arithmetic so error-free points land
    # on round values (e.g. 2/3 * 6 gives 4.0, not 3.999...)
    rate = float(profile.fec_rate * profile.bits_per_symbol * mode.stc_rate)
    return (1.0 - bler) * rate


def amc_select(per_profile: dict[BurstProfile, LinkMetrics]) -> BurstProfile:
    """Choose the burst profile with the highest expected throughput.

    Requires a measurement for every profile of the standard set, all
    at the same SNR and antenna mode.  Ties go to the lower-order
    modulation, then the lower code rate — when two profiles promise
    the same rate, the more robust one wins.
    """
    if not per_profile:
        raise ValueError("no profiles to select from")
    missing = [p.name for p in BURST_PROFILES if p not in per_profile]
    if missing:
        raise ValueError(f"incomplete profile map, missing {missing}")
    anchors = {(m.snr_db, m.mode.name) for m in per_profile.values()}
    if len(anchors) != 1:
        raise ValueError(f"profiles measured at different operating points: {anchors}")
    return max(
        per_profile,
        key=lambda p: (
            per_profile[p].throughput_bps,
            -p.constellation_points,
            -p.fec_rate,
        ),
    )


@dataclass
class AmcEnvelope:
    """Per-SNR best profile and throughput for one antenna mode.

    ``throughput_bps`` / ``normalized_bpshz`` are the raw pointwise
    maxima over profiles; the ``smooth_*`` copies are isotonic
    regressions of the raw curves (throughput under AMC cannot truly
    decrease with SNR, so residual dips are Monte-Carlo noise).
    """

    mode: str
    snr_db: np.ndarray
    best_profile: list[str]
    throughput_bps: np.ndarray
    normalized_bpshz: np.ndarray
    smooth_bps: np.ndarray
    smooth_bpshz: np.ndarray


def amc_envelope(sweep: SweepResult, mode: MimoMode | str) -> AmcEnvelope:
    """Upper hull of the per-profile throughput curves for one mode."""
    mode_name = mode if isinstance(mode, str) else mode.name
    profiles = sweep.profiles(mode_name)
    missing = sorted({p.name for p in BURST_PROFILES} - set(profiles))
    if missing:
        raise ValueError(
            f"mode {mode_name!r} sweep is incomplete, missing profiles {missing}"
        )
    curves = {p: sweep.curve(mode_name, p) for p in profiles}
    grids = {p: tuple(m.snr_db for m in pts) for p, pts in curves.items()}
    if len(set(grids.values())) != 1:
        raise ValueError(f"profiles of mode {mode_name!r} measured on unequal grids")
    snr = np.array(next(iter(grids.values())), dtype=np.float64)
    if snr.size == 0:
        raise ValueError(f"empty SNR grid for mode {mode_name!r}")
    bps = np.array([[m.throughput_bps for m in curves[p]] for p in profiles])
    bpshz = np.array([[m.normalized_bpshz for m in curves[p]] for p in profiles])
    # argmax with the amc_select tie rule: prefer the smaller constellation,
    # then the smaller code rate
    order = np.lexsort(
        [
            [float(burst_profile(p).fec_rate) for p in profiles],
            [burst_profile(p).constellation_points for p in profiles],
        ]
    )
    best_idx = order[np.argmax(bps[order], axis=0)]
    return AmcEnvelope(
        mode=mode_name,
        snr_db=snr,
        best_profile=[profiles[i] for i in best_idx],
        throughput_bps=bps.max(axis=0),
        normalized_bpshz=bpshz.max(axis=0),
        smooth_bps=isotonic_regression(bps.max(axis=0)).x,
        smooth_bpshz=isotonic_regression(bpshz.max(axis=0)).x,
    )


def ams_switching_point(stbc_env: AmcEnvelope, sm_env: AmcEnvelope) -> float:
    """SNR above which the multiplexing envelope dominates for good.

    Scans the (smoothed) envelopes for the lowest grid SNR from which
    the multiplexing curve stays at or above the diversity curve all
    the way up, then linearly interpolates the crossing between that
    point and its predecessor.  Requiring dominance *above* rather than
    the first intersection makes the answer robust to residual jitter
    near the crossing.
    """
    if stbc_env.snr_db.shape != sm_env.snr_db.shape or np.any(
        stbc_env.snr_db != sm_env.snr_db
    ):
        raise ValueError("envelopes must share one SNR grid")
    snr = stbc_env.snr_db
    diff = sm_env.smooth_bpshz - stbc_env.smooth_bpshz
    if diff[-1] < 0:
        raise ValueError(
            "no crossover: multiplexing never dominates at the top of the grid"
        )
    # lowest index from which diff stays nonnegative
    below = np.nonzero(diff < 0)[0]
    if below.size == 0:
        return float(snr[0])
    i = below[-1] + 1
    d0, d1 = diff[i - 1], diff[i]
    return float(snr[i - 1] + (snr[i] - snr[i - 1]) * (-d0) / (d1 - d0))
