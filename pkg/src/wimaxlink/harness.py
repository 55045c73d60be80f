"""Monte-Carlo sweep engine: configuration, RNG discipline, CSV, plots.

One *point* is a (antenna mode, burst profile, SNR) triple.  Each point
runs the full transmit/receive chain block by block — scrambled payload
→ convolutional encoder → puncturer → interleaver → QAM mapper →
space-time encoder → subcarrier grid → fading channel with AWGN →
estimator/equalizer/detector → soft demapper → deinterleaver → Viterbi
— drawing an independent channel realization per transmission unit,
until it has seen ``min_block_errors`` block errors or ``max_blocks``
blocks.  (A unit is one OFDM symbol time for single-stream modes, two
for the Alamouti pair; two-antenna modes carry two FEC blocks per
unit.)  Points with fewer than ``min_block_errors`` errors at the block
cap are *censored*: their BLER resolution is limited by the cap.

Reproducibility scheme (documented so single points can be re-run in
isolation and execution order can never matter):

* ``point_seed = SeedSequence((master_seed, mode_index, profile_index,
  snr_key)).generate_state(1)`` where the indexes are positions in the
  canonical mode/profile registries and ``snr_key =
  round(1000 * snr_db) + 2^31`` (``2^32 - 1`` for the infinite-SNR
  noiseless hook);
* unit ``u`` of a point uses ``default_rng(SeedSequence((point_seed,
  u)))`` for everything random in that unit, drawn in a fixed order:
  payload seed, channel taps, noise.

The channel acts on frequency grids directly; with the delay spread
inside the cyclic prefix this equals time-domain convolution plus OFDM
demodulation exactly (a property the test suite verifies), so the
per-block loop skips the redundant IFFT/FFT round trip.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import bitsource, fec, mapping, mimo, ofdm
from .channel import (
    ChannelConfig,
    apply_channel,
    draw_channel,
    exponential_pdp,
    snr_to_noise_var,
)
from .metrics_amc import (
    AmcEnvelope,
    LinkMetrics,
    SweepResult,
    amc_envelope,
    ams_switching_point,
    link_throughput,
    normalized_throughput,
)
from .ofdm import GridLayout, grid_layout, pilot_sets
from .params import (
    BURST_PROFILES,
    MIMO_MODES,
    BurstProfile,
    MimoMode,
    OfdmaParams,
    burst_profile,
    coded_bits_per_stream,
    mimo_mode,
    validate,
)

__all__ = [
    "SimConfig",
    "TrialOutcome",
    "SweepAnalysis",
    "snr_grid",
    "load_config",
    "config_from_mapping",
    "config_fingerprint",
    "point_seed",
    "run_point",
    "run_sweep",
    "is_censored",
    "analyze_sweep",
    "emit_csv",
    "read_csv",
    "emit_envelope_csv",
    "emit_plots",
    "CSV_COLUMNS",
]

log = logging.getLogger(__name__)

# demapper noise-variance floor: keeps log-likelihood ratios finite on
# noiseless runs without influencing any finite-SNR result
NOISE_FLOOR = 1e-30


def snr_grid(start: float, step: float, stop: float) -> tuple[float, ...]:
    """Uniform dB grid from ``start`` to ``stop`` inclusive."""
    if step <= 0:
        raise ValueError("SNR step must be positive")
    if stop < start:
        raise ValueError("SNR stop must be >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + step * i for i in range(n))


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a sweep, and therefore its outputs.

    ``channel.snr_db`` is ignored here: the sweep sets it per point
    from ``snr_db``.  ``csi`` selects the receiver's channel knowledge:
    ``'perfect'`` (default, the baseline for headline curves) or
    ``'pilot'`` for least-squares estimation from the pilot bins.
    """

    params: OfdmaParams = OfdmaParams()
    channel: ChannelConfig = ChannelConfig()
    modes: tuple[str, ...] = tuple(m.name for m in MIMO_MODES)
    profiles: tuple[str, ...] = tuple(p.name for p in BURST_PROFILES)
    snr_db: tuple[float, ...] = snr_grid(0.0, 2.0, 36.0)
    min_block_errors: int = 100
    max_blocks: int = 200_000
    master_seed: int = 1
    csi: str = "perfect"
    out_dir: str = "out"

    def __post_init__(self) -> None:
        problems = validate(self.params)
        if problems:
            raise ValueError("; ".join(problems))
        if not self.modes or not self.profiles:
            raise ValueError("need at least one mode and one profile")
        for m in self.modes:
            mimo_mode(m)
        for p in self.profiles:
            burst_profile(p)
        if not self.snr_db:
            raise ValueError("empty SNR grid")
        if any(not math.isfinite(s) for s in self.snr_db):
            raise ValueError("SNR grid values must be finite")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ValueError("SNR grid must be strictly increasing")
        if self.min_block_errors < 1:
            raise ValueError("min_block_errors must be >= 1")
        if self.max_blocks < self.min_block_errors:
            raise ValueError("max_blocks must be >= min_block_errors")
        if self.csi not in ("perfect", "pilot"):
            raise ValueError(f"csi must be 'perfect' or 'pilot', not {self.csi!r}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if self.channel.n_taps > self.params.cp_samples:
            raise ValueError(
                f"{self.channel.n_taps} channel taps exceed the "
                f"{self.params.cp_samples}-sample cyclic prefix"
            )


# --- configuration file ---------------------------------------------------

_INT_KEYS = ("min_block_errors", "max_blocks", "master_seed")
_STR_KEYS = ("csi", "out_dir")


def config_from_mapping(
    kv: dict[str, str], base: SimConfig | None = None
) -> SimConfig:
    """Apply flat ``key = value`` settings on top of a base configuration.

    Recognized keys: ``modes``, ``profiles`` (comma lists),
    ``snr_start``/``snr_step``/``snr_stop`` (all three together),
    ``min_block_errors``, ``max_blocks``, ``master_seed``, ``csi``,
    ``out_dir``, ``n_taps``, ``pdp_decay_db``, ``pdp`` (explicit comma
    list of tap powers), ``block_length_symbols``.  Unknown keys are
    rejected loudly rather than silently ignored.
    """
    cfg = base if base is not None else SimConfig()
    kv = dict(kv)
    updates: dict = {}
    if "modes" in kv:
        updates["modes"] = tuple(
            s.strip() for s in kv.pop("modes").split(",") if s.strip()
        )
    if "profiles" in kv:
        updates["profiles"] = tuple(
            s.strip() for s in kv.pop("profiles").split(",") if s.strip()
        )
    snr_keys = [k for k in ("snr_start", "snr_step", "snr_stop") if k in kv]
    if snr_keys:
        if len(snr_keys) != 3:
            raise ValueError("snr_start, snr_step and snr_stop must be set together")
        updates["snr_db"] = snr_grid(
            float(kv.pop("snr_start")),
            float(kv.pop("snr_step")),
            float(kv.pop("snr_stop")),
        )
    for key in _INT_KEYS:
        if key in kv:
            updates[key] = int(kv.pop(key))
    for key in _STR_KEYS:
        if key in kv:
            updates[key] = kv.pop(key)
    ch_updates: dict = {}
    decay = float(kv.pop("pdp_decay_db")) if "pdp_decay_db" in kv else None
    if "pdp" in kv:
        pdp = tuple(float(s) for s in kv.pop("pdp").split(","))
        ch_updates["power_delay_profile"] = pdp
        ch_updates["n_taps"] = len(pdp)
        if "n_taps" in kv and int(kv.pop("n_taps")) != len(pdp):
            raise ValueError("n_taps disagrees with the explicit pdp length")
        if decay is not None:
            raise ValueError("give either pdp or pdp_decay_db, not both")
    elif "n_taps" in kv or decay is not None:
        n_taps = int(kv.pop("n_taps")) if "n_taps" in kv else cfg.channel.n_taps
        ch_updates["n_taps"] = n_taps
        ch_updates["power_delay_profile"] = exponential_pdp(
            n_taps, 5.0 if decay is None else decay
        )
    if "block_length_symbols" in kv:
        ch_updates["block_length_symbols"] = int(kv.pop("block_length_symbols"))
    if kv:
        raise ValueError(f"unknown config keys: {sorted(kv)}")
    if ch_updates:
        updates["channel"] = replace(cfg.channel, **ch_updates)
    return replace(cfg, **updates) if updates else cfg


def load_config(path: str | Path) -> SimConfig:
    """Read a flat ``key = value`` config file (``#`` starts a comment)."""
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        if key.strip() in kv:
            raise ValueError(f"{path}:{lineno}: duplicate key {key.strip()!r}")
        kv[key.strip()] = value.strip()
    return config_from_mapping(kv)


def config_fingerprint(cfg: SimConfig) -> str:
    """Short stable digest of everything that shapes the results.

    ``out_dir`` is excluded: where outputs land does not change what
    they contain.
    """
    canon = repr(
        (
            cfg.params,
            cfg.channel,
            cfg.modes,
            cfg.profiles,
            cfg.snr_db,
            cfg.min_block_errors,
            cfg.max_blocks,
            cfg.master_seed,
            cfg.csi,
        )
    )
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# --- seeding --------------------------------------------------------------

_SNR_OFFSET = 1 << 31
_NOISELESS_KEY = (1 << 32) - 1


def point_seed(
    master_seed: int, mode: MimoMode, profile: BurstProfile, snr_db: float
) -> int:
    """Derive the independent RNG seed of one sweep point.

    Uses the canonical registry positions of the mode and profile (not
    their positions in a possibly-subset sweep), so the same point
    always gets the same stream no matter which sweep it is part of.
    """
    mode_idx = [m.name for m in MIMO_MODES].index(mode.name)
    profile_idx = [p.name for p in BURST_PROFILES].index(profile.name)
    if math.isinf(snr_db) and snr_db > 0:
        snr_key = _NOISELESS_KEY
    elif not math.isfinite(snr_db):
        raise ValueError(f"cannot derive a seed for snr_db = {snr_db}")
    else:
        snr_key = int(round(snr_db * 1000)) + _SNR_OFFSET
        if not 0 <= snr_key < _NOISELESS_KEY:
            raise ValueError(f"snr_db {snr_db} outside the seedable range")
    ss = np.random.SeedSequence((master_seed, mode_idx, profile_idx, snr_key))
    return int(ss.generate_state(1, np.uint64)[0])


def _unit_rng(seed: int, unit_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, unit_index)))


# --- per-unit chain -------------------------------------------------------


@dataclass(frozen=True)
class TrialOutcome:
    """Bit-error counts per FEC block for one channel realization."""

    bit_errors: tuple[int, ...]
    bits_per_block: int


@dataclass
class _PointContext:
    profile: BurstProfile
    layout: GridLayout
    psets: list[np.ndarray]
    n_cbps: int
    n_info: int
    csi: str
    ch_cfg: ChannelConfig


def _transmit_block(
    rng: np.random.Generator, ctx: _PointContext
) -> tuple[np.ndarray, np.ndarray]:
    """Payload bits and their mapped constellation symbols for one block."""
    payload_seed = int(rng.integers(0, 1 << 63))
    info = bitsource.generate(payload_seed, ctx.n_info)
    scrambled = bitsource.randomize(info)
    coded = fec.puncture(fec.cc_encode(scrambled), ctx.profile.fec_rate)
    inter = fec.interleave(coded, ctx.n_cbps, ctx.profile.bits_per_symbol)
    return info, mapping.map_bits(inter, ctx.profile)


def _receive_block(llr: np.ndarray, ctx: _PointContext) -> np.ndarray:
    """Invert the transmit chain from soft demapper output to payload bits."""
    deint = fec.deinterleave(llr, ctx.n_cbps, ctx.profile.bits_per_symbol)
    soft = fec.depuncture(deint, ctx.profile.fec_rate)
    return bitsource.derandomize(fec.viterbi_decode(soft))


def _mimo_estimates(
    rx_grids: np.ndarray, realization, ctx: _PointContext
) -> np.ndarray:
    """Channel estimates on the data bins, shape (n_rx, n_tx, n_data)."""
    if ctx.csi == "perfect":
        return realization.response[:, :, ctx.layout.data_bins]
    est = np.empty(
        (realization.n_rx, realization.n_tx, ctx.layout.n_data), dtype=np.complex128
    )
    for r in range(realization.n_rx):
        for t in range(realization.n_tx):
            est[r, t] = ofdm.estimate_channel(
                rx_grids[r], ctx.layout, "pilot_ls", pilot_bins=ctx.psets[t]
            )
    return est


def _block_errors(info: np.ndarray, decoded: np.ndarray) -> int:
    return int(np.count_nonzero(info != decoded))


def _run_unit_siso(rng: np.random.Generator, ctx: _PointContext) -> TrialOutcome:
    info, syms = _transmit_block(rng, ctx)
    grid = ofdm.subcarrier_map(syms, ctx.layout)
    realization = draw_channel(rng, ctx.ch_cfg, 1, 1, ctx.layout.n_fft)
    rx = apply_channel(grid[None, :], realization, rng)[0]
    if ctx.csi == "perfect":
        est = ofdm.estimate_channel(
            rx, ctx.layout, "perfect", true_response=realization.response[0, 0]
        )
    else:
        est = ofdm.estimate_channel(rx, ctx.layout, "pilot_ls")
    equalized, nv = ofdm.equalize_siso(
        ofdm.subcarrier_demap(rx, ctx.layout), est, realization.noise_var
    )
    llr = mapping.demap_soft(equalized, np.maximum(nv, NOISE_FLOOR), ctx.profile)
    decoded = _receive_block(llr, ctx)
    return TrialOutcome((_block_errors(info, decoded),), ctx.n_info)


def _interleave_streams(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(a.size + b.size, dtype=np.complex128)
    out[0::2] = a
    out[1::2] = b
    return out


def _run_unit_stbc(rng: np.random.Generator, ctx: _PointContext) -> TrialOutcome:
    info_a, syms_a = _transmit_block(rng, ctx)
    info_b, syms_b = _transmit_block(rng, ctx)
    encoded = mimo.stbc_encode(_interleave_streams(syms_a, syms_b))
    # channel uses alternate: (pair k, time 1) in column 2k, (pair k,
    # time 2) in column 2k+1; regroup into (time, antenna, subcarrier)
    per_time = np.stack([encoded[:, 0::2], encoded[:, 1::2]])
    grids = np.stack(
        [
            [
                ofdm.subcarrier_map(per_time[t, a], ctx.layout, ctx.psets[a])
                for a in range(2)
            ]
            for t in range(2)
        ]
    )
    realization = draw_channel(rng, ctx.ch_cfg, 2, 2, ctx.layout.n_fft)
    rx = apply_channel(grids, realization, rng)  # (time, rx, bin)
    # pilots repeat across the pair, so averaging the two received
    # symbols halves the estimator's noise
    estimates = _mimo_estimates(rx.mean(axis=0), realization, ctx)
    y = np.transpose(rx[:, :, ctx.layout.data_bins], (2, 1, 0))  # (bin, rx, time)
    h = np.moveaxis(estimates, -1, 0)  # (bin, rx, tx)
    combined, _gain, post_nv = mimo.stbc_combine(y, h, realization.noise_var)
    nv = np.maximum(post_nv, NOISE_FLOOR)
    errors = []
    for i, info in enumerate((info_a, info_b)):
        llr = mapping.demap_soft(combined[:, i], nv, ctx.profile)
        errors.append(_block_errors(info, _receive_block(llr, ctx)))
    return TrialOutcome(tuple(errors), ctx.n_info)


def _run_unit_sm(rng: np.random.Generator, ctx: _PointContext) -> TrialOutcome:
    info_a, syms_a = _transmit_block(rng, ctx)
    info_b, syms_b = _transmit_block(rng, ctx)
    encoded = mimo.sm_encode(_interleave_streams(syms_a, syms_b))
    grids = np.stack(
        [ofdm.subcarrier_map(encoded[a], ctx.layout, ctx.psets[a]) for a in range(2)]
    )
    realization = draw_channel(rng, ctx.ch_cfg, 2, 2, ctx.layout.n_fft)
    rx = apply_channel(grids, realization, rng)  # (rx, bin)
    estimates = _mimo_estimates(rx, realization, ctx)
    y = rx[:, ctx.layout.data_bins].T  # (bin, rx)
    # the detector sees the per-antenna power split as part of the channel
    h = np.moveaxis(estimates, -1, 0) / np.sqrt(2.0)  # (bin, rx, tx)
    x_hat, post_snr = mimo.mmse_detect(y, h, realization.noise_var)
    z, nv = mimo.mmse_bias_correct(x_hat, post_snr)
    nv = np.maximum(nv, NOISE_FLOOR)
    errors = []
    for i, info in enumerate((info_a, info_b)):
        llr = mapping.demap_soft(z[:, i], nv[:, i], ctx.profile)
        errors.append(_block_errors(info, _receive_block(llr, ctx)))
    return TrialOutcome(tuple(errors), ctx.n_info)


_UNIT_RUNNERS = {
    "siso": _run_unit_siso,
    "stbc": _run_unit_stbc,
    "sm": _run_unit_sm,
}


# --- the sweep ------------------------------------------------------------


def run_point(
    cfg: SimConfig,
    mode: MimoMode | str,
    profile: BurstProfile | str,
    snr_db: float,
    seed: int | None = None,
) -> LinkMetrics:
    """Measure one (mode, profile, SNR) operating point.

    Runs transmission units against independent channel realizations
    until the stop rule fires.  ``snr_db = inf`` runs the noiseless
    loopback (useful as an exactness check).  The result is
    bit-identical for identical ``(cfg, seed)``.
    """
    mode = mimo_mode(mode) if isinstance(mode, str) else mode
    profile = burst_profile(profile) if isinstance(profile, str) else profile
    if seed is None:
        seed = point_seed(cfg.master_seed, mode, profile, snr_db)
    layout = grid_layout(cfg.params)
    n_cbps = coded_bits_per_stream(cfg.params, profile)
    n_info = int(Fraction(n_cbps) * profile.fec_rate)
    ctx = _PointContext(
        profile=profile,
        layout=layout,
        psets=pilot_sets(layout, mode.n_tx),
        n_cbps=n_cbps,
        n_info=n_info,
        csi=cfg.csi,
        ch_cfg=replace(cfg.channel, snr_db=float(snr_db)),
    )
    runner = _UNIT_RUNNERS[mode.name]
    bits = bit_errors = blocks = block_errors = 0
    unit = 0
    while block_errors < cfg.min_block_errors and blocks < cfg.max_blocks:
        outcome = runner(_unit_rng(seed, unit), ctx)
        for e in outcome.bit_errors:
            blocks += 1
            bits += outcome.bits_per_block
            bit_errors += e
            if e:
                block_errors += 1
        unit += 1
    bler = block_errors / blocks
    return LinkMetrics(
        snr_db=float(snr_db),
        mode=mode,
        profile=profile,
        bits_tested=bits,
        bit_errors=bit_errors,
        blocks_tested=blocks,
        block_errors=block_errors,
        ber=bit_errors / bits,
        bler=bler,
        throughput_bps=link_throughput(cfg.params, profile, mode, bler),
        normalized_bpshz=normalized_throughput(profile, mode, bler),
        point_seed=seed,
    )


def is_censored(metrics: LinkMetrics, min_block_errors: int) -> bool:
    """True when a point hit the block cap before enough errors.

    Censored points have trustworthy bit counts but an optimistic BLER
    resolution limit of ``1 / blocks_tested``.
    """
    return metrics.block_errors < min_block_errors


def _sweep_job(args) -> tuple[LinkMetrics | None, str | None]:
    cfg, mode_name, profile_name, snr = args
    try:
        return run_point(cfg, mode_name, profile_name, snr), None
    except Exception as exc:
        return None, f"{mode_name}/{profile_name} at {snr} dB: {exc!r}"


def run_sweep(
    cfg: SimConfig,
    n_workers: int | None = None,
    progress: Callable[[LinkMetrics], None] | None = None,
) -> SweepResult:
    """Measure every (mode, profile, SNR) triple of the configuration.

    Points are independent by construction (each derives its own seed),
    so ``n_workers > 1`` distributes them over processes with results
    identical to a serial run.  A failing point is logged and skipped;
    the sweep completes the rest.
    """
    jobs = [
        (cfg, m, p, s) for m in cfg.modes for p in cfg.profiles for s in cfg.snr_db
    ]
    if n_workers is not None and n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_sweep_job, jobs))
        if progress is not None:
            for metrics, _ in outcomes:
                if metrics is not None:
                    progress(metrics)
    else:
        outcomes = []
        for job in jobs:
            outcome = _sweep_job(job)
            if progress is not None and outcome[0] is not None:
                progress(outcome[0])
            outcomes.append(outcome)
    entries = []
    for metrics, err in outcomes:
        if err is not None:
            log.error("sweep point failed: %s", err)
        else:
            entries.append(metrics)
    return SweepResult(
        entries=entries,
        config_fingerprint=config_fingerprint(cfg),
        master_seed=cfg.master_seed,
    )


# --- analysis -------------------------------------------------------------


@dataclass
class SweepAnalysis:
    """Per-mode AMC envelopes plus the diversity/multiplexing crossover."""

    envelopes: dict[str, AmcEnvelope]
    switching_point_db: float | None


def analyze_sweep(result: SweepResult) -> SweepAnalysis:
    """Envelope every fully-swept mode; locate the switching point.

    Modes without all six profiles (or with no crossover) degrade to
    warnings instead of failing the analysis.
    """
    envelopes: dict[str, AmcEnvelope] = {}
    for mode_name in result.modes():
        try:
            envelopes[mode_name] = amc_envelope(result, mode_name)
        except ValueError as exc:
            log.warning("no AMC envelope for %s: %s", mode_name, exc)
    switching = None
    if "stbc" in envelopes and "sm" in envelopes:
        try:
            switching = ams_switching_point(envelopes["stbc"], envelopes["sm"])
        except ValueError as exc:
            log.warning("no switching point: %s", exc)
    return SweepAnalysis(envelopes=envelopes, switching_point_db=switching)


# --- CSV ------------------------------------------------------------------

CSV_COLUMNS = (
    "snr_db",
    "mode",
    "modulation",
    "fec_rate",
    "bits_tested",
    "bit_errors",
    "blocks_tested",
    "block_errors",
    "ber",
    "bler",
    "throughput_bps",
    "normalized_bpshz",
    "seed",
)


def emit_csv(result: SweepResult, path: str | Path) -> Path:
    """Write one row per point, ordered by (mode, profile, SNR).

    Floats are written with ``repr`` so parsing the file reconstructs
    them bit-exactly; rates appear as fractions (``3/4``).  UTF-8, LF
    line endings.
    """
    if not result.entries:
        raise ValueError("refusing to write an empty sweep")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for m in result.entries:
            rate = m.profile.fec_rate
            writer.writerow(
                [
                    repr(m.snr_db),
                    m.mode.name,
                    m.profile.modulation,
                    f"{rate.numerator}/{rate.denominator}",
                    m.bits_tested,
                    m.bit_errors,
                    m.blocks_tested,
                    m.block_errors,
                    repr(m.ber),
                    repr(m.bler),
                    repr(m.throughput_bps),
                    repr(m.normalized_bpshz),
                    m.point_seed,
                ]
            )
    return path


def read_csv(path: str | Path) -> SweepResult:
    """Parse a sweep CSV back into a :class:`SweepResult`.

    The numeric fields round-trip exactly; the configuration
    fingerprint is not stored in the file and comes back empty.
    """
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != list(CSV_COLUMNS):
            raise ValueError(f"{path}: unexpected header {header}")
        entries = []
        for row in reader:
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"{path}: malformed row {row}")
            (
                snr,
                mode_name,
                modulation,
                rate,
                bits,
                bit_err,
                blocks,
                blk_err,
                ber,
                bler,
                thr,
                norm,
                seed,
            ) = row
            entries.append(
                LinkMetrics(
                    snr_db=float(snr),
                    mode=mimo_mode(mode_name),
                    profile=burst_profile(f"{modulation}-{rate}"),
                    bits_tested=int(bits),
                    bit_errors=int(bit_err),
                    blocks_tested=int(blocks),
                    block_errors=int(blk_err),
                    ber=float(ber),
                    bler=float(bler),
                    throughput_bps=float(thr),
                    normalized_bpshz=float(norm),
                    point_seed=int(seed),
                )
            )
    return SweepResult(entries=entries)


def emit_envelope_csv(analysis: SweepAnalysis, path: str | Path) -> Path:
    """Write the per-mode AMC envelope table (raw and smoothed)."""
    if not analysis.envelopes:
        raise ValueError("no envelopes to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            (
                "mode",
                "snr_db",
                "best_profile",
                "throughput_bps",
                "normalized_bpshz",
                "smooth_bpshz",
            )
        )
        for mode_name in sorted(analysis.envelopes):
            env = analysis.envelopes[mode_name]
            for i, snr in enumerate(env.snr_db):
                writer.writerow(
                    [
                        mode_name,
                        repr(float(snr)),
                        env.best_profile[i],
                        repr(float(env.throughput_bps[i])),
                        repr(float(env.normalized_bpshz[i])),
                        repr(float(env.smooth_bpshz[i])),
                    ]
                )
    return path


# --- plots ----------------------------------------------------------------


def _plotted_ber(m: LinkMetrics) -> float:
    # zero-error points sit at the resolution floor, never at 0, so log
    # axes stay defined
    return m.ber if m.ber > 0 else 1.0 / m.bits_tested


def _write_curve_data(path: Path, snr: np.ndarray, curves: dict[str, np.ndarray]):
    names = list(curves)
    table = np.column_stack([snr] + [np.asarray(curves[n], float) for n in names])
    np.savetxt(path, table, header="snr_db " + " ".join(names))


def emit_plots(
    result: SweepResult, analysis: SweepAnalysis, path_prefix: str | Path
) -> list[Path]:
    """Render the sweep as figures plus plain-text curve data.

    For a full three-mode sweep this writes six SVG files — BER of the
    diversity comparison (single antenna vs Alamouti), BER of the
    multiplexing mode, one throughput figure per mode, and the AMC
    envelope overlay with the switching point marked — each with a
    ``.txt`` twin holding the plotted numbers.  Sweeps covering fewer
    modes get the subset that applies.
    """
    if not result.entries:
        raise ValueError("nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(path_prefix)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    present = result.modes()

    def save(fig, stem: str, snr, curves):
        svg = outdir / f"{stem}.svg"
        fig.savefig(svg)
        plt.close(fig)
        txt = outdir / f"{stem}.txt"
        _write_curve_data(txt, snr, curves)
        written.extend([svg, txt])

    styles = {"siso": "-", "stbc": "--", "sm": "-"}

    def ber_figure(stem: str, modes: list[str], title: str):
        modes = [m for m in modes if m in present]
        if not modes:
            return
        fig, ax = plt.subplots(figsize=(7, 5))
        curves: dict[str, np.ndarray] = {}
        snr_axis = None
        for mode_name in modes:
            for prof in result.profiles(mode_name):
                pts = result.curve(mode_name, prof)
                snr = np.array([m.snr_db for m in pts])
                ber = np.array([_plotted_ber(m) for m in pts])
                snr_axis = snr if snr_axis is None else snr_axis
                if snr.shape == snr_axis.shape and np.all(snr == snr_axis):
                    curves[f"{mode_name}:{prof}"] = ber
                ax.semilogy(snr, ber, styles.get(mode_name, "-"), label=f"{mode_name} {prof}")
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("BER")
        ax.set_title(title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=7, ncol=2)
        save(fig, stem, snr_axis, curves)

    ber_figure(
        "fig_ber_diversity",
        ["siso", "stbc"],
        "BER: single antenna vs 2x2 Alamouti",
    )
    ber_figure("fig_ber_multiplexing", ["sm"], "BER: 2x2 spatial multiplexing (MMSE)")

    for mode_name in present:
        fig, ax = plt.subplots(figsize=(7, 5))
        curves = {}
        snr_axis = None
        for prof in result.profiles(mode_name):
            pts = result.curve(mode_name, prof)
            snr = np.array([m.snr_db for m in pts])
            thr = np.array([m.throughput_bps for m in pts]) / 1e6
            snr_axis = snr if snr_axis is None else snr_axis
            if snr.shape == snr_axis.shape and np.all(snr == snr_axis):
                curves[prof] = thr
            ax.plot(snr, thr, label=prof)
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("throughput (Mbit/s)")
        ax.set_title(f"link throughput, {mode_name}")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        save(fig, f"fig_throughput_{mode_name}", snr_axis, curves)

    envs = analysis.envelopes
    if "stbc" in envs and "sm" in envs:
        fig, ax = plt.subplots(figsize=(7, 5))
        curves = {}
        for mode_name in ("siso", "stbc", "sm"):
            if mode_name not in envs:
                continue
            env = envs[mode_name]
            ax.plot(env.snr_db, env.normalized_bpshz, alpha=0.25)
            ax.plot(env.snr_db, env.smooth_bpshz, label=f"{mode_name} envelope")
            curves[mode_name] = env.smooth_bpshz
        if analysis.switching_point_db is not None:
            ax.axvline(analysis.switching_point_db, color="k", linestyle=":")
            ax.annotate(
                f"switch {analysis.switching_point_db:.1f} dB",
                (analysis.switching_point_db, ax.get_ylim()[1] * 0.5),
                rotation=90,
                va="center",
                fontsize=8,
            )
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("normalized throughput (bps/Hz)")
        ax.set_title("AMC envelopes and diversity/multiplexing switch")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        save(fig, "fig_amc_switching", envs["stbc"].snr_db, curves)

    return written
