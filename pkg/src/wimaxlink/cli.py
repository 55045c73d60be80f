"""Command-line front end: ``simulate``, ``analyze`` and ``selftest``.

``simulate`` runs a configured sweep and writes the CSV, figures and
envelope analysis into the output directory.  ``analyze`` re-derives
the envelope analysis and figures from an existing sweep CSV, so slow
simulation and fast plotting iterate independently.  ``selftest`` runs
a battery of fast structural checks (transform round trips, coder
inversions, noiseless loopback, determinism) and reports one line per
check.  Exit status is 0 on success and 1 on any failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bitsource, fec, mapping, ofdm
from .harness import (
    SimConfig,
    analyze_sweep,
    config_from_mapping,
    emit_csv,
    emit_envelope_csv,
    emit_plots,
    load_config,
    read_csv,
    run_point,
    run_sweep,
)
from .params import BURST_PROFILES, MIMO_MODES, OfdmaParams, validate

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wimaxlink",
        description=(
            "Link-level Monte-Carlo simulator for a 512-subcarrier OFDMA "
            "downlink with single-antenna, Alamouti and spatial-multiplexing "
            "modes under adaptive modulation and coding."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep and write CSV + figures")
    sim.add_argument("--config", required=True, help="key = value config file")
    sim.add_argument("--modes", help="comma list, e.g. siso,stbc,sm")
    sim.add_argument("--profiles", help="comma list, e.g. qpsk-1/2,64qam-3/4")
    sim.add_argument("--snr", help="grid as start:step:stop in dB")
    sim.add_argument("--seed", type=int, help="master seed override")
    sim.add_argument("--out", help="output directory override")
    sim.add_argument("--csi", choices=["perfect", "pilot"], help="receiver CSI")

    an = sub.add_parser("analyze", help="envelope analysis of an existing sweep")
    an.add_argument("--in", dest="in_path", required=True, help="sweep CSV")
    an.add_argument("--out", required=True, help="output directory")

    sub.add_parser("selftest", help="run fast invariant checks")
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    overrides: dict[str, str] = {}
    if args.modes:
        overrides["modes"] = args.modes
    if args.profiles:
        overrides["profiles"] = args.profiles
    if args.snr:
        parts = args.snr.split(":")
        if len(parts) != 3:
            raise ValueError(f"--snr wants start:step:stop, got {args.snr!r}")
        overrides["snr_start"], overrides["snr_step"], overrides["snr_stop"] = parts
    if args.seed is not None:
        overrides["master_seed"] = str(args.seed)
    if args.out:
        overrides["out_dir"] = args.out
    if args.csi:
        overrides["csi"] = args.csi
    cfg = config_from_mapping(overrides, base=cfg)

    def progress(m):
        flag = "" if m.block_errors >= cfg.min_block_errors else "  (censored)"
        print(
            f"{m.mode.name:<5} {m.profile.name:<10} {m.snr_db:6.1f} dB  "
            f"ber={m.ber:.3e}  bler={m.bler:.3e}{flag}"
        )

    result = run_sweep(cfg, progress=progress)
    if not result.entries:
        print("error: every sweep point failed", file=sys.stderr)
        return 1
    out = Path(cfg.out_dir)
    csv_path = emit_csv(result, out / "sweep.csv")
    analysis = analyze_sweep(result)
    files = emit_plots(result, analysis, out)
    if analysis.envelopes:
        emit_envelope_csv(analysis, out / "amc_envelope.csv")
    if analysis.switching_point_db is not None:
        (out / "switching_point.txt").write_text(
            f"{analysis.switching_point_db:.3f}\n", encoding="utf-8"
        )
        print(f"diversity/multiplexing switching point: "
              f"{analysis.switching_point_db:.2f} dB")
    print(f"wrote {csv_path.name} and {len(files)} plot/data files to {out}/")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    result = read_csv(args.in_path)
    analysis = analyze_sweep(result)
    out = Path(args.out)
    files = emit_plots(result, analysis, out)
    if analysis.envelopes:
        emit_envelope_csv(analysis, out / "amc_envelope.csv")
    if analysis.switching_point_db is not None:
        (out / "switching_point.txt").write_text(
            f"{analysis.switching_point_db:.3f}\n", encoding="utf-8"
        )
        print(f"diversity/multiplexing switching point: "
              f"{analysis.switching_point_db:.2f} dB")
    elif "stbc" in analysis.envelopes and "sm" in analysis.envelopes:
        print("no diversity/multiplexing crossover in the swept range")
    print(f"wrote {len(files)} plot/data files to {out}/")
    return 0


# --- selftest -------------------------------------------------------------


def _check_numerology():
    problems = validate(OfdmaParams())
    assert not problems, problems


def _check_grid_partition():
    layout = ofdm.grid_layout(OfdmaParams())
    roles = layout.roles()
    counts = {r: int(np.count_nonzero(roles == r)) for r in ("data", "pilot", "guard", "dc")}
    assert counts == {"data": 360, "pilot": 60, "guard": 91, "dc": 1}, counts


def _check_transform_round_trip():
    rng = np.random.default_rng(7)
    grid = rng.standard_normal(512) + 1j * rng.standard_normal(512)
    back = ofdm.ofdm_demodulate(ofdm.ofdm_modulate(grid))
    err = np.max(np.abs(back - grid))
    assert err < 1e-12, f"round-trip error {err:.2e}"


def _check_interleaver_inverts():
    rng = np.random.default_rng(11)
    for profile in BURST_PROFILES:
        n = 360 * profile.bits_per_symbol
        block = rng.integers(0, 2, n).astype(np.uint8)
        back = fec.deinterleave(
            fec.interleave(block, n, profile.bits_per_symbol),
            n,
            profile.bits_per_symbol,
        )
        assert np.array_equal(back, block), profile.name


def _check_coder_round_trip():
    rng = np.random.default_rng(13)
    for profile in BURST_PROFILES:
        n_info = int(360 * profile.bits_per_symbol * profile.fec_rate)
        info = rng.integers(0, 2, n_info).astype(np.uint8)
        coded = fec.puncture(fec.cc_encode(info), profile.fec_rate)
        llrs = np.where(coded > 0, -1.0, 1.0)
        decoded = fec.viterbi_decode(fec.depuncture(llrs, profile.fec_rate))
        assert np.array_equal(decoded, info), profile.name


def _check_scrambler_involution():
    bits = bitsource.generate(3, 1000)
    assert np.array_equal(bitsource.derandomize(bitsource.randomize(bits)), bits)


def _quick_config() -> SimConfig:
    return SimConfig(min_block_errors=1, max_blocks=4)


def _check_noiseless_loopback():
    cfg = _quick_config()
    for mode in MIMO_MODES:
        for prof in ("qpsk-1/2", "64qam-3/4"):
            m = run_point(cfg, mode.name, prof, math.inf)
            assert m.bit_errors == 0, f"{mode.name}/{prof}: {m.bit_errors} bit errors"


def _check_determinism():
    cfg = _quick_config()
    a = run_point(cfg, "stbc", "16qam-1/2", 10.0)
    b = run_point(cfg, "stbc", "16qam-1/2", 10.0)
    assert a == b, "same seed produced different metrics"


def _check_csv_round_trip():
    cfg = SimConfig(
        modes=("siso",),
        profiles=("qpsk-1/2",),
        snr_db=(0.0, 10.0),
        min_block_errors=1,
        max_blocks=2,
    )
    result = run_sweep(cfg)
    with tempfile.TemporaryDirectory() as tmp:
        path = emit_csv(result, Path(tmp) / "sweep.csv")
        back = read_csv(path)
    assert back.entries == result.entries, "CSV round trip changed the data"


def _check_demapper_sign():
    profile = BURST_PROFILES[0]
    bits = np.array([0, 0, 0, 1, 1, 0, 1, 1], dtype=np.uint8)
    syms = mapping.map_bits(bits, profile)
    llr = mapping.demap_soft(syms, 0.5, profile)
    hard = (llr < 0).astype(np.uint8)
    assert np.array_equal(hard, bits)


_CHECKS = (
    ("numerology consistency", _check_numerology),
    ("grid role partition", _check_grid_partition),
    ("transform round trip", _check_transform_round_trip),
    ("interleaver inversion", _check_interleaver_inverts),
    ("coder round trip", _check_coder_round_trip),
    ("scrambler involution", _check_scrambler_involution),
    ("demapper sign convention", _check_demapper_sign),
    ("noiseless loopback", _check_noiseless_loopback),
    ("point determinism", _check_determinism),
    ("csv round trip", _check_csv_round_trip),
)


def _cmd_selftest() -> int:
    failures = 0
    for name, check in _CHECKS:
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"ok   {name}")
    if failures:
        print(f"{failures} of {len(_CHECKS)} checks failed")
        return 1
    print(f"all {len(_CHECKS)} checks passed")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_selftest()
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
